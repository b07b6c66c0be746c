"""Transcript scoring for spoken language assessment.

Three WER profiles (raw, standard, speech), word-type recall for
hesitations, numbers, abbreviations, disfluencies and partial words, and a
small soft-prompt-tuning lab under :mod:`slascore.spt`.
"""

from ._kernel import BACKEND as KERNEL_BACKEND
from .alignment import Alignment, WerBreakdown, align, align_tokens, corpus_wer, render_rate, wer
from .normalization import (
    PROFILES,
    RAW,
    SENTINEL,
    SPEECH,
    STANDARD,
    AbbreviationTable,
    HesitationLexicon,
    NormalizationProfile,
    RawText,
    TokenStream,
    normalize,
)
from .scoring import ScoreOptions, score_corpus
from .word_types import RecallReport, WordType, parse_annotated, recall_report, tag_reference

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "PROFILES",
    "RAW",
    "SENTINEL",
    "SPEECH",
    "STANDARD",
    "AbbreviationTable",
    "Alignment",
    "HesitationLexicon",
    "NormalizationProfile",
    "RawText",
    "RecallReport",
    "ScoreOptions",
    "TokenStream",
    "WerBreakdown",
    "WordType",
    "align",
    "align_tokens",
    "corpus_wer",
    "normalize",
    "parse_annotated",
    "recall_report",
    "render_rate",
    "score_corpus",
    "tag_reference",
    "wer",
]
