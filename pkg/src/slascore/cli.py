"""``sla-score``: normalize transcripts, score them, or run the prompt-tuning demo."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from .normalization import (
    DEFAULT_ABBREVS,
    DEFAULT_LEXICON,
    AbbreviationTable,
    HesitationLexicon,
    RawText,
    get_profile,
    normalize,
)
from .scoring import (
    ALL_PROFILES,
    EmptyIntersection,
    ScoreOptions,
    TranscriptError,
    dumps,
    read_transcripts,
    render_report,
    score_corpus,
    validate,
)

EXIT_OK, EXIT_PARSE, EXIT_EMPTY, EXIT_DIVERGED = 0, 2, 3, 4

log = logging.getLogger("slascore")


def _profiles(choice: str) -> tuple[str, ...]:
    return ALL_PROFILES if choice == "all" else (choice,)


def _resources(args) -> tuple[HesitationLexicon, AbbreviationTable]:
    lexicon = HesitationLexicon.from_file(args.lexicon) if args.lexicon else DEFAULT_LEXICON
    abbrevs = AbbreviationTable.from_file(args.abbrev) if args.abbrev else DEFAULT_ABBREVS
    return lexicon, abbrevs


def _write(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def cmd_normalize(args) -> int:
    if args.profile == "all":
        raise SystemExit("normalize takes a single profile")
    lexicon, abbrevs = _resources(args)
    profile = get_profile(args.profile, args.raw_case_sensitive)
    items = read_transcripts(args.input)
    lines = []
    for uid, text in items.items():
        toks = normalize(RawText(uid, text), profile, lexicon, abbrevs).text()
        lines.append(f"{uid}\t{toks}" if args.keep_ids else toks)
    _write("".join(line + "\n" for line in lines), args.out)
    return EXIT_OK


def cmd_score(args) -> int:
    lexicon, abbrevs = _resources(args)
    opts = ScoreOptions(
        profiles=_profiles(args.profile),
        recall=args.recall,
        match=args.match,
        agg=args.agg,
        raw_case_sensitive=args.raw_case_sensitive,
        lexicon=lexicon,
        abbrevs=abbrevs,
    )
    report = score_corpus(read_transcripts(args.ref), read_transcripts(args.hyp), opts)
    validate(report)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "score.json").write_text(dumps(report), encoding="utf-8")
        (out / "score.txt").write_text(render_report(report), encoding="utf-8")
    if args.format in ("json", "both"):
        sys.stdout.write(dumps(report))
    if args.format in ("table", "both"):
        sys.stdout.write(render_report(report))
    return EXIT_OK


def cmd_spt_demo(args) -> int:
    from .spt.demo import DemoConfig, run_demo

    cfg = replace(DemoConfig(), seed=args.seed, mode=args.mode, m=args.prompts)
    if args.beam is not None:
        cfg = replace(cfg, beam_width=args.beam)
    report = run_demo(args.out, cfg)
    validate(report, "demo_report.schema.json")
    sys.stdout.write(Path(args.out, "report.txt").read_text(encoding="utf-8"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sla-score", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add_text_options(sp, profile_choices):
        sp.add_argument("--profile", choices=profile_choices, default=profile_choices[-1])
        sp.add_argument("--raw-case-sensitive", action="store_true",
                        help="do not case-fold under the raw profile")
        sp.add_argument("--lexicon", metavar="PATH", help="extra hesitation forms, one per line")
        sp.add_argument("--abbrev", metavar="PATH", help="spoken<TAB>written abbreviation pairs")

    n = sub.add_parser("normalize", help="print normalized tokens, one utterance per line")
    n.add_argument("input")
    add_text_options(n, ["raw", "standard", "speech"])
    n.add_argument("--keep-ids", action="store_true", help="prefix each line with its utterance id")
    n.add_argument("--out", metavar="FILE")
    n.set_defaults(func=cmd_normalize)

    s = sub.add_parser("score", help="WER per profile and optional word-type recall")
    s.add_argument("ref")
    s.add_argument("hyp")
    add_text_options(s, ["raw", "standard", "speech", "all"])
    s.add_argument("--recall", action="store_true", help="add the word-type recall table")
    s.add_argument("--match", choices=["occurrence", "alignment"], default="occurrence")
    s.add_argument("--agg", choices=["pooled", "averaged"], default="pooled")
    s.add_argument("--format", choices=["json", "table", "both"], default="both")
    s.add_argument("--out", metavar="DIR", help="also write score.json and score.txt here")
    s.set_defaults(func=cmd_score)

    d = sub.add_parser("spt-demo", help="toy recognizer: written-form pretraining, then prompt tuning")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--out", metavar="DIR", default="spt_demo_out")
    d.add_argument("--mode", choices=["spt", "ft"], default="spt")
    d.add_argument("--prompts", type=int, choices=[1, 5, 20, 100], default=20)
    d.add_argument("--beam", type=int, default=None, help="beam width (default 5)")
    d.set_defaults(func=cmd_spt_demo)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    level = os.environ.get("SLA_SCORE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TranscriptError as e:
        print(f"sla-score: {e}", file=sys.stderr)
        return EXIT_PARSE
    except EmptyIntersection as e:
        print(f"sla-score: {e}", file=sys.stderr)
        return EXIT_EMPTY
    except Exception as e:
        from .spt.train import DivergenceDetected
        from .spt.model import LengthOverflow

        if isinstance(e, DivergenceDetected):
            print(f"sla-score: training diverged: {e}", file=sys.stderr)
            return EXIT_DIVERGED
        if isinstance(e, LengthOverflow):
            print(f"sla-score: {e}", file=sys.stderr)
            return EXIT_PARSE
        raise


if __name__ == "__main__":
    sys.exit(main())
