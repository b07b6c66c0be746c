"""Selects the compiled alignment kernel when built, else the pure-Python one.

Set ``SLASCORE_PURE_PYTHON=1`` to force the fallback.
"""

import os

BACKEND = "python"

if os.environ.get("SLASCORE_PURE_PYTHON", "") not in ("", "0"):
    from ._kernel_py import edit_distance, edit_ops
else:
    try:
        from ._kernel_c import edit_distance, edit_ops

        BACKEND = "cython"
    except ImportError:
        from ._kernel_py import edit_distance, edit_ops

__all__ = ["BACKEND", "edit_distance", "edit_ops"]
