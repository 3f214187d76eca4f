"""Kernel backend selection: compiled extension or pure-Python fallback.

Set CHAPTERSEG_PURE_PYTHON=1 to force the fallback (used by the
benchmark to compare both backends).
"""

import os

if os.environ.get("CHAPTERSEG_PURE_PYTHON"):
    from . import _kernels_py as _backend
else:
    try:
        from . import _kernels as _backend  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _backend

BACKEND = _backend.BACKEND
pair_overlaps = _backend.pair_overlaps
density_at_gaps = _backend.density_at_gaps
dp_place = _backend.dp_place
