"""Backend selection for the hot compute core.

Tries the compiled Cython extension first and falls back to the numpy
implementation; set SHAKHOVSPEC_NO_EXT=1 to force the fallback (used by
the backend-agreement tests and the benchmark).
"""
from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("SHAKHOVSPEC_NO_EXT"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND: str = _impl.BACKEND_NAME

factor_fields = _impl.factor_fields
dz_table = _impl.dz_table

# resolvent_entries is cold-path; always the numpy implementation
resolvent_entries = _kernels_py.resolvent_entries
