"""Stepping backend selection: compiled extension with pure-python fallback.

The compiled kernel is preferred when importable; set ``MGTSIM_BACKEND=python``
to force the fallback (used by the backend-equivalence tests and benchmark).
"""

import os

from . import _kernel_py

if os.environ.get("MGTSIM_BACKEND", "").lower() == "python":
    _impl = _kernel_py
    BACKEND = "python"
else:
    try:
        from . import _kernel as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:  # pragma: no cover - depends on build environment
        _impl = _kernel_py
        BACKEND = "python"

advance = _impl.advance

N_WORK_ROWS = 22
