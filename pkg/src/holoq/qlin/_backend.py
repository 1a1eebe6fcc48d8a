"""Kernel selection: compiled extension when importable, numpy otherwise."""

import os

from . import _pykernels

BACKEND = "python"
partial_trace = _pykernels.partial_trace
apply_local = _pykernels.apply_local

if os.environ.get("HOLOQ_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        BACKEND = "cython"
        partial_trace = _ckernels.partial_trace
        apply_local = _ckernels.apply_local
