"""Pick the kernel implementation at import time.

The compiled ``_ckernels`` module is preferred. Set ``SIEP_PURE_PYTHON=1``
to force the numpy fallback.
"""
import os

from . import _pykernels

BACKENDS = {"python": _pykernels}

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None
else:
    BACKENDS["cython"] = _ckernels

if os.environ.get("SIEP_PURE_PYTHON", "") not in ("", "0") or _ckernels is None:
    BACKEND = "python"
else:
    BACKEND = "cython"

kernels = BACKENDS[BACKEND]
