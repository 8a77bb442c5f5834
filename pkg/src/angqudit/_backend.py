"""Kernel backend selection.

The compiled Cython extension is used when it imports; otherwise the numpy
fallback is used. Set ``ANGQUDIT_PURE_PYTHON=1`` to force the fallback.
"""

import os
import warnings

from . import _pykernels

python_kernels = _pykernels
compiled_kernels = None

if os.environ.get("ANGQUDIT_PURE_PYTHON", "") not in ("", "0"):
    kernels = _pykernels
else:
    try:
        from . import _ckernels as compiled_kernels
    except ImportError as exc:  # pragma: no cover - depends on build
        warnings.warn(f"angqudit: compiled kernels unavailable ({exc}); using numpy fallback")
        kernels = _pykernels
    else:
        kernels = compiled_kernels

BACKEND = "cython" if kernels is compiled_kernels else "python"
