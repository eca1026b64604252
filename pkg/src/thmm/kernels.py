"""Kernel dispatch: compiled extension when built, numpy fallback otherwise.

Set ``THMM_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("THMM_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"

horner_batch = _impl.horner_batch
sandwich_coeffs = _impl.sandwich_coeffs
hankel_dense = _impl.hankel_dense

__all__ = ["BACKEND", "horner_batch", "sandwich_coeffs", "hankel_dense"]
