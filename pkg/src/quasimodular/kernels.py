"""Backend selection for the exact-arithmetic kernels.

The compiled extension ``_ckernels`` is used when it was built; otherwise the
pure-Python module ``_pykernels`` is loaded.  Setting ``QUASIMODULAR_PURE=1``
forces the pure-Python backend.
"""

import os

from quasimodular import _pykernels as python_backend

compiled_backend = None
if not os.environ.get("QUASIMODULAR_PURE"):
    try:
        from quasimodular import _ckernels as compiled_backend
    except ImportError:  # extension not built
        compiled_backend = None

_impl = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

mul_terms = _impl.mul_terms
derive_terms = _impl.derive_terms
convolve = _impl.convolve

__all__ = ["BACKEND", "mul_terms", "derive_terms", "convolve",
           "python_backend", "compiled_backend"]
