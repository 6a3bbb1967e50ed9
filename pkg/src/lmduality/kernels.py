"""Backend selection for the hot loops.

The compiled extension is preferred. Set ``LMDUALITY_PURE_PYTHON=1`` before
import to force the numpy fallback (the benchmark and the cross-check tests
call both directly through :data:`BACKENDS`).
"""
import os

from . import _fallback

BACKENDS = {"python": _fallback}

try:
    from . import _kernels
except ImportError:  # extension not built
    _kernels = None
else:
    BACKENDS["compiled"] = _kernels

if _kernels is not None and os.environ.get("LMDUALITY_PURE_PYTHON") != "1":
    BACKEND = "compiled"
else:
    BACKEND = "python"

_impl = BACKENDS[BACKEND]
rk4_linear = _impl.rk4_linear
link_product = _impl.link_product

__all__ = ["BACKEND", "BACKENDS", "rk4_linear", "link_product"]
