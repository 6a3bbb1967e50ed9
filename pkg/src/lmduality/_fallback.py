"""Pure-Python implementations of the hot loops.

Used when the compiled ``_kernels`` extension is unavailable or when
``LMDUALITY_PURE_PYTHON=1`` is set. Results agree with the extension to
rounding; ``tests/test_kernels.py`` checks this.
"""
import cmath

import numpy as np


def rk4_linear(A, y0, dt, nsteps):
    """Classical RK4 for ``y' = A y``; returns ``(nsteps + 1, n)`` samples."""
    A = np.ascontiguousarray(A, dtype=np.float64)
    y = np.array(y0, dtype=np.float64)
    n = y.shape[0]
    if A.shape != (n, n):
        raise ValueError("generator shape does not match state size")
    out = np.empty((nsteps + 1, n))
    out[0] = y
    half = 0.5 * dt
    for s in range(1, nsteps + 1):
        k1 = A @ y
        k2 = A @ (y + half * k1)
        k3 = A @ (y + half * k2)
        k4 = A @ (y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[s] = y
    return out


def link_product(a, dt):
    """Ordered product of the unimodular links ``exp(i dt a_j)``."""
    w = 1.0 + 0.0j
    for aj in np.asarray(a, dtype=np.float64):
        w *= cmath.exp(1j * dt * float(aj))
    return w
