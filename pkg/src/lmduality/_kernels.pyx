# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Signatures mirror :mod:`lmduality._fallback`."""
import numpy as np

from libc.math cimport cos, sin


def rk4_linear(const double[:, ::1] A, const double[::1] y0, double dt, Py_ssize_t nsteps):
    """Classical RK4 for the autonomous linear system ``y' = A y``.

    Returns an ``(nsteps + 1, n)`` array whose first row is ``y0``.
    """
    cdef Py_ssize_t n = y0.shape[0]
    if A.shape[0] != n or A.shape[1] != n:
        raise ValueError("generator shape does not match state size")
    if n > 8:
        raise ValueError("kernel supports state dimension <= 8")
    out_arr = np.empty((nsteps + 1, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double y[8]
    cdef double k1[8]
    cdef double k2[8]
    cdef double k3[8]
    cdef double k4[8]
    cdef double tmp[8]
    cdef double acc
    cdef double half = 0.5 * dt
    cdef double sixth = dt / 6.0
    cdef Py_ssize_t s, i, j

    for i in range(n):
        y[i] = y0[i]
        out[0, i] = y0[i]
    for s in range(1, nsteps + 1):
        for i in range(n):
            acc = 0.0
            for j in range(n):
                acc = acc + A[i, j] * y[j]
            k1[i] = acc
        for i in range(n):
            tmp[i] = y[i] + half * k1[i]
        for i in range(n):
            acc = 0.0
            for j in range(n):
                acc = acc + A[i, j] * tmp[j]
            k2[i] = acc
        for i in range(n):
            tmp[i] = y[i] + half * k2[i]
        for i in range(n):
            acc = 0.0
            for j in range(n):
                acc = acc + A[i, j] * tmp[j]
            k3[i] = acc
        for i in range(n):
            tmp[i] = y[i] + dt * k3[i]
        for i in range(n):
            acc = 0.0
            for j in range(n):
                acc = acc + A[i, j] * tmp[j]
            k4[i] = acc
        for i in range(n):
            y[i] = y[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            out[s, i] = y[i]
    return out_arr


def link_product(const double[::1] a, double dt):
    """Ordered product of the unimodular links ``exp(i dt a_j)``."""
    cdef double re = 1.0, im = 0.0, c, s_, nre
    cdef Py_ssize_t j
    for j in range(a.shape[0]):
        c = cos(dt * a[j])
        s_ = sin(dt * a[j])
        nre = re * c - im * s_
        im = re * s_ + im * c
        re = nre
    return complex(re, im)
