# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled composition-sum kernels.

Every objective in the package has the form

    F(x) = sum_c phi_c * (w2 * ln(1 + B_c . x) - A_c . x**2)

with ``w2 = W * log2(e)``.  Sums over compositions use Neumaier compensation.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport log1p, fabs, NAN

cnp.import_array()


cdef inline void _neumaier(double *s, double *c, double v) noexcept nogil:
    cdef double t = s[0] + v
    if fabs(s[0]) >= fabs(v):
        c[0] += (s[0] - t) + v
    else:
        c[0] += (v - t) + s[0]
    s[0] = t


def logquad_eval(const double[::1] phi, const double[:, ::1] B, const double[:, ::1] A,
                 const double[::1] x, double w2):
    cdef Py_ssize_t n = B.shape[0], k = B.shape[1], i, j
    cdef double t, quad, inv, p
    cdef double vs = 0.0, vc = 0.0
    grad = np.zeros(k, dtype=np.float64)
    comp = np.zeros(k, dtype=np.float64)
    cdef double[::1] gs = grad
    cdef double[::1] gc = comp
    with nogil:
        for i in range(n):
            p = phi[i]
            t = 0.0
            quad = 0.0
            for j in range(k):
                t += B[i, j] * x[j]
                quad += A[i, j] * x[j] * x[j]
            if t <= -1.0:
                vs = NAN
                break
            inv = w2 / (1.0 + t)
            _neumaier(&vs, &vc, p * (w2 * log1p(t) - quad))
            for j in range(k):
                _neumaier(&gs[j], &gc[j], p * (B[i, j] * inv - 2.0 * A[i, j] * x[j]))
    if vs != vs:
        grad[:] = np.nan
        return float("nan"), grad
    return vs + vc, grad + comp


def logquad_hess(const double[::1] phi, const double[:, ::1] B, const double[:, ::1] A,
                 const double[::1] x, double w2):
    cdef Py_ssize_t n = B.shape[0], k = B.shape[1], i, j, l
    cdef double t, s, sb
    hess = np.zeros((k, k), dtype=np.float64)
    cdef double[:, ::1] H = hess
    with nogil:
        for i in range(n):
            t = 0.0
            for j in range(k):
                t += B[i, j] * x[j]
            s = phi[i] * w2 / ((1.0 + t) * (1.0 + t))
            for j in range(k):
                H[j, j] -= 2.0 * phi[i] * A[i, j]
                # count tables are sparse; only the upper triangle is accumulated
                if B[i, j] == 0.0:
                    continue
                sb = s * B[i, j]
                for l in range(j, k):
                    H[j, l] -= sb * B[i, l]
        for j in range(k):
            for l in range(j + 1, k):
                H[l, j] = H[j, l]
    return hess


def reciprocal_sum(const double[::1] phi, const double[::1] s, double offset, double scale):
    """sum_c phi_c / (offset + scale * s_c)."""
    cdef Py_ssize_t n = s.shape[0], i
    cdef double acc = 0.0, c = 0.0
    with nogil:
        for i in range(n):
            _neumaier(&acc, &c, phi[i] / (offset + scale * s[i]))
    return acc + c
