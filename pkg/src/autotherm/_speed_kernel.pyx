# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernel for Schatten norms of reduced qubit-state derivatives.

Same contract as ``_speed_kernel_py.derivative_norms`` restricted to
``dim == 2``; the dispatcher in ``autotherm.kernels`` falls back to the
numpy implementation for other dimensions.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, sqrt, fabs, pow, isinf

cnp.import_array()


def derivative_norms(cnp.ndarray[cnp.float64_t, ndim=1] freqs,
                     cnp.ndarray[cnp.complex128_t, ndim=2] coeffs,
                     cnp.ndarray[cnp.float64_t, ndim=1] times,
                     double p, int dim):
    if dim != 2:
        raise ValueError("compiled kernel only handles qubit reductions")
    cdef Py_ssize_t K = freqs.shape[0]
    cdef Py_ssize_t T = times.shape[0]
    if coeffs.shape[0] != 4 or coeffs.shape[1] != K:
        raise ValueError("coeffs must have shape (4, K)")
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(T, dtype=np.float64)
    cdef double[:] fv = freqs
    cdef complex[:, :] cv = coeffs
    cdef double[:] tv = times
    cdef double[:] ov = out
    cdef Py_ssize_t i, k
    cdef double t, ph, cr, ci
    cdef double a, d, c01r, c01i, c10r, c10i, cr_, ci_
    cdef double mean, disc, l1, l2, m1, m2, top
    cdef complex z00, z01, z10, z11, w

    for i in range(T):
        t = tv[i]
        z00 = 0; z01 = 0; z10 = 0; z11 = 0
        for k in range(K):
            ph = -fv[k] * t
            w = cos(ph) + 1j * sin(ph)
            z00 = z00 + cv[0, k] * w
            z01 = z01 + cv[1, k] * w
            z10 = z10 + cv[2, k] * w
            z11 = z11 + cv[3, k] * w
        a = z00.real
        d = z11.real
        # hermitize the off-diagonal pair
        cr_ = 0.5 * (z01.real + z10.real)
        ci_ = 0.5 * (z01.imag - z10.imag)
        mean = 0.5 * (a + d)
        disc = sqrt(0.25 * (a - d) * (a - d) + cr_ * cr_ + ci_ * ci_)
        l1 = mean + disc
        l2 = mean - disc
        m1 = fabs(l1)
        m2 = fabs(l2)
        if p == 1.0:
            ov[i] = m1 + m2
        elif p == 2.0:
            ov[i] = sqrt(m1 * m1 + m2 * m2)
        elif isinf(p):
            ov[i] = m1 if m1 > m2 else m2
        else:
            top = m1 if m1 > m2 else m2
            if top == 0.0:
                ov[i] = 0.0
            else:
                ov[i] = top * pow(pow(m1 / top, p) + pow(m2 / top, p), 1.0 / p)
    return out
