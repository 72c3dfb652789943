"""Pure-numpy kernel for Schatten norms of reduced state derivatives.

The hot loop of every time-averaged-norm quadrature: given the frequency
components of one reduced derivative,

    d(rho_x)/dt (t) viewed as a d*d vector  =  coeffs @ exp(-i freqs t),

evaluate the Schatten p-norm for a whole batch of times. A compiled
implementation with the same contract lives in ``_speed_kernel.pyx``;
``autotherm.kernels`` picks whichever is importable.
"""

from __future__ import annotations

import math

import numpy as np


def derivative_norms(freqs: np.ndarray, coeffs: np.ndarray, times: np.ndarray,
                     p: float, dim: int) -> np.ndarray:
    """Schatten p-norms of ``sum_k coeffs[:, k] exp(-i freqs[k] t)`` per time.

    ``coeffs`` has shape ``(dim*dim, K)`` and encodes a Hermitian-valued
    curve; tiny anti-Hermitian numerical noise is projected away before the
    spectrum is taken.
    """
    times = np.asarray(times, dtype=float)
    phases = np.exp(np.outer(freqs, times) * (-1j))
    vals = coeffs @ phases  # (dim*dim, T)
    if dim == 2:
        a = vals[0].real
        d = vals[3].real
        c = (vals[1] + vals[2].conj()) / 2.0
        disc = np.sqrt(((a - d) / 2.0) ** 2 + (c * c.conj()).real)
        mean = (a + d) / 2.0
        lam = np.stack([mean + disc, mean - disc])
    else:
        mats = vals.reshape(dim, dim, -1).transpose(2, 0, 1)
        mats = (mats + mats.conj().transpose(0, 2, 1)) / 2.0
        lam = np.linalg.eigvalsh(mats).T
    mags = np.abs(lam)
    if p == 1:
        return mags.sum(axis=0)
    if p == 2:
        return np.sqrt((mags * mags).sum(axis=0))
    if math.isinf(p):
        return mags.max(axis=0)
    top = mags.max(axis=0)
    top = np.where(top == 0.0, 1.0, top)
    return top * ((mags / top) ** p).sum(axis=0) ** (1.0 / p)
