"""Kernel selection: compiled extension when available, numpy otherwise.

Set ``AUTOTHERM_PURE_PYTHON=1`` to force the numpy implementation even when
the compiled extension is importable (used by the kernel benchmark and by
tests that compare the two).
"""

from __future__ import annotations

import os

import numpy as np

from . import _speed_kernel_py

try:  # pragma: no cover - exercised only when the extension was built
    from . import _speed_kernel as _compiled
except ImportError:  # pragma: no cover
    _compiled = None

HAVE_COMPILED = _compiled is not None


def _forced_pure() -> bool:
    return os.environ.get("AUTOTHERM_PURE_PYTHON", "") not in ("", "0")


def active_kernel_name() -> str:
    return "compiled" if (HAVE_COMPILED and not _forced_pure()) else "python"


def derivative_norms(freqs: np.ndarray, coeffs: np.ndarray, times: np.ndarray,
                     p: float, dim: int) -> np.ndarray:
    """Dispatch to the fastest available implementation (see module docs)."""
    if dim == 2 and HAVE_COMPILED and not _forced_pure():
        return _compiled.derivative_norms(
            np.ascontiguousarray(freqs, dtype=float),
            np.ascontiguousarray(coeffs, dtype=complex),
            np.ascontiguousarray(times, dtype=float),
            float(p), dim)
    return _speed_kernel_py.derivative_norms(freqs, coeffs, times, p, dim)
