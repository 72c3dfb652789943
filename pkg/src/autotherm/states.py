"""Density matrices: constructors and entropy functionals.

Entropies are in nats throughout (natural logarithm, k_B = 1).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ContractError, LayoutError, ParameterError
from .layout import MEMORY, SYSTEM, CompositeOperator, SubsystemLayout
from .tensor import hermitian_eig

#: Eigenvalues below this are treated as exact zeros in entropy sums.
EIG_FLOOR = 1e-14
#: Probability mass tolerated on a reference state's numerical kernel
#: before a relative entropy is declared infinite.
SUPPORT_TOL = 1e-10

_DENSITY_TOL = 1e-10

_KET0 = np.array([1.0, 0.0], dtype=complex)
_KET1 = np.array([0.0, 1.0], dtype=complex)
_KPLUS = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
_KMINUS = np.array([1.0, -1.0], dtype=complex) / math.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated quantum state on a layout."""

    op: CompositeOperator
    _validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        if self._validate:
            m = self.op.matrix
            herm = float(np.abs(m - m.conj().T).max())
            if herm > _DENSITY_TOL:
                raise ContractError(f"state is not Hermitian (residual {herm:.3e})")
            tr = complex(np.trace(m))
            if abs(tr - 1.0) > _DENSITY_TOL:
                raise ContractError(f"state trace is {tr}, expected 1")
            wmin = float(np.linalg.eigvalsh(m).min())
            if wmin < -_DENSITY_TOL:
                raise ContractError(f"state has negative eigenvalue {wmin:.3e}")

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, layout: SubsystemLayout,
                    validate: bool = True) -> "DensityMatrix":
        return cls(CompositeOperator(matrix, layout), _validate=validate)

    @property
    def matrix(self) -> np.ndarray:
        return self.op.matrix

    @property
    def layout(self) -> SubsystemLayout:
        return self.op.layout

    @property
    def dim(self) -> int:
        return self.op.dim

    def purity(self) -> float:
        m = self.matrix
        return float(np.trace(m @ m).real)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


class WernerBasis(enum.Enum):
    """Product bases available for the rank-1 projector of a Werner-like state."""

    ZX = "zx"
    XX = "xx"


def gibbs_state(h: CompositeOperator, beta: float) -> DensityMatrix:
    """Thermal state ``exp(-beta h) / Z``.

    The spectrum is shifted by its maximum before exponentiating so large
    ``beta`` cannot overflow.
    """
    if beta <= 0:
        raise ParameterError(f"inverse temperature must be positive, got {beta}")
    w, v = hermitian_eig(h)
    shifted = -beta * (w - w.min())
    weights = np.exp(shifted)
    weights /= weights.sum()
    m = (v * weights) @ v.conj().T
    return DensityMatrix(CompositeOperator(m, h.layout, _validate=False), _validate=False)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """``-tr(rho ln rho)`` in nats, with ``0 ln 0 = 0``."""
    w = rho.eigenvalues()
    w = w[w > EIG_FLOOR]
    return float(-(w * np.log(w)).sum())


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Quantum relative entropy ``S(rho || sigma) = -S(rho) - tr(rho ln sigma)``.

    Evaluated in ``sigma``'s eigenbasis. If ``rho`` places more than
    ``SUPPORT_TOL`` probability on ``sigma``'s numerical kernel the result
    is ``math.inf``; otherwise the kernel directions are projected out.
    Nonnegative up to numerical noise.
    """
    if not rho.op.same_layout(sigma.op):
        raise LayoutError("relative entropy needs states on the same layout")
    w_sig, v_sig = np.linalg.eigh(sigma.matrix)
    occupancy = np.einsum("ij,jk,ki->i", v_sig.conj().T, rho.matrix, v_sig).real
    kernel = w_sig < EIG_FLOOR
    if float(occupancy[kernel].sum()) > SUPPORT_TOL:
        return math.inf
    supported = ~kernel
    cross = float((occupancy[supported] * np.log(w_sig[supported])).sum())
    return -von_neumann_entropy(rho) - cross


def pure_state_from_amplitudes(
    amps: Sequence[complex] | np.ndarray,
    layout: SubsystemLayout,
    normalize: bool = False,
) -> DensityMatrix:
    """Rank-1 projector ``|psi><psi|`` from an amplitude vector."""
    psi = np.asarray(amps, dtype=complex).reshape(-1)
    if psi.shape[0] != layout.dim:
        raise LayoutError(f"amplitude length {psi.shape[0]} != layout dimension {layout.dim}")
    norm = float(np.linalg.norm(psi))
    if norm < 1e-12:
        raise ParameterError("amplitude vector is (numerically) zero")
    if normalize:
        psi = psi / norm
    elif abs(norm - 1.0) > 1e-10:
        raise ParameterError(f"amplitudes are not normalized (norm {norm}); "
                             "pass normalize=True to rescale")
    return DensityMatrix(CompositeOperator(np.outer(psi, psi.conj()), layout),
                         _validate=False)


def cmaybe_state(theta: float) -> DensityMatrix:
    """Pure two-qubit state produced by a controlled partial flip in the
    +/- basis, on ``system (x) memory``.

    The control qubit is the system: the ``|->`` branch leaves the memory in
    ``|->`` while the ``|+>`` branch rotates it to
    ``cos(theta)|-> + sin(theta)|+>``. At ``theta = 0`` the state is the
    product ``|0> (x) |->``; at ``theta = pi/2`` it is maximally entangled.
    """
    target = math.cos(theta) * _KMINUS + math.sin(theta) * _KPLUS
    psi = (np.kron(_KMINUS, _KMINUS) + np.kron(_KPLUS, target)) / math.sqrt(2.0)
    layout = SubsystemLayout.qubits(SYSTEM, MEMORY)
    return pure_state_from_amplitudes(psi, layout, normalize=True)


def werner_like_state(lam: float, phi: float, basis: WernerBasis) -> DensityMatrix:
    """Mixture of the maximally mixed two-qubit state with a rank-1 projector,
    ``(1 - lam)/4 * 1 + lam |psi(phi)><psi(phi)|`` on ``system (x) memory``.

    ``WernerBasis.ZX`` uses ``cos(phi)|0>|+> + sin(phi)|1>|->`` and
    ``WernerBasis.XX`` uses ``cos(phi)|+>|+> + sin(phi)|->|->``.
    """
    if not 0.0 <= lam <= 1.0:
        raise ParameterError(f"mixing parameter must lie in [0, 1], got {lam}")
    basis = WernerBasis(basis)
    if basis is WernerBasis.ZX:
        psi = math.cos(phi) * np.kron(_KET0, _KPLUS) + math.sin(phi) * np.kron(_KET1, _KMINUS)
    else:
        psi = math.cos(phi) * np.kron(_KPLUS, _KPLUS) + math.sin(phi) * np.kron(_KMINUS, _KMINUS)
    m = (1.0 - lam) / 4.0 * np.eye(4, dtype=complex) + lam * np.outer(psi, psi.conj())
    layout = SubsystemLayout.qubits(SYSTEM, MEMORY)
    return DensityMatrix(CompositeOperator(m, layout), _validate=False)


def werner_separability_edge(phi: float) -> float:
    """Mixing parameter below which the Werner-like family stays separable.

    Recorded as metadata for sweep annotations; nothing in the numerical
    pipeline consumes it.
    """
    return 1.0 / (1.0 + 2.0 * abs(math.sin(2.0 * phi)))
