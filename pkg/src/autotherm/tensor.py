"""Dense multipartite linear algebra: products, partial trace and transpose,
Schatten norms, Hermitian spectral calculus and operator Schmidt decompositions.

All functions are pure and treat their inputs as immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ContractError, LayoutError, ParameterError
from .layout import CompositeOperator, SubsystemLayout

#: Relative Hermiticity tolerance used by spectral routines.
HERM_TOL = 1e-10
#: Reconstruction tolerance for eigendecompositions.
EIG_TOL = 1e-12
#: Relative weight below which operator Schmidt terms are dropped.
SCHMIDT_TOL = 1e-12


@dataclass(frozen=True)
class SchmidtTerm:
    """One term of an operator Schmidt decomposition.

    ``weight * left (x) right`` with both factors of unit Hilbert-Schmidt
    norm; terms come sorted by descending weight.
    """

    weight: float
    left: CompositeOperator
    right: CompositeOperator


def tensor_product(a: CompositeOperator, b: CompositeOperator) -> CompositeOperator:
    """Kronecker product with ``a`` on the slow (first) factor."""
    layout = a.layout.concat(b.layout)
    return CompositeOperator(np.kron(a.matrix, b.matrix), layout, _validate=False)


def tensor_many(ops: Sequence[CompositeOperator]) -> CompositeOperator:
    out = ops[0]
    for op in ops[1:]:
        out = tensor_product(out, op)
    return out


def partial_trace(op: CompositeOperator, keep: Iterable[str]) -> CompositeOperator:
    """Trace out every factor not named in ``keep``.

    The kept factors stay in their original layout order and the total trace
    is preserved.
    """
    keep = list(keep)
    if not keep:
        raise LayoutError("partial_trace needs at least one kept label")
    positions = set(op.layout.positions(keep))
    t = op.as_tensor()
    n = len(op.layout)
    ndim_left = n
    for ax in sorted(set(range(n)) - positions, reverse=True):
        t = np.trace(t, axis1=ax, axis2=ax + ndim_left)
        ndim_left -= 1
    sub = op.layout.restrict(keep)
    return CompositeOperator(t.reshape(sub.dim, sub.dim), sub, _validate=False)


def partial_transpose(op: CompositeOperator, subset: Iterable[str]) -> CompositeOperator:
    """Transpose the row/column indices of the chosen factors only."""
    positions = op.layout.positions(list(subset))
    n = len(op.layout)
    perm = list(range(2 * n))
    for p in positions:
        perm[p], perm[p + n] = perm[p + n], perm[p]
    D = op.dim
    m = op.as_tensor().transpose(perm).reshape(D, D)
    return CompositeOperator(m, op.layout, _validate=False)


def permute_subsystems(op: CompositeOperator, order: Sequence[str]) -> CompositeOperator:
    """Reorder the tensor factors to ``order`` (a permutation of the labels)."""
    if sorted(order) != sorted(op.layout.labels):
        raise LayoutError(f"{order!r} is not a permutation of {op.layout.labels}")
    src = op.layout.positions(order)
    n = len(op.layout)
    perm = list(src) + [p + n for p in src]
    new_layout = SubsystemLayout(tuple(op.layout.entries[p] for p in src))
    D = op.dim
    return CompositeOperator(op.as_tensor().transpose(perm).reshape(D, D), new_layout,
                             _validate=False)


def schatten_norm(op: CompositeOperator | np.ndarray, p: float) -> float:
    """Schatten p-norm ``(sum_i s_i^p)^(1/p)`` over singular values.

    ``p = inf`` gives the largest singular value. Requires ``p >= 1``.
    """
    if p != math.inf and p < 1:
        raise ParameterError(f"Schatten norm needs p >= 1, got {p}")
    m = op.matrix if isinstance(op, CompositeOperator) else np.asarray(op)
    s = np.linalg.svd(m, compute_uv=False)
    return _schatten_from_singulars(s, p)


def _schatten_from_singulars(s: np.ndarray, p: float) -> float:
    s = np.abs(s)
    if p == math.inf:
        return float(s.max(initial=0.0))
    if p == 1:
        return float(s.sum())
    if p == 2:
        return float(np.sqrt((s * s).sum()))
    smax = s.max(initial=0.0)
    if smax == 0.0:
        return 0.0
    return float(smax * ((s / smax) ** p).sum() ** (1.0 / p))


def spectral_norm(op: CompositeOperator | np.ndarray) -> float:
    return schatten_norm(op, math.inf)


def trace_norm(op: CompositeOperator | np.ndarray) -> float:
    return schatten_norm(op, 1)


def hermitian_eig(op: CompositeOperator) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition ``A = V diag(w) V^dag`` of a Hermitian operator.

    Returns eigenvalues in ascending order and the unitary of eigenvectors.
    Rejects inputs whose Hermiticity residual exceeds ``HERM_TOL`` relative
    to the spectral norm.
    """
    m = op.matrix
    scale = float(np.linalg.norm(m, 2))
    resid = op.hermiticity_residual()
    if resid > HERM_TOL * max(scale, 1.0):
        raise ContractError(
            f"operator is not Hermitian: residual {resid:.3e} exceeds "
            f"{HERM_TOL:.1e} * {max(scale, 1.0):.3e}"
        )
    w, v = np.linalg.eigh((m + m.conj().T) / 2.0)
    return w, v


def evolution_operator(h: CompositeOperator, t: float) -> CompositeOperator:
    """Unitary ``exp(-i h t)`` computed through the eigendecomposition of ``h``."""
    w, v = hermitian_eig(h)
    u = (v * np.exp(-1j * w * t)) @ v.conj().T
    return CompositeOperator(u, h.layout, _validate=False)


def commutator(a: CompositeOperator, b: CompositeOperator) -> CompositeOperator:
    return a @ b - b @ a


def operator_schmidt(
    h: CompositeOperator,
    cut: tuple[Sequence[str], Sequence[str]],
    tol: float = SCHMIDT_TOL,
) -> list[SchmidtTerm]:
    """Decompose ``h`` as ``sum_j weight_j * A_j (x) B_j`` across a bipartition.

    Uses the realignment of the matrix into a ``d_left^2 x d_right^2``
    rectangle followed by an SVD. Terms with weight below ``tol`` times the
    leading weight are dropped.
    """
    left_labels, right_labels = list(cut[0]), list(cut[1])
    if sorted(left_labels + right_labels) != sorted(h.layout.labels):
        raise LayoutError(
            f"cut {cut!r} does not partition layout labels {h.layout.labels}"
        )
    op = permute_subsystems(h, left_labels + right_labels)
    dl = math.prod(op.layout.dims[: len(left_labels)])
    dr = op.dim // dl
    left_layout = op.layout.restrict(left_labels)
    right_layout = op.layout.restrict(right_labels)

    # Realign M[(i k),(j l)] -> R[(i j),(k l)].
    r = (op.matrix.reshape(dl, dr, dl, dr)
         .transpose(0, 2, 1, 3)
         .reshape(dl * dl, dr * dr))
    u, s, vh = np.linalg.svd(r, full_matrices=False)
    terms: list[SchmidtTerm] = []
    cutoff = tol * (s[0] if len(s) else 0.0)
    for k, weight in enumerate(s):
        if weight <= cutoff:
            break
        left = CompositeOperator(u[:, k].reshape(dl, dl), left_layout, _validate=False)
        right = CompositeOperator(vh[k, :].reshape(dr, dr), right_layout, _validate=False)
        terms.append(SchmidtTerm(float(weight), left, right))
    return terms


def schmidt_reconstruct(terms: Sequence[SchmidtTerm]) -> CompositeOperator:
    out = None
    for t in terms:
        piece = t.weight * tensor_product(t.left, t.right)
        out = piece if out is None else out + piece
    if out is None:
        raise ParameterError("cannot reconstruct from an empty term list")
    return out
