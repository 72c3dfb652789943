"""Subsystem layouts and layout-tagged dense operators.

A layout is an ordered list of ``(label, dim)`` pairs. Composite indices are
row-major with the first entry varying slowest, matching the Kronecker
product convention ``kron(A, B)`` with ``A`` on the first factor. Every
reshape in the package goes through this module so there is exactly one
index convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Sequence

import numpy as np

from .errors import LayoutError

BATH = "bath"
SYSTEM = "system"
MEMORY = "memory"
WORK = "work"

#: Factor order used by the four-subsystem scenarios.
CANONICAL_ORDER = (BATH, SYSTEM, MEMORY, WORK)


@dataclass(frozen=True)
class SubsystemLayout:
    """Ordered collection of labelled tensor factors."""

    entries: tuple[tuple[str, int], ...]

    def __post_init__(self):
        labels = [lab for lab, _ in self.entries]
        if len(set(labels)) != len(labels):
            raise LayoutError(f"duplicate subsystem labels in {labels}")
        for lab, d in self.entries:
            if not isinstance(d, int) or d < 1:
                raise LayoutError(f"subsystem {lab!r} has invalid dimension {d!r}")

    @classmethod
    def of(cls, *entries: tuple[str, int]) -> "SubsystemLayout":
        return cls(tuple((str(lab), int(d)) for lab, d in entries))

    @classmethod
    def qubits(cls, *labels: str) -> "SubsystemLayout":
        return cls(tuple((lab, 2) for lab in labels))

    @classmethod
    def four_qubits(cls) -> "SubsystemLayout":
        return cls.qubits(*CANONICAL_ORDER)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.entries)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.entries)

    @property
    def dim(self) -> int:
        return prod(self.dims)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, label: str) -> bool:
        return label in self.labels

    def position(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LayoutError(f"unknown subsystem label {label!r}; have {self.labels}") from None

    def dim_of(self, label: str) -> int:
        return self.dims[self.position(label)]

    def positions(self, labels: Iterable[str]) -> tuple[int, ...]:
        return tuple(self.position(lab) for lab in labels)

    def restrict(self, labels: Sequence[str]) -> "SubsystemLayout":
        """Sub-layout of ``labels`` kept in this layout's order."""
        keep = set(labels)
        unknown = keep - set(self.labels)
        if unknown:
            raise LayoutError(f"unknown subsystem labels {sorted(unknown)}")
        return SubsystemLayout(tuple(e for e in self.entries if e[0] in keep))

    def concat(self, other: "SubsystemLayout") -> "SubsystemLayout":
        overlap = set(self.labels) & set(other.labels)
        if overlap:
            raise LayoutError(f"labels {sorted(overlap)} appear on both sides of a product")
        return SubsystemLayout(self.entries + other.entries)


@dataclass(frozen=True, eq=False)
class CompositeOperator:
    """Square complex matrix tagged with the layout of its tensor factors."""

    matrix: np.ndarray
    layout: SubsystemLayout
    _validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        if self._validate:
            D = self.layout.dim
            if m.shape != (D, D):
                raise LayoutError(
                    f"matrix shape {m.shape} does not match layout dimension {D}"
                )

    @classmethod
    def identity(cls, layout: SubsystemLayout) -> "CompositeOperator":
        return cls(np.eye(layout.dim, dtype=complex), layout)

    @classmethod
    def zeros(cls, layout: SubsystemLayout) -> "CompositeOperator":
        return cls(np.zeros((layout.dim, layout.dim), dtype=complex), layout)

    @property
    def dim(self) -> int:
        return self.layout.dim

    def dagger(self) -> "CompositeOperator":
        return CompositeOperator(self.matrix.conj().T, self.layout, _validate=False)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def hermiticity_residual(self) -> float:
        d = self.matrix - self.matrix.conj().T
        return float(np.linalg.norm(d, 2))

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return self.hermiticity_residual() <= tol * max(1.0, _spectral_norm(self.matrix))

    def unitarity_residual(self) -> float:
        g = self.matrix.conj().T @ self.matrix - np.eye(self.dim)
        return float(np.linalg.norm(g, 2))

    def is_unitary(self, tol: float = 1e-10) -> bool:
        return self.unitarity_residual() <= tol

    def is_density(self, tol: float = 1e-10) -> bool:
        if self.hermiticity_residual() > tol:
            return False
        if abs(self.trace() - 1.0) > tol:
            return False
        return float(np.linalg.eigvalsh(self.matrix).min()) >= -tol

    def as_tensor(self) -> np.ndarray:
        """View as a rank-2n tensor, row axes first."""
        dims = self.layout.dims
        return self.matrix.reshape(dims + dims)

    def same_layout(self, other: "CompositeOperator") -> bool:
        return self.layout.entries == other.layout.entries

    def _require_same_layout(self, other: "CompositeOperator"):
        if not self.same_layout(other):
            raise LayoutError(
                f"layout mismatch: {self.layout.entries} vs {other.layout.entries}"
            )

    def __add__(self, other: "CompositeOperator") -> "CompositeOperator":
        self._require_same_layout(other)
        return CompositeOperator(self.matrix + other.matrix, self.layout, _validate=False)

    def __sub__(self, other: "CompositeOperator") -> "CompositeOperator":
        self._require_same_layout(other)
        return CompositeOperator(self.matrix - other.matrix, self.layout, _validate=False)

    def __mul__(self, scalar: complex) -> "CompositeOperator":
        return CompositeOperator(self.matrix * scalar, self.layout, _validate=False)

    __rmul__ = __mul__

    def __neg__(self) -> "CompositeOperator":
        return self * (-1.0)

    def __matmul__(self, other: "CompositeOperator") -> "CompositeOperator":
        self._require_same_layout(other)
        return CompositeOperator(self.matrix @ other.matrix, self.layout, _validate=False)


def _spectral_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, 2))
