"""Scenario descriptions and Hamiltonian assembly.

A scenario fixes the subsystem layout, the inverse temperature, the bare and
interaction Hamiltonian terms, and the initial states of the work source and
of the remaining block. Terms are either Pauli strings (for qubit factors)
or dense Hermitian blocks, one block per labelled factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np

from .errors import LayoutError, ParameterError, ScenarioError
from .layout import (BATH, CANONICAL_ORDER, MEMORY, SYSTEM, WORK,
                     CompositeOperator, SubsystemLayout)
from .states import DensityMatrix, WernerBasis, cmaybe_state, gibbs_state, werner_like_state
from .tensor import commutator, spectral_norm

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

#: Bath marginal of the initial state must match the thermal state this closely.
MARGINAL_TOL = 1e-9
_HERM_TOL = 1e-12


@dataclass(frozen=True)
class PauliTerm:
    """``coefficient * product of single-qubit Paulis``; omitted labels are identity."""

    coefficient: float
    factors: Mapping[str, str]

    def __post_init__(self):
        object.__setattr__(self, "factors", dict(self.factors))
        if not math.isfinite(self.coefficient):
            raise ParameterError(f"non-finite coefficient {self.coefficient}")
        for lab, p in self.factors.items():
            if p not in PAULI:
                raise ParameterError(f"unknown Pauli letter {p!r} on {lab!r}")

    def block(self, label: str, dim: int) -> np.ndarray:
        p = self.factors.get(label, "I")
        if p != "I" and dim != 2:
            raise LayoutError(f"Pauli {p!r} requested on {label!r} of dimension {dim}")
        return PAULI[p] if dim == 2 else np.eye(dim, dtype=complex)

    def labels(self):
        return self.factors.keys()


@dataclass(frozen=True)
class BlockTerm:
    """``coefficient * product of dense Hermitian blocks``, one per labelled factor."""

    coefficient: float
    blocks: Mapping[str, np.ndarray]

    def __post_init__(self):
        fixed = {}
        for lab, b in self.blocks.items():
            b = np.asarray(b, dtype=complex)
            if b.ndim != 2 or b.shape[0] != b.shape[1]:
                raise ParameterError(f"block on {lab!r} is not square")
            if np.abs(b - b.conj().T).max() > _HERM_TOL * max(1.0, np.abs(b).max()):
                raise ParameterError(f"block on {lab!r} is not Hermitian")
            fixed[lab] = b
        object.__setattr__(self, "blocks", fixed)
        if not math.isfinite(self.coefficient):
            raise ParameterError(f"non-finite coefficient {self.coefficient}")

    def block(self, label: str, dim: int) -> np.ndarray:
        b = self.blocks.get(label)
        if b is None:
            return np.eye(dim, dtype=complex)
        if b.shape != (dim, dim):
            raise LayoutError(f"block on {label!r} has shape {b.shape}, expected ({dim},{dim})")
        return b

    def labels(self):
        return self.blocks.keys()


Term = Union[PauliTerm, BlockTerm]


@dataclass(frozen=True, eq=False)
class Scenario:
    """Complete experiment description.

    ``bare_terms`` maps each subsystem label to the terms of its bare
    Hamiltonian (acting on that label only); ``interaction_terms`` maps a
    free-form coupling name to its terms. ``initial_wbar`` lives on the
    non-work block, ``initial_work`` on the work factor alone.
    """

    layout: SubsystemLayout
    beta: float
    bare_terms: Mapping[str, Sequence[Term]]
    interaction_terms: Mapping[str, Sequence[Term]]
    initial_wbar: DensityMatrix
    initial_work: DensityMatrix
    name: str = field(default="scenario", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "bare_terms",
                           {k: tuple(v) for k, v in self.bare_terms.items()})
        object.__setattr__(self, "interaction_terms",
                           {k: tuple(v) for k, v in self.interaction_terms.items()})
        if self.beta <= 0:
            raise ScenarioError(f"inverse temperature must be positive, got {self.beta}")
        missing = [lab for lab in CANONICAL_ORDER if lab not in self.layout]
        if missing:
            raise ScenarioError(f"layout is missing required subsystems {missing}")
        for lab, terms in self.bare_terms.items():
            if lab not in self.layout:
                raise ScenarioError(f"bare terms reference unknown label {lab!r}")
            for t in terms:
                extra = set(t.labels()) - {lab}
                if extra:
                    raise ScenarioError(
                        f"bare term for {lab!r} touches other labels {sorted(extra)}")
        for name, terms in self.interaction_terms.items():
            for t in terms:
                unknown = set(t.labels()) - set(self.layout.labels)
                if unknown:
                    raise ScenarioError(
                        f"interaction {name!r} references unknown labels {sorted(unknown)}")
        wbar = self.wbar_labels
        if self.initial_wbar.layout.labels != wbar:
            raise ScenarioError(
                f"initial_wbar layout {self.initial_wbar.layout.labels} != {wbar}")
        if self.initial_work.layout.labels != (WORK,):
            raise ScenarioError("initial_work must live on the work factor alone")
        self._check_bath_marginal()

    @property
    def wbar_labels(self) -> tuple[str, ...]:
        return tuple(lab for lab in self.layout.labels if lab != WORK)

    def bare_block(self, label: str) -> np.ndarray:
        """Bare Hamiltonian of one subsystem as a local dense block."""
        d = self.layout.dim_of(label)
        out = np.zeros((d, d), dtype=complex)
        for t in self.bare_terms.get(label, ()):
            out += t.coefficient * t.block(label, d)
        return out

    def _check_bath_marginal(self):
        from .tensor import partial_trace  # local import to avoid cycle at module load

        hb = self.bare_block(BATH)
        bath_layout = self.layout.restrict([BATH])
        target = gibbs_state(CompositeOperator(hb, bath_layout), self.beta)
        marginal = partial_trace(self.initial_wbar.op, [BATH])
        dev = float(np.abs(marginal.matrix - target.matrix).max())
        if dev > MARGINAL_TOL:
            raise ScenarioError(
                f"bath marginal deviates from the thermal state by {dev:.3e} "
                f"(tolerance {MARGINAL_TOL:.1e})")

    def initial_total(self) -> DensityMatrix:
        """Product ``initial_wbar (x) initial_work`` on the full layout."""
        m = np.kron(self.initial_wbar.matrix, self.initial_work.matrix)
        return DensityMatrix(CompositeOperator(m, self.layout, _validate=False),
                             _validate=False)


@dataclass(frozen=True, eq=False)
class BuiltHamiltonians:
    """Dense realizations of a scenario's Hamiltonian: total, bare, and parts."""

    h_bare: CompositeOperator
    h_total: CompositeOperator
    parts: Mapping[str, CompositeOperator]


def _realize_term(term: Term, layout: SubsystemLayout) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for lab, d in layout.entries:
        out = np.kron(out, term.block(lab, d))
    return term.coefficient * out


def build(scenario: Scenario) -> BuiltHamiltonians:
    """Realize a scenario's Hamiltonian terms as dense operators.

    ``parts`` is keyed ``"bare.<label>"`` and ``"int.<name>"``; the total is
    the entrywise sum of all parts.
    """
    layout = scenario.layout
    D = layout.dim
    parts: dict[str, CompositeOperator] = {}
    total = np.zeros((D, D), dtype=complex)
    bare = np.zeros((D, D), dtype=complex)
    for lab in layout.labels:
        terms = scenario.bare_terms.get(lab, ())
        m = np.zeros((D, D), dtype=complex)
        for t in terms:
            m += _realize_term(t, layout)
        parts[f"bare.{lab}"] = CompositeOperator(m, layout, _validate=False)
        bare += m
    for name, terms in scenario.interaction_terms.items():
        m = np.zeros((D, D), dtype=complex)
        for t in terms:
            m += _realize_term(t, layout)
        parts[f"int.{name}"] = CompositeOperator(m, layout, _validate=False)
        total += m
    total += bare
    h_bare = CompositeOperator(bare, layout, _validate=False)
    h_total = CompositeOperator(total, layout, _validate=False)
    for name, op in (("bare", h_bare), ("total", h_total)):
        resid = op.hermiticity_residual()
        if resid > 1e-12 * max(1.0, spectral_norm(op)):
            raise ScenarioError(f"{name} Hamiltonian is not Hermitian (residual {resid:.3e})")
    return BuiltHamiltonians(h_bare=h_bare, h_total=h_total, parts=parts)


def check_energy_conservation(built: BuiltHamiltonians) -> float:
    """Spectral norm of ``[H_total, H_bare]``; zero means the bare energy is conserved."""
    return spectral_norm(commutator(built.h_total, built.h_bare))


def check_ideal_memory(built: BuiltHamiltonians, label: str = MEMORY) -> tuple[bool, float]:
    """Whether the bare memory Hamiltonian is proportional to the identity.

    Returns ``(ok, deviation)`` where the deviation is the spectral distance
    of the local memory block from its best multiple of the identity.
    """
    part = built.parts.get(f"bare.{label}")
    if part is None:
        return True, 0.0
    layout = part.layout
    d = layout.dim_of(label)
    from .tensor import partial_trace

    local = partial_trace(part, [label]).matrix / (layout.dim // d)
    c = np.trace(local).real / d
    dev = float(np.linalg.norm(local - c * np.eye(d), 2))
    return dev <= 1e-12, dev


# ---------------------------------------------------------------------------
# Built-in four-qubit scenarios
# ---------------------------------------------------------------------------

def _four_qubit_terms() -> tuple[dict, dict]:
    """The diagonal four-qubit model behind every built-in scenario.

    Bare parts: Z on system, Z on bath, identity on memory, Z on work.
    Couplings: Zs*Zw, Zs*Zm and Zb*Zm. The system-bath product string is
    deliberately absent; see the builder notes in the README.
    """
    bare = {
        SYSTEM: [PauliTerm(1.0, {SYSTEM: "Z"})],
        BATH: [PauliTerm(1.0, {BATH: "Z"})],
        MEMORY: [PauliTerm(1.0, {MEMORY: "I"})],
        WORK: [PauliTerm(1.0, {WORK: "Z"})],
    }
    interactions = {
        "sw": [PauliTerm(1.0, {SYSTEM: "Z", WORK: "Z"})],
        "sm": [PauliTerm(1.0, {SYSTEM: "Z", MEMORY: "Z"})],
        "bm": [PauliTerm(1.0, {BATH: "Z", MEMORY: "Z"})],
    }
    return bare, interactions


def _thermal_bath_qubit(beta: float) -> DensityMatrix:
    layout = SubsystemLayout.qubits(BATH)
    return gibbs_state(CompositeOperator(PAULI["Z"].copy(), layout), beta)


def _work_excited() -> DensityMatrix:
    layout = SubsystemLayout.qubits(WORK)
    m = np.zeros((2, 2), dtype=complex)
    m[1, 1] = 1.0
    return DensityMatrix(CompositeOperator(m, layout), _validate=False)


def _assemble_builtin(name: str, rho_sm: DensityMatrix, beta: float = 1.0) -> Scenario:
    layout = SubsystemLayout.four_qubits()
    bare, interactions = _four_qubit_terms()
    bath = _thermal_bath_qubit(beta)
    wbar_matrix = np.kron(bath.matrix, rho_sm.matrix)
    wbar_layout = layout.restrict([BATH, SYSTEM, MEMORY])
    wbar = DensityMatrix(CompositeOperator(wbar_matrix, wbar_layout, _validate=False),
                         _validate=False)
    return Scenario(layout=layout, beta=beta, bare_terms=bare,
                    interaction_terms=interactions, initial_wbar=wbar,
                    initial_work=_work_excited(), name=name)


def builtin_scenario(name: str, *, theta: float | None = None,
                     lam: float | None = None, phi: float | None = None) -> Scenario:
    """Construct one of the built-in four-qubit scenarios.

    ``cmaybe`` takes ``theta``; ``werner_zx`` and ``werner_xx`` take ``lam``
    and ``phi``. All use ``beta = 1``, a thermal bath and an excited work qubit.
    """
    key = name.lower()
    if key == "cmaybe":
        if theta is None:
            raise ParameterError("cmaybe scenario needs theta")
        return _assemble_builtin(f"cmaybe(theta={theta!r})", cmaybe_state(theta))
    if key in ("werner_zx", "werner_xx"):
        if lam is None or phi is None:
            raise ParameterError(f"{name} scenario needs lam and phi")
        basis = WernerBasis.ZX if key == "werner_zx" else WernerBasis.XX
        rho_sm = werner_like_state(lam, phi, basis)
        return _assemble_builtin(f"{key}(lam={lam!r}, phi={phi!r})", rho_sm)
    raise ParameterError(f"unknown builtin scenario {name!r}")


def swap_counterexample(theta: float = math.pi / 3) -> Scenario:
    """Four-qubit scenario whose system-work coupling generates a SWAP.

    The exchange coupling conserves bare energy but is not a catalysis
    unitary: its partial transpose fails to be unitary and the work qubit's
    entropy drifts. Used as the negative control for the verifier.
    """
    layout = SubsystemLayout.four_qubits()
    bare = {
        BATH: [PauliTerm(1.0, {BATH: "Z"})],
        MEMORY: [PauliTerm(1.0, {MEMORY: "I"})],
    }
    interactions = {
        "sw": [PauliTerm(0.5, {SYSTEM: "X", WORK: "X"}),
               PauliTerm(0.5, {SYSTEM: "Y", WORK: "Y"}),
               PauliTerm(0.5, {SYSTEM: "Z", WORK: "Z"})],
    }
    bath = _thermal_bath_qubit(1.0)
    rho_sm = cmaybe_state(theta)
    wbar_layout = layout.restrict([BATH, SYSTEM, MEMORY])
    wbar = DensityMatrix(
        CompositeOperator(np.kron(bath.matrix, rho_sm.matrix), wbar_layout, _validate=False),
        _validate=False)
    return Scenario(layout=layout, beta=1.0, bare_terms=bare,
                    interaction_terms=interactions, initial_wbar=wbar,
                    initial_work=_work_excited(), name="swap_counterexample")
