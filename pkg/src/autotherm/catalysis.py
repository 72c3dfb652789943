"""Numerical checks that a scenario treats the work source as a catalyst.

The structural checks (compatibility, factor commutativity, power
multiplicativity of the partial transpose) and the dynamical checks
(partial-transpose unitarity, unitality of the reduced channel, entropy
preservation) are reported separately: a fixed scenario can pass the
dynamical checks while failing the structural ones, so the report never
collapses them into a single verdict.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .dynamics import evolution_for
from .errors import ContractError
from .hamiltonian import Scenario, WORK
from .layout import CompositeOperator
from .states import DensityMatrix, von_neumann_entropy
from .tensor import (commutator, operator_schmidt, partial_trace,
                     partial_transpose, spectral_norm, tensor_product, trace_norm)

#: Default pass/fail threshold on every residual.
DEFAULT_THRESHOLD = 1e-9


@dataclass(frozen=True)
class CatalysisReport:
    """Residual of every catalysis check with per-check verdicts."""

    tau: float
    n_max: int
    pt_unitarity_residual: float
    state_compatibility_residual: float
    schmidt_commutator_residual: float
    work_factor_residual: float
    power_residuals: tuple[float, ...]
    unitality_residual: float
    work_entropy_drift: float
    threshold: float = DEFAULT_THRESHOLD
    structural_checks: tuple[str, ...] = field(default=(
        "state_compatibility", "schmidt_commutators", "work_factors",
        "power_multiplicativity"), repr=False)

    def residuals(self) -> Mapping[str, float]:
        out = {
            "pt_unitarity": self.pt_unitarity_residual,
            "state_compatibility": self.state_compatibility_residual,
            "schmidt_commutators": self.schmidt_commutator_residual,
            "work_factors": self.work_factor_residual,
            "unitality": self.unitality_residual,
            "work_entropy": self.work_entropy_drift,
        }
        for n, r in enumerate(self.power_residuals, start=2):
            out[f"power_{n}"] = r
        return out

    def passes(self) -> Mapping[str, bool]:
        return {name: r <= self.threshold for name, r in self.residuals().items()}

    @property
    def all_passed(self) -> bool:
        return all(self.passes().values())

    def records(self) -> list[dict]:
        return [
            {"name": name, "residual": res, "threshold": self.threshold,
             "pass": res <= self.threshold}
            for name, res in self.residuals().items()
        ]

    def to_json(self) -> str:
        return json.dumps({"tau": self.tau, "n_max": self.n_max,
                           "checks": self.records()}, indent=2)

    def to_text(self) -> str:
        lines = [f"catalysis checks at tau={self.tau:g} (threshold {self.threshold:g})"]
        for rec in self.records():
            status = "pass" if rec["pass"] else "FAIL"
            lines.append(f"  {rec['name']:<22} {rec['residual']:.3e}  {status}")
        return "\n".join(lines)


def _wbar_labels(op: CompositeOperator) -> list[str]:
    return [lab for lab in op.layout.labels if lab != WORK]


def check_pt_unitarity(u: CompositeOperator, subset: list[str] | None = None) -> float:
    """Deviation of the partially transposed unitary from unitarity."""
    if u.unitarity_residual() > 1e-10:
        raise ContractError("input operator is not unitary")
    subset = _wbar_labels(u) if subset is None else subset
    upt = partial_transpose(u, subset)
    gram = upt.dagger() @ upt
    return spectral_norm(gram - CompositeOperator.identity(u.layout))


def check_state_compatibility(h_total: CompositeOperator, rho_w: DensityMatrix) -> float:
    """Norm of the commutator between the Hamiltonian and ``1 (x) rho_w``."""
    wbar = h_total.layout.restrict(_wbar_labels(h_total))
    lifted = tensor_product(CompositeOperator.identity(wbar), rho_w.op)
    return spectral_norm(commutator(h_total, lifted))


def check_schmidt_structure(h_total: CompositeOperator,
                            rho_w: DensityMatrix) -> tuple[float, float]:
    """Max commutator norms over the operator Schmidt factors of the
    Hamiltonian across the non-work/work cut.

    Returns ``(max ||[A_i, A_j]||, max ||[B_j, rho_w]||)`` over retained
    terms, with each factor carrying the square root of its term's weight so
    the residuals do not depend on the decomposition's normalization split.
    """
    wbar = _wbar_labels(h_total)
    terms = operator_schmidt(h_total, (wbar, [WORK]))
    lefts = [math.sqrt(t.weight) * t.left for t in terms]
    rights = [math.sqrt(t.weight) * t.right for t in terms]
    a_res = 0.0
    b_res = 0.0
    for i, right in enumerate(rights):
        b_res = max(b_res, spectral_norm(commutator(right, CompositeOperator(
            rho_w.matrix, right.layout, _validate=False))))
        for left in lefts[i + 1:]:
            a_res = max(a_res, spectral_norm(commutator(lefts[i], left)))
    return a_res, b_res


def check_power_multiplicativity(h_total: CompositeOperator, n_max: int,
                                 subset: list[str] | None = None) -> list[float]:
    """Residuals ``||(H^n)^PT - (H^PT)^n||`` for ``n = 2 .. n_max``."""
    if n_max < 2:
        raise ContractError(f"n_max must be at least 2, got {n_max}")
    subset = _wbar_labels(h_total) if subset is None else subset
    hpt = partial_transpose(h_total, subset)
    out = []
    h_pow = h_total
    hpt_pow = hpt
    for _ in range(2, n_max + 1):
        h_pow = h_pow @ h_total
        hpt_pow = hpt_pow @ hpt
        out.append(spectral_norm(partial_transpose(h_pow, subset) - hpt_pow))
    return out


def check_unitality(scenario: Scenario, tau: float) -> float:
    """Trace-norm deviation of the reduced non-work channel from unitality.

    Feeds the maximally mixed non-work state through the channel induced by
    the scenario's unitary and work state.
    """
    ev = evolution_for(scenario)
    layout = scenario.layout
    wbar = layout.restrict([lab for lab in layout.labels if lab != WORK])
    dwbar = wbar.dim
    mixed = CompositeOperator(np.eye(dwbar, dtype=complex) / dwbar, wbar, _validate=False)
    rho_in = tensor_product(mixed, scenario.initial_work.op)
    u = ev.unitary(tau)
    out = u @ rho_in @ u.dagger()
    reduced = partial_trace(out, wbar.labels)
    return trace_norm(reduced - mixed)


def check_work_entropy(scenario: Scenario, tau: float) -> float:
    """Entropy drift of the work source under the reduced evolution."""
    ev = evolution_for(scenario)
    before = von_neumann_entropy(scenario.initial_work)
    after = von_neumann_entropy(ev.reduced_state(tau, WORK))
    return abs(after - before)


def verify(scenario: Scenario, tau: float, n_max: int = 4,
           threshold: float = DEFAULT_THRESHOLD) -> CatalysisReport:
    """Run every catalysis check on a scenario at time ``tau``."""
    ev = evolution_for(scenario)
    h_total = ev.built.h_total
    rho_w = scenario.initial_work
    a_res, b_res = check_schmidt_structure(h_total, rho_w)
    return CatalysisReport(
        tau=tau,
        n_max=n_max,
        pt_unitarity_residual=check_pt_unitarity(ev.unitary(tau)),
        state_compatibility_residual=check_state_compatibility(h_total, rho_w),
        schmidt_commutator_residual=a_res,
        work_factor_residual=b_res,
        power_residuals=tuple(check_power_multiplicativity(h_total, n_max)),
        unitality_residual=check_unitality(scenario, tau),
        work_entropy_drift=check_work_entropy(scenario, tau),
        threshold=threshold,
    )
