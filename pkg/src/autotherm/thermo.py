"""Heat, work, entropy accounting and the erasure-cost identities.

Sign conventions: heat and work are positive when the bath or work source
releases energy into the rest of the composite, matching the order
``tr{(rho - E(rho)) H}``. Entropies are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import Evolution, evolution_for
from .hamiltonian import BATH, MEMORY, SYSTEM, WORK, Scenario
from .states import DensityMatrix, relative_entropy, von_neumann_entropy
from .tensor import partial_trace

#: Absolute tolerance for the ledger identities at desk scale.
LEDGER_TOL = 1e-8


@dataclass(frozen=True)
class ThermoLedger:
    """All ledger quantities for one scenario at one time.

    ``delta_rel`` is reported as ``nan`` with ``delta_rel_available=False``
    when either relative entropy is infinite; ``second_law_lhs`` (the
    decomposed form) is always defined.
    """

    tau: float
    Q: float
    W: float
    dE: float
    dS_s: float
    dS_m: float
    dS_w: float
    delta_rel: float
    delta_rel_available: bool
    second_law_lhs: float
    Q_eff: float
    landauer_gap: float
    landauer_margin: float
    mi0: float
    rel_entropy_tau: float
    first_law_residual: float
    second_law_residual: float
    memory_energy_residual: float
    energy_conservation_residual: float


def _local_energy(ev: Evolution, label: str, state: DensityMatrix) -> float:
    h = ev.scenario.bare_block(label)
    return float(np.trace(state.matrix @ h).real)


def heat(scenario: Scenario, tau: float) -> float:
    """Energy released by the bath up to ``tau``."""
    ev = evolution_for(scenario)
    before = DensityMatrix(partial_trace(ev.rho0.op, [BATH]), _validate=False)
    after = ev.reduced_state(tau, BATH)
    return _local_energy(ev, BATH, before) - _local_energy(ev, BATH, after)


def work(scenario: Scenario, tau: float) -> float:
    """Energy released by the work source up to ``tau``."""
    ev = evolution_for(scenario)
    after = ev.reduced_state(tau, WORK)
    return _local_energy(ev, WORK, scenario.initial_work) - _local_energy(ev, WORK, after)


def internal_energy_change(scenario: Scenario, tau: float) -> float:
    """Bare-energy gain of the principal system up to ``tau``."""
    ev = evolution_for(scenario)
    before = DensityMatrix(partial_trace(ev.rho0.op, [SYSTEM]), _validate=False)
    after = ev.reduced_state(tau, SYSTEM)
    return _local_energy(ev, SYSTEM, after) - _local_energy(ev, SYSTEM, before)


def memory_energy_change(scenario: Scenario, tau: float) -> float:
    """Bare-energy change of the memory; a residual that vanishes for an
    ideal (fully degenerate) memory Hamiltonian."""
    ev = evolution_for(scenario)
    before = DensityMatrix(partial_trace(ev.rho0.op, [MEMORY]), _validate=False)
    after = ev.reduced_state(tau, MEMORY)
    return _local_energy(ev, MEMORY, before) - _local_energy(ev, MEMORY, after)


def first_law_residual(scenario: Scenario, tau: float) -> float:
    """``|dE - Q - W|``; may be genuinely nonzero when the bare energy is
    not conserved, which callers should check separately."""
    return abs(internal_energy_change(scenario, tau) - heat(scenario, tau) - work(scenario, tau))


def entropy_changes(scenario: Scenario, tau: float) -> tuple[float, float, float]:
    ev = evolution_for(scenario)
    out = []
    for lab in (SYSTEM, MEMORY, WORK):
        before = DensityMatrix(partial_trace(ev.rho0.op, [lab]), _validate=False)
        after = ev.reduced_state(tau, lab)
        out.append(von_neumann_entropy(after) - von_neumann_entropy(before))
    return out[0], out[1], out[2]


def initial_mutual_information(scenario: Scenario) -> float:
    """Tripartite mutual information of the initial non-work block,
    ``S(b) + S(s) + S(m) - S(bsm)``."""
    wbar = scenario.initial_wbar
    total = von_neumann_entropy(wbar)
    parts = 0.0
    for lab in (BATH, SYSTEM, MEMORY):
        parts += von_neumann_entropy(DensityMatrix(partial_trace(wbar.op, [lab]),
                                                   _validate=False))
    return parts - total


def _relative_entropy_to_reference(ev: Evolution, tau: float) -> float:
    return relative_entropy(ev.total_state(tau), ev.weak_coupling_reference(tau))


def second_law_residual(scenario: Scenario, tau: float) -> float:
    """Distance between the entropy-balance combination and the change of
    relative entropy to the weak-coupling reference."""
    led = ledger(scenario, tau)
    if not led.delta_rel_available:
        raise ValueError(
            "relative entropy of the evolved state with respect to the "
            "reference is infinite (the reference's support does not cover "
            "the state); the decomposed form is available as "
            "ThermoLedger.second_law_lhs")
    return led.second_law_residual


def landauer_quantities(scenario: Scenario, tau: float) -> tuple[float, float, float]:
    """``(Q_eff, gap, margin)``: effective heat, deviation of the erasure
    equality from zero, and the bound margin (nonnegative up to noise)."""
    led = ledger(scenario, tau)
    return led.Q_eff, led.landauer_gap, led.landauer_margin


def ledger(scenario: Scenario, tau: float) -> ThermoLedger:
    """Evaluate every ledger quantity at one time."""
    ev = evolution_for(scenario)
    beta = scenario.beta
    q = heat(scenario, tau)
    w_ = work(scenario, tau)
    de = internal_energy_change(scenario, tau)
    ds_s, ds_m, ds_w = entropy_changes(scenario, tau)
    mi0 = initial_mutual_information(scenario)
    rel0 = _relative_entropy_to_reference(ev, 0.0)
    rel_tau = _relative_entropy_to_reference(ev, tau)
    available = math.isfinite(rel0) and math.isfinite(rel_tau)
    delta_rel = rel_tau - rel0 if available else math.nan
    lhs = ds_s + ds_m - beta * q
    q_eff = q - rel0 / beta if math.isfinite(rel0) else math.nan
    if available:
        gap = ds_s + ds_m - beta * q_eff - rel_tau
        margin = ds_s + ds_m - beta * q_eff
        second_res = abs(lhs - delta_rel)
    else:
        gap = math.nan
        margin = math.nan
        second_res = math.nan
    from .hamiltonian import check_energy_conservation

    return ThermoLedger(
        tau=tau, Q=q, W=w_, dE=de, dS_s=ds_s, dS_m=ds_m, dS_w=ds_w,
        delta_rel=delta_rel, delta_rel_available=available,
        second_law_lhs=lhs, Q_eff=q_eff, landauer_gap=gap, landauer_margin=margin,
        mi0=mi0, rel_entropy_tau=rel_tau,
        first_law_residual=abs(de - q - w_),
        second_law_residual=second_res,
        memory_energy_residual=abs(memory_energy_change(scenario, tau)),
        energy_conservation_residual=check_energy_conservation(ev.built),
    )


LEDGER_COLUMNS = [
    "tau", "Q", "W", "dE", "dS_s", "dS_m", "dS_w", "delta_rel", "Q_eff",
    "gap", "margin", "mi0", "first_law_residual", "second_law_residual",
    "memory_energy_residual", "energy_conservation_residual",
]


def ledger_row(led: ThermoLedger) -> list[float]:
    return [led.tau, led.Q, led.W, led.dE, led.dS_s, led.dS_m, led.dS_w,
            led.delta_rel, led.Q_eff, led.landauer_gap, led.landauer_margin,
            led.mi0, led.first_law_residual, led.second_law_residual,
            led.memory_energy_residual, led.energy_conservation_residual]
