"""Speed-limit quantities: Schatten distances, time-averaged derivative
norms, per-subsystem and combined limit times, and the inequality audits
tying them to the entropy ledger.

The combined time uses dimension weights ``w_x = d_x^(1 - 1/p) ln d_x`` over
the system and memory. Its product with the capacity bound telescopes to a
pure distance expression, which the audits use directly; the quadrature-based
form is exposed through :func:`qtsl_time` and checked against the distance
form by the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import evolution_for
from .errors import ParameterError
from .hamiltonian import MEMORY, SYSTEM, Scenario
from .quadrature import QuadratureConfig, adaptive_gauss
from .states import DensityMatrix, relative_entropy
from .tensor import partial_trace, schatten_norm
from .thermo import ledger

#: Averaged norms below this leave the speed-limit time undefined (nan).
LAMBDA_FLOOR = 1e-12

#: Additive constant of the entropy-continuity bound.
TWO_OVER_E = 2.0 / math.e


@dataclass(frozen=True)
class QtslReport:
    """Every order-p speed-limit quantity at one ``(p, tau)`` point.

    Undefined ratios (frozen dynamics) are reported as ``nan``. Margins are
    ``bound - value`` and are expected nonnegative up to numerical noise.
    """

    p: float
    tau: float
    dist_s: float
    dist_m: float
    lambda_s: float
    lambda_m: float
    t_s: float
    t_m: float
    lambda_star: float
    t_star: float
    b_star: float
    fannes_margin: float
    dynamical_landauer_margin: float
    hypothesis_margin: float
    quadrature_error_estimate: float


def schatten_distance(rho1: DensityMatrix, rho2: DensityMatrix, p: float) -> float:
    """``|| rho1 - rho2 ||_p``."""
    if not rho1.op.same_layout(rho2.op):
        raise ParameterError("states must share a layout")
    return schatten_norm(rho1.op - rho2.op, p)


def _subsystem_distance(scenario: Scenario, label: str, p: float, tau: float) -> float:
    ev = evolution_for(scenario)
    before = DensityMatrix(partial_trace(ev.rho0.op, [label]), _validate=False)
    return schatten_distance(ev.reduced_state(tau, label), before, p)


def time_averaged_norm(
    scenario: Scenario, label: str, p: float, tau: float,
    quad: QuadratureConfig | None = None,
) -> tuple[float, float]:
    """Time average of ``||d rho_label / dt||_p`` over ``[0, tau]``.

    Returns ``(value, error_estimate)`` with the quadrature error estimate
    scaled by ``1/tau`` like the value itself.
    """
    if tau <= 0:
        raise ParameterError(f"averaging window must be positive, got tau={tau}")
    ev = evolution_for(scenario)

    def integrand(ts: np.ndarray) -> np.ndarray:
        return ev.derivative_norms(label, ts, p)

    value, err = adaptive_gauss(integrand, 0.0, tau, quad)
    return value / tau, err / tau


def qsl_time(scenario: Scenario, label: str, p: float, tau: float,
             quad: QuadratureConfig | None = None) -> float:
    """Distance traveled over average speed; ``nan`` when the subsystem is
    frozen (average norm at or below the floor)."""
    lam, _ = time_averaged_norm(scenario, label, p, tau, quad)
    if lam <= LAMBDA_FLOOR:
        return math.nan
    return _subsystem_distance(scenario, label, p, tau) / lam


def _weight(scenario: Scenario, label: str, p: float) -> float:
    d = scenario.layout.dim_of(label)
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    return d ** (1.0 - inv_p) * math.log(d)


def _sm_dimension_factor(scenario: Scenario, p: float) -> tuple[float, float]:
    d = scenario.layout.dim_of(SYSTEM) * scenario.layout.dim_of(MEMORY)
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    return d ** (1.0 - inv_p), math.log(d)


def distance_capacity_product(scenario: Scenario, p: float, tau: float) -> float:
    """``sum_x w_x ell_p,x`` over system and memory.

    Algebraically identical to the product of the combined speed-limit time
    with the capacity bound; needs no quadrature and is well defined even
    for frozen dynamics and at ``tau = 0``.
    """
    total = 0.0
    for lab in (SYSTEM, MEMORY):
        total += _weight(scenario, lab, p) * _subsystem_distance(scenario, lab, p, tau)
    return total


def qtsl_time(scenario: Scenario, p: float, tau: float,
              quad: QuadratureConfig | None = None) -> QtslReport:
    """Full speed-limit report at ``(p, tau)``, including the bound audits."""
    if tau <= 0:
        raise ParameterError(f"tau must be positive, got {tau}")
    dists = {}
    lams = {}
    errs = 0.0
    for lab in (SYSTEM, MEMORY):
        dists[lab] = _subsystem_distance(scenario, lab, p, tau)
        lam, err = time_averaged_norm(scenario, lab, p, tau, quad)
        lams[lab] = lam
        errs += err
    w = {lab: _weight(scenario, lab, p) for lab in (SYSTEM, MEMORY)}
    t_sub = {lab: (dists[lab] / lams[lab] if lams[lab] > LAMBDA_FLOOR else math.nan)
             for lab in (SYSTEM, MEMORY)}
    dim_fac, log_d = _sm_dimension_factor(scenario, p)
    weighted_lam = sum(w[lab] * lams[lab] for lab in (SYSTEM, MEMORY))
    weighted_dist = sum(w[lab] * dists[lab] for lab in (SYSTEM, MEMORY))
    lambda_star = weighted_lam / (dim_fac * log_d)
    if weighted_lam > LAMBDA_FLOOR:
        t_star = weighted_dist / weighted_lam
    else:
        t_star = math.nan
    b_star = log_d * dim_fac * lambda_star
    fannes, dyn, hyp = _audit_margins(scenario, p, tau)
    return QtslReport(
        p=p, tau=tau,
        dist_s=dists[SYSTEM], dist_m=dists[MEMORY],
        lambda_s=lams[SYSTEM], lambda_m=lams[MEMORY],
        t_s=t_sub[SYSTEM], t_m=t_sub[MEMORY],
        lambda_star=lambda_star, t_star=t_star, b_star=b_star,
        fannes_margin=fannes, dynamical_landauer_margin=dyn,
        hypothesis_margin=hyp, quadrature_error_estimate=errs,
    )


def bekenstein_bound(scenario: Scenario, p: float, tau: float,
                     quad: QuadratureConfig | None = None) -> float:
    """Capacity bound ``ln(d) d^(1-1/p) Lambda*`` over the system-memory block."""
    weighted = 0.0
    for lab in (SYSTEM, MEMORY):
        lam, _ = time_averaged_norm(scenario, lab, p, tau, quad)
        weighted += _weight(scenario, lab, p) * lam
    return weighted


def _audit_margins(scenario: Scenario, p: float, tau: float) -> tuple[float, float, float]:
    led = ledger(scenario, tau)
    product = distance_capacity_product(scenario, p, tau)
    fannes = product + TWO_OVER_E - abs(led.dS_s + led.dS_m)
    rhs = product + TWO_OVER_E
    lhs = led.rel_entropy_tau + scenario.beta * led.Q_eff
    dyn = rhs - lhs
    return fannes, dyn, dyn


def fannes_audit(scenario: Scenario, p: float, tau: float) -> float:
    """Margin of the entropy-continuity bound:
    ``sum_x w_x ell_x + 2/e - |dS_s + dS_m|``."""
    return _audit_margins(scenario, p, tau)[0]


def dynamical_landauer_audit(scenario: Scenario, p: float, tau: float) -> float:
    """Margin of the dynamical erasure bound:
    ``T* B* + 2/e - S(rho || sigma) - beta Q_eff``."""
    return _audit_margins(scenario, p, tau)[1]


def hypothesis_testing_bound(scenario: Scenario, p: float,
                             tau: float) -> tuple[float, float, float]:
    """Asymptotic discrimination exponent against the weak-coupling
    reference, its speed-limit upper bound, and the margin.

    The exponent is the relative entropy between the evolved state and the
    reference (the asymptotic error rate of the optimal test); it can be
    infinite for hand-built states with mismatched supports, in which case
    the bound stays finite and the margin is ``-inf``.
    """
    ev = evolution_for(scenario)
    exponent = relative_entropy(ev.total_state(tau), ev.weak_coupling_reference(tau))
    led = ledger(scenario, tau)
    product = distance_capacity_product(scenario, p, tau)
    bound = product + TWO_OVER_E - scenario.beta * led.Q_eff
    margin = bound - exponent if math.isfinite(exponent) else -math.inf
    return exponent, bound, margin
