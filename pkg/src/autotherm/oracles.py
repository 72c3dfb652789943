"""Closed-form ground truth for the built-in four-qubit scenarios.

Trace distances, time-averaged trace norms and first-order speed-limit
times for the controlled-flip and Werner-like families, plus the piecewise
trigonometric integrals and the incomplete elliptic integral of the second
kind they are built from. Every formula here is cross-validated against the
numerical pipeline by the test suite.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, ParameterError
from .quadrature import QuadratureConfig, adaptive_gauss

#: exp(1), the Boltzmann weight ratio of the thermal bath qubit at unit
#: inverse temperature. Named so an alternate-temperature generalization
#: cannot silently reuse it.
EXP1 = math.exp(1.0)

_ELLIPTIC_CFG = QuadratureConfig(abs_tol=1e-13, rel_tol=1e-13, max_depth=48)


def ellipe_incomplete(phi: float, m: float) -> float:
    """Incomplete elliptic integral of the second kind,
    ``integral_0^phi sqrt(1 - m sin^2 x) dx``.

    Evaluated by adaptive quadrature; ``m`` may be negative and ``phi`` may
    exceed ``pi/2``. The parameter combination must keep the integrand's
    radicand nonnegative on the whole domain.
    """
    if phi < 0:
        raise ParameterError(f"amplitude must be nonnegative, got {phi}")
    if m > 1.0:
        # radicand dips below zero once sin^2 x exceeds 1/m
        s, c = math.sin(phi), math.cos(phi)
        reach = 1.0 if phi >= math.pi / 2 else s * s
        if reach * m > 1.0 + 1e-15:
            raise DomainError(
                f"integrand of E[{phi} | {m}] becomes negative on the domain")

    def integrand(x: np.ndarray) -> np.ndarray:
        r = 1.0 - m * np.sin(x) ** 2
        return np.sqrt(np.maximum(r, 0.0))

    value, _ = adaptive_gauss(integrand, 0.0, phi, _ELLIPTIC_CFG)
    return value


def abs_cos_integral(tau: float) -> float:
    """``integral_0^tau |cos 2t| dt`` in closed form, continuous in ``tau``."""
    if tau < 0:
        raise ParameterError(f"tau must be nonnegative, got {tau}")
    n = math.floor(2.0 * tau / math.pi + 0.5)
    return (2.0 * n + (-1.0) ** n * math.sin(2.0 * tau)) / 2.0


def abs_sin_integral(tau: float) -> float:
    """``integral_0^tau |sin 2t| dt`` in closed form, continuous in ``tau``."""
    if tau < 0:
        raise ParameterError(f"tau must be nonnegative, got {tau}")
    n = math.floor(2.0 * tau / math.pi)
    return n + (1.0 - (-1.0) ** n * math.cos(2.0 * tau)) / 2.0


def cmaybe_closed_forms(theta: float, tau: float) -> dict[str, float]:
    """Distances, averaged norms and the order-1 combined speed-limit time
    for the controlled-flip scenario.

    Keys: ``dist_s``, ``dist_m``, ``lambda_s``, ``lambda_m``, ``t1``. The
    ratio ``t1`` is formed from the component sums so parameter points where
    a common factor of both numerator and denominator vanishes evaluate to
    the pointwise value rather than 0/0.
    """
    if tau <= 0:
        raise ParameterError(f"tau must be positive, got {tau}")
    e2 = EXP1 * EXP1
    e4 = e2 * e2
    ct, st = math.cos(theta), math.sin(theta)
    dist_s = abs(st * ct * math.sin(2.0 * tau))
    radic_dist = (2.0 * (1.0 - e4) * ct
                  + (1.0 + e4) * (3.0 + math.cos(2.0 * theta)) / 2.0
                  + 2.0 * e2 * st * st * math.cos(4.0 * tau))
    dist_m = abs(ct * math.sin(2.0 * tau)) / (1.0 + e2) * math.sqrt(max(radic_dist, 0.0))
    lam_s = 2.0 * abs(st * ct) * abs_cos_integral(tau) / tau
    pref = 1.0 + e2 + (1.0 - e2) * ct
    m_ell = (2.0 * EXP1 * st / pref) ** 2
    lam_m = (abs(ct) * pref / (2.0 * (1.0 + e2) * tau)
             * ellipe_incomplete(4.0 * tau, m_ell))
    lam_total = lam_s + lam_m
    t1 = (dist_s + dist_m) / lam_total if lam_total > 0 else math.nan
    return {"dist_s": dist_s, "dist_m": dist_m,
            "lambda_s": lam_s, "lambda_m": lam_m, "t1": t1}


def werner_zx_closed_forms(phi: float, tau: float) -> dict[str, float]:
    """Closed forms for the Werner-like scenario in the Z (x) X basis.

    Distances and averaged norms are reported at unit mixing parameter; all
    four scale exactly linearly in the mixing parameter, so ``t1`` is
    independent of it.
    """
    if tau <= 0:
        raise ParameterError(f"tau must be positive, got {tau}")
    e2 = EXP1 * EXP1
    e4 = e2 * e2
    s2p = math.sin(2.0 * phi)
    cp2 = math.cos(phi) ** 2
    sp2 = math.sin(phi) ** 2
    dist_s = abs(s2p * math.sin(2.0 * tau))
    radic = cp2 * cp2 + e4 * sp2 * sp2 + e2 * s2p * s2p / 2.0 * math.cos(4.0 * tau)
    dist_m = 2.0 / (1.0 + e2) * abs(math.sin(2.0 * tau)) * math.sqrt(max(radic, 0.0))
    lam_s = 2.0 * abs(s2p) * abs_cos_integral(tau) / tau
    pref = cp2 + e2 * sp2
    m_ell = (EXP1 * s2p / pref) ** 2
    lam_m = pref / (tau * (1.0 + e2)) * ellipe_incomplete(4.0 * tau, m_ell)
    lam_total = lam_s + lam_m
    t1 = (dist_s + dist_m) / lam_total if lam_total > 0 else math.nan
    return {"dist_s": dist_s, "dist_m": dist_m,
            "lambda_s": lam_s, "lambda_m": lam_m, "t1": t1}


def werner_xx_closed_forms(tau: float) -> dict[str, float]:
    """Closed forms for the Werner-like scenario in the X (x) X basis.

    The distances and averaged norms all carry the same mixing- and
    angle-dependent prefactor, which cancels in the speed-limit ratio; the
    returned ``L`` and ``Lambda`` are the reduced (prefactor-free) numerator
    and denominator and ``t1 = L / Lambda`` depends on ``tau`` alone.
    """
    if tau <= 0:
        raise ParameterError(f"tau must be positive, got {tau}")
    e2 = EXP1 * EXP1
    e4 = e2 * e2
    big_l = (2.0 * math.sin(tau) ** 2
             + abs(math.sin(2.0 * tau))
             * math.sqrt(1.0 + e4 - 2.0 * e2 * math.cos(4.0 * tau)) / (e2 + 1.0))
    m_ell = -((2.0 * EXP1 / (e2 - 1.0)) ** 2)
    big_lam = (2.0 * abs_sin_integral(tau)
               + (e2 - 1.0) / (2.0 * (e2 + 1.0)) * ellipe_incomplete(4.0 * tau, m_ell)) / tau
    return {"L": big_l, "Lambda": big_lam, "t1": big_l / big_lam}


def werner_xx_components(lam: float, phi: float, tau: float) -> dict[str, float]:
    """Per-subsystem distances and averaged norms for the X (x) X family,
    including the mixing and angle prefactor ``lam * |cos 2 phi|``."""
    if tau <= 0:
        raise ParameterError(f"tau must be positive, got {tau}")
    e2 = EXP1 * EXP1
    e4 = e2 * e2
    pref = lam * abs(math.cos(2.0 * phi))
    dist_s = 2.0 * pref * math.sin(tau) ** 2
    dist_m = (pref * abs(math.sin(2.0 * tau))
              * math.sqrt(1.0 + e4 - 2.0 * e2 * math.cos(4.0 * tau)) / (e2 + 1.0))
    lam_s = 2.0 * pref * abs_sin_integral(tau) / tau
    m_ell = -((2.0 * EXP1 / (e2 - 1.0)) ** 2)
    lam_m = pref * (e2 - 1.0) / (2.0 * (e2 + 1.0) * tau) * ellipe_incomplete(4.0 * tau, m_ell)
    return {"dist_s": dist_s, "dist_m": dist_m, "lambda_s": lam_s, "lambda_m": lam_m}
