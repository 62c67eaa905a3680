"""Moment growth-rate bounds and intermittency phase thresholds.

Upper bounds on the moment exponents come from contraction of the
moment map, expressed through Q(p, beta) = p*Lip_b/beta +
z_p*Lip_sigma*sqrt(Upsilon(2 beta / p)); lower bounds on the second
moment come from level sets of Upsilon; the linear multiplicative-noise
benchmark admits closed-form phase thresholds in the mass parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from numpy.polynomial import hermite_e

from .errors import IndeterminateError, InvalidOrderError, NotApplicableError
from .model import BoundedFunction, DeltaMass, ModelSpec
from .potential import amplitude_A, dalang_condition, upsilon

__all__ = [
    "hermite_he",
    "largest_hermite_zero",
    "q_function",
    "upper_exponent",
    "lower_exponent2",
    "asymptotic_intermittency",
    "AsymptoticVerdict",
    "massive_upper",
    "massive_lower",
    "pam_phase_threshold",
    "temperate_existence",
    "temperate_upper",
    "LyapunovReport",
    "lyapunov_report",
    "WEAKLY_INTERMITTENT",
    "NOT_WEAKLY_INTERMITTENT",
    "INDETERMINATE",
]

WEAKLY_INTERMITTENT = "WeaklyIntermittent"
NOT_WEAKLY_INTERMITTENT = "NotWeaklyIntermittent"
INDETERMINATE = "Indeterminate"

_BISECT_REL = 1e-8
_BISECT_MAX_ITER = 200
_BETA_CAP = 1e12


def hermite_he(k: int, x):
    """Probabilists' Hermite polynomial He_k(x) by the three-term recurrence
    He_{k+1} = x He_k - k He_{k-1}, He_0 = 1, He_1 = x."""
    if k < 0:
        raise InvalidOrderError("k must be nonnegative")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if k == 0:
        return prev if prev.ndim else float(prev)
    cur = x.copy()
    for n in range(1, k):
        prev, cur = cur, x * cur - n * prev
    return cur if cur.ndim else float(cur)


def largest_hermite_zero(p: int) -> float:
    """Largest zero z_p of He_p, for even p >= 2."""
    if p < 2 or p % 2 != 0:
        raise InvalidOrderError(f"p must be an even integer >= 2, got {p}")
    nodes, _ = hermite_e.hermegauss(p)
    z = float(nodes[-1])
    eps = 1e-6 * max(z, 1.0)
    if hermite_he(p, z - eps) * hermite_he(p, z + eps) >= 0:
        raise IndeterminateError("no sign change around the computed largest zero")
    return z


def q_function(model: ModelSpec, p: int, beta: float) -> float:
    """Q(p, beta) = p*Lip_b/beta + z_p*Lip_sigma*sqrt(Upsilon(2 beta/p))."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    if not dalang_condition(model):
        raise NotApplicableError("Q is defined under the existence condition")
    z_p = largest_hermite_zero(p)
    ups = upsilon(model, 2.0 * beta / p).value
    return p * model.drift.lip_b / beta + z_p * model.sigma.lip_sigma * math.sqrt(ups)


def _inf_where_below(target_fn, threshold: float) -> float:
    """inf{beta > 0 : target_fn(beta) < threshold} for nonincreasing target_fn.

    Returns 0 when the target is already below the threshold arbitrarily
    close to 0, +inf when it never drops below the threshold up to the cap.
    """
    lo, hi = 0.0, 1.0
    if target_fn(hi) >= threshold:
        while target_fn(hi) >= threshold:
            hi *= 2.0
            if hi > _BETA_CAP:
                return math.inf
        lo = hi / 2.0
    else:
        while hi > 1e-12 and target_fn(hi / 2.0) < threshold:
            hi /= 2.0
        if hi <= 1e-12:
            return 0.0
        lo = hi / 2.0
    for _ in range(_BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if target_fn(mid) < threshold:
            hi = mid
        else:
            lo = mid
        if hi - lo <= _BISECT_REL * hi:
            break
    return hi


def upper_exponent(model: ModelSpec, p: int) -> float:
    """Upper bound on the order-p moment exponent: inf{beta: Q(p, beta) < 1}."""
    if model.sigma.lip_sigma == 0.0 and model.drift.lip_b == 0.0:
        return 0.0
    return _inf_where_below(lambda beta: q_function(model, p, beta), 1.0)


def _upsilon_value(model: ModelSpec, beta: float) -> float:
    return upsilon(model, beta).value


def _sup_level_set(model: ModelSpec, target: float) -> float:
    """sup{beta > 0 : Upsilon(beta) >= target}, with sup of the empty set = 0.

    Upsilon is nonincreasing with limit 0 at infinity, so the set is an
    interval (0, beta*]; beta* is found by bisection.
    """
    if _upsilon_value(model, 0.0) < target:
        return 0.0
    # the level set where Upsilon >= target is bounded: expand past it
    return _inf_where_below(lambda beta: _upsilon_value(model, beta), target)


def lower_exponent2(model: ModelSpec) -> float:
    """Lower bound on the everywhere second-moment exponent,
    sup{beta > 0 : Upsilon(beta) >= 2^{d-1} / L_sigma^2}."""
    if model.drift.lip_b != 0.0:
        raise NotApplicableError("lower bound requires zero drift")
    L = model.sigma.lower_linear
    if L <= 0.0:
        raise NotApplicableError("lower bound requires sigma(z) >= L|z| with L > 0")
    if not model.kernel.condition2_certified:
        raise NotApplicableError("lower bound requires a coordinatewise-monotone spectrum")
    init = model.initial
    if not isinstance(init, BoundedFunction) or init.inf <= 0.0:
        raise NotApplicableError("lower bound requires initial data bounded below by eta > 0")
    target = 2.0 ** (model.dim - 1) / (L * L)
    return _sup_level_set(model, target)


@dataclass(frozen=True)
class AsymptoticVerdict:
    """Outcome of the large-initial-data intermittency criterion."""

    tag: str  # PositiveExponentForLargeEta | NotApplicable | Indeterminate
    beta0: Optional[float] = None
    eta_threshold_formula: Optional[str] = None


def asymptotic_intermittency(model: ModelSpec) -> AsymptoticVerdict:
    """Positive second-moment exponent for large enough initial level.

    Needs q_inf = liminf sigma(z)/|z| > 0, the existence condition, a
    coordinatewise-monotone spectrum, and Upsilon(0) = infinity.  The
    eta threshold depends on an unquantified constant, so it is returned
    as a formula in beta0, never as a number.
    """
    q0 = model.sigma.q_inf
    if q0 is None or q0 <= 0.0:
        return AsymptoticVerdict(tag="NotApplicable")
    if not dalang_condition(model) or not model.kernel.condition2_certified:
        return AsymptoticVerdict(tag="NotApplicable")
    ups0 = upsilon(model, 0.0)
    if not ups0.divergent:
        target = 2.0 ** (model.dim - 1) / (q0 * q0)
        if target > ups0.value:
            return AsymptoticVerdict(tag="Indeterminate")
    target = 2.0 ** (model.dim - 1) / (q0 * q0)
    beta0 = _sup_level_set(model, target)
    return AsymptoticVerdict(
        tag="PositiveExponentForLargeEta",
        beta0=beta0,
        eta_threshold_formula=f"eta > sqrt({beta0:.12g} * A_star)",
    )


def massive_upper(model: ModelSpec, p: int, lam: float) -> float:
    """Upper moment-exponent bound with mass lambda:
    lambda + (p/2) * inf{alpha > 0 : Upsilon(alpha) < 1/(z_p^2 Lip_sigma^2)}."""
    lip = model.sigma.lip_sigma
    if lip == 0.0:
        return lam
    z_p = largest_hermite_zero(p)
    threshold = 1.0 / (z_p * z_p * lip * lip)
    alpha = _inf_where_below(lambda a: _upsilon_value(model, a), threshold)
    return lam + 0.5 * p * alpha


def massive_lower(model: ModelSpec, lam: float) -> float:
    """Lower second-moment bound with mass lambda:
    lambda + sup{alpha > 0 : Upsilon(alpha) >= 2^{d-1}/L_sigma^2}."""
    L = model.sigma.lower_linear
    if L <= 0.0:
        return lam
    target = 2.0 ** (model.dim - 1) / (L * L)
    return lam + _sup_level_set(model, target)


def pam_phase_threshold(d: int, q: float, b: float, kappa: float) -> tuple:
    """Critical mass values for the linear multiplicative-noise benchmark.

    Returns (lambda_lower_c, lambda_upper_c):
    lambda_upper_c = -(A kappa^2)^{1/(1-nu)} (decay certified below it),
    lambda_lower_c = -(A kappa^2 / 2^{d-1})^{1/(1-nu)} (growth certified
    above it).  They coincide exactly when d = 1; for d >= 2 there is a
    strict gap with lambda_upper_c < lambda_lower_c.
    """
    if kappa == 0.0:
        return 0.0, 0.0
    A = amplitude_A(d, q, b)
    nu = (d - b) / q
    power = 1.0 / (1.0 - nu)
    upper = -((A * kappa * kappa) ** power)
    lower = -((A * kappa * kappa / 2.0 ** (d - 1)) ** power)
    return lower, upper


def _delta_part_finite(model: ModelSpec) -> bool:
    """Finiteness of int dxi / (1 + 2 RePsi), decided analytically and
    confirmed by tail panels."""
    d = model.dim
    g = model.exponent.growth_at_infinity()
    if g.bounded:
        return False
    e = (d - 1) - g.power
    if e < -1 - 1e-12:
        verdict = True
    elif e > -1 + 1e-12:
        verdict = False
    else:
        verdict = g.log_power > 1
    # confirm by dyadic panels of rho^{d-1}/(1+2 RePsi)
    exp = model.exponent
    panels = []
    for j in range(8, 24):
        grid = np.linspace(2.0 ** j, 2.0 ** (j + 1), 17)
        vals = grid ** (d - 1) / (1.0 + 2.0 * np.asarray(exp.re_psi_radial(grid), float))
        panels.append(float(np.trapezoid(vals, grid)))
    panels = np.array(panels)
    decaying = bool(np.all(panels[1:] <= 0.95 * panels[:-1]))
    if verdict != decaying:
        raise IndeterminateError("delta-part tail classification ambiguous")
    return verdict


def temperate_existence(model: ModelSpec) -> bool:
    """Existence of a temperate solution for measure initial data:
    integrability of (|u0_hat| + fhat)/(1 + 2 RePsi) plus density existence."""
    from .levy import hawkes_condition

    init = model.initial
    if isinstance(init, DeltaMass):
        u0_part = _delta_part_finite(model)
    elif hasattr(init, "u0_hat_abs"):
        # bounded |u0_hat| <= total mass reduces to the delta criterion
        u0_part = _delta_part_finite(model)
    else:
        raise NotApplicableError("temperate existence applies to measure initial data")
    if not u0_part:
        return False
    if upsilon(model, 1.0).divergent:
        return False
    return hawkes_condition(model.exponent, 1.0)


def temperate_upper(model: ModelSpec, p: int) -> float:
    """Moment-exponent bound for temperate solutions:
    (p/2) * inf{beta : Upsilon(beta) < 1/(2 z_p^2 Lip_sigma^2)}; 0 when the
    noise is weak enough that no growth can occur."""
    lip = model.sigma.lip_sigma
    if lip == 0.0:
        return 0.0
    z_p = largest_hermite_zero(p)
    threshold = 1.0 / (2.0 * z_p * z_p * lip * lip)
    ups0 = upsilon(model, 0.0)
    if not ups0.divergent and ups0.value < threshold:
        return 0.0
    return 0.5 * p * _inf_where_below(lambda a: _upsilon_value(model, a), threshold)


@dataclass
class LyapunovReport:
    """Bundle of growth-rate bounds for one model and moment order."""

    p: int
    upper: float
    lower2: Optional[float]
    verdict: str
    notes: List[str] = field(default_factory=list)

    def to_json(self):
        return {
            "p": self.p,
            "upper": self.upper,
            "lower2": self.lower2,
            "verdict": self.verdict,
            "theorem_refs": list(self.notes),
        }


def lyapunov_report(model: ModelSpec, p: int = 2) -> LyapunovReport:
    """Upper and lower exponent bounds plus the intermittency verdict."""
    notes = []
    upper = upper_exponent(model, p)
    notes.append("upper: contraction of the moment map via Q(p, beta)")
    try:
        lower2 = lower_exponent2(model)
        notes.append("lower: level set of Upsilon at 2^{d-1}/L_sigma^2")
    except NotApplicableError as exc:
        lower2 = None
        notes.append(f"lower: not applicable ({exc})")
    upper2 = upper_exponent(model, 2) if p != 2 else upper
    if lower2 is not None and lower2 > 0.0 and math.isfinite(upper2):
        verdict = WEAKLY_INTERMITTENT
    elif model.drift.mass_lambda is not None and \
            massive_upper(model, 2, model.drift.mass_lambda) <= 0.0:
        verdict = NOT_WEAKLY_INTERMITTENT
        notes.append("decay certified: massive upper bound <= 0")
    elif model.sigma.lip_sigma == 0.0:
        verdict = NOT_WEAKLY_INTERMITTENT
        notes.append("no noise: moments cannot grow exponentially")
    else:
        verdict = INDETERMINATE
    return LyapunovReport(p=p, upper=upper, lower2=lower2, verdict=verdict, notes=notes)
