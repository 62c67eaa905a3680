"""Second moments of the linear equation, canonical metric, entropy verdicts.

The linear (additive-noise) equation has an explicit spectral variance;
increments of its solution define a canonical pseudo-metric whose small-
scale gauge decides continuity of the field through the metric-entropy
integral.  For the stable-plus-Riesz family the gauge is polynomial with
a known exponent; the log-corrected spectral family in d = 3 produces a
purely logarithmic gauge and the discontinuity/continuity dichotomy in
its log exponent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate
from scipy.special import j0

from .errors import IndeterminateError, UnsupportedError
from .kernels import LogCorrectedKernel, RieszKernel
from .levy import IsotropicStable, surface_area
from .model import ModelSpec, SigmaSpec
from .potential import dalang_condition

__all__ = [
    "linear_variance",
    "canonical_distance",
    "GaugeReport",
    "entropy_verdict",
    "counterexample_classifier",
    "NO_RANDOM_FIELD_SOLUTION",
    "DISCONTINUOUS_EVERYWHERE",
    "CONTINUOUS_MODIFICATION",
]

NO_RANDOM_FIELD_SOLUTION = "NoRandomFieldSolution"
DISCONTINUOUS_EVERYWHERE = "SolutionDiscontinuousEverywhere"
CONTINUOUS_MODIFICATION = "SolutionWithContinuousModification"


def _radial_parts(model: ModelSpec):
    if not model.kernel.is_radial:
        raise UnsupportedError("radial spectral density required")
    kernel, exp = model.kernel, model.exponent

    def fhat(rho):
        return float(kernel.fhat_radial(np.atleast_1d(rho))[0])

    def psi(rho):
        return float(exp.re_psi_radial(np.atleast_1d(rho))[0])

    return fhat, psi


def linear_variance(model: ModelSpec, t: float) -> float:
    """Variance of the linear solution at a point:
    (2 pi)^{-d} int (1 - e^{-2 t RePsi}) / (2 RePsi) fhat dxi.

    For every lam > 0 this is sandwiched between (1 - e^{-2t/lam}) and
    e^{2t/lam} times Upsilon(1/lam)/2.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0.0:
        return 0.0
    if not dalang_condition(model):
        raise UnsupportedError("linear variance requires the existence condition")
    fhat, psi = _radial_parts(model)
    d = model.dim
    amp = surface_area(d) / (2.0 * math.pi) ** d

    def h(rho):
        ps = psi(rho)
        if ps < 1e-12:
            factor = t
        else:
            factor = -math.expm1(-2.0 * t * ps) / (2.0 * ps)
        return rho ** (d - 1) * factor * fhat(rho)

    total = 0.0
    for a, b in ((0.0, 1.0), (1.0, np.inf)):
        val, _ = integrate.quad(h, a, b, epsabs=1e-13, epsrel=1e-10, limit=400)
        total += val
    return amp * total


def _one_minus_cos(x):
    return 2.0 * np.sin(0.5 * x) ** 2


def _one_minus_j0(x):
    x = np.asarray(x, dtype=float)
    small = x < 1e-4
    return np.where(small, 0.25 * x * x, 1.0 - j0(np.where(small, 1.0, x)))


def _one_minus_sinc(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    safe = np.where(small, 1.0, x)
    return np.where(small, x * x / 6.0, 1.0 - np.sin(safe) / safe)


def _tail_integral(model: ModelSpec, rho0: float) -> float:
    """int_{rho0}^inf rho^{d-1} fhat/(1 + 2 RePsi) drho via u = log rho.

    Algebraic or logarithmic decay in rho becomes exponential or
    algebraic decay in u, which the infinite-interval quadrature handles;
    the integrand is built in log space so huge u never overflow.
    """
    from .potential import log_tail_integrand

    h_log = log_tail_integrand(model, 1.0)
    val, _ = integrate.quad(h_log, math.log(rho0), np.inf,
                            epsabs=1e-13, epsrel=1e-9, limit=800)
    return val


def canonical_distance(model: ModelSpec, r: float) -> float:
    """Canonical metric d(x, y) between points at distance r:
    sqrt(2 (2 pi)^{-d} int (1 - cos(xi . (x - y))) fhat/(1 + 2 RePsi) dxi),
    radially reduced through the spherical average of the cosine
    (cos, J0, sinc for d = 1, 2, 3)."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    if r == 0.0:
        return 0.0
    d = model.dim
    if d > 3:
        raise UnsupportedError("canonical_distance supports d <= 3")
    fhat, psi = _radial_parts(model)
    amp = 2.0 * surface_area(d) / (2.0 * math.pi) ** d
    one_minus_k = {1: _one_minus_cos, 2: _one_minus_j0, 3: _one_minus_sinc}[d]

    def g(rho):
        return rho ** (d - 1) * fhat(rho) / (1.0 + 2.0 * psi(rho))

    rho0 = 1.0 / r
    inner, _ = integrate.quad(lambda rho: float(one_minus_k(rho * r)) * g(rho),
                              0.0, rho0, epsabs=1e-14, epsrel=1e-9, limit=400)
    # beyond rho0 split 1 - K into its mean part and the oscillation
    mean_part = _tail_integral(model, rho0)
    if d == 1:
        osc, _ = integrate.quad(g, rho0, np.inf, weight="cos", wvar=r, limit=800)
    elif d == 3:
        osc, _ = integrate.quad(lambda rho: g(rho) / rho, rho0, np.inf,
                                weight="sin", wvar=r, limit=800)
        osc /= r
    else:
        # J0 exactly up to argument 8, then its cosine asymptotics
        cut = 8.0 / r
        exact, _ = integrate.quad(lambda rho: j0(rho * r) * g(rho), rho0, cut,
                                  limit=400)
        # J0(x) ~ sqrt(2/(pi x)) cos(x - pi/4) for large x
        def a(rho):
            return g(rho) * math.sqrt(2.0 / (math.pi * rho * r))
        c_part, _ = integrate.quad(a, cut, np.inf, weight="cos", wvar=r, limit=800)
        s_part, _ = integrate.quad(a, cut, np.inf, weight="sin", wvar=r, limit=800)
        osc = exact + (c_part + s_part) / math.sqrt(2.0)
    total = inner + mean_part - osc
    return math.sqrt(max(amp * total, 0.0))


@dataclass
class GaugeReport:
    """Small-scale gauge of the canonical metric plus the entropy verdict."""

    regime: str  # PolynomialGauge | PolyLogGauge | LipschitzGauge | LogOnlyGauge | NoSolution
    exponent: Optional[float]  # analytic gauge exponent when known
    entropy: str  # Finite | Infinite
    fitted: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "regime": self.regime,
            "exponent": self.exponent,
            "entropy": self.entropy,
            "fitted": dict(self.fitted),
        }


def _fit_loglog(model: ModelSpec, r_lo=1e-4, r_hi=1e-1, n=16):
    """Least-squares slope of log d(r) against log r, smallest decade dropped."""
    rs = np.geomspace(r_lo, r_hi, n)
    ds = np.array([canonical_distance(model, r) for r in rs])
    keep = rs >= 10.0 * r_lo
    slope, intercept = np.polyfit(np.log(rs[keep]), np.log(ds[keep]), 1)
    return float(slope), float(intercept), rs, ds


def _fit_loglog_of_log(model: ModelSpec, n=14):
    """Slope of log d(r) against log log(1/r), for logarithmic gauges."""
    rs = np.geomspace(1e-9, 1e-2, n)
    ds = np.array([canonical_distance(model, r) for r in rs])
    slope, intercept = np.polyfit(np.log(np.log(1.0 / rs)), np.log(ds), 1)
    return float(slope), float(intercept)


def entropy_verdict(model: ModelSpec) -> GaugeReport:
    """Classify the gauge of the canonical metric and run the entropy test.

    Polynomial, polylog and Lipschitz gauges all give a finite entropy
    integral; a purely logarithmic gauge |log r|^{-(q-1)/2} has covering
    exponent log N(eps) ~ eps^{-2/(q-1)}, integrable iff q > 2.
    """
    d = model.dim
    kernel, exp = model.kernel, model.exponent
    if isinstance(kernel, RieszKernel) and isinstance(exp, IsotropicStable):
        s = exp.q + kernel.b
        if s <= d:
            return GaugeReport(regime="NoSolution", exponent=None, entropy="Infinite")
        slope, intercept, _, _ = _fit_loglog(model)
        fitted = {"slope": slope, "intercept": intercept}
        if s > d + 2.0:
            return GaugeReport("LipschitzGauge", 1.0, "Finite", fitted)
        if s == d + 2.0:
            return GaugeReport("PolyLogGauge", 1.0, "Finite", fitted)
        if s > d + 1.0:
            return GaugeReport("PolynomialGauge", (s - d) / 2.0, "Finite", fitted)
        # range (d, d+1]: gauge exponent taken from the numeric fit only
        fitted["note"] = "regime tag from numeric fit; printed table starts above d+1"
        return GaugeReport("PolynomialGauge", None, "Finite", fitted)
    if isinstance(kernel, LogCorrectedKernel):
        q = kernel.b_log
        if not dalang_condition(model):
            return GaugeReport(regime="NoSolution", exponent=None, entropy="Infinite")
        slope, intercept = _fit_loglog_of_log(model)
        fitted = {"log_slope": slope, "q_hat": 1.0 - 2.0 * slope}
        entropy = "Finite" if q > 2.0 else "Infinite"
        return GaugeReport("LogOnlyGauge", (1.0 - q) / 2.0, entropy, fitted)
    # generic numeric classification
    if not dalang_condition(model):
        return GaugeReport(regime="NoSolution", exponent=None, entropy="Infinite")
    slope, intercept, _, _ = _fit_loglog(model)
    fitted = {"slope": slope, "intercept": intercept}
    if slope > 0.05:
        return GaugeReport("PolynomialGauge", None, "Finite", fitted)
    log_slope, _ = _fit_loglog_of_log(model)
    q_hat = 1.0 - 2.0 * log_slope
    fitted["q_hat"] = q_hat
    entropy = "Finite" if q_hat > 2.0 else "Infinite"
    return GaugeReport("LogOnlyGauge", None, entropy, fitted)


def _counterexample_model(q: float) -> ModelSpec:
    return ModelSpec(
        exponent=IsotropicStable(q=2.0, c=1.0, dim=3),
        kernel=LogCorrectedKernel(a=1.0, b_log=q, dim=3),
        sigma=SigmaSpec.linear(1.0),
    )


def counterexample_classifier(q: float) -> str:
    """d = 3 heat operator with the log-corrected spectral kernel.

    No random-field solution for q <= 1; a solution that is a.s.
    unbounded on every open set for 1 < q <= 2; a continuous
    modification for q > 2.  The verdict from these thresholds is cross
    checked against the numeric existence test and entropy fit on the
    concrete model; disagreement raises Indeterminate.
    """
    if q <= 1.0:
        verdict = NO_RANDOM_FIELD_SOLUTION
    elif q <= 2.0:
        verdict = DISCONTINUOUS_EVERYWHERE
    else:
        verdict = CONTINUOUS_MODIFICATION
    model = _counterexample_model(q)
    exists = dalang_condition(model)
    if exists != (verdict != NO_RANDOM_FIELD_SOLUTION):
        raise IndeterminateError("existence test disagrees with the q threshold")
    if exists:
        report = entropy_verdict(model)
        continuous = report.entropy == "Finite"
        if continuous != (verdict == CONTINUOUS_MODIFICATION):
            raise IndeterminateError("entropy verdict disagrees with the q threshold")
        q_hat = report.fitted.get("q_hat")
        if q_hat is not None and abs(q_hat - q) > 0.5:
            raise IndeterminateError(
                f"fitted log-gauge exponent q_hat={q_hat:.3f} far from q={q}"
            )
    return verdict
