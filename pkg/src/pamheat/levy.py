"""Characteristic exponents of the driving Levy processes.

The catalog covers isotropic stable exponents RePsi(xi) = c*||xi||^q,
subordinated-Brownian exponents Psi(xi) = Phi(||xi||^2 / 2) built from a
subordinator with Levy density x^(-1-p) * log(1/x)^(q_log/2) on (0, 1/2),
and table-driven radial profiles used for cross checks.  Only the real
part of the exponent enters any criterion computed elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.interpolate import PchipInterpolator
from scipy.special import j0

from .errors import (
    DensityUnavailableError,
    IndeterminateError,
    QuadratureError,
    UnsupportedError,
)

__all__ = [
    "SubordinatorSpec",
    "GrowthRate",
    "CharExponent",
    "IsotropicStable",
    "SubordinatedBrownian",
    "TableDriven",
    "laplace_exponent",
    "eval_re_psi",
    "hawkes_condition",
    "has_transition_densities",
    "transition_density",
    "surface_area",
]


def surface_area(d: int) -> float:
    """Surface measure of the unit sphere in R^d."""
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


@dataclass(frozen=True)
class SubordinatorSpec:
    """Parameters of the log-corrected subordinator Levy measure."""

    p: float
    q_log: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {self.p}")


def laplace_exponent(spec: SubordinatorSpec, lam: float) -> float:
    """Laplace exponent Phi(lam) = int_0^{1/2} (1 - e^{-lam*x}) Pi(dx).

    Computed after the substitution x = e^{-u}, which removes the
    algebraic endpoint singularity at x -> 0; the transformed integrand
    is (1 - exp(-lam*e^{-u})) * e^{p*u} * u^{q_log/2} on (log 2, inf).
    """
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    if lam == 0.0:
        return 0.0
    p, s = spec.p, spec.q_log / 2.0

    def integrand(u):
        u = np.asarray(u, dtype=float)
        z = lam * np.exp(-u)
        # for tiny z, 1 - e^{-z} ~ z; combine exponents to avoid 0 * inf
        small = z < 1e-8
        out = np.where(
            small,
            lam * np.exp(-(1.0 - p) * u),
            -np.expm1(-np.where(small, 0.0, z)) * np.exp(p * np.where(small, 0.0, u)),
        )
        return out * u ** s

    # The integrand peaks near u = log(lam); split there so QUADPACK
    # never misses the bump on the infinite interval.
    lo = math.log(2.0)
    cut = max(lo + 1.0, math.log(lam) + 1.0 if lam > 1.0 else lo + 1.0)
    total = 0.0
    err_total = 0.0
    for a, b in ((lo, cut), (cut, np.inf)):
        val, err = integrate.quad(integrand, a, b, epsabs=0.0, epsrel=1e-11, limit=200)
        total += val
        err_total += err
    if not math.isfinite(total) or (total > 0 and err_total / total > 1e-6):
        raise QuadratureError(
            f"laplace_exponent failed to converge at lam={lam}",
            partial=total,
            error_estimate=err_total,
        )
    return total


@lru_cache(maxsize=32)
def _phi_table(spec: SubordinatorSpec) -> PchipInterpolator:
    """Monotone log-log interpolant of Phi, for use inside quadrature loops."""
    grid = np.logspace(-14.0, 20.0, 420)
    vals = np.array([laplace_exponent(spec, g) for g in grid])
    return PchipInterpolator(np.log(grid), np.log(vals), extrapolate=True)


def laplace_exponent_fast(spec: SubordinatorSpec, lam) -> np.ndarray:
    """Vectorized Phi via the cached interpolant (relative error ~1e-9)."""
    lam = np.asarray(lam, dtype=float)
    out = np.zeros_like(lam)
    mask = lam > 0
    out[mask] = np.exp(_phi_table(spec)(np.log(lam[mask])))
    return out


@dataclass(frozen=True)
class GrowthRate:
    """Leading behavior c * rho^power * (log rho)^log_power of RePsi."""

    power: float
    log_power: float = 0.0
    bounded: bool = False


class CharExponent:
    """Base class: a radial, nonnegative characteristic-exponent real part."""

    dim: int
    is_radial = True

    def re_psi_radial(self, rho):
        raise NotImplementedError

    def re_psi(self, xi) -> float:
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        if xi.size != self.dim:
            raise ValueError(f"xi must have dimension {self.dim}")
        return float(self.re_psi_radial(np.linalg.norm(xi)))

    def growth_at_infinity(self) -> GrowthRate:
        raise NotImplementedError

    def growth_at_origin(self) -> GrowthRate:
        raise NotImplementedError

    def log_re_psi_radial(self, t: float) -> float:
        """log RePsi at rho = e^t, stable against overflow for huge t."""
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class IsotropicStable(CharExponent):
    """RePsi(xi) = c * ||xi||^q with q in (0, 2]."""

    q: float
    c: float = 1.0
    dim: int = 1

    def __post_init__(self):
        if not 0.0 < self.q <= 2.0:
            raise ValueError(f"stable index must lie in (0, 2], got {self.q}")
        if self.c <= 0:
            raise ValueError("scale c must be positive")

    def re_psi_radial(self, rho):
        with np.errstate(over="ignore"):
            return self.c * np.asarray(rho, dtype=float) ** self.q

    def log_re_psi_radial(self, t):
        return math.log(self.c) + self.q * t

    def growth_at_infinity(self):
        return GrowthRate(power=self.q)

    def growth_at_origin(self):
        return GrowthRate(power=self.q)

    def to_json(self):
        return {"family": "isotropic_stable", "params": {"q": self.q, "c": self.c}, "dim": self.dim}


@dataclass(frozen=True)
class SubordinatedBrownian(CharExponent):
    """Psi(xi) = Phi(||xi||^2 / 2) for the log-corrected subordinator.

    For spec = (p, q_log), Psi(xi) is comparable to
    ||xi||^(2p) * (log ||xi||)^(q_log/2) at infinity.
    """

    spec: SubordinatorSpec
    dim: int = 1

    def re_psi_radial(self, rho):
        rho = np.asarray(rho, dtype=float)
        if rho.ndim == 0:
            r = float(rho)
            return laplace_exponent(self.spec, 0.5 * r * r)
        return laplace_exponent_fast(self.spec, 0.5 * rho * rho)

    def growth_at_infinity(self):
        return GrowthRate(power=2.0 * self.spec.p, log_power=self.spec.q_log / 2.0)

    def growth_at_origin(self):
        # Phi(lam) ~ lam * int z Pi(dz) as lam -> 0, so RePsi ~ const * rho^2.
        return GrowthRate(power=2.0)

    def log_re_psi_radial(self, t):
        # the interpolant maps log lam to log Phi and extrapolates linearly
        return float(_phi_table(self.spec)(2.0 * t - math.log(2.0)))

    def to_json(self):
        return {
            "family": "subordinated_brownian",
            "params": {"p": self.spec.p, "q_log": self.spec.q_log},
            "dim": self.dim,
        }


@dataclass(frozen=True)
class TableDriven(CharExponent):
    """Radial profile given by samples, monotone-cubic interpolated.

    Values are clamped to the last sample beyond the tabulated range, so
    table exponents are bounded; they exist for cross checks only.
    """

    radii: tuple
    values: tuple
    dim: int = 1
    _interp: PchipInterpolator = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if r.ndim != 1 or r.shape != v.shape or r.size < 2:
            raise ValueError("radii and values must be 1-d arrays of equal length >= 2")
        if r[0] != 0.0 or v[0] != 0.0:
            raise ValueError("profile must start at RePsi(0) = 0")
        if np.any(np.diff(r) <= 0) or np.any(v < 0):
            raise ValueError("radii must increase and values be nonnegative")
        object.__setattr__(self, "_interp", PchipInterpolator(r, v, extrapolate=False))

    def re_psi_radial(self, rho):
        rho = np.asarray(rho, dtype=float)
        clipped = np.clip(rho, self.radii[0], self.radii[-1])
        return self._interp(clipped)

    def growth_at_infinity(self):
        return GrowthRate(power=0.0, bounded=True)

    def log_re_psi_radial(self, t):
        rho = self.radii[-1] if t > 700.0 else min(math.exp(t), self.radii[-1])
        return math.log(float(self.re_psi_radial(rho)))

    def growth_at_origin(self):
        r = np.asarray(self.radii)
        v = np.asarray(self.values)
        pos = np.nonzero(v > 0)[0]
        if pos.size < 2:
            return GrowthRate(power=0.0, bounded=True)
        i, j = pos[0], pos[1]
        power = math.log(v[j] / v[i]) / math.log(r[j] / r[i])
        return GrowthRate(power=power)

    def to_json(self):
        return {
            "family": "table",
            "params": {"radii": list(self.radii), "values": list(self.values)},
            "dim": self.dim,
        }


def eval_re_psi(exp: CharExponent, xi) -> float:
    """RePsi(xi); total on the catalog families."""
    return exp.re_psi(xi)


def _tail_integral_decays(exp: CharExponent, t: float) -> bool:
    """Confirming check: does rho^{d-1} e^{-t RePsi} have summable tail panels?"""
    d = exp.dim
    r = 10.0
    panels = []
    for _ in range(10):
        grid = np.linspace(r, 2.0 * r, 33)
        vals = grid ** (d - 1) * np.exp(-t * np.asarray(exp.re_psi_radial(grid), dtype=float))
        panels.append(np.trapezoid(vals, grid))
        r *= 2.0
    panels = np.array(panels)
    if panels[-1] == 0.0:
        return True
    # geometric decay of dyadic panels certifies integrability in practice
    return bool(np.all(panels[1:] <= 0.9 * panels[:-1]))


def hawkes_condition(exp: CharExponent, t: float) -> bool:
    """Whether exp(-RePsi) lies in L^t, i.e. int e^{-t RePsi} dxi < infty."""
    if t <= 0:
        raise ValueError("t must be positive")
    g = exp.growth_at_infinity()
    if g.bounded:
        verdict = False
    elif g.power > 0:
        verdict = True
    elif g.log_power > 1:
        verdict = True
    elif g.log_power < 1:
        verdict = False
    else:
        raise IndeterminateError(
            "RePsi grows like a first power of log; integrability depends on constants"
        )
    if verdict != _tail_integral_decays(exp, t):
        raise IndeterminateError(
            "analytic tail classification contradicts numeric tail quadrature"
        )
    return verdict


def has_transition_densities(exp: CharExponent) -> bool:
    """Absolute continuity of the transition probabilities.

    For radial exponents in d >= 2 this is equivalent to RePsi -> infinity
    (Zabczyk); in d = 1 we fall back on the Hawkes criterion.
    """
    if exp.dim >= 2:
        if not exp.is_radial:
            raise UnsupportedError("criterion requires a radial exponent in d >= 2")
        g = exp.growth_at_infinity()
        return not g.bounded and (g.power > 0 or g.log_power > 0)
    return hawkes_condition(exp, 1.0)


def _truncation_radius(exp: CharExponent, t: float, threshold: float = 46.0) -> float:
    """Smallest dyadic radius R with t * RePsi(R) beyond the threshold.

    e^{-46} < 1e-20, so the discarded tail is negligible at double precision.
    """
    r = 1.0
    for _ in range(60):
        if t * float(exp.re_psi_radial(r)) > threshold:
            return r
        r *= 2.0
    raise DensityUnavailableError("exponent grows too slowly to truncate the inversion")


def transition_density(exp: CharExponent, t: float, x) -> float:
    """Fourier inversion p_t(x) = (2 pi)^{-d} int e^{-i xi.x - t Psi(xi)} dxi."""
    if t <= 0:
        raise ValueError("t must be positive")
    if not hawkes_condition(exp, t):
        raise DensityUnavailableError("exp(-RePsi) is not integrable at this t")
    d = exp.dim
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.size != d:
        raise ValueError(f"x must have dimension {d}")
    r = float(np.linalg.norm(x))
    R = _truncation_radius(exp, t)

    def radial(rho):
        return np.exp(-t * np.asarray(exp.re_psi_radial(rho), dtype=float))

    if d == 1:
        if r == 0.0:
            val, _ = integrate.quad(radial, 0.0, R, limit=200)
        else:
            val, _ = integrate.quad(radial, 0.0, R, weight="cos", wvar=r, limit=200)
        return val / math.pi
    if d == 2:
        val, _ = integrate.quad(
            lambda rho: rho * j0(rho * r) * radial(rho), 0.0, R, limit=400
        )
        return val / (2.0 * math.pi)
    if d == 3:
        if r == 0.0:
            val, _ = integrate.quad(lambda rho: rho * rho * radial(rho), 0.0, R, limit=200)
            return val / (2.0 * math.pi ** 2)
        val, _ = integrate.quad(
            lambda rho: rho * radial(rho), 0.0, R, weight="sin", wvar=r, limit=200
        )
        return val / (2.0 * math.pi ** 2 * r)
    raise UnsupportedError("transition_density supports d <= 3")


def exponent_from_json(obj: dict) -> CharExponent:
    """Rebuild a CharExponent from its JSON form."""
    family = obj["family"]
    params = obj["params"]
    dim = int(obj["dim"])
    if family == "isotropic_stable":
        return IsotropicStable(q=params["q"], c=params.get("c", 1.0), dim=dim)
    if family == "subordinated_brownian":
        return SubordinatedBrownian(
            spec=SubordinatorSpec(p=params["p"], q_log=params.get("q_log", 0.0)), dim=dim
        )
    if family == "table":
        return TableDriven(
            radii=tuple(params["radii"]), values=tuple(params["values"]), dim=dim
        )
    raise UnsupportedError(f"unknown exponent family {family!r}")
