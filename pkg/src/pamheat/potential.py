"""Resolvent potentials, existence condition, energy forms, occupation times.

The central object is Upsilon(beta) = (2pi)^{-d} int fhat(xi) / (beta +
2 RePsi(xi)) dxi, the replica resolvent evaluated at the origin.  Its
finiteness at beta = 1 is the existence condition for the nonlinear
equation, and its level sets drive every growth bound downstream.
Divergence is always decided analytically from the tail and origin
exponents of the integrand; quadrature is only run when the integral is
certified convergent, and only as the numeric evaluation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import integrate
from scipy.special import j0

from .errors import (
    IndeterminateError,
    InfiniteAmplitudeError,
    QuadratureError,
    UnsupportedError,
)
from .kernels import CorrelationKernel, RieszKernel, riesz_fourier_constant
from .levy import IsotropicStable, surface_area
from .model import ModelSpec

__all__ = [
    "UpsilonResult",
    "PotentialProfile",
    "upsilon",
    "amplitude_A",
    "dalang_condition",
    "replica_potential_at",
    "energy_form",
    "AtomicMeasure",
    "GaussianMeasure",
    "occupation_mc",
    "classify_transience",
    "FINITE_TOTAL_OCCUPATION",
    "INFINITE_TOTAL_OCCUPATION",
    "potential_profile",
]

FINITE_TOTAL_OCCUPATION = "FiniteTotalOccupation"
INFINITE_TOTAL_OCCUPATION = "InfiniteTotalOccupation"


@dataclass(frozen=True)
class UpsilonResult:
    """Value of Upsilon(beta), with error estimate and divergence certificate."""

    value: float
    err: float
    divergent: bool
    certificate: Optional[str] = None

    def __float__(self):
        return self.value


@dataclass
class PotentialProfile:
    """Upsilon sampled on a beta grid."""

    betas: np.ndarray
    values: np.ndarray
    errs: np.ndarray
    divergent: np.ndarray

    def to_csv(self, path):
        with open(path, "w", newline="\n") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["beta", "upsilon", "err", "divergent"])
            for b, v, e, dv in zip(self.betas, self.values, self.errs, self.divergent):
                w.writerow([repr(float(b)), repr(float(v)), repr(float(e)), int(dv)])


def _radial_model(model: ModelSpec):
    """Radial fhat and RePsi callables; Unsupported when fhat is not radial."""
    if not model.kernel.is_radial:
        raise UnsupportedError("resolvent potentials need a radial spectral density")
    kernel, exp = model.kernel, model.exponent

    def fhat(rho):
        return np.asarray(kernel.fhat_radial(np.atleast_1d(np.asarray(rho, float))))

    def psi(rho):
        return np.asarray(exp.re_psi_radial(np.atleast_1d(np.asarray(rho, float))))

    return fhat, psi


def _classify(model: ModelSpec, beta: float) -> Optional[str]:
    """Analytic divergence certificate for the Upsilon integrand, or None.

    The integrand in radial form is rho^{d-1} fhat(rho) / (beta + 2 RePsi).
    Divergence is read off from the net power (and log power) at infinity
    and at the origin.
    """
    d = model.dim
    dec = model.kernel.decay_at_infinity()
    g = model.exponent.growth_at_infinity()
    # tail
    if not dec.exponential:
        e = (d - 1) - dec.power
        L = -dec.log_power
        if not g.bounded:
            e -= g.power
            L -= g.log_power
        elif beta == 0.0:
            pass  # denominator tends to the (positive) sup of 2 RePsi
        if e > -1 + 1e-12 or (abs(e + 1) <= 1e-12 and L >= -1):
            return f"tail exponent {e:+.6g} (log power {L:+.6g}) not integrable"
    # origin
    b0 = model.kernel.origin_power()
    e0 = (d - 1) - b0
    if beta == 0.0:
        e0 -= model.exponent.growth_at_origin().power
    if e0 <= -1 + 1e-12:
        return f"origin exponent {e0:+.6g} not integrable"
    return None


def _confirm_divergence(model: ModelSpec, beta: float, certificate: str) -> None:
    """Cheap dyadic-panel growth check backing an analytic divergence verdict."""
    fhat, psi = _radial_model(model)
    d = model.dim

    def h(rho):
        return rho ** (d - 1) * fhat(rho) / (beta + 2.0 * psi(rho))

    outward = certificate.startswith("tail")
    panels = []
    for j in range(8, 28):
        a, b = (2.0 ** j, 2.0 ** (j + 1)) if outward else (2.0 ** (-j - 1), 2.0 ** (-j))
        grid = np.linspace(a, b, 17)
        panels.append(float(np.trapezoid(h(grid), grid)))
    panels = np.array(panels)
    # a divergent integral has non-summable panels: they must not decay geometrically
    if np.all(panels[1:] <= 0.5 * panels[:-1]):
        raise IndeterminateError(
            "analytic divergence certificate contradicted by decaying panels"
        )


def log_tail_integrand(model: ModelSpec, beta: float):
    """Integrand of the resolvent tail in the variable u = log rho.

    After the substitution the integrand is rho^d fhat / (beta + 2 RePsi)
    with rho = e^u; it is assembled entirely in log space so that huge u
    never overflow, which matters for spectral densities with slow
    logarithmic tails.
    """
    if not model.kernel.is_radial:
        raise UnsupportedError("resolvent potentials need a radial spectral density")
    kernel, exp = model.kernel, model.exponent
    d = model.dim
    log_beta = math.log(beta) if beta > 0 else -math.inf
    log2 = math.log(2.0)

    def h_log(u: float) -> float:
        val = d * u + kernel.log_fhat_radial(u) \
            - np.logaddexp(log_beta, log2 + exp.log_re_psi_radial(u))
        return math.exp(val) if val < 700.0 else math.inf

    return h_log


def upsilon(model: ModelSpec, beta: float) -> UpsilonResult:
    """Upsilon(beta); beta = 0 means the monotone limit beta -> 0+.

    At beta = 0 the limit equals the integral with beta = 0 by monotone
    convergence, so it is computed directly after the analytic
    finiteness check.
    """
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    certificate = _classify(model, beta)
    if certificate is not None:
        _confirm_divergence(model, beta, certificate)
        return UpsilonResult(value=math.inf, err=0.0, divergent=True,
                             certificate=certificate)
    fhat, psi = _radial_model(model)
    d = model.dim
    amp = surface_area(d) / (2.0 * math.pi) ** d

    def h(rho):
        return float(rho ** (d - 1) * fhat(rho)[0] / (beta + 2.0 * psi(rho)[0]))

    h_log = log_tail_integrand(model, beta)

    total, err = 0.0, 0.0
    val, e = integrate.quad(h, 0.0, 1.0, epsabs=1e-13, epsrel=1e-10, limit=400)
    total += val
    err += e
    val, e = integrate.quad(h_log, 0.0, np.inf, epsabs=1e-13, epsrel=1e-10, limit=800)
    total += val
    err += e
    value = amp * total
    err *= amp
    if value > 0 and err / value > 1e-5:
        raise QuadratureError("Upsilon quadrature did not converge",
                              partial=value, error_estimate=err)
    return UpsilonResult(value=value, err=err, divergent=False)


def potential_profile(model: ModelSpec, betas: Sequence[float]) -> PotentialProfile:
    res = [upsilon(model, b) for b in betas]
    return PotentialProfile(
        betas=np.asarray(betas, float),
        values=np.array([r.value for r in res]),
        errs=np.array([r.err for r in res]),
        divergent=np.array([r.divergent for r in res]),
    )


def amplitude_A(d: int, q: float, b: float) -> float:
    """Amplitude A with Upsilon(alpha) = A * alpha^{-(1-nu)}, nu = (d-b)/q,
    for the unit stable exponent plus unit Riesz kernel pair.

    Closed Gamma/Beta form in d = 1; radial quadrature of
    int rho^{d-1-b}/(1+rho^q) drho for d >= 2.
    """
    if q + b <= d:
        raise InfiniteAmplitudeError(f"q + b = {q + b} <= d = {d}")
    nu = (d - b) / q
    front = (
        riesz_fourier_constant(d, b)
        * surface_area(d)
        / (2.0 * math.pi) ** d
        / 2.0 ** nu
    )
    if d == 1:
        s = (1.0 - b) / q
        radial = (1.0 / q) * math.gamma(s) * math.gamma(1.0 - s)  # Beta(s, 1-s)
        return front * radial
    radial, err = integrate.quad(
        lambda z: z ** (d - 1 - b) / (1.0 + z ** q), 0.0, np.inf,
        epsabs=1e-13, epsrel=1e-11, limit=400,
    )
    return front * radial


def dalang_condition(model: ModelSpec) -> bool:
    """Existence condition: Upsilon(1) finite."""
    return not upsilon(model, 1.0).divergent


def replica_potential_at(model: ModelSpec, beta: float, x) -> float:
    """Pointwise replica potential
    (2 pi)^{-d} int cos(xi . x) fhat(xi) / (beta + 2 RePsi(xi)) dxi.

    Bounded in absolute value by Upsilon(beta) (maximum principle) and
    vanishing at infinity.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    if not dalang_condition(model):
        raise UnsupportedError("replica potential requires the existence condition")
    d = model.dim
    x = np.atleast_1d(np.asarray(x, float))
    if x.size != d:
        raise ValueError(f"x must have dimension {d}")
    r = float(np.linalg.norm(x))
    if r == 0.0:
        return upsilon(model, beta).value
    fhat, psi = _radial_model(model)

    def h(rho):
        return float(fhat(rho)[0] / (beta + 2.0 * psi(rho)[0]))

    if d == 1:
        inner, _ = integrate.quad(lambda rho: math.cos(rho * r) * h(rho),
                                  0.0, 1.0, limit=200)
        outer, _ = integrate.quad(h, 1.0, np.inf, weight="cos", wvar=r, limit=400)
        return (inner + outer) / math.pi
    if d == 2:
        # J0 exactly up to argument 8, then its cosine asymptotics with
        # the oscillation handled by weighted quadrature
        cut = 8.0 / r
        exact, _ = integrate.quad(lambda rho: rho * j0(rho * r) * h(rho),
                                  0.0, cut, limit=800)

        def a(rho):
            return rho * h(rho) * math.sqrt(2.0 / (math.pi * rho * r))

        c_part, _ = integrate.quad(a, cut, np.inf, weight="cos", wvar=r,
                                   limit=800)
        s_part, _ = integrate.quad(a, cut, np.inf, weight="sin", wvar=r,
                                   limit=800)
        return (exact + (c_part + s_part) / math.sqrt(2.0)) / (2.0 * math.pi)
    if d == 3:
        inner, _ = integrate.quad(lambda rho: rho * math.sin(rho * r) * h(rho),
                                  0.0, 1.0, limit=200)
        outer, _ = integrate.quad(lambda rho: rho * h(rho), 1.0, np.inf,
                                  weight="sin", wvar=r, limit=400)
        return (inner + outer) / (2.0 * math.pi ** 2 * r)
    raise UnsupportedError("replica_potential_at supports d <= 3")


@dataclass(frozen=True)
class AtomicMeasure:
    """Probability measure sum_i w_i delta_{x_i} in d = 1."""

    weights: tuple
    points: tuple

    def __post_init__(self):
        if len(self.weights) != len(self.points):
            raise ValueError("weights and points must match")
        if abs(sum(self.weights) - 1.0) > 1e-12 or any(w < 0 for w in self.weights):
            raise ValueError("weights must be a probability vector")


@dataclass(frozen=True)
class GaussianMeasure:
    """Centered Gaussian density with standard deviation sd in d = 1."""

    sd: float

    def __post_init__(self):
        if self.sd <= 0:
            raise ValueError("sd must be positive")


def energy_form(kernel: CorrelationKernel, mu) -> tuple:
    """(spatial, spectral) energy of mu against the kernel, d = 1.

    spatial = double integral of f(x - y) mu(dx) mu(dy);
    spectral = (2 pi)^{-1} int |mu_hat(xi)|^2 fhat(xi) dxi.
    The spatial side always dominates; equality holds for lower
    semicontinuous kernels (the whole catalog).
    """
    if kernel.dim != 1:
        raise UnsupportedError("energy_form is implemented for d = 1")
    if isinstance(mu, AtomicMeasure):
        if isinstance(kernel, RieszKernel):
            raise UnsupportedError("atomic measures need a kernel bounded at 0")
        w = np.asarray(mu.weights, float)
        pts = np.asarray(mu.points, float)
        diffs = pts[:, None] - pts[None, :]
        spatial = float(sum(
            w[i] * w[j] * kernel.f(diffs[i, j])
            for i in range(len(w)) for j in range(len(w))
        ))

        def mu_hat_sq(xi):
            c = np.sum(w * np.cos(xi * pts))
            s = np.sum(w * np.sin(xi * pts))
            return c * c + s * s

        val, _ = integrate.quad(
            lambda xi: mu_hat_sq(xi) * kernel.fhat(xi), 0.0, np.inf,
            epsabs=1e-12, epsrel=1e-10, limit=800,
        )
        spectral = val / math.pi
        return spatial, spectral
    if isinstance(mu, GaussianMeasure):
        # X - Y of two independent copies is N(0, 2 sd^2)
        s2 = math.sqrt(2.0) * mu.sd
        spatial, _ = integrate.quad(
            lambda z: kernel.f(z) * math.exp(-z * z / (2 * s2 * s2)),
            0.0, np.inf, epsabs=1e-12, epsrel=1e-10, limit=400,
        )
        spatial *= 2.0 / (s2 * math.sqrt(2.0 * math.pi))
        val, _ = integrate.quad(
            lambda xi: math.exp(-mu.sd ** 2 * xi * xi) * kernel.fhat(xi),
            0.0, np.inf, epsabs=1e-12, epsrel=1e-10, limit=400,
        )
        spectral = val / math.pi
        return spatial, spectral
    raise UnsupportedError(f"unknown measure descriptor {type(mu).__name__}")


def _stable_standard(gen, q: float, size: int) -> np.ndarray:
    """Standard symmetric stable variates, E e^{i xi Y} = e^{-|xi|^q}."""
    V = gen.uniform(-math.pi / 2.0, math.pi / 2.0, size)
    W = gen.standard_exponential(size)
    if q == 1.0:
        return np.tan(V)
    out = (np.sin(q * V) / np.cos(V) ** (1.0 / q)
           * (np.cos((1.0 - q) * V) / W) ** ((1.0 - q) / q))
    return out


def occupation_mc(model: ModelSpec, t: float, n_paths: int, dt: float,
                  seed: int) -> tuple:
    """Monte Carlo estimate of E int_0^t f(Xbar_s) ds, with stderr.

    Xbar is the symmetrized process with exponent 2 RePsi; simulable for
    d = 1 stable exponents (Brownian increments are exact; stable
    increments use the polar method).  The occupation Riemann sum
    evaluates f at spatial midpoints; the resulting bias for kernels
    singular at 0 is not corrected.
    """
    from .streams import stream

    exp = model.exponent
    if not isinstance(exp, IsotropicStable) or exp.dim != 1:
        raise UnsupportedError("occupation_mc needs a d = 1 stable exponent")
    if not model.kernel.spatial_eval_available:
        raise UnsupportedError("occupation_mc needs a spatially evaluable kernel")
    n_steps = int(round(t / dt))
    if abs(n_steps * dt - t) > 1e-9 * t:
        raise ValueError("t must be a multiple of dt")
    q, c = exp.q, exp.c
    kernel = model.kernel
    try:
        kernel.f_radial(np.array([1.0]))
        f_vec = kernel.f_radial
    except NotImplementedError:
        f_vec = np.vectorize(lambda z: kernel.f(z))
    totals = np.empty(n_paths)
    for i in range(n_paths):
        gen = stream(seed, i)
        if q == 2.0:
            inc = gen.normal(0.0, math.sqrt(4.0 * c * dt), n_steps)
        else:
            inc = (2.0 * c * dt) ** (1.0 / q) * _stable_standard(gen, q, n_steps)
        path = np.concatenate(([0.0], np.cumsum(inc)))
        mid = 0.5 * (path[:-1] + path[1:])
        totals[i] = dt * float(np.sum(f_vec(mid)))
    mean = float(np.mean(totals))
    stderr = float(np.std(totals, ddof=1) / math.sqrt(n_paths))
    return mean, stderr


def classify_transience(model: ModelSpec) -> str:
    """Finite vs infinite total occupation, decided by Upsilon(0)."""
    return FINITE_TOTAL_OCCUPATION if not upsilon(model, 0.0).divergent \
        else INFINITE_TOTAL_OCCUPATION
