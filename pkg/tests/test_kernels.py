import math

import numpy as np
import pytest
from scipy import integrate

from pamheat.kernels import (
    CauchyKernel,
    LogCorrectedKernel,
    OrnsteinUhlenbeckKernel,
    PoissonKernel,
    RieszKernel,
    check_condition2,
    check_positive_definite,
    kernel_from_json,
    riesz_fourier_constant,
)


def _invert_radial_d1(kernel, x):
    """(2 pi)^{-1} int e^{i xi x} fhat(xi) dxi for even fhat, d = 1."""
    val, _ = integrate.quad(
        lambda rho: float(kernel.fhat_radial(np.atleast_1d(rho))[0]),
        0.0, np.inf, weight="cos", wvar=x, limit=400)
    return val / math.pi


@pytest.mark.parametrize("kernel", [
    OrnsteinUhlenbeckKernel(c1=1.3, c2=0.7, alpha=2, dim=1),
    OrnsteinUhlenbeckKernel(c1=0.9, c2=1.4, alpha=1, dim=1),
    PoissonKernel(c1=1.1, c2=2.0, dim=1),
    CauchyKernel(c1=1.0, c2=1.5, dim=1),
])
def test_fourier_pairs_by_inversion(kernel):
    for x in (0.0, 0.6, 2.3):
        want = kernel.f(np.array([x]))
        got = _invert_radial_d1(kernel, x)
        assert got == pytest.approx(want, rel=1e-8, abs=1e-12)


def test_riesz_fourier_constant_known_value():
    # d = 1, b = 1/2: C = pi^{1/2} 2^{1/2} Gamma(1/4) / Gamma(1/4) = sqrt(2 pi)
    assert riesz_fourier_constant(1, 0.5) == pytest.approx(
        math.sqrt(2.0 * math.pi), rel=1e-12)


def test_riesz_scaling():
    k = RieszKernel(b=0.5, c=2.0, dim=1)
    r = np.array([0.25, 4.0])
    np.testing.assert_allclose(k.f_radial(r), 2.0 * r ** (-0.5))
    np.testing.assert_allclose(
        k.fhat_radial(r), 2.0 * riesz_fourier_constant(1, 0.5) * r ** (-0.5))


@pytest.mark.parametrize("kernel", [
    OrnsteinUhlenbeckKernel(c1=1.0, c2=1.0, alpha=2, dim=2),
    PoissonKernel(c1=1.0, c2=1.0, dim=2),
    CauchyKernel(c1=1.0, c2=1.0, dim=2),
    RieszKernel(b=0.75, c=1.0, dim=1),
])
def test_positive_definiteness(kernel):
    assert check_positive_definite(kernel)


@pytest.mark.parametrize("kernel", [
    OrnsteinUhlenbeckKernel(c1=1.0, c2=2.0, alpha=1, dim=2),
    PoissonKernel(c1=1.0, c2=0.5, dim=3),
    CauchyKernel(c1=1.0, c2=1.0, dim=2),
])
def test_symmetry_and_monotonicity(kernel):
    assert check_condition2(kernel)


def test_log_corrected_is_spectral_only():
    k = LogCorrectedKernel(a=1.0, b_log=1.5, dim=3)
    assert not k.spatial_eval_available
    rho = np.geomspace(1e-2, 1e6, 30)
    vals = k.fhat_radial(rho)
    assert np.all(np.diff(vals) < 0) and vals[-1] > 0
    # log-space evaluator agrees with the direct one
    t = math.log(50.0)
    assert k.log_fhat_radial(t) == pytest.approx(
        math.log(float(k.fhat_radial(np.array([50.0]))[0])), rel=1e-9)


def test_kernel_json_round_trip():
    for k in (RieszKernel(b=0.3, c=1.2, dim=2),
              PoissonKernel(c1=0.5, c2=3.0, dim=1),
              LogCorrectedKernel(a=1.0, b_log=2.5, dim=3)):
        assert kernel_from_json(k.to_json()) == k
