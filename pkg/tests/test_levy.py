import math

import numpy as np
import pytest

from pamheat.errors import DensityUnavailableError
from pamheat.levy import (
    IsotropicStable,
    SubordinatedBrownian,
    SubordinatorSpec,
    TableDriven,
    exponent_from_json,
    hawkes_condition,
    has_transition_densities,
    laplace_exponent,
    transition_density,
)


def test_laplace_exponent_asymptotics():
    spec = SubordinatorSpec(p=0.5, q_log=0.0)
    # small lambda: Phi(lam) ~ lam * int_0^{1/2} x^{-p} dx = lam * 2^{p-1}/(1-p)
    lam = 1e-8
    lead = lam * 0.5 ** (1.0 - spec.p) / (1.0 - spec.p)
    assert laplace_exponent(spec, lam) == pytest.approx(lead, rel=1e-3)
    # large lambda: Phi(lam) ~ (Gamma(1-p)/p) lam^p
    lam = 1e10
    lead = math.gamma(1.0 - spec.p) / spec.p * lam ** spec.p
    assert laplace_exponent(spec, lam) == pytest.approx(lead, rel=1e-3)


def test_laplace_exponent_monotone_concave():
    spec = SubordinatorSpec(p=0.7, q_log=1.0)
    lams = np.geomspace(1e-6, 1e6, 40)
    vals = np.array([laplace_exponent(spec, l) for l in lams])
    assert np.all(np.diff(vals) > 0)


def test_stable_exponent_and_log_form():
    exp = IsotropicStable(q=1.5, c=2.0, dim=2)
    rho = np.array([0.5, 3.0])
    np.testing.assert_allclose(exp.re_psi_radial(rho), 2.0 * rho ** 1.5)
    t = math.log(7.0)
    assert exp.log_re_psi_radial(t) == pytest.approx(
        math.log(2.0 * 7.0 ** 1.5), rel=1e-12)


def test_subordinated_matches_laplace_of_half_norm_sq():
    spec = SubordinatorSpec(p=0.6, q_log=2.0)
    exp = SubordinatedBrownian(spec=spec, dim=1)
    rho = 3.7
    want = laplace_exponent(spec, rho * rho / 2.0)
    assert float(exp.re_psi_radial(np.array([rho]))[0]) == pytest.approx(
        want, rel=1e-6)


def _bounded_exponent():
    radii = np.concatenate(([0.0], np.geomspace(1e-3, 1e3, 50)))
    return TableDriven(radii=tuple(radii), values=tuple(np.tanh(radii)), dim=1)


def test_hawkes_verdicts():
    assert hawkes_condition(IsotropicStable(q=2.0, c=1.0, dim=1), 1.0)
    assert hawkes_condition(IsotropicStable(q=0.5, c=1.0, dim=3), 2.0)
    assert not hawkes_condition(_bounded_exponent(), 10.0)


def test_gaussian_density_closed_form():
    exp = IsotropicStable(q=2.0, c=1.0, dim=1)
    # RePsi = rho^2 gives variance 2t per coordinate
    t = 0.3
    for x in (0.0, 0.4, 1.7):
        want = math.exp(-x * x / (4.0 * t)) / math.sqrt(4.0 * math.pi * t)
        assert transition_density(exp, t, [x]) == pytest.approx(want, abs=1e-12)


def test_cauchy_density_closed_form():
    exp = IsotropicStable(q=1.0, c=1.0, dim=1)
    t = 0.8
    for x in (0.0, 1.1, 6.0):
        want = t / (math.pi * (t * t + x * x))
        assert transition_density(exp, t, [x]) == pytest.approx(want, abs=1e-10)


def test_density_unavailable_for_bounded_exponent():
    bounded = _bounded_exponent()
    assert not has_transition_densities(bounded)
    with pytest.raises(DensityUnavailableError):
        transition_density(bounded, 1.0, [0.0])


def test_exponent_json_round_trip():
    exp = IsotropicStable(q=1.5, c=0.7, dim=2)
    assert exponent_from_json(exp.to_json()) == exp
    table = _bounded_exponent()
    rebuilt = exponent_from_json(table.to_json())
    assert rebuilt.radii == table.radii and rebuilt.values == table.values
