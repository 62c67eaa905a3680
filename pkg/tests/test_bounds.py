import math

import numpy as np
import pytest

from pamheat.bounds import (
    asymptotic_intermittency,
    largest_hermite_zero,
    lower_exponent2,
    lyapunov_report,
    massive_lower,
    massive_upper,
    pam_phase_threshold,
    temperate_existence,
    upper_exponent,
)
from pamheat.errors import InvalidOrderError, NotApplicableError
from pamheat.model import (
    BoundedFunction,
    DeltaMass,
    DriftSpec,
    ModelSpec,
    SigmaSpec,
    pam_model,
)


def test_hermite_zero_values():
    assert largest_hermite_zero(2) == 1.0
    assert largest_hermite_zero(4) == pytest.approx(
        math.sqrt(3.0 + math.sqrt(6.0)), abs=1e-12)


def test_hermite_zero_ratio_monotone():
    ratios = [largest_hermite_zero(p) / math.sqrt(p) for p in range(2, 41, 2)]
    assert np.all(np.diff(ratios) > 0)
    assert all(r > 1.0 for r in ratios[1:])
    assert ratios[-1] < 2.0


def test_hermite_zero_rejects_odd_or_small():
    for p in (1, 3, 0):
        with pytest.raises(InvalidOrderError):
            largest_hermite_zero(p)


def test_upper_equals_lower_in_d1_pam():
    m = pam_model(q=2.0, b=0.5, kappa=1.0)
    up = upper_exponent(m, 2)
    lo = lower_exponent2(m)
    assert lo == pytest.approx(up, rel=1e-6)
    assert lo > 0.0


def test_massive_additivity_machine_precision():
    m = pam_model(q=2.0, b=0.5, kappa=1.0)
    base_up = massive_upper(m, 2, 0.0)
    base_lo = massive_lower(m, 0.0)
    for lam in (-3.0, -0.1, 0.7, 12.0):
        assert massive_upper(m, 2, lam) == base_up + lam
        assert massive_lower(m, lam) == base_lo + lam


def test_phase_threshold_printed_form():
    b, kappa = 0.5, 1.0
    printed = -(abs(kappa) ** (4.0 / (1.0 + b))
                * 8.0 ** (-(1.0 - b) / (1.0 + b))
                * (math.gamma(b / 2.0) * math.gamma((b + 1.0) / 2.0)
                   / math.sqrt(math.pi)) ** (2.0 / (1.0 + b)))
    lo, hi = pam_phase_threshold(1, 2.0, b, kappa)
    assert lo == pytest.approx(printed, abs=1e-12)
    assert hi == pytest.approx(printed, abs=1e-12)


def test_phase_threshold_ordering_d2():
    lo, hi = pam_phase_threshold(2, 2.0, 1.5, 1.0)
    assert hi < lo < 0.0


def test_lower_bound_preconditions():
    m = pam_model(q=2.0, b=0.5)
    no_lower = ModelSpec(exponent=m.exponent, kernel=m.kernel,
                         sigma=SigmaSpec(lip_sigma=1.0, lower_linear=0.0,
                                         sigma0=0.0))
    with pytest.raises(NotApplicableError):
        lower_exponent2(no_lower)


def test_lyapunov_report_verdicts():
    m = pam_model(q=2.0, b=0.5, kappa=1.0)
    rep = lyapunov_report(m, 2)
    assert rep.verdict == "WeaklyIntermittent"
    assert rep.lower2 <= rep.upper + 1e-9
    quiet = ModelSpec(exponent=m.exponent, kernel=m.kernel,
                      sigma=SigmaSpec.constant(0.0))
    assert lyapunov_report(quiet, 2).verdict == "NotWeaklyIntermittent"


def test_asymptotic_intermittency_threshold_structure():
    m = pam_model(q=2.0, b=0.5, kappa=1.0, eta=1.0)
    verdict = asymptotic_intermittency(m)
    assert verdict.beta0 > 0
    assert "sqrt" in verdict.eta_threshold_formula


def test_temperate_existence_delta_data():
    good = pam_model(q=2.0, b=0.5)
    probe = ModelSpec(exponent=good.exponent, kernel=good.kernel,
                      sigma=good.sigma, drift=DriftSpec.zero(),
                      initial=DeltaMass(z=(0.0,)))
    assert temperate_existence(probe)
    with pytest.raises(NotApplicableError):
        temperate_existence(good)  # bounded data is outside the criterion
