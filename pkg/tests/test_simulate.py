import json
import math

import numpy as np
import pytest

from pamheat.errors import UnsupportedError
from pamheat.model import (
    BoundedFunction,
    DeltaMass,
    DriftSpec,
    ModelSpec,
    SigmaSpec,
    pam_model,
)
from pamheat.simulate import (
    LatticeSpec,
    delta_initial,
    discrete_linear_variance,
    estimate_exponent,
    make_state,
    run_linear_validation,
    step,
    synthesize_noise_increment,
)
from pamheat.streams import stream


def _linear_model(dim=1):
    from pamheat.kernels import RieszKernel
    from pamheat.levy import IsotropicStable

    return ModelSpec(
        exponent=IsotropicStable(q=2.0, c=1.0, dim=dim),
        kernel=RieszKernel(b=0.5 * dim, c=1.0, dim=dim),
        sigma=SigmaSpec.constant(1.0),
    )


def test_lattice_spec_validation():
    with pytest.raises(ValueError):
        LatticeSpec(d=1, N=100, L=8.0, dt=1e-3, T=0.1, M=1, seed=0)
    with pytest.raises(UnsupportedError):
        LatticeSpec(d=3, N=64, L=8.0, dt=1e-3, T=0.1, M=1, seed=0)


def test_delta_field_has_unit_mass():
    m = pam_model(q=2.0, b=0.5)
    m = ModelSpec(exponent=m.exponent, kernel=m.kernel, sigma=m.sigma,
                  initial=DeltaMass(z=(0.0,)))
    lattice = LatticeSpec(d=1, N=256, L=16.0, dt=1e-3, T=0.01, M=2, seed=1)
    state = delta_initial(m, lattice)
    cell = lattice.L / lattice.N
    mass = float(state.u[0].sum()) * cell
    assert mass == pytest.approx(1.0, abs=1e-12)


def test_noise_increment_lag_covariance():
    lattice = LatticeSpec(d=1, N=128, L=16.0, dt=1.0, T=1.0, M=1, seed=9)
    kernel = pam_model(q=2.0, b=0.5).kernel
    gen = stream(11, 0)
    n_draws = 4000
    acc0 = acc1 = 0.0
    for _ in range(n_draws):
        w = synthesize_noise_increment(kernel, lattice, gen)
        acc0 += float(np.mean(w * w))
        acc1 += float(np.mean(w * np.roll(w, 1)))
    # mode-sum targets at lags 0 and one cell
    norms = lattice.xi_norm()
    with np.errstate(divide="ignore"):
        fhat = np.where(norms > 0, kernel.fhat_radial(norms), 0.0)
    cell = lattice.L / lattice.N
    want0 = float(fhat.sum()) / lattice.L
    want1 = float((fhat * np.cos(norms * cell)).sum()) / lattice.L
    assert acc0 / n_draws == pytest.approx(want0, rel=0.05)
    assert acc1 / n_draws == pytest.approx(want1, rel=0.05)


def test_deterministic_reproducibility():
    m = pam_model(q=2.0, b=0.5, kappa=1.0)
    lattice = LatticeSpec(d=1, N=64, L=8.0, dt=1e-3, T=0.05, M=3, seed=42)
    r1 = estimate_exponent(m, lattice, p=2)
    r2 = estimate_exponent(m, lattice, p=2)
    np.testing.assert_array_equal(r1.mp_site, r2.mp_site)
    assert r1.gamma_hat == r2.gamma_hat


def test_mass_term_shifts_growth():
    # lam only multiplies every step by e^{dt lam / 2}; trajectories with
    # and without mass are related by an exact exponential factor
    base = pam_model(q=2.0, b=0.5, kappa=1.0)
    lam = 1.5
    massive = ModelSpec(exponent=base.exponent, kernel=base.kernel,
                        sigma=base.sigma, drift=DriftSpec.massive(lam),
                        initial=base.initial)
    lattice = LatticeSpec(d=1, N=64, L=8.0, dt=1e-3, T=0.05, M=2, seed=5)
    s0 = make_state(base, lattice)
    s1 = make_state(massive, lattice)
    gens0 = [stream(lattice.seed, i) for i in range(lattice.M)]
    gens1 = [stream(lattice.seed, i) for i in range(lattice.M)]
    for n in range(1, 21):
        step(s0, base, lattice, gens0)
        step(s1, massive, lattice, gens1)
        factor = math.exp(n * lattice.dt * lam / 2.0)
        np.testing.assert_allclose(s1.u, s0.u * factor, rtol=1e-10)


def test_linear_validation_small_lattice():
    m = _linear_model()
    lattice = LatticeSpec(d=1, N=128, L=16.0, dt=1e-3, T=0.25, M=300, seed=2)
    worst = run_linear_validation(m, lattice, [0.1, 0.25])
    assert worst < 0.10


def test_discrete_linear_variance_positive_increasing():
    m = _linear_model()
    lattice = LatticeSpec(d=1, N=128, L=16.0, dt=1e-3, T=1.0, M=1, seed=0)
    vals = [discrete_linear_variance(m, lattice, t) for t in (0.1, 0.5, 1.0)]
    assert vals[0] > 0 and vals[0] < vals[1] < vals[2]


def test_sim_result_outputs(tmp_path):
    m = pam_model(q=2.0, b=0.5, kappa=1.0)
    lattice = LatticeSpec(d=1, N=64, L=8.0, dt=1e-3, T=0.05, M=4, seed=3)
    res = estimate_exponent(m, lattice, p=2)
    path = tmp_path / "traj.csv"
    res.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,m2_site,m2_avg,mp_site,mp_avg"
    summary = res.summary_json()
    assert set(summary) >= {"gamma_hat", "ci", "gamma_hat_avg", "ci_avg",
                            "window", "config_hash"}
    json.dumps(summary)


def test_nonconstant_bounded_data_rejected():
    m = pam_model(q=2.0, b=0.5)
    m = ModelSpec(exponent=m.exponent, kernel=m.kernel, sigma=m.sigma,
                  initial=BoundedFunction(inf=0.0, sup=1.0))
    lattice = LatticeSpec(d=1, N=64, L=8.0, dt=1e-3, T=0.05, M=1, seed=0)
    with pytest.raises(UnsupportedError):
        make_state(m, lattice)
