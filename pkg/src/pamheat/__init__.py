"""Numerical toolkit for the stochastic heat equation with colored noise.

Modules: levy (characteristic exponents, transition densities), kernels
(correlation kernels and spectral densities), potential (resolvent
potentials, existence criteria, occupation functionals), bounds (moment
growth-rate sandwiches and phase thresholds), regularity (canonical
metric and entropy verdicts), simulate (lattice ensemble runs), cli.
"""

from .errors import (
    DensityUnavailableError,
    IndeterminateError,
    InfiniteAmplitudeError,
    InvalidOrderError,
    NotApplicableError,
    PamheatError,
    QuadratureError,
    UnsupportedError,
)
from .kernels import (
    CauchyKernel,
    CorrelationKernel,
    LogCorrectedKernel,
    OrnsteinUhlenbeckKernel,
    PoissonKernel,
    RieszKernel,
    kernel_from_json,
)
from .levy import (
    CharExponent,
    IsotropicStable,
    SubordinatedBrownian,
    TableDriven,
    exponent_from_json,
    hawkes_condition,
    transition_density,
)
from .model import (
    BoundedFunction,
    DeltaMass,
    DriftSpec,
    ModelSpec,
    SigmaSpec,
    model_from_json,
    model_to_json,
    pam_model,
)
from .bounds import (
    largest_hermite_zero,
    lyapunov_report,
    pam_phase_threshold,
    upper_exponent,
)
from .potential import (
    amplitude_A,
    dalang_condition,
    occupation_mc,
    potential_profile,
    upsilon,
)
from .regularity import (
    canonical_distance,
    counterexample_classifier,
    entropy_verdict,
    linear_variance,
)
from .simulate import LatticeSpec, estimate_exponent, run_linear_validation

__version__ = "0.1.0"
