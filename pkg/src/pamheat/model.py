"""Model description: noise coefficient, drift, initial data, full model.

A ModelSpec bundles the operator (through its characteristic exponent),
the noise correlation kernel, the Lipschitz data of sigma and b, and the
initial condition.  Everything except callable overrides round-trips
through a strict, versioned JSON schema.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import UnsupportedError
from .kernels import CorrelationKernel, kernel_from_json
from .levy import CharExponent, exponent_from_json

__all__ = [
    "SCHEMA_VERSION",
    "SigmaSpec",
    "DriftSpec",
    "BoundedFunction",
    "DeltaMass",
    "FiniteMeasure",
    "ModelSpec",
    "model_to_json",
    "model_from_json",
    "pam_model",
]

SCHEMA_VERSION = 1


def _require_keys(obj: dict, allowed, context: str):
    unknown = set(obj) - set(allowed)
    if unknown:
        raise ValueError(f"unknown fields {sorted(unknown)} in {context}")


@dataclass(frozen=True)
class SigmaSpec:
    """Lipschitz data of the noise coefficient sigma.

    lower_linear is the constant L with sigma(z) >= L|z| (0 when no such
    bound is available); q_inf is liminf sigma(z)/|z| when known;
    linear_kappa is set when sigma(u) = kappa * u exactly.
    """

    lip_sigma: float
    lower_linear: float = 0.0
    sigma0: float = 0.0
    q_inf: Optional[float] = None
    linear_kappa: Optional[float] = None

    def __post_init__(self):
        if self.lip_sigma < 0 or self.lower_linear < 0 or self.sigma0 < 0:
            raise ValueError("sigma constants must be nonnegative")
        if self.lower_linear > 0 and self.lower_linear > self.lip_sigma + 1e-15:
            raise ValueError("lower_linear cannot exceed lip_sigma")
        if self.linear_kappa is not None:
            k = abs(self.linear_kappa)
            if self.lip_sigma != k or self.lower_linear != k or self.sigma0 != 0.0:
                raise ValueError("linear sigma requires lip = lower = |kappa|, sigma0 = 0")

    @classmethod
    def linear(cls, kappa: float) -> "SigmaSpec":
        k = abs(kappa)
        return cls(lip_sigma=k, lower_linear=k, sigma0=0.0, q_inf=k, linear_kappa=kappa)

    @classmethod
    def constant(cls, value: float) -> "SigmaSpec":
        return cls(lip_sigma=0.0, sigma0=abs(value))

    def as_callable(self) -> Callable:
        if self.linear_kappa is not None:
            k = self.linear_kappa
            return lambda u: k * u
        if self.lip_sigma == 0.0:
            c = self.sigma0
            return lambda u: c + 0.0 * u
        raise UnsupportedError(
            "no callable form; only linear and constant sigma are simulable"
        )

    def to_json(self):
        out = {"lip_sigma": self.lip_sigma, "lower_linear": self.lower_linear,
               "sigma0": self.sigma0}
        if self.q_inf is not None:
            out["q_inf"] = self.q_inf
        if self.linear_kappa is not None:
            out["linear_kappa"] = self.linear_kappa
        return out

    @classmethod
    def from_json(cls, obj):
        _require_keys(obj, {"lip_sigma", "lower_linear", "sigma0", "q_inf",
                            "linear_kappa"}, "sigma")
        return cls(**obj)


@dataclass(frozen=True)
class DriftSpec:
    """Lipschitz data of the drift b; mass_lambda is set when b(u) = lambda*u/2."""

    lip_b: float = 0.0
    b0: float = 0.0
    mass_lambda: Optional[float] = None

    def __post_init__(self):
        if self.lip_b < 0 or self.b0 < 0:
            raise ValueError("drift constants must be nonnegative")
        if self.mass_lambda is not None:
            if self.lip_b != abs(self.mass_lambda) / 2.0 or self.b0 != 0.0:
                raise ValueError("massive drift requires lip_b = |lambda|/2, b0 = 0")

    @classmethod
    def zero(cls) -> "DriftSpec":
        return cls()

    @classmethod
    def massive(cls, lam: float) -> "DriftSpec":
        return cls(lip_b=abs(lam) / 2.0, b0=0.0, mass_lambda=lam)

    def to_json(self):
        out = {"lip_b": self.lip_b, "b0": self.b0}
        if self.mass_lambda is not None:
            out["mass_lambda"] = self.mass_lambda
        return out

    @classmethod
    def from_json(cls, obj):
        _require_keys(obj, {"lip_b", "b0", "mass_lambda"}, "drift")
        return cls(**obj)


@dataclass(frozen=True)
class BoundedFunction:
    """Initial data bounded between inf and sup; inf is the eta of the
    lower-bound theorems."""

    inf: float
    sup: float

    def __post_init__(self):
        if self.inf < 0 or self.sup < self.inf:
            raise ValueError("need 0 <= inf <= sup")

    def to_json(self):
        return {"kind": "bounded", "inf": self.inf, "sup": self.sup}


@dataclass(frozen=True)
class DeltaMass:
    """Unit point mass at z."""

    z: tuple = (0.0,)

    def to_json(self):
        return {"kind": "delta", "z": list(self.z)}


@dataclass(frozen=True)
class FiniteMeasure:
    """Finite measure given through an evaluator of |u0_hat|; not serializable."""

    u0_hat_abs: Callable = field(compare=False)

    def to_json(self):
        raise UnsupportedError("FiniteMeasure initial data has no JSON form")


def _initial_from_json(obj):
    kind = obj.get("kind")
    if kind == "bounded":
        _require_keys(obj, {"kind", "inf", "sup"}, "initial")
        return BoundedFunction(inf=obj["inf"], sup=obj["sup"])
    if kind == "delta":
        _require_keys(obj, {"kind", "z"}, "initial")
        return DeltaMass(z=tuple(obj["z"]))
    raise ValueError(f"unknown initial-data kind {kind!r}")


@dataclass(frozen=True)
class ModelSpec:
    """Full model: operator exponent, noise kernel, coefficients, initial data."""

    exponent: CharExponent
    kernel: CorrelationKernel
    sigma: SigmaSpec
    drift: DriftSpec = DriftSpec()
    initial: object = BoundedFunction(inf=1.0, sup=1.0)

    def __post_init__(self):
        if self.exponent.dim != self.kernel.dim:
            raise ValueError(
                f"exponent dimension {self.exponent.dim} != kernel dimension {self.kernel.dim}"
            )

    @property
    def dim(self) -> int:
        return self.exponent.dim


def model_to_json(model: ModelSpec) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "exponent": model.exponent.to_json(),
        "kernel": model.kernel.to_json(),
        "sigma": model.sigma.to_json(),
        "drift": model.drift.to_json(),
        "initial": model.initial.to_json(),
    }


def model_from_json(obj: dict) -> ModelSpec:
    _require_keys(obj, {"schema_version", "exponent", "kernel", "sigma",
                        "drift", "initial"}, "model")
    version = obj.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {version!r}")
    return ModelSpec(
        exponent=exponent_from_json(obj["exponent"]),
        kernel=kernel_from_json(obj["kernel"]),
        sigma=SigmaSpec.from_json(obj["sigma"]),
        drift=DriftSpec.from_json(obj["drift"]),
        initial=_initial_from_json(obj["initial"]),
    )


def pam_model(q: float, b: float, kappa: float = 1.0, dim: int = 1,
              mass_lambda: Optional[float] = None, eta: float = 1.0) -> ModelSpec:
    """Multiplicative-noise benchmark: stable exponent, Riesz kernel, sigma = kappa*u."""
    from .kernels import RieszKernel
    from .levy import IsotropicStable

    drift = DriftSpec.massive(mass_lambda) if mass_lambda is not None else DriftSpec.zero()
    return ModelSpec(
        exponent=IsotropicStable(q=q, c=1.0, dim=dim),
        kernel=RieszKernel(b=b, c=1.0, dim=dim),
        sigma=SigmaSpec.linear(kappa),
        drift=drift,
        initial=BoundedFunction(inf=eta, sup=eta),
    )
