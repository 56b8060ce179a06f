"""Generators for stationary positively associated sequences with known autocovariance.

Every family is associated by construction: positively correlated Gaussian
vectors are associated, nonnegative moving averages and nondecreasing
pointwise transforms preserve association.  The AR(1) family starts from its
exact stationary law, so no burn-in is needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from scipy.signal import lfilter

from .marginals import MarginalModel


@dataclass(frozen=True)
class SeedSpec:
    """Reproducible stream id: identical (seed, stream) gives identical output."""

    seed: int
    stream: int = 0

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(
            np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream,))
        )

    def shifted(self, offset: int) -> "SeedSpec":
        return SeedSpec(self.seed, self.stream + offset)


@dataclass(frozen=True)
class IIDSpec:
    """Independent draws from a marginal (independence implies association)."""

    marginal: MarginalModel
    family: str = field(default="iid", init=False)

    def autocov(self, lag: int) -> float:
        return self.marginal.var if lag == 0 else 0.0

    def marginal_model(self) -> MarginalModel:
        return self.marginal

    @property
    def is_gaussian(self) -> bool:
        return self.marginal.kind == "gaussian"


@dataclass(frozen=True)
class GaussianAR1Spec:
    """X_t = mean + phi (X_{t-1} - mean) + eps_t with gaussian innovations.

    phi must lie in [0, 1): negative phi would break positive association.
    The stationary variance is innovation_sd^2 / (1 - phi^2) and the lag-j
    autocovariance decays as phi^j.
    """

    phi: float
    innovation_sd: float = 1.0
    mean: float = 0.0
    family: str = field(default="gaussian_ar1", init=False)

    def __post_init__(self):
        if not 0.0 <= self.phi < 1.0:
            raise ValueError(
                "phi must lie in [0, 1): negative autoregression is not "
                "positively associated and phi >= 1 is nonstationary"
            )
        if self.innovation_sd <= 0.0:
            raise ValueError("innovation_sd must be positive")

    @classmethod
    def unit_variance(cls, phi: float, mean: float = 0.0) -> "GaussianAR1Spec":
        """AR(1) scaled to unit stationary (marginal) variance."""
        return cls(phi=phi, innovation_sd=float(np.sqrt(1.0 - phi**2)), mean=mean)

    @property
    def stationary_var(self) -> float:
        return self.innovation_sd**2 / (1.0 - self.phi**2)

    def autocov(self, lag: int) -> float:
        return self.stationary_var * self.phi ** abs(lag)

    def marginal_model(self) -> MarginalModel:
        return MarginalModel.gaussian(self.mean, self.stationary_var)

    @property
    def is_gaussian(self) -> bool:
        return True


@dataclass(frozen=True)
class PositiveMASpec:
    """X_t = sum_i coeffs[i] * eps_{t-i} with standard normal innovations.

    All coefficients must be nonnegative, which makes X a nondecreasing
    function of independent variables and hence associated.
    """

    coeffs: tuple[float, ...]
    family: str = field(default="positive_ma", init=False)

    def __post_init__(self):
        if len(self.coeffs) == 0:
            raise ValueError("need at least one coefficient")
        if any(c < 0 for c in self.coeffs):
            raise ValueError(
                "negative moving-average coefficients break positive association"
            )
        if all(c == 0 for c in self.coeffs):
            raise ValueError("all-zero coefficients give a degenerate process")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def autocov(self, lag: int) -> float:
        lag = abs(lag)
        c = self.coeffs
        return float(sum(c[i] * c[i + lag] for i in range(len(c) - lag))) if lag <= self.order else 0.0

    def marginal_model(self) -> MarginalModel:
        return MarginalModel.gaussian(0.0, self.autocov(0))

    @property
    def is_gaussian(self) -> bool:
        return True


@dataclass(frozen=True)
class TransformedSpec:
    """Pointwise transform of a base process; analytic autocovariance is lost.

    The transform should be nondecreasing, or dominated in the f << f_tilde
    sense, for the downstream normality results to apply.
    """

    base: "AssocProcessSpec"
    transform: Callable[[np.ndarray], np.ndarray]
    label: str = "transformed"
    family: str = field(default="transformed", init=False)

    def autocov(self, lag: int) -> float:
        raise ValueError("transformed processes have no analytic autocovariance")

    def marginal_model(self) -> MarginalModel:
        raise ValueError("transformed processes have no analytic marginal")

    @property
    def is_gaussian(self) -> bool:
        return False


@dataclass(frozen=True)
class TruncatedSpec:
    """Base process clamped to [-c1, c1]; clamping preserves association.

    The base autocovariance is kept as an approximation and flagged as such.
    """

    base: "AssocProcessSpec"
    c1: float
    family: str = field(default="truncated", init=False)
    autocov_is_approximate: bool = field(default=True, init=False)

    def __post_init__(self):
        if not self.c1 > 0.0:
            raise ValueError("truncation bound c1 must be positive")

    def autocov(self, lag: int) -> float:
        return self.base.autocov(lag)

    def marginal_model(self) -> MarginalModel:
        raise ValueError("truncated processes have no analytic marginal")

    @property
    def is_gaussian(self) -> bool:
        return False


AssocProcessSpec = Union[IIDSpec, GaussianAR1Spec, PositiveMASpec, TransformedSpec, TruncatedSpec]


def truncate_bounded(spec: AssocProcessSpec, c1: float) -> TruncatedSpec:
    """Clamp the process to [-c1, c1] (a nondecreasing map, so association survives)."""
    return TruncatedSpec(base=spec, c1=float(c1))


def generate(spec: AssocProcessSpec, n: int, seed: SeedSpec) -> np.ndarray:
    """Stationary length-n sample path of the process, deterministic in the seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if isinstance(spec, IIDSpec):
        return spec.marginal.sample(n, seed.rng())
    if isinstance(spec, GaussianAR1Spec):
        rng = seed.rng()
        x0 = rng.normal(0.0, np.sqrt(spec.stationary_var))
        eps = rng.normal(0.0, spec.innovation_sd, size=n)
        out, _ = lfilter([1.0], [1.0, -spec.phi], eps, zi=np.array([spec.phi * x0]))
        return out + spec.mean
    if isinstance(spec, PositiveMASpec):
        rng = seed.rng()
        eps = rng.normal(size=n + spec.order)
        return np.convolve(eps, spec.coeffs, mode="valid")
    if isinstance(spec, TransformedSpec):
        return np.asarray(spec.transform(generate(spec.base, n, seed)), dtype=float)
    if isinstance(spec, TruncatedSpec):
        return np.clip(generate(spec.base, n, seed), -spec.c1, spec.c1)
    raise TypeError(f"unknown process spec {type(spec).__name__}")


def generate_batch(spec: AssocProcessSpec, n: int, replications: int, seed: SeedSpec) -> np.ndarray:
    """(replications, n) matrix; row r equals generate(spec, n, seed.shifted(r))."""
    return np.stack([generate(spec, n, seed.shifted(r)) for r in range(replications)])


def spec_to_dict(spec: AssocProcessSpec) -> dict:
    """JSON-ready description of a process spec (transforms only by label)."""
    if isinstance(spec, IIDSpec):
        m = spec.marginal
        return {
            "family": "iid",
            "marginal": {"kind": m.kind, "params": list(m.params)},
        }
    if isinstance(spec, GaussianAR1Spec):
        return {
            "family": "gaussian_ar1",
            "phi": spec.phi,
            "innovation_sd": spec.innovation_sd,
            "mean": spec.mean,
        }
    if isinstance(spec, PositiveMASpec):
        return {"family": "positive_ma", "coeffs": list(spec.coeffs)}
    if isinstance(spec, TransformedSpec):
        return {"family": "transformed", "label": spec.label, "base": spec_to_dict(spec.base)}
    if isinstance(spec, TruncatedSpec):
        return {"family": "truncated", "c1": spec.c1, "base": spec_to_dict(spec.base)}
    raise TypeError(f"unknown process spec {type(spec).__name__}")


def spec_from_dict(d: dict) -> AssocProcessSpec:
    """Inverse of spec_to_dict for the serializable families."""
    family = d.get("family")
    if family == "iid":
        m = d["marginal"]
        return IIDSpec(MarginalModel(m["kind"], tuple(m["params"])))
    if family == "gaussian_ar1":
        return GaussianAR1Spec(
            phi=float(d["phi"]),
            innovation_sd=float(d.get("innovation_sd", 1.0)),
            mean=float(d.get("mean", 0.0)),
        )
    if family == "positive_ma":
        return PositiveMASpec(tuple(float(c) for c in d["coeffs"]))
    if family == "truncated":
        return TruncatedSpec(base=spec_from_dict(d["base"]), c1=float(d["c1"]))
    raise ValueError(f"cannot rebuild process family {family!r} from a dict")
