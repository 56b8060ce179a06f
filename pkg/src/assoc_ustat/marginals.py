"""One-dimensional marginal models: moments, sampling, quantiles, expectations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import stats

_GH_NODES = 64


def _hermite_rule(n_nodes: int = _GH_NODES) -> tuple[np.ndarray, np.ndarray]:
    """Probabilists' Gauss-Hermite rule: nodes z and weights summing to 1."""
    z, w = np.polynomial.hermite_e.hermegauss(n_nodes)
    return z, w / w.sum()


@dataclass(frozen=True, eq=False)
class MarginalModel:
    """Marginal law of a single observation.

    Supported kinds: ``gaussian(mu, var)`` (``var == 0`` is a point mass),
    ``uniform(a, b)`` and ``empirical(sample)``.  Central moments mu2..mu4
    are analytic for the parametric kinds and direct sums for the empirical
    one.
    """

    kind: str
    params: tuple[float, ...] = ()
    data: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind == "gaussian":
            if len(self.params) != 2 or self.params[1] < 0:
                raise ValueError("gaussian marginal needs (mu, var) with var >= 0")
        elif self.kind == "uniform":
            if len(self.params) != 2 or not self.params[0] < self.params[1]:
                raise ValueError("uniform marginal needs (a, b) with a < b")
        elif self.kind == "empirical":
            if self.data is None or len(self.data) == 0:
                raise ValueError("empirical marginal needs a nonempty sample")
            if not np.all(np.isfinite(self.data)):
                raise ValueError("empirical sample contains non-finite values")
        else:
            raise ValueError(f"unknown marginal kind {self.kind!r}")

    # -- constructors -------------------------------------------------------

    @classmethod
    def gaussian(cls, mu: float, var: float) -> "MarginalModel":
        return cls("gaussian", (float(mu), float(var)))

    @classmethod
    def uniform(cls, a: float, b: float) -> "MarginalModel":
        return cls("uniform", (float(a), float(b)))

    @classmethod
    def empirical(cls, sample) -> "MarginalModel":
        return cls("empirical", (), np.asarray(sample, dtype=float))

    @classmethod
    def point_mass(cls, c: float) -> "MarginalModel":
        return cls.gaussian(c, 0.0)

    # -- moments ------------------------------------------------------------

    @property
    def mean(self) -> float:
        if self.kind == "gaussian":
            return self.params[0]
        if self.kind == "uniform":
            return 0.5 * (self.params[0] + self.params[1])
        return float(np.mean(self.data))

    @property
    def var(self) -> float:
        """Second central moment mu2."""
        if self.kind == "gaussian":
            return self.params[1]
        if self.kind == "uniform":
            return (self.params[1] - self.params[0]) ** 2 / 12.0
        return float(np.mean((self.data - self.mean) ** 2))

    mu2 = var

    @property
    def mu3(self) -> float:
        if self.kind in ("gaussian", "uniform"):
            return 0.0
        return float(np.mean((self.data - self.mean) ** 3))

    @property
    def mu4(self) -> float:
        if self.kind == "gaussian":
            return 3.0 * self.params[1] ** 2
        if self.kind == "uniform":
            return (self.params[1] - self.params[0]) ** 4 / 80.0
        return float(np.mean((self.data - self.mean) ** 4))

    @property
    def is_point_mass(self) -> bool:
        return self.var == 0.0

    # -- sampling and quantiles ---------------------------------------------

    def sample(self, size, rng: np.random.Generator) -> np.ndarray:
        if self.kind == "gaussian":
            mu, var = self.params
            if var == 0.0:
                return np.full(size, mu)
            return rng.normal(mu, np.sqrt(var), size=size)
        if self.kind == "uniform":
            return rng.uniform(self.params[0], self.params[1], size=size)
        return rng.choice(self.data, size=size, replace=True)

    def ppf(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        if self.kind == "gaussian":
            mu, var = self.params
            if var == 0.0:
                return np.full_like(q, mu)
            return stats.norm.ppf(q, loc=mu, scale=np.sqrt(var))
        if self.kind == "uniform":
            a, b = self.params
            return a + q * (b - a)
        return np.quantile(self.data, q)

    # -- expectations -------------------------------------------------------

    def expect(self, fn: Callable[[np.ndarray], np.ndarray]) -> float:
        """E[fn(X)] by quadrature (gaussian/uniform) or exact average (empirical)."""
        if self.kind == "gaussian":
            mu, var = self.params
            if var == 0.0:
                return float(fn(np.asarray(mu)))
            z, w = _hermite_rule()
            return float(w @ fn(mu + np.sqrt(var) * z))
        if self.kind == "uniform":
            a, b = self.params
            z, w = np.polynomial.legendre.leggauss(_GH_NODES)
            x = 0.5 * (a + b) + 0.5 * (b - a) * z
            return float(0.5 * (w @ fn(x)))
        return float(np.mean(fn(self.data)))


def bivariate_gaussian_cov(
    fn: Callable[[np.ndarray], np.ndarray],
    mu: float,
    var: float,
    corr: float,
    n_nodes: int = _GH_NODES,
) -> float:
    """Cov(fn(X), fn(Y)) for (X, Y) bivariate normal, equal marginals, correlation corr.

    Tensor Gauss-Hermite quadrature; exact for polynomial fn up to degree
    ``2 * n_nodes - 1`` per coordinate.
    """
    if var == 0.0:
        return 0.0
    if not -1.0 <= corr <= 1.0:
        raise ValueError("correlation must lie in [-1, 1]")
    sd = np.sqrt(var)
    z, w = _hermite_rule(n_nodes)
    x = mu + sd * z
    mean_f = float(w @ fn(x))
    if abs(corr) == 1.0:
        second = float(w @ (fn(x) * fn(mu + sd * np.sign(corr) * z)))
        return second - mean_f**2
    y = mu + sd * (corr * z[:, None] + np.sqrt(1.0 - corr**2) * z[None, :])
    inner = fn(y) @ w  # integrate out the independent component
    second = float(w @ (fn(x) * inner))
    return second - mean_f**2
