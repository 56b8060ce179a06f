"""Symmetric U-statistic kernels, their first projections, and domination pairs.

A kernel of degree k is a symmetric real function rho(x_1, ..., x_k).  The
first projection rho_1(x) = E[rho(x, X_2, ..., X_k)] drives both the limiting
variance and the block-estimator plug-in; the built-in kernels carry closed
forms for rho_1 (and rho_2 at degree 3) valid for any marginal with finite
moments.

Domination pairs (f, f_tilde) with f_tilde + f and f_tilde - f nondecreasing
are the device that extends partial-sum normality from monotone to
non-monotone transforms; they are certified here on finite grids.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .marginals import MarginalModel

Rho1Factory = Callable[[MarginalModel], Callable[[np.ndarray], np.ndarray]]
ThetaFactory = Callable[[MarginalModel], float]

KERNEL_IDS = ("variance", "squared_mean", "third_moment")

DOMINATION_TOL = 1e-12


class Monotonicity(enum.Enum):
    MONOTONE = "monotone"
    NON_MONOTONE = "non_monotone"
    UNKNOWN = "unknown"


def sorted_args(*arrays) -> list[np.ndarray]:
    """Put argument tuples in ascending order (selection only, no arithmetic).

    A symmetric kernel is unchanged in value, but its float evaluation can
    depend on the argument order; the canonical order makes evaluations
    bit-identical under permutation.
    """
    stacked = np.sort(np.stack(np.broadcast_arrays(*arrays)), axis=0)
    return [stacked[i] for i in range(stacked.shape[0])]


@dataclass(frozen=True)
class SymmetricKernel:
    """Degree-k symmetric kernel with optional analytic projections.

    ``fn`` must be vectorized over same-shape array arguments and genuinely
    symmetric: calls normalize the argument order, so evaluation is exactly
    permutation invariant.  ``rho1``, ``rho2`` and ``theta`` are factories
    taking a MarginalModel and returning the projection function (resp. the
    kernel mean); they are None when no closed form is available.
    """

    kernel_id: str
    degree: int
    fn: Callable[..., np.ndarray]
    monotone: Monotonicity = Monotonicity.UNKNOWN
    rho1: Rho1Factory | None = None
    rho2: Rho1Factory | None = None
    theta: ThetaFactory | None = None

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("kernel degree must be >= 1")

    def __call__(self, *xs):
        if len(xs) != self.degree:
            raise ValueError(f"kernel {self.kernel_id!r} takes {self.degree} arguments")
        args = sorted_args(*[np.asarray(x, dtype=float) for x in xs])
        return self.fn(*args)

    @property
    def has_analytic_projections(self) -> bool:
        if self.theta is None or self.rho1 is None:
            return False
        return self.degree < 3 or self.rho2 is not None


# -- built-in kernels --------------------------------------------------------


def builtin_variance_kernel() -> SymmetricKernel:
    """rho(x, y) = (x - y)^2 / 2, estimating the marginal variance.

    rho_1(x) = ((x - mu)^2 + mu2) / 2 and theta = mu2 for any marginal with
    mean mu and variance mu2.  rho_1 is non-monotone (a parabola).
    """

    def rho1(m: MarginalModel):
        mu, v = m.mean, m.var
        return lambda x: 0.5 * ((np.asarray(x, dtype=float) - mu) ** 2 + v)

    return SymmetricKernel(
        kernel_id="variance",
        degree=2,
        fn=lambda x, y: 0.5 * (x - y) ** 2,
        monotone=Monotonicity.NON_MONOTONE,
        rho1=rho1,
        theta=lambda m: m.var,
    )


def builtin_squared_mean_kernel() -> SymmetricKernel:
    """rho(x, y) = x * y, estimating the squared mean.

    rho_1(x) = x * mu and theta = mu^2; the centered first component is then
    x * mu - mu^2.  rho_1 is monotone (for mu >= 0).
    """

    def rho1(m: MarginalModel):
        mu = m.mean
        return lambda x: np.asarray(x, dtype=float) * mu

    return SymmetricKernel(
        kernel_id="squared_mean",
        degree=2,
        fn=lambda x, y: x * y,
        monotone=Monotonicity.MONOTONE,
        rho1=rho1,
        theta=lambda m: m.mean**2,
    )


def builtin_third_moment_kernel() -> SymmetricKernel:
    """Degree-3 kernel whose U-statistic is the usual third-central-moment estimator.

    rho is location invariant, so projections for a marginal with mean mu are
    the mean-zero closed forms evaluated at centered arguments:

        rho_1(x) = (2 mu3 + u^3) / 3 - mu2 u,            u = x - mu
        rho_2(x, y) = (mu3 + u^3 + v^3) / 3 - (u^2 v + v^2 u + mu2 (u + v)) / 2
        theta = mu3
    """

    def fn(x, y, z):
        return (
            (x**3 + y**3 + z**3) / 3.0
            - (x**2 * (y + z) + y**2 * (x + z) + z**2 * (y + x)) / 2.0
            + 2.0 * x * y * z
        )

    def rho1(m: MarginalModel):
        mu, mu2, mu3 = m.mean, m.mu2, m.mu3

        def f(x):
            u = np.asarray(x, dtype=float) - mu
            return (2.0 * mu3 + u**3) / 3.0 - mu2 * u

        return f

    def rho2(m: MarginalModel):
        mu, mu2, mu3 = m.mean, m.mu2, m.mu3

        def f(x, y):
            u = np.asarray(x, dtype=float) - mu
            v = np.asarray(y, dtype=float) - mu
            return (mu3 + u**3 + v**3) / 3.0 - (u**2 * v + v**2 * u + mu2 * (u + v)) / 2.0

        return f

    return SymmetricKernel(
        kernel_id="third_moment",
        degree=3,
        fn=fn,
        monotone=Monotonicity.NON_MONOTONE,
        rho1=rho1,
        rho2=rho2,
        theta=lambda m: m.mu3,
    )


_BUILTINS = {
    "variance": builtin_variance_kernel,
    "squared_mean": builtin_squared_mean_kernel,
    "third_moment": builtin_third_moment_kernel,
}


def kernel_by_id(kernel_id: str) -> SymmetricKernel:
    try:
        return _BUILTINS[kernel_id]()
    except KeyError:
        raise ValueError(
            f"unknown kernel id {kernel_id!r}; expected one of {KERNEL_IDS}"
        ) from None


# -- domination machinery ----------------------------------------------------


@dataclass(frozen=True)
class DominationPair:
    """Pair (f, f_tilde) meant to satisfy: f_tilde + f and f_tilde - f nondecreasing."""

    f: Callable[[np.ndarray], np.ndarray]
    f_tilde: Callable[[np.ndarray], np.ndarray]
    provenance: str  # "user_supplied" | "bounded_variation_construction" | "identity"


def default_domination_grid(
    marginal: MarginalModel | None = None, points: int = 2001
) -> np.ndarray:
    """Certification grid: `points` quantiles of the marginal between 1e-4 and 1 - 1e-4.

    Falls back to standard-normal quantiles when no marginal is given.
    """
    m = marginal if marginal is not None else MarginalModel.gaussian(0.0, 1.0)
    q = np.linspace(1e-4, 1.0 - 1e-4, points)
    grid = np.asarray(m.ppf(q), dtype=float)
    return np.unique(grid)


def _is_nondecreasing(values: np.ndarray, tol: float = DOMINATION_TOL) -> bool:
    return bool(np.all(np.diff(values) >= -tol))


def check_domination(pair: DominationPair, grid) -> bool:
    """True iff f_tilde + f and f_tilde - f are nondecreasing along the grid."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2 or not np.all(np.diff(grid) > 0):
        raise ValueError("grid must be strictly increasing with length >= 2")
    fv = np.asarray(pair.f(grid), dtype=float)
    gv = np.asarray(pair.f_tilde(grid), dtype=float)
    return _is_nondecreasing(gv + fv) and _is_nondecreasing(gv - fv)


def bv_domination(
    f_increasing_part: Callable,
    f_decreasing_negpart: Callable,
    grid=None,
) -> DominationPair:
    """Domination pair for f = U1 - U2 from its Jordan decomposition.

    Both parts must be nondecreasing (checked on the grid); the dominating
    function is f_tilde = U1 + U2.
    """
    g = np.asarray(grid, dtype=float) if grid is not None else default_domination_grid()
    u1 = np.asarray(f_increasing_part(g), dtype=float)
    u2 = np.asarray(f_decreasing_negpart(g), dtype=float)
    if not _is_nondecreasing(u1):
        raise ValueError("increasing part fails the grid monotonicity check")
    if not _is_nondecreasing(u2):
        raise ValueError("decreasing-negative part fails the grid monotonicity check")
    return DominationPair(
        f=lambda x: f_increasing_part(x) - f_decreasing_negpart(x),
        f_tilde=lambda x: f_increasing_part(x) + f_decreasing_negpart(x),
        provenance="bounded_variation_construction",
    )


def identity_domination(f: Callable) -> DominationPair:
    """f dominated by itself; valid when f is already nondecreasing."""
    return DominationPair(f=f, f_tilde=f, provenance="identity")


def variance_rho1_domination(marginal: MarginalModel) -> DominationPair:
    """Domination pair for the variance-kernel first projection ((x-mu)^2 + mu2)/2.

    Splits the parabola at its vertex: the rising branch plus any nondecreasing
    linear part goes to U1, the rest to U2.  For mu >= 0 the dominating
    function is (x^2 1{x>=0} + 2 x mu + mu^2 + mu2 - x^2 1{x<=0}) / 2.
    """
    mu, v = marginal.mean, marginal.var
    mu_pos, mu_neg = max(mu, 0.0), min(mu, 0.0)

    def u1(x):
        x = np.asarray(x, dtype=float)
        return 0.5 * (x**2 * (x >= 0) + mu**2 + v) - mu_neg * x

    def u2(x):
        x = np.asarray(x, dtype=float)
        return -0.5 * x**2 * (x <= 0) + mu_pos * x

    return bv_domination(u1, u2, grid=default_domination_grid(marginal))


def third_moment_rho1_domination(marginal: MarginalModel) -> DominationPair:
    """Domination pair for the third-moment first projection (2 mu3 + u^3)/3 - mu2 u."""
    mu, mu2, mu3 = marginal.mean, marginal.mu2, marginal.mu3

    def u1(x):
        u = np.asarray(x, dtype=float) - mu
        return (2.0 * mu3 + u**3) / 3.0

    def u2(x):
        u = np.asarray(x, dtype=float) - mu
        return mu2 * u

    return bv_domination(u1, u2, grid=default_domination_grid(marginal))
