"""Hoeffding decomposition of symmetric kernels and the limiting U-statistic variance.

For a degree-k kernel rho with projections
rho_c(x_1..x_c) = E[rho(x_1..x_c, X_{c+1}..X_k)] and theta = E[rho(X_1..X_k)],
the centered components are built by the recursion

    h1(x)       = rho_1(x) - theta
    h2(x, y)    = rho_2(x, y) - rho_1(x) - rho_1(y) + theta
    h3(x, y, z) = rho(x, y, z) - sum of h2 over pairs - sum of h1 - theta

and the U-statistic satisfies U_n = theta + sum_j C(k, j) H_n^(j) with
H_n^(j) the degree-j U-statistic of h_j.  Each h_c with c >= 2 is degenerate:
integrating out any single argument gives zero.

The limiting variance of sqrt(n) (U_n - theta) / k over a stationary sequence
is sigma_U^2 = Var(rho_1(X_1)) + 2 sum_{j>=1} Cov(rho_1(X_1), rho_1(X_{1+j})),
computed here by Gauss-Hermite quadrature for Gaussian-driven processes and by
long-path simulation otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .assocgen import AssocProcessSpec, GaussianAR1Spec, IIDSpec, PositiveMASpec, SeedSpec, generate
from .kernels import SymmetricKernel
from .marginals import MarginalModel, bivariate_gaussian_cov
from .ustat import subset_indices, u_statistic

_MC_CHUNK = 10**7
_MIN_MC_DRAWS = 10**4


@dataclass(frozen=True, eq=False)
class HoeffdingDecomposition:
    """Kernel mean theta plus centered components h_1..h_k for a marginal."""

    kernel: SymmetricKernel
    marginal: MarginalModel
    theta: float
    h_components: tuple[Callable, ...]
    rho_components: tuple[Callable, ...]  # rho_1, ..., rho_k (rho_k is the kernel itself)
    analytic: bool
    theta_se: float = 0.0

    @property
    def degree(self) -> int:
        return self.kernel.degree

    @property
    def rho1(self) -> Callable:
        return self.rho_components[0]


def _mc_projection(kernel: SymmetricKernel, c: int, draws: np.ndarray) -> Callable:
    """Monte Carlo rho_c: average the kernel over stored draws of the last k - c slots."""
    k = kernel.degree
    n_extra = k - c

    def proj(*args):
        xs = np.broadcast_arrays(*[np.asarray(a, dtype=float) for a in args])
        shape = xs[0].shape
        flat = [a.reshape(-1, 1) for a in xs]
        m = flat[0].shape[0]
        total = np.zeros(m)
        step = max(1, _MC_CHUNK // max(m, 1))
        for lo in range(0, len(draws), step):
            block = draws[lo : lo + step]
            extra = [block[:, t][None, :] for t in range(n_extra)]
            total += np.asarray(kernel.fn(*flat, *extra), dtype=float).sum(axis=1)
        out = total / len(draws)
        return out.reshape(shape) if shape else float(out[0])

    return proj


def _build_components(
    kernel: SymmetricKernel, theta: float, rho: tuple[Callable, ...]
) -> tuple[Callable, ...]:
    k = kernel.degree
    h1 = lambda x: np.asarray(rho[0](x), dtype=float) - theta
    if k == 1:
        return (h1,)
    h2 = lambda x, y: (
        np.asarray(rho[1](x, y), dtype=float) - rho[0](x) - rho[0](y) + theta
    )
    if k == 2:
        return (h1, h2)

    def h3(x, y, z):
        return (
            np.asarray(rho[2](x, y, z), dtype=float)
            - (h2(x, y) + h2(x, z) + h2(y, z))
            - (h1(x) + h1(y) + h1(z))
            - theta
        )

    return (h1, h2, h3)


def decompose(
    kernel: SymmetricKernel,
    marginal: MarginalModel,
    mc_draws: int = 10**5,
    rng: np.random.Generator | None = None,
    theta_se_tol: float | None = None,
) -> HoeffdingDecomposition:
    """Decomposition of a degree 1..3 kernel under the given marginal.

    Uses the kernel's closed-form projections when present; otherwise the
    projections are Monte Carlo averages over ``mc_draws`` marginal draws
    (common random numbers shared across evaluation points).  Raises if the
    Monte Carlo standard error of theta exceeds ``theta_se_tol``.
    """
    k = kernel.degree
    if not 1 <= k <= 3:
        raise ValueError("decomposition supports kernel degrees 1..3")

    if kernel.has_analytic_projections:
        theta = float(kernel.theta(marginal))
        rho: list[Callable] = []
        if k >= 2:
            rho.append(kernel.rho1(marginal))
        if k == 3:
            rho.append(kernel.rho2(marginal))
        rho.append(kernel.fn)
        comps = _build_components(kernel, theta, tuple(rho))
        return HoeffdingDecomposition(
            kernel=kernel,
            marginal=marginal,
            theta=theta,
            h_components=comps,
            rho_components=tuple(rho),
            analytic=True,
        )

    if mc_draws < _MIN_MC_DRAWS:
        raise ValueError(
            f"mc_draws must be >= {_MIN_MC_DRAWS} when analytic projections are absent"
        )
    rng = rng if rng is not None else np.random.default_rng(0)

    tuples = marginal.sample((mc_draws, k), rng)
    theta_vals = np.asarray(kernel.fn(*(tuples[:, c] for c in range(k))), dtype=float)
    theta = float(theta_vals.mean())
    theta_se = float(theta_vals.std(ddof=1) / math.sqrt(mc_draws))
    if theta_se_tol is not None and theta_se > theta_se_tol:
        raise RuntimeError(
            f"Monte Carlo standard error of theta ({theta_se:.3g}) exceeds "
            f"tolerance {theta_se_tol:.3g}; increase mc_draws"
        )

    draws = marginal.sample((mc_draws, max(k - 1, 1)), rng)
    rho = [_mc_projection(kernel, c, draws) for c in range(1, k)]
    rho.append(kernel.fn)
    comps = _build_components(kernel, theta, tuple(rho))
    return HoeffdingDecomposition(
        kernel=kernel,
        marginal=marginal,
        theta=theta,
        h_components=comps,
        rho_components=tuple(rho),
        analytic=False,
        theta_se=theta_se,
    )


def empirical_component(decomp: HoeffdingDecomposition, sample, j: int) -> float:
    """H_n^(j): average of h_j over all size-j index subsets of the sample."""
    x = np.asarray(sample, dtype=float)
    if not 1 <= j <= decomp.degree:
        raise ValueError(f"component order {j} outside 1..{decomp.degree}")
    n = len(x)
    if n < j:
        raise ValueError(f"sample size {n} is below the component order {j}")
    idx = subset_indices(n, j)
    vals = np.asarray(decomp.h_components[j - 1](*(x[idx[:, c]] for c in range(j))), dtype=float)
    return float(vals.sum() / len(vals))


def reconstruction_check(decomp: HoeffdingDecomposition, sample) -> float:
    """|U_n - theta - sum_j C(k, j) H_n^(j)|; tiny whenever evaluation is consistent."""
    x = np.asarray(sample, dtype=float)
    k = decomp.degree
    u = u_statistic(x, decomp.kernel).value
    acc = decomp.theta
    for j in range(1, k + 1):
        acc += math.comb(k, j) * empirical_component(decomp, x, j)
    return abs(u - acc)


# -- limiting variance --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AsymptoticVariance:
    """sigma_U^2 = sigma_1^2 + 2 sum_j sigma_1j^2 truncated at ``truncation_lag``.

    ``sigma1j_sq[j - 1]`` holds the lag-j covariance Cov(rho_1(X_1), rho_1(X_{1+j})).
    ``tail_bound`` is the geometric extrapolation added beyond the truncation.
    """

    sigma1_sq: float
    sigma1j_sq: np.ndarray
    sigmaU_sq: float
    truncation_lag: int
    tail_bound: float

    @property
    def sigma_u(self) -> float:
        return math.sqrt(self.sigmaU_sq)

    def to_json_dict(self) -> dict:
        return {
            "sigma1_sq": self.sigma1_sq,
            "sigma1j_sq": [float(v) for v in self.sigma1j_sq],
            "sigmaU_sq": self.sigmaU_sq,
            "truncation_lag": self.truncation_lag,
            "tail_bound": self.tail_bound,
        }


def _geometric_tail(sigma1j: np.ndarray, floor: float) -> float:
    """Extrapolate the truncated covariance tail from the fitted geometric decay."""
    mags = np.abs(sigma1j)
    usable = np.nonzero(mags > floor)[0]
    if len(usable) < 2 or usable[-1] != len(sigma1j) - 1:
        return 0.0
    window = usable[-min(10, len(usable)) :]
    slope = np.polyfit(window.astype(float), np.log(mags[window]), 1)[0]
    q = float(np.exp(slope))
    last = float(sigma1j[-1])
    if 0.0 < q < 1.0:
        return 2.0 * last * q / (1.0 - q)
    # decay not yet visible; report a crude linear cap instead of extrapolating
    return 2.0 * last * len(sigma1j)


def asymptotic_variance(
    rho1: Callable[[np.ndarray], np.ndarray],
    process: AssocProcessSpec,
    max_lag: int = 200,
    sim_length: int = 2 * 10**6,
    seed: SeedSpec = SeedSpec(0, 0),
) -> AsymptoticVariance:
    """Limiting variance of the first-projection partial sums over the process.

    Gaussian-driven families use exact bivariate Gauss-Hermite quadrature per
    lag; other families fall back to a single long simulated path of length
    ``sim_length``.  Raises when the truncated sum is not positive.
    """
    if max_lag < 1:
        raise ValueError("max_lag must be >= 1")

    if isinstance(process, IIDSpec):
        m = process.marginal
        mean_f = m.expect(rho1)
        sigma1 = m.expect(lambda x: np.asarray(rho1(x), dtype=float) ** 2) - mean_f**2
        sigma1j = np.zeros(max_lag)
    elif getattr(process, "is_gaussian", False):
        m = process.marginal_model()
        mu, var = m.mean, m.var
        mean_f = m.expect(rho1)
        sigma1 = m.expect(lambda x: np.asarray(rho1(x), dtype=float) ** 2) - mean_f**2
        var0 = process.autocov(0)
        sigma1j = np.array(
            [
                bivariate_gaussian_cov(rho1, mu, var, process.autocov(j) / var0)
                for j in range(1, max_lag + 1)
            ]
        )
    else:
        x = generate(process, sim_length, seed)
        y = np.asarray(rho1(x), dtype=float)
        yc = y - y.mean()
        sigma1 = float(yc @ yc / len(yc))
        sigma1j = np.array(
            [float(yc[: len(yc) - j] @ yc[j:] / len(yc)) for j in range(1, max_lag + 1)]
        )

    floor = 1e-15 * max(abs(sigma1), float(np.max(np.abs(sigma1j), initial=0.0)), 1e-300)
    tail = _geometric_tail(sigma1j, floor)
    sigma_u_sq = float(sigma1 + 2.0 * sigma1j.sum() + tail)
    if sigma_u_sq <= 0.0:
        raise ValueError(
            f"limiting variance is not positive (sigma_U^2 = {sigma_u_sq:.3g}); "
            "the central limit theorem does not apply"
        )
    return AsymptoticVariance(
        sigma1_sq=float(sigma1),
        sigma1j_sq=sigma1j,
        sigmaU_sq=sigma_u_sq,
        truncation_lag=max_lag,
        tail_bound=float(tail),
    )


def diagnostics_record(decomp: HoeffdingDecomposition, av: AsymptoticVariance) -> dict:
    """JSON-ready record of the decomposition and its limiting variance."""
    rec = {"kernel_id": decomp.kernel.kernel_id, "degree": decomp.degree, "theta": decomp.theta}
    if not decomp.analytic:
        rec["theta_se"] = decomp.theta_se
    rec.update(av.to_json_dict())
    return rec
