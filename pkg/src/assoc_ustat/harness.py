"""Monte Carlo experiment runner for the limit-theorem and estimator checks.

Runs replicated U-statistic experiments over associated processes and reduces
them to the quantities the theory pins down: standardized statistics
sqrt(n) (U_n - theta) / (k sigma_U) with their Kolmogorov-Smirnov distance to
the standard normal, variance-decay fits against Var(U_n) ~ k^2 sigma_U^2 / n,
overlapping-block consistency sweeps, and the Brownian covariance functional
int_0^1 Cov(|W(1)|, |W(1+t) - W(t)|) dt = (3 pi - 8) / (4 pi).

All randomness is keyed by (seed, stream): replication r of grid point i uses
stream ``seed.stream + i * replications + r``, so identical configs reproduce
identical output files bit for bit.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from .assocgen import AssocProcessSpec, SeedSpec, generate, spec_to_dict
from .hoeffding import AsymptoticVariance, asymptotic_variance
from .kernels import KERNEL_IDS, kernel_by_id
from .longrun import BlockConfig, LongRunEstimate, block_estimator, sigma_u_plugin
from .ustat import u_statistic_fast_batch

WIENER_T_MAX = 2.0
WIENER_CONSTANT = (3.0 * math.pi - 8.0) / (4.0 * math.pi)


@dataclass(frozen=True)
class ExperimentConfig:
    """Batch description of one replicated experiment."""

    process: AssocProcessSpec
    kernel_id: str
    n_grid: tuple[int, ...]
    replications: int
    seed: SeedSpec
    block: BlockConfig | None = None
    output_dir: Path | None = None
    max_lag: int = 200
    standardize_by_plugin: bool = False
    label: str = "experiment"

    def __post_init__(self):
        if self.replications < 2:
            raise ValueError("replications must be >= 2")
        grid = tuple(int(n) for n in self.n_grid)
        if len(grid) == 0 or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("n_grid must be nonempty and strictly increasing")
        object.__setattr__(self, "n_grid", grid)
        if self.kernel_id not in KERNEL_IDS:
            raise ValueError(f"unknown kernel id {self.kernel_id!r}")


@dataclass(frozen=True)
class DecayFit:
    """OLS fit of log Var(U_n) against log n across the grid.

    ``implied_four_sigma_u_sq`` is the level of n * Var(U_n) with the decay
    slope pinned to -1, the quantity that should approach k^2 sigma_U^2.
    """

    slope: float
    implied_four_sigma_u_sq: float
    n_grid: tuple[int, ...]
    variances: tuple[float, ...]


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    config: ExperimentConfig
    theta: float
    sigma_u: float
    degree: int
    u_values: dict[int, np.ndarray]
    standardized: dict[int, np.ndarray]
    ks_distance: dict[int, float]
    asym: AsymptoticVariance
    var_decay: DecayFit | None = None
    bn_curve: dict[int, LongRunEstimate] | None = None
    wiener_constant: float | None = None


@dataclass(frozen=True)
class BnSweepPoint:
    n: int
    ell: int
    mean_bn: float
    sd_bn: float
    mean_sigma_f_hat: float
    b_values: tuple[float, ...] = field(repr=False, default=())


def ks_distance(sample) -> float:
    """Sup distance between the empirical CDF and the standard normal CDF."""
    z = np.sort(np.asarray(sample, dtype=float))
    if z.size == 0:
        raise ValueError("sample must be nonempty")
    if not np.all(np.isfinite(z)):
        raise ValueError("sample contains non-finite values")
    cdf = stats.norm.cdf(z)
    i = np.arange(1, len(z) + 1, dtype=float)
    return float(max(np.max(i / len(z) - cdf), np.max(cdf - (i - 1.0) / len(z))))


def _replication_seed(config: ExperimentConfig, n_index: int, rep: int) -> SeedSpec:
    return config.seed.shifted(n_index * config.replications + rep)


def replicate_series(config: ExperimentConfig, n_index: int) -> np.ndarray:
    """(replications, n) matrix of independent series for one grid point."""
    n = config.n_grid[n_index]
    return np.stack(
        [
            generate(config.process, n, _replication_seed(config, n_index, r))
            for r in range(config.replications)
        ]
    )


def experiment_moments(config: ExperimentConfig):
    """(marginal, theta, sigma_U, asym) for the configured kernel and process."""
    kernel = kernel_by_id(config.kernel_id)
    marginal = config.process.marginal_model()
    theta = float(kernel.theta(marginal))
    av = asymptotic_variance(kernel.rho1(marginal), config.process, max_lag=config.max_lag)
    return kernel, marginal, theta, av


def run_clt_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Standardized replicated U-statistics and their KS distance per grid point.

    The standardizing sigma_U comes from the analytic route (quadrature or
    long-path simulation), keeping the normality check independent of the
    block estimator; set ``standardize_by_plugin`` to scale each replication
    by its own block plug-in estimate instead.
    """
    kernel, marginal, theta, av = experiment_moments(config)
    sigma_u = av.sigma_u
    k = kernel.degree

    u_values: dict[int, np.ndarray] = {}
    standardized: dict[int, np.ndarray] = {}
    ks: dict[int, float] = {}
    bn_curve: dict[int, LongRunEstimate] = {}
    for i, n in enumerate(config.n_grid):
        series = replicate_series(config, i)
        u = u_statistic_fast_batch(series, config.kernel_id)
        if config.standardize_by_plugin:
            block = config.block if config.block is not None else BlockConfig.cube_root()
            scale = np.array(
                [
                    sigma_u_plugin(row, kernel, block, marginal=marginal).sigma_f_hat
                    for row in series
                ]
            )
            z = np.sqrt(n) * (u - theta) / (k * scale)
        else:
            z = np.sqrt(n) * (u - theta) / (k * sigma_u)
        if not np.all(np.isfinite(z)):
            raise RuntimeError(f"non-finite standardized statistic at n = {n}")
        u_values[n] = u
        standardized[n] = z
        ks[n] = ks_distance(z)
        if config.block is not None:
            rho1_series = np.asarray(kernel.rho1(marginal)(series[0]), dtype=float)
            bn_curve[n] = block_estimator(rho1_series, config.block)

    var_decay = _decay_fit(config, u_values) if len(config.n_grid) >= 3 else None
    result = ExperimentResult(
        config=config,
        theta=theta,
        sigma_u=sigma_u,
        degree=k,
        u_values=u_values,
        standardized=standardized,
        ks_distance=ks,
        asym=av,
        var_decay=var_decay,
        bn_curve=bn_curve or None,
    )
    if config.output_dir is not None:
        write_experiment_files(result)
    return result


def _decay_fit(config: ExperimentConfig, u_values: dict[int, np.ndarray]) -> DecayFit:
    ns = np.array(config.n_grid, dtype=float)
    variances = np.array([np.var(u_values[n], ddof=1) for n in config.n_grid])
    slope = float(np.polyfit(np.log(ns), np.log(variances), 1)[0])
    implied = float(np.exp(np.mean(np.log(variances * ns))))
    return DecayFit(
        slope=slope,
        implied_four_sigma_u_sq=implied,
        n_grid=config.n_grid,
        variances=tuple(float(v) for v in variances),
    )


def variance_decay_fit(config: ExperimentConfig) -> DecayFit:
    """Fit of log Var(U_n) on log n over the grid (needs >= 3 grid points)."""
    if len(config.n_grid) < 3:
        raise ValueError("variance decay fit needs at least 3 grid points")
    u_values = {}
    for i, n in enumerate(config.n_grid):
        series = replicate_series(config, i)
        u_values[n] = u_statistic_fast_batch(series, config.kernel_id)
    return _decay_fit(config, u_values)


def run_bn_consistency(config: ExperimentConfig) -> dict[int, BnSweepPoint]:
    """Replicated block estimates of the raw series per grid point."""
    if config.block is None:
        raise ValueError("bn consistency sweep needs a block config")
    out: dict[int, BnSweepPoint] = {}
    for i, n in enumerate(config.n_grid):
        estimates = [
            block_estimator(generate(config.process, n, _replication_seed(config, i, r)), config.block)
            for r in range(config.replications)
        ]
        bs = np.array([e.b_n for e in estimates])
        out[n] = BnSweepPoint(
            n=n,
            ell=estimates[0].ell,
            mean_bn=float(bs.mean()),
            sd_bn=float(bs.std(ddof=1)),
            mean_sigma_f_hat=float(bs.mean() * math.sqrt(math.pi / 2.0)),
            b_values=tuple(float(b) for b in bs),
        )
    return out


# -- Brownian functional -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class WienerPath:
    """Standard Brownian path on a uniform grid of [0, 2], W(0) = 0."""

    grid_step: float
    values: np.ndarray

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.values)) * self.grid_step


def simulate_wiener_paths(
    n_paths: int, grid_step: float, rng: np.random.Generator, t_max: float = WIENER_T_MAX
) -> np.ndarray:
    """(n_paths, m + 1) matrix of Brownian values from exact Gaussian increments."""
    m = int(round(t_max / grid_step))
    dw = rng.normal(0.0, math.sqrt(grid_step), size=(n_paths, m))
    w = np.empty((n_paths, m + 1))
    w[:, 0] = 0.0
    np.cumsum(dw, axis=1, out=w[:, 1:])
    return w


def simulate_wiener_path(grid_step: float, rng: np.random.Generator) -> WienerPath:
    return WienerPath(grid_step=grid_step, values=simulate_wiener_paths(1, grid_step, rng)[0])


def wiener_covariance_curve(
    paths: int, grid_step: float, seed: SeedSpec, batch: int = 2500
) -> tuple[np.ndarray, np.ndarray]:
    """Cov(|W(1)|, |W(1+t) - W(t)|) on the t grid of [0, 1], batched over paths."""
    m = int(round(WIENER_T_MAX / grid_step))
    if m % 2 != 0:
        raise ValueError("grid_step must divide 1 evenly")
    half = m // 2
    rng = seed.rng()
    n_done = 0
    sum_a = 0.0
    sum_b = np.zeros(half + 1)
    sum_ab = np.zeros(half + 1)
    while n_done < paths:
        size = min(batch, paths - n_done)
        w = simulate_wiener_paths(size, grid_step, rng)
        a = np.abs(w[:, half])
        b = np.abs(w[:, half : 2 * half + 1] - w[:, : half + 1])
        sum_a += a.sum()
        sum_b += b.sum(axis=0)
        sum_ab += a @ b
        n_done += size
    cov = sum_ab / paths - (sum_a / paths) * (sum_b / paths)
    t = np.arange(half + 1) * grid_step
    return t, cov


def wiener_constant_mc(paths: int, grid_step: float, seed: SeedSpec) -> float:
    """Trapezoidal estimate of int_0^1 Cov(|W(1)|, |W(1+t) - W(t)|) dt.

    The target value is (3 pi - 8) / (4 pi) ~ 0.113380.
    """
    if paths < 10**4:
        raise ValueError("need at least 10^4 paths")
    if grid_step > 1e-3:
        raise ValueError("grid_step must be <= 1e-3")
    t, cov = wiener_covariance_curve(paths, grid_step, seed)
    return float(np.trapezoid(cov, t))


# -- deterministic writers -----------------------------------------------------


def _fmt(v) -> str:
    return repr(float(v))


def write_experiment_files(result: ExperimentResult) -> list[Path]:
    """CSV of replications, JSON summary, and plot-ready two-column files."""
    config = result.config
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    prefix = config.label
    written = []

    rep_path = out / f"{prefix}_replications.csv"
    with rep_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "rep", "u_n", "standardized"])
        for n in config.n_grid:
            for r, (u, z) in enumerate(zip(result.u_values[n], result.standardized[n])):
                writer.writerow([n, r, _fmt(u), _fmt(z)])
    written.append(rep_path)

    summary = {
        "label": config.label,
        "kernel_id": config.kernel_id,
        "process": spec_to_dict(config.process),
        "n_grid": list(config.n_grid),
        "replications": config.replications,
        "seed": {"seed": config.seed.seed, "stream": config.seed.stream},
        "theta": result.theta,
        "sigma_u": result.sigma_u,
        "degree": result.degree,
        "sigma1_sq": result.asym.sigma1_sq,
        "tail_bound": result.asym.tail_bound,
        "ks_distance": {str(n): result.ks_distance[n] for n in config.n_grid},
        "standardized_mean": {
            str(n): float(np.mean(result.standardized[n])) for n in config.n_grid
        },
        "var_decay": None
        if result.var_decay is None
        else {
            "slope": result.var_decay.slope,
            "implied_four_sigma_u_sq": result.var_decay.implied_four_sigma_u_sq,
            "variances": list(result.var_decay.variances),
        },
        "bn_curve": None
        if result.bn_curve is None
        else {str(n): est.to_json_dict() for n, est in result.bn_curve.items()},
        "wiener_constant": result.wiener_constant,
    }
    summary_path = out / f"{prefix}_summary.json"
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    written.append(summary_path)

    for n in config.n_grid:
        z = np.sort(result.standardized[n])
        q = stats.norm.ppf((np.arange(1, len(z) + 1) - 0.5) / len(z))
        qq_path = out / f"{prefix}_qq_n{n}.tsv"
        with qq_path.open("w") as fh:
            fh.write("theoretical\tobserved\n")
            for a, b in zip(q, z):
                fh.write(f"{_fmt(a)}\t{_fmt(b)}\n")
        written.append(qq_path)

    if result.bn_curve is not None:
        bn_path = out / f"{prefix}_bn.tsv"
        with bn_path.open("w") as fh:
            fh.write("n\tb_n\n")
            for n, est in result.bn_curve.items():
                fh.write(f"{n}\t{_fmt(est.b_n)}\n")
        written.append(bn_path)
    return written
