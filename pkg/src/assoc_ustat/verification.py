"""Named verification checks with pinned targets and tolerances.

Each check reproduces one of the package's contract-level guarantees at a
configurable scale (replications, series lengths, draw counts) while the
tolerances stay fixed.  The same registry backs the pytest acceptance suite
and the ``verify`` CLI subcommand.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, fields, replace
from typing import Callable

import numpy as np

from .assocgen import GaussianAR1Spec, IIDSpec, SeedSpec, generate
from .harness import (
    ExperimentConfig,
    WIENER_CONSTANT,
    run_bn_consistency,
    run_clt_experiment,
    wiener_constant_mc,
)
from .hoeffding import decompose, reconstruction_check
from .kernels import (
    DominationPair,
    bv_domination,
    check_domination,
    kernel_by_id,
    variance_rho1_domination,
)
from .longrun import BlockConfig, block_estimator, block_sums, sigma_u_plugin
from .marginals import MarginalModel
from .ustat import u_statistic, u_statistic_fast

# Fixed tolerances: these are the contract, independent of the chosen scales.
IDENTITY_TOL = 1e-10
DEGENERACY_SIGMAS = 4.0
VARIANCE_ASYMPTOTICS_REL_TOL = 0.10
CLT_KS_MAX = 0.06
BN_IID_REL_TOL = 0.05
BN_AR1_REL_TOL = 0.10
PLUGIN_REL_TOL = 0.10
FLUCTUATION_REL_TOL = 0.25
WIENER_ABS_TOL = 5e-3
EQUIVALENCE_REL_TOL = 1e-10

FLUCTUATION_TARGET = (3.0 * math.pi - 8.0) / 4.0


def _isserlis_sigma_u_sq(phi: float) -> float:
    """Closed-form sigma_U^2 for the variance kernel over unit-variance AR(1).

    Cov(U^2, V^2) = 2 Cov(U, V)^2 for centered Gaussians gives lag-j
    covariance phi^(2j) / 2, hence (1 + phi^2) / (2 (1 - phi^2)).
    """
    return (1.0 + phi**2) / (2.0 * (1.0 - phi**2))


@dataclass(frozen=True)
class CheckScales:
    """Workload knobs for the checks; tolerances are not configurable."""

    seed: int = 20260810
    identity_samples: int = 100
    identity_max_n: int = 200
    degeneracy_draws: int = 10**6
    degeneracy_grid_points: int = 20
    va_n: int = 2000
    va_replications: int = 2000
    clt_n: int = 2000
    clt_replications: int = 2000
    clt_marginal_var: float = 1.0
    bn_n: int = 10**5
    bn_replications: int = 100
    plugin_n: int = 10**5
    plugin_replications: int = 10
    fluct_n: int = 10**5
    fluct_replications: int = 500
    wiener_paths: int = 10**5
    wiener_grid_step: float = 5e-4
    structural_samples: int = 200

    def __post_init__(self):
        for f in fields(self):
            if f.name.endswith("replications") and getattr(self, f.name) < 2:
                raise ValueError(f"{f.name} must be >= 2")

    def with_overrides(self, **kwargs) -> "CheckScales":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    observed: float
    target: str
    detail: str
    runtime_s: float


def _result(name, passed, observed, target, detail, start) -> CheckResult:
    return CheckResult(
        name=name,
        passed=bool(passed),
        observed=float(observed),
        target=target,
        detail=detail,
        runtime_s=time.perf_counter() - start,
    )


# -- individual checks ---------------------------------------------------------


def check_hoeffding_identity(scales: CheckScales) -> CheckResult:
    """|U_n - theta - sum_j C(k,j) H_n^(j)| <= 1e-10 on random gaussian samples."""
    start = time.perf_counter()
    rng = np.random.default_rng(scales.seed + 1)
    marginal = MarginalModel.gaussian(0.3, 1.3)
    worst = 0.0
    for kernel_id in ("variance", "squared_mean", "third_moment"):
        kernel = kernel_by_id(kernel_id)
        decomp = decompose(kernel, marginal)
        for _ in range(scales.identity_samples):
            n = int(rng.integers(kernel.degree, scales.identity_max_n + 1))
            sample = marginal.sample(n, rng)
            worst = max(worst, reconstruction_check(decomp, sample))
    return _result(
        "hoeffding_identity",
        worst <= IDENTITY_TOL,
        worst,
        f"max residual <= {IDENTITY_TOL:g}",
        f"{3 * scales.identity_samples} samples, n <= {scales.identity_max_n}",
        start,
    )


def _sigmas_from_zero(values: np.ndarray) -> float:
    """|mean| in standard-error units; an identically zero sample counts as 0."""
    se = values.std(ddof=1) / math.sqrt(len(values))
    mean = abs(float(values.mean()))
    if se == 0.0:
        return 0.0 if mean == 0.0 else math.inf
    return mean / se


def check_degeneracy(scales: CheckScales) -> CheckResult:
    """E[h2(X, y)] = 0 within 4 standard errors on a quantile grid of y."""
    start = time.perf_counter()
    rng = np.random.default_rng(scales.seed + 2)
    marginal = MarginalModel.gaussian(0.0, 1.0)
    draws = marginal.sample(scales.degeneracy_draws, rng)
    grid = marginal.ppf(np.linspace(0.02, 0.98, scales.degeneracy_grid_points))
    worst = 0.0
    for kernel_id in ("variance", "squared_mean", "third_moment"):
        decomp = decompose(kernel_by_id(kernel_id), marginal)
        h1 = decomp.h_components[0]
        worst = max(worst, _sigmas_from_zero(np.asarray(h1(draws), dtype=float)))
        h2 = decomp.h_components[1]
        for y in grid:
            vals = np.asarray(h2(draws, np.full_like(draws, y)), dtype=float)
            worst = max(worst, _sigmas_from_zero(vals))
    return _result(
        "degeneracy",
        worst <= DEGENERACY_SIGMAS,
        worst,
        f"max |mean| / SE <= {DEGENERACY_SIGMAS:g}",
        f"{scales.degeneracy_draws} draws, {scales.degeneracy_grid_points} grid points",
        start,
    )


def check_variance_asymptotics(scales: CheckScales) -> CheckResult:
    """n Var(U_n) / 4 matches the closed-form sigma_U^2 for AR(1) phi in {0, 0.5}."""
    start = time.perf_counter()
    worst = 0.0
    details = []
    for offset, phi in enumerate((0.0, 0.5)):
        config = ExperimentConfig(
            process=GaussianAR1Spec.unit_variance(phi),
            kernel_id="variance",
            n_grid=(scales.va_n,),
            replications=scales.va_replications,
            seed=SeedSpec(scales.seed + 3 + offset),
        )
        result = run_clt_experiment(config)
        est = scales.va_n * float(np.var(result.u_values[scales.va_n], ddof=1)) / 4.0
        target = _isserlis_sigma_u_sq(phi)
        rel = abs(est / target - 1.0)
        worst = max(worst, rel)
        details.append(f"phi={phi}: {est:.4f} vs {target:.4f}")
    return _result(
        "variance_asymptotics",
        worst <= VARIANCE_ASYMPTOTICS_REL_TOL,
        worst,
        f"relative error <= {VARIANCE_ASYMPTOTICS_REL_TOL:g}",
        "; ".join(details),
        start,
    )


def _clt_case(scales: CheckScales, name: str, process, kernel_id: str, stream: int) -> CheckResult:
    start = time.perf_counter()
    config = ExperimentConfig(
        process=process,
        kernel_id=kernel_id,
        n_grid=(scales.clt_n,),
        replications=scales.clt_replications,
        seed=SeedSpec(scales.seed + stream),
    )
    result = run_clt_experiment(config)
    ks = result.ks_distance[scales.clt_n]
    return _result(
        name,
        ks <= CLT_KS_MAX,
        ks,
        f"KS distance <= {CLT_KS_MAX:g}",
        f"n={scales.clt_n}, R={scales.clt_replications}, sigma_U={result.sigma_u:.4f}",
        start,
    )


def check_clt_variance_iid(scales: CheckScales) -> CheckResult:
    process = IIDSpec(MarginalModel.gaussian(0.0, scales.clt_marginal_var))
    return _clt_case(scales, "clt_variance_iid", process, "variance", 10)


def check_clt_variance_ar1(scales: CheckScales) -> CheckResult:
    return _clt_case(
        scales, "clt_variance_ar1", GaussianAR1Spec.unit_variance(0.3), "variance", 11
    )


def check_clt_squared_mean_ar1(scales: CheckScales) -> CheckResult:
    # A nonzero marginal mean keeps rho_1(x) = x mu nondegenerate.
    process = GaussianAR1Spec.unit_variance(0.3, mean=1.0)
    return _clt_case(scales, "clt_squared_mean_ar1", process, "squared_mean", 12)


def check_clt_third_moment_iid(scales: CheckScales) -> CheckResult:
    process = IIDSpec(MarginalModel.gaussian(0.0, scales.clt_marginal_var))
    return _clt_case(scales, "clt_third_moment_iid", process, "third_moment", 13)


def check_bn_consistency_iid(scales: CheckScales) -> CheckResult:
    """Mean B_n over replications within 5% of sqrt(2/pi) for i.i.d. gaussians."""
    start = time.perf_counter()
    config = ExperimentConfig(
        process=IIDSpec(MarginalModel.gaussian(0.0, 1.0)),
        kernel_id="variance",
        n_grid=(scales.bn_n,),
        replications=scales.bn_replications,
        seed=SeedSpec(scales.seed + 20),
        block=BlockConfig.cube_root(),
    )
    point = run_bn_consistency(config)[scales.bn_n]
    target = math.sqrt(2.0 / math.pi)
    rel = abs(point.mean_bn / target - 1.0)
    return _result(
        "bn_consistency_iid",
        rel <= BN_IID_REL_TOL,
        rel,
        f"relative error <= {BN_IID_REL_TOL:g}",
        f"mean b_n={point.mean_bn:.5f} vs {target:.5f}, ell={point.ell}",
        start,
    )


def check_bn_consistency_ar1(scales: CheckScales) -> CheckResult:
    """Mean B_n within 10% of sigma_f sqrt(2/pi), sigma_f^2 = (1+phi)/(1-phi)."""
    start = time.perf_counter()
    phi = 0.5
    config = ExperimentConfig(
        process=GaussianAR1Spec.unit_variance(phi),
        kernel_id="variance",
        n_grid=(scales.bn_n,),
        replications=scales.bn_replications,
        seed=SeedSpec(scales.seed + 21),
        block=BlockConfig.cube_root(),
    )
    point = run_bn_consistency(config)[scales.bn_n]
    sigma_f = math.sqrt((1.0 + phi) / (1.0 - phi))
    target = sigma_f * math.sqrt(2.0 / math.pi)
    rel = abs(point.mean_bn / target - 1.0)
    return _result(
        "bn_consistency_ar1",
        rel <= BN_AR1_REL_TOL,
        rel,
        f"relative error <= {BN_AR1_REL_TOL:g}",
        f"mean b_n={point.mean_bn:.5f} vs {target:.5f}, ell={point.ell}",
        start,
    )


def check_nonmonotone_plugin(scales: CheckScales) -> CheckResult:
    """Plug-in sigma_U^2 for the (non-monotone) variance-kernel projection over AR(1)."""
    start = time.perf_counter()
    phi = 0.5
    process = GaussianAR1Spec.unit_variance(phi)
    marginal = process.marginal_model()
    kernel = kernel_by_id("variance")
    block = BlockConfig.cube_root()
    seed = SeedSpec(scales.seed + 22)
    vals = []
    for r in range(scales.plugin_replications):
        x = generate(process, scales.plugin_n, seed.shifted(r))
        est = sigma_u_plugin(x, kernel, block, marginal=marginal)
        vals.append(est.sigma_f_hat**2)
    mean_sq = float(np.mean(vals))
    target = _isserlis_sigma_u_sq(phi)
    rel = abs(mean_sq / target - 1.0)
    return _result(
        "nonmonotone_plugin",
        rel <= PLUGIN_REL_TOL,
        rel,
        f"relative error <= {PLUGIN_REL_TOL:g}",
        f"mean sigma_f_hat^2={mean_sq:.4f} vs {target:.4f} over {len(vals)} runs",
        start,
    )


def check_fluctuation_law(scales: CheckScales) -> CheckResult:
    """Variance of the standardized block-mean deviation matches (3 pi - 8)/4."""
    start = time.perf_counter()
    seed = SeedSpec(scales.seed + 23)
    n = scales.fluct_n
    ell = BlockConfig.cube_root().ell(n)
    stats_ = np.empty(scales.fluct_replications)
    for r in range(scales.fluct_replications):
        y = seed.shifted(r).rng().normal(size=n)
        s = block_sums(y, ell)
        stats_[r] = float(np.mean(np.abs(s)) / math.sqrt(ell))
    scaled = math.sqrt(n / ell) * math.sqrt(math.pi / 2.0) * stats_
    v = float(np.var(scaled, ddof=1))
    rel = abs(v / FLUCTUATION_TARGET - 1.0)
    return _result(
        "fluctuation_law",
        rel <= FLUCTUATION_REL_TOL,
        rel,
        f"relative error <= {FLUCTUATION_REL_TOL:g}",
        f"variance {v:.4f} vs {FLUCTUATION_TARGET:.4f}, ell={ell}",
        start,
    )


def check_wiener_constant(scales: CheckScales) -> CheckResult:
    """Brownian covariance functional within 5e-3 of (3 pi - 8) / (4 pi)."""
    start = time.perf_counter()
    est = wiener_constant_mc(
        scales.wiener_paths, scales.wiener_grid_step, SeedSpec(scales.seed + 24)
    )
    err = abs(est - WIENER_CONSTANT)
    return _result(
        "wiener_constant",
        err <= WIENER_ABS_TOL,
        err,
        f"absolute error <= {WIENER_ABS_TOL:g}",
        f"estimate {est:.6f} vs {WIENER_CONSTANT:.6f} at {scales.wiener_paths} paths",
        start,
    )


def check_structural(scales: CheckScales) -> CheckResult:
    """Fast-path equivalence, permutation/shift/scale laws, domination, reproducibility."""
    start = time.perf_counter()
    rng = np.random.default_rng(scales.seed + 30)
    failures: list[str] = []
    worst_rel = 0.0

    # Fast path vs enumeration on random samples.
    kernel_ids = ("variance", "squared_mean", "third_moment")
    for s in range(scales.structural_samples):
        kernel = kernel_by_id(kernel_ids[s % 3])
        n = int(rng.integers(kernel.degree, 201))
        x = rng.normal(rng.uniform(-2, 2), rng.uniform(0.5, 2.0), size=n)
        ref = u_statistic(x, kernel).value
        fast = u_statistic_fast(x, kernel.kernel_id).value
        scale = max(abs(ref), 1e-12)
        worst_rel = max(worst_rel, abs(fast - ref) / scale)
    if worst_rel > EQUIVALENCE_REL_TOL:
        failures.append(f"fast path mismatch (rel {worst_rel:.2e})")

    # Permutation invariance is exact thanks to correctly rounded summation.
    for kernel_id in kernel_ids:
        kernel = kernel_by_id(kernel_id)
        x = rng.normal(size=40)
        v1 = u_statistic(x, kernel).value
        v2 = u_statistic(rng.permutation(x), kernel).value
        if v1 != v2:
            failures.append(f"permutation changed {kernel_id} value")

    # Location shifts leave the variance and third-moment kernels unchanged.
    x = rng.normal(size=60)
    for kernel_id in ("variance", "third_moment"):
        base = u_statistic_fast(x, kernel_id).value
        shifted = u_statistic_fast(x + 5.75, kernel_id).value
        if abs(shifted - base) > 1e-9 * max(1.0, abs(base)):
            failures.append(f"shift law broken for {kernel_id}")

    # Block estimator: scale equivariance and shift invariance.
    y = rng.normal(size=4000)
    cfg = BlockConfig.cube_root()
    b0 = block_estimator(y, cfg).b_n
    if abs(block_estimator(-2.0 * y, cfg).b_n - 2.0 * b0) > 1e-12 * max(1.0, b0):
        failures.append("block estimator scale equivariance broken")
    if abs(block_estimator(y + 3.25, cfg).b_n - b0) > 1e-10 * max(1.0, b0):
        failures.append("block estimator shift invariance broken")

    # Domination grid checks.
    grid = np.arange(-10.0, 10.0 + 1e-9, 0.01)
    if not check_domination(DominationPair(np.sin, lambda x: x, "user_supplied"), grid):
        failures.append("sin(x) << x rejected")
    if check_domination(
        DominationPair(lambda x: x**2, lambda x: x, "user_supplied"), np.linspace(0, 10, 1001)
    ):
        failures.append("x^2 << x accepted")
    pair = variance_rho1_domination(MarginalModel.gaussian(0.0, 1.0))
    g = np.linspace(-6, 6, 801)
    if not check_domination(pair, g):
        failures.append("variance rho1 domination rejected")
    f_tilde_ref = 0.5 * (g**2 * (g >= 0) + 1.0 - g**2 * (g <= 0))
    if np.max(np.abs(pair.f_tilde(g) - f_tilde_ref)) > 1e-12:
        failures.append("variance rho1 dominating function mismatch")
    fv, gv = pair.f(g), pair.f_tilde(g)
    dif = np.abs(fv[None, :] - fv[:, None])
    dom = gv[None, :] - gv[:, None]
    iu = np.triu_indices(len(g), 1)
    if np.any(dif[iu] > dom[iu] + 1e-10):
        failures.append("|f(y) - f(x)| <= f_tilde(y) - f_tilde(x) violated")
    if bv_domination(lambda x: x, lambda x: np.zeros_like(x)).f_tilde(np.array([2.0]))[0] != 2.0:
        failures.append("identity-style bv construction broken")

    # Bit-exact reproducibility under a fixed seed.
    spec = GaussianAR1Spec.unit_variance(0.4)
    seed = SeedSpec(scales.seed + 31)
    if not np.array_equal(generate(spec, 500, seed), generate(spec, 500, seed)):
        failures.append("identical seeds gave different series")

    passed = not failures
    return _result(
        "structural",
        passed,
        worst_rel,
        "all structural invariants hold",
        "ok" if passed else "; ".join(failures),
        start,
    )


CHECKS: dict[str, Callable[[CheckScales], CheckResult]] = {
    "hoeffding_identity": check_hoeffding_identity,
    "degeneracy": check_degeneracy,
    "variance_asymptotics": check_variance_asymptotics,
    "clt_variance_iid": check_clt_variance_iid,
    "clt_variance_ar1": check_clt_variance_ar1,
    "clt_squared_mean_ar1": check_clt_squared_mean_ar1,
    "clt_third_moment_iid": check_clt_third_moment_iid,
    "bn_consistency_iid": check_bn_consistency_iid,
    "bn_consistency_ar1": check_bn_consistency_ar1,
    "nonmonotone_plugin": check_nonmonotone_plugin,
    "fluctuation_law": check_fluctuation_law,
    "wiener_constant": check_wiener_constant,
    "structural": check_structural,
}


def run_checks(
    names: list[str] | None = None, scales: CheckScales | None = None
) -> list[CheckResult]:
    """Run the named checks (all by default); failures inside a check are caught."""
    scales = scales if scales is not None else CheckScales()
    names = list(CHECKS) if names is None else names
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise ValueError(f"unknown check names: {unknown}")
    results = []
    for name in names:
        start = time.perf_counter()
        try:
            results.append(CHECKS[name](scales))
        except Exception as exc:  # a raised check is a named failure, not a crash
            results.append(
                CheckResult(
                    name=name,
                    passed=False,
                    observed=float("nan"),
                    target="check completed",
                    detail=f"{type(exc).__name__}: {exc}",
                    runtime_s=time.perf_counter() - start,
                )
            )
    return results
