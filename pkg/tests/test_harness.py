import json
import math

import numpy as np
import pytest
from scipy import stats

from assoc_ustat.assocgen import GaussianAR1Spec, IIDSpec, SeedSpec, generate
from assoc_ustat.harness import (
    ExperimentConfig,
    WIENER_CONSTANT,
    ks_distance,
    run_bn_consistency,
    run_clt_experiment,
    simulate_wiener_path,
    simulate_wiener_paths,
    variance_decay_fit,
    wiener_constant_mc,
    wiener_covariance_curve,
    write_experiment_files,
)
from assoc_ustat.hoeffding import asymptotic_variance
from assoc_ustat.kernels import kernel_by_id
from assoc_ustat.longrun import BlockConfig
from assoc_ustat.marginals import MarginalModel

GAUSS01 = MarginalModel.gaussian(0.0, 1.0)


# -- KS distance -------------------------------------------------------------------


def test_ks_exact_quantile_construction():
    for R in (10, 100, 1234):
        z = stats.norm.ppf((np.arange(1, R + 1) - 0.5) / R)
        assert ks_distance(z) == pytest.approx(0.5 / R, abs=1e-12)


def test_ks_all_zeros():
    assert ks_distance(np.zeros(100)) == pytest.approx(0.5)


def test_ks_large_normal_sample():
    z = np.random.default_rng(123).normal(size=10**5)
    assert ks_distance(z) < 0.006


def test_ks_validation_and_bounds():
    with pytest.raises(ValueError):
        ks_distance([])
    with pytest.raises(ValueError):
        ks_distance([1.0, np.nan])
    rng = np.random.default_rng(5)
    for _ in range(10):
        d = ks_distance(rng.uniform(-3, 3, size=int(rng.integers(1, 50))))
        assert 0.0 <= d <= 1.0


# -- experiment config ---------------------------------------------------------------


def test_config_validation():
    ok = dict(process=IIDSpec(GAUSS01), kernel_id="variance", n_grid=(100, 200),
              replications=5, seed=SeedSpec(1))
    ExperimentConfig(**ok)
    with pytest.raises(ValueError):
        ExperimentConfig(**{**ok, "replications": 1})
    with pytest.raises(ValueError):
        ExperimentConfig(**{**ok, "n_grid": (200, 100)})
    with pytest.raises(ValueError):
        ExperimentConfig(**{**ok, "n_grid": ()})
    with pytest.raises(ValueError):
        ExperimentConfig(**{**ok, "kernel_id": "nope"})


# -- CLT experiment -------------------------------------------------------------------


def test_clt_experiment_small_scale():
    config = ExperimentConfig(
        process=IIDSpec(GAUSS01),
        kernel_id="variance",
        n_grid=(500,),
        replications=500,
        seed=SeedSpec(77),
    )
    res = run_clt_experiment(config)
    assert res.theta == 1.0
    assert res.sigma_u == pytest.approx(math.sqrt(0.5), rel=1e-9)
    z = res.standardized[500]
    assert len(z) == 500 and np.all(np.isfinite(z))
    # centered statistics: empirical mean within 4 / sqrt(R)
    assert abs(float(np.mean(z))) <= 4.0 / math.sqrt(500)
    assert res.ks_distance[500] < 0.08


def test_point_mass_process_rejected():
    config = ExperimentConfig(
        process=IIDSpec(MarginalModel.point_mass(2.0)),
        kernel_id="variance",
        n_grid=(100,),
        replications=10,
        seed=SeedSpec(1),
    )
    with pytest.raises(ValueError):
        run_clt_experiment(config)


def test_partial_sum_normality_monotone_vs_dominated_transform():
    # identity f is monotone; the variance-kernel projection is non-monotone but
    # dominated, and both transforms give normal partial sums at desk scale
    spec = GaussianAR1Spec.unit_variance(0.4)
    k = kernel_by_id("variance")
    n, reps = 1000, 800
    for offset, f in ((0, lambda v: v), (10_000, k.rho1(GAUSS01))):
        av = asymptotic_variance(f, spec)
        mu_f = spec.marginal_model().expect(f)
        z = np.empty(reps)
        for r in range(reps):
            y = np.asarray(f(generate(spec, n, SeedSpec(31, offset + r))), dtype=float)
            z[r] = (y.sum() - n * mu_f) / math.sqrt(n * av.sigmaU_sq)
        assert ks_distance(z) < 0.08


def test_reproducible_output_files(tmp_path):
    def run(into):
        config = ExperimentConfig(
            process=GaussianAR1Spec.unit_variance(0.3),
            kernel_id="variance",
            n_grid=(50, 100),
            replications=10,
            seed=SeedSpec(9),
            block=BlockConfig.cube_root(),
            output_dir=into,
            label="repro",
        )
        run_clt_experiment(config)

    run(tmp_path / "a")
    run(tmp_path / "b")
    files_a = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert files_a == [
        "repro_bn.tsv",
        "repro_qq_n100.tsv",
        "repro_qq_n50.tsv",
        "repro_replications.csv",
        "repro_summary.json",
    ]
    for name in files_a:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    summary = json.loads((tmp_path / "a" / "repro_summary.json").read_text())
    assert summary["kernel_id"] == "variance"
    assert set(summary["ks_distance"]) == {"50", "100"}
    assert summary["bn_curve"]["50"]["ell"] == 3


def test_write_files_returns_paths(tmp_path):
    config = ExperimentConfig(
        process=IIDSpec(MarginalModel.gaussian(1.0, 1.0)),
        kernel_id="squared_mean",
        n_grid=(40,),
        replications=6,
        seed=SeedSpec(2),
        output_dir=tmp_path,
        label="sq",
    )
    res = run_clt_experiment(config)
    paths = write_experiment_files(res)
    assert all(p.exists() for p in paths)


def test_standardize_by_plugin_mode():
    config = ExperimentConfig(
        process=IIDSpec(GAUSS01),
        kernel_id="variance",
        n_grid=(400,),
        replications=40,
        seed=SeedSpec(15),
        standardize_by_plugin=True,
    )
    res = run_clt_experiment(config)
    z = res.standardized[400]
    assert np.all(np.isfinite(z))
    assert np.std(z) == pytest.approx(1.0, abs=0.45)


# -- variance decay --------------------------------------------------------------------


def test_variance_decay_fit_iid():
    config = ExperimentConfig(
        process=IIDSpec(GAUSS01),
        kernel_id="variance",
        n_grid=(250, 500, 1000, 2000),
        replications=600,
        seed=SeedSpec(42),
    )
    fit = variance_decay_fit(config)
    assert fit.slope == pytest.approx(-1.0, abs=0.1)
    assert fit.implied_four_sigma_u_sq / 4.0 == pytest.approx(0.5, rel=0.1)
    assert len(fit.variances) == 4


def test_variance_decay_fit_needs_three_points():
    config = ExperimentConfig(
        process=IIDSpec(GAUSS01), kernel_id="variance", n_grid=(100, 200),
        replications=10, seed=SeedSpec(3),
    )
    with pytest.raises(ValueError):
        variance_decay_fit(config)


# -- block consistency sweep -------------------------------------------------------------


def test_run_bn_consistency_points():
    config = ExperimentConfig(
        process=IIDSpec(GAUSS01),
        kernel_id="variance",
        n_grid=(2000, 8000),
        replications=20,
        seed=SeedSpec(50),
        block=BlockConfig.cube_root(),
    )
    points = run_bn_consistency(config)
    assert set(points) == {2000, 8000}
    assert points[2000].ell == 12 and points[8000].ell == 20
    assert points[8000].mean_bn == pytest.approx(math.sqrt(2 / math.pi), rel=0.05)
    assert points[8000].mean_sigma_f_hat == pytest.approx(1.0, rel=0.05)
    config_noblock = ExperimentConfig(
        process=IIDSpec(GAUSS01), kernel_id="variance", n_grid=(100,),
        replications=5, seed=SeedSpec(51),
    )
    with pytest.raises(ValueError):
        run_bn_consistency(config_noblock)


# -- Brownian paths ------------------------------------------------------------------------


def test_wiener_path_basics():
    rng = np.random.default_rng(60)
    w = simulate_wiener_paths(200, 1e-3, rng)
    assert w.shape == (200, 2001)
    assert np.all(w[:, 0] == 0.0)
    # increment variance over [0, 1] is 1
    assert np.var(w[:, 1000]) == pytest.approx(1.0, rel=0.25)
    path = simulate_wiener_path(1e-3, rng)
    assert path.values[0] == 0.0
    assert path.times[-1] == pytest.approx(2.0)


def test_wiener_disjoint_increments_uncorrelated():
    rng = np.random.default_rng(61)
    w = simulate_wiener_paths(30_000, 1e-3, rng)
    inc1 = w[:, 500] - w[:, 0]
    inc2 = w[:, 1500] - w[:, 1000]
    prod = (inc1 - inc1.mean()) * (inc2 - inc2.mean())
    se = prod.std(ddof=1) / math.sqrt(len(prod))
    assert abs(prod.mean()) <= 4.0 * se


def test_wiener_covariance_endpoints():
    t, cov = wiener_covariance_curve(30_000, 1e-3, SeedSpec(62))
    assert t[0] == 0.0 and t[-1] == pytest.approx(1.0)
    # at t = 0 the covariance is Var|W(1)| = 1 - 2/pi
    assert cov[0] == pytest.approx(1.0 - 2.0 / math.pi, abs=0.02)
    # at t = 1 the blocks are independent
    assert cov[-1] == pytest.approx(0.0, abs=0.02)


def test_wiener_constant_preconditions():
    with pytest.raises(ValueError):
        wiener_constant_mc(5000, 5e-4, SeedSpec(0))
    with pytest.raises(ValueError):
        wiener_constant_mc(10**4, 5e-3, SeedSpec(0))


def test_wiener_constant_small_run():
    est = wiener_constant_mc(2 * 10**4, 1e-3, SeedSpec(63))
    assert est == pytest.approx(WIENER_CONSTANT, abs=0.01)
