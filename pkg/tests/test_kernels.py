import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from assoc_ustat.kernels import (
    DominationPair,
    KERNEL_IDS,
    Monotonicity,
    bv_domination,
    check_domination,
    default_domination_grid,
    identity_domination,
    kernel_by_id,
    third_moment_rho1_domination,
    variance_rho1_domination,
)
from assoc_ustat.marginals import MarginalModel

finite_floats = st.floats(-50, 50)


# -- built-in kernel values ----------------------------------------------------


def test_variance_kernel_values():
    k = kernel_by_id("variance")
    assert k(1.0, 3.0) == 2.0
    assert k(7.3, 7.3) == 0.0
    m = MarginalModel.gaussian(0.0, 1.0)
    assert k.rho1(m)(2.0) == pytest.approx(2.5)
    assert k.theta(m) == 1.0
    assert k.monotone is Monotonicity.NON_MONOTONE


def test_squared_mean_kernel_values():
    k = kernel_by_id("squared_mean")
    assert k(2.0, 3.0) == 6.0
    assert k.theta(MarginalModel.gaussian(0.0, 1.0)) == 0.0
    assert k.rho1(MarginalModel.gaussian(1.0, 1.0))(3.0) == pytest.approx(3.0)
    assert k.monotone is Monotonicity.MONOTONE


def test_third_moment_kernel_values():
    k = kernel_by_id("third_moment")
    for c in (-2.0, 0.0, 3.7):
        assert k(c, c, c) == pytest.approx(0.0, abs=1e-12)
    m = MarginalModel.gaussian(0.0, 1.0)
    assert k.theta(m) == 0.0
    assert k.rho1(m)(1.0) == pytest.approx(-2.0 / 3.0)


def test_kernel_registry():
    assert set(KERNEL_IDS) == {"variance", "squared_mean", "third_moment"}
    with pytest.raises(ValueError):
        kernel_by_id("median")
    k = kernel_by_id("variance")
    with pytest.raises(ValueError):
        k(1.0)  # wrong arity


@pytest.mark.parametrize("kernel_id", KERNEL_IDS)
@given(st.lists(finite_floats, min_size=3, max_size=3))
def test_kernel_symmetry(kernel_id, xs):
    k = kernel_by_id(kernel_id)
    args = xs[: k.degree]
    rng = np.random.default_rng(abs(hash(tuple(args))) % 2**32)
    base = k(*args)
    for _ in range(4):
        perm = rng.permutation(k.degree)
        assert k(*(args[p] for p in perm)) == base


# -- projection oracle: rho_1 against Monte Carlo -------------------------------


@pytest.mark.parametrize(
    "kernel_id,marginal",
    [
        ("variance", MarginalModel.gaussian(0.0, 1.0)),
        ("variance", MarginalModel.uniform(-1.0, 2.0)),
        ("squared_mean", MarginalModel.gaussian(1.0, 1.0)),
        ("third_moment", MarginalModel.gaussian(0.0, 1.0)),
    ],
)
def test_rho1_matches_monte_carlo(kernel_id, marginal):
    k = kernel_by_id(kernel_id)
    rho1 = k.rho1(marginal)
    rng = np.random.default_rng(987)
    n_draws = 10**6
    extra = [marginal.sample(n_draws, rng) for _ in range(k.degree - 1)]
    grid = marginal.ppf(np.linspace(0.05, 0.95, 20))
    for x in grid:
        vals = np.asarray(k.fn(np.full(n_draws, x), *extra), dtype=float)
        se = vals.std(ddof=1) / math.sqrt(n_draws)
        assert abs(vals.mean() - rho1(x)) <= 4.0 * se


def test_theta_matches_monte_carlo():
    rng = np.random.default_rng(55)
    m = MarginalModel.gaussian(0.4, 1.2)
    n_draws = 10**6
    for kernel_id in KERNEL_IDS:
        k = kernel_by_id(kernel_id)
        cols = [m.sample(n_draws, rng) for _ in range(k.degree)]
        vals = np.asarray(k.fn(*cols), dtype=float)
        se = vals.std(ddof=1) / math.sqrt(n_draws)
        assert abs(vals.mean() - k.theta(m)) <= 4.0 * se


# -- domination ------------------------------------------------------------------


def test_check_domination_examples():
    grid = np.arange(-10.0, 10.0 + 1e-9, 0.01)
    assert check_domination(DominationPair(np.sin, lambda x: x, "user_supplied"), grid)
    assert not check_domination(
        DominationPair(lambda x: x**2, lambda x: x, "user_supplied"),
        np.linspace(0.0, 10.0, 1001),
    )
    assert check_domination(DominationPair(lambda x: x, lambda x: x, "identity"), grid)


def test_check_domination_grid_validation():
    pair = identity_domination(lambda x: x)
    with pytest.raises(ValueError):
        check_domination(pair, [1.0])
    with pytest.raises(ValueError):
        check_domination(pair, [1.0, 1.0, 2.0])


def test_bv_domination_identity_and_flip():
    pair = bv_domination(lambda x: x, lambda x: np.zeros_like(np.asarray(x, dtype=float)))
    g = np.linspace(-3, 3, 101)
    assert np.allclose(pair.f_tilde(g), g)
    assert pair.provenance == "bounded_variation_construction"
    # f(x) = -x via U1 = 0, U2 = x gives f_tilde(x) = x
    flip = bv_domination(lambda x: np.zeros_like(np.asarray(x, dtype=float)), lambda x: x)
    assert np.allclose(flip.f(g), -g)
    assert np.allclose(flip.f_tilde(g), g)
    assert check_domination(flip, g)


def test_bv_domination_rejects_nonmonotone_parts():
    with pytest.raises(ValueError):
        bv_domination(np.sin, lambda x: np.zeros_like(np.asarray(x, dtype=float)))
    with pytest.raises(ValueError):
        bv_domination(lambda x: x, np.cos)


def test_variance_rho1_domination_standard_normal():
    m = MarginalModel.gaussian(0.0, 1.0)
    pair = variance_rho1_domination(m)
    g = np.linspace(-6, 6, 1201)
    rho1 = kernel_by_id("variance").rho1(m)
    assert np.max(np.abs(pair.f(g) - rho1(g))) < 1e-12
    # dominating function is (x^2 1{x>=0} + 1 - x^2 1{x<=0}) / 2 here
    expected = 0.5 * (g**2 * (g >= 0) + 1.0 - g**2 * (g <= 0))
    assert np.max(np.abs(pair.f_tilde(g) - expected)) < 1e-12
    assert check_domination(pair, g)


def test_variance_rho1_domination_nonzero_mean():
    m = MarginalModel.gaussian(0.7, 2.0)
    pair = variance_rho1_domination(m)
    g = default_domination_grid(m)
    rho1 = kernel_by_id("variance").rho1(m)
    assert np.max(np.abs(pair.f(g) - rho1(g))) < 1e-10
    assert check_domination(pair, g)


def test_third_moment_rho1_domination():
    m = MarginalModel.gaussian(0.0, 1.0)
    pair = third_moment_rho1_domination(m)
    g = np.linspace(-5, 5, 801)
    rho1 = kernel_by_id("third_moment").rho1(m)
    assert np.max(np.abs(pair.f(g) - rho1(g))) < 1e-12
    assert check_domination(pair, g)


def test_accepted_pair_satisfies_increment_bound():
    # |f(y) - f(x)| <= f_tilde(y) - f_tilde(x) for x < y is equivalent to domination.
    pair = variance_rho1_domination(MarginalModel.gaussian(0.0, 1.0))
    g = np.linspace(-4, 4, 161)
    fv = np.asarray(pair.f(g), dtype=float)
    gv = np.asarray(pair.f_tilde(g), dtype=float)
    i, j = np.triu_indices(len(g), 1)
    assert np.all(np.abs(fv[j] - fv[i]) <= gv[j] - gv[i] + 1e-10)


def test_default_domination_grid():
    g = default_domination_grid(MarginalModel.gaussian(0.0, 1.0))
    assert len(g) == 2001
    assert np.all(np.diff(g) > 0)
    assert g[0] == pytest.approx(-3.719, abs=0.01)  # 1e-4 quantile
    assert default_domination_grid()[0] == g[0]
