import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from assoc_ustat.kernels import kernel_by_id
from assoc_ustat.ustat import (
    subset_indices,
    u_statistic,
    u_statistic_fast,
    u_statistic_fast_batch,
)

sample_values = st.floats(-100, 100)


def test_subset_indices_shapes_and_order():
    idx = subset_indices(5, 2)
    assert idx.shape == (10, 2)
    assert np.all(idx[:, 0] < idx[:, 1])
    assert idx[0].tolist() == [0, 1] and idx[-1].tolist() == [3, 4]
    idx3 = subset_indices(6, 3)
    assert idx3.shape == (math.comb(6, 3), 3)
    assert np.all((idx3[:, 0] < idx3[:, 1]) & (idx3[:, 1] < idx3[:, 2]))
    assert len({tuple(row) for row in idx3.tolist()}) == len(idx3)
    with pytest.raises(ValueError):
        subset_indices(2, 3)


def test_known_values():
    assert u_statistic([1, 2, 3], kernel_by_id("variance")).value == 1.0
    assert u_statistic([1, 2, 3], kernel_by_id("squared_mean")).value == pytest.approx(11 / 3)
    assert u_statistic([1, 2, 3], kernel_by_id("third_moment")).value == pytest.approx(0.0, abs=1e-12)
    assert u_statistic_fast([1, 2, 3], "variance").value == 1.0
    assert u_statistic_fast([1, 2, 3], "third_moment").value == pytest.approx(0.0, abs=1e-12)
    assert u_statistic_fast([2, 2], "squared_mean").value == 4.0


def test_constant_sample_zero_kernels():
    x = np.full(9, 4.25)
    assert u_statistic(x, kernel_by_id("variance")).value == 0.0
    assert u_statistic(x, kernel_by_id("third_moment")).value == pytest.approx(0.0, abs=1e-12)


def test_result_metadata():
    res = u_statistic([1.0, 2.0, 3.0], kernel_by_id("variance"))
    assert (res.n, res.kernel_id, res.method) == (3, "variance", "enumeration")
    fast = u_statistic_fast([1.0, 2.0, 3.0], "variance")
    assert fast.method == "fast_path"


def test_errors():
    with pytest.raises(ValueError):
        u_statistic([1.0], kernel_by_id("variance"))
    with pytest.raises(ValueError):
        u_statistic_fast([1.0, 2.0], "third_moment")
    with pytest.raises(ValueError):
        u_statistic_fast([1.0, np.nan, 2.0], "variance")
    with pytest.raises(ValueError):
        u_statistic_fast([1.0, 2.0], "mystery")
    with pytest.raises(ValueError):
        u_statistic_fast_batch(np.zeros((2, 5)), "mystery")
    with pytest.raises(ValueError):
        u_statistic(np.array([[1.0, 2.0]]), kernel_by_id("variance"))


@pytest.mark.parametrize("kernel_id", ["variance", "squared_mean", "third_moment"])
@given(data=st.data())
def test_fast_path_matches_enumeration(kernel_id, data):
    k = kernel_by_id(kernel_id)
    xs = data.draw(st.lists(sample_values, min_size=k.degree, max_size=30))
    ref = u_statistic(xs, k).value
    fast = u_statistic_fast(xs, kernel_id).value
    assert fast == pytest.approx(ref, rel=1e-10, abs=1e-9)


@pytest.mark.parametrize("kernel_id", ["variance", "squared_mean", "third_moment"])
@given(data=st.data())
def test_permutation_invariance_exact(kernel_id, data):
    k = kernel_by_id(kernel_id)
    xs = data.draw(st.lists(sample_values, min_size=k.degree, max_size=25))
    shuffled = list(xs)
    np.random.default_rng(0).shuffle(shuffled)
    assert u_statistic(xs, k).value == u_statistic(shuffled, k).value


@given(st.lists(sample_values, min_size=2, max_size=40), st.floats(-1000, 1000))
def test_variance_kernel_shift_law(xs, c):
    base = u_statistic_fast(xs, "variance").value
    shifted = u_statistic_fast([x + c for x in xs], "variance").value
    assert shifted == pytest.approx(base, rel=1e-9, abs=1e-9)


@given(st.lists(sample_values, min_size=3, max_size=40), st.floats(-1000, 1000))
def test_third_moment_shift_law(xs, c):
    base = u_statistic_fast(xs, "third_moment").value
    shifted = u_statistic_fast([x + c for x in xs], "third_moment").value
    assert shifted == pytest.approx(base, rel=1e-9, abs=1e-6)


def test_batch_matches_per_row():
    rng = np.random.default_rng(4)
    m = rng.normal(size=(7, 41))
    for kernel_id in ("variance", "squared_mean", "third_moment"):
        batch = u_statistic_fast_batch(m, kernel_id)
        rows = [u_statistic_fast(row, kernel_id).value for row in m]
        assert batch == pytest.approx(rows, rel=1e-12)


def test_enumeration_bit_stable():
    rng = np.random.default_rng(11)
    x = rng.normal(size=60)
    k = kernel_by_id("third_moment")
    assert u_statistic(x, k).value == u_statistic(x, k).value
    # full shuffle reproduces the identical float
    y = rng.permutation(x)
    assert u_statistic(y, k).value == u_statistic(x, k).value
