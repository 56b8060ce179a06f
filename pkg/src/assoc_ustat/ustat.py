"""Exact U-statistic evaluation: subset enumeration plus O(n) fast paths.

The enumeration route is the reference: it averages the kernel over all
size-k index subsets.  Kernel values are combined with correctly rounded
summation (math.fsum), so the result is independent of the summation order;
shuffling the sample reproduces the value bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import SymmetricKernel, sorted_args


@dataclass(frozen=True)
class UStatResult:
    value: float
    n: int
    kernel_id: str
    method: str  # "enumeration" | "fast_path"


def subset_indices(n: int, k: int) -> np.ndarray:
    """All k-subsets of range(n) in lexicographic order, shape (C(n,k), k)."""
    if k < 1 or k > 3:
        raise ValueError("subset enumeration supports k in {1, 2, 3}")
    if n < k:
        raise ValueError(f"need n >= k, got n={n}, k={k}")
    if k == 1:
        return np.arange(n, dtype=np.intp)[:, None]
    if k == 2:
        i, j = np.triu_indices(n, 1)
        return np.column_stack([i, j]).astype(np.intp)
    ar = np.arange(n)
    mask = (ar[:, None, None] < ar[None, :, None]) & (ar[None, :, None] < ar[None, None, :])
    return np.argwhere(mask).astype(np.intp)


def u_statistic(sample, kernel: SymmetricKernel) -> UStatResult:
    """Average of the kernel over all size-k subsets of the sample.

    Subset argument tuples are evaluated in ascending order and combined with
    correctly rounded summation, so the value is bit-identical under any
    shuffle of the sample.
    """
    x = np.asarray(sample, dtype=float)
    if x.ndim != 1:
        raise ValueError("sample must be one-dimensional")
    n, k = len(x), kernel.degree
    if n < k:
        raise ValueError(f"sample size {n} is below the kernel degree {k}")
    idx = subset_indices(n, k)
    cols = sorted_args(*(x[idx[:, c]] for c in range(k))) if k > 1 else [x]
    vals = np.asarray(kernel.fn(*cols), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ValueError("kernel produced non-finite values")
    total = math.fsum(vals.tolist())
    return UStatResult(
        value=total / math.comb(n, k), n=n, kernel_id=kernel.kernel_id, method="enumeration"
    )


def _fast_value(x: np.ndarray, kernel_id: str) -> float:
    n = len(x)
    if kernel_id == "variance":
        # (n-1)-divisor sample variance equals the pair average of (x - y)^2 / 2.
        return float(np.var(x, ddof=1))
    if kernel_id == "squared_mean":
        s1 = float(np.sum(x))
        s2 = float(np.sum(x * x))
        return (s1 * s1 - s2) / (n * (n - 1))
    if kernel_id == "third_moment":
        xb = float(np.mean(x))
        return n / ((n - 1) * (n - 2)) * float(np.sum((x - xb) ** 3))
    raise ValueError(f"no fast path for kernel id {kernel_id!r}")


def u_statistic_fast(sample, kernel_id: str) -> UStatResult:
    """O(n) power-sum evaluation for the built-in kernels."""
    x = np.asarray(sample, dtype=float)
    if x.ndim != 1:
        raise ValueError("sample must be one-dimensional")
    if not np.all(np.isfinite(x)):
        raise ValueError("sample contains non-finite values")
    k = {"variance": 2, "squared_mean": 2, "third_moment": 3}.get(kernel_id)
    if k is None:
        raise ValueError(f"no fast path for kernel id {kernel_id!r}")
    if len(x) < k:
        raise ValueError(f"sample size {len(x)} is below the kernel degree {k}")
    return UStatResult(
        value=_fast_value(x, kernel_id), n=len(x), kernel_id=kernel_id, method="fast_path"
    )


def u_statistic_fast_batch(samples: np.ndarray, kernel_id: str) -> np.ndarray:
    """Row-wise fast-path values for a (replications, n) sample matrix."""
    m = np.asarray(samples, dtype=float)
    if m.ndim != 2:
        raise ValueError("expected a 2-d (replications, n) array")
    n = m.shape[1]
    if kernel_id == "variance":
        return np.var(m, axis=1, ddof=1)
    if kernel_id == "squared_mean":
        s1 = m.sum(axis=1)
        s2 = (m * m).sum(axis=1)
        return (s1 * s1 - s2) / (n * (n - 1))
    if kernel_id == "third_moment":
        xb = m.mean(axis=1, keepdims=True)
        return n / ((n - 1) * (n - 2)) * ((m - xb) ** 3).sum(axis=1)
    raise ValueError(f"no fast path for kernel id {kernel_id!r}")
