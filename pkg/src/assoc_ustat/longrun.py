"""Overlapping-block estimation of the long-run standard deviation.

For a series Y_1..Y_n and block length ell, the estimator averages the
absolute deviations of sliding block sums from the block-scaled grand mean:

    B_n = (n - ell + 1)^-1 sum_{j=0..n-ell} |S_j(ell) - ell Ybar_n| / sqrt(ell)

with S_j(ell) = Y_{j+1} + ... + Y_{j+ell}.  As ell grows with ell = o(n),
B_n converges to sigma_f sqrt(2/pi) where sigma_f^2 is the long-run variance
lim Var(S_n)/n, so sigma_f is recovered as B_n sqrt(pi/2).  The result also
holds when Y_j = f(X_j) for a non-monotone but dominated transform f of an
associated sequence, which is what makes the estimator usable for U-statistic
first projections.

Fluctuations of B_n around its centering are asymptotically normal at scale
sqrt(ell/n); the deviation-bound constant differs between the monotone and
the dominated (non-monotone) route.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass

import numpy as np

from .kernels import Monotonicity, SymmetricKernel
from .marginals import MarginalModel
from .ustat import subset_indices

BN_LIMIT_FACTOR = math.sqrt(2.0 / math.pi)
# Deviation-bound constants per unit sigma_f.
A_NON_MONOTONE = math.sqrt((3.0 * math.pi - 8.0) / (2.0 * math.pi)) + 1.0
A_MONOTONE = math.sqrt((5.0 * math.pi - 8.0) / (2.0 * math.pi)) + 1.0

ELL_RULES = ("fixed", "cube_root", "log_square_capped")

_FIXED_RE = re.compile(r"^fixed\((\d+)\)$")


def integer_cube_root(n: int) -> int:
    """floor(n ** (1/3)) without floating-point edge cases."""
    if n < 1:
        raise ValueError("n must be >= 1")
    r = int(round(n ** (1.0 / 3.0)))
    while r**3 > n:
        r -= 1
    while (r + 1) ** 3 <= n:
        r += 1
    return r


@dataclass(frozen=True)
class BlockConfig:
    """Block-length rule: fixed(ell), cube_root, or log_square_capped."""

    ell_rule: str = "cube_root"
    fixed_ell: int | None = None

    def __post_init__(self):
        if self.ell_rule not in ELL_RULES:
            raise ValueError(f"unknown ell rule {self.ell_rule!r}; expected one of {ELL_RULES}")
        if self.ell_rule == "fixed":
            if self.fixed_ell is None or self.fixed_ell < 1:
                raise ValueError("fixed rule needs fixed_ell >= 1")
        elif self.fixed_ell is not None:
            raise ValueError("fixed_ell is only meaningful with the fixed rule")

    @classmethod
    def fixed(cls, ell: int) -> "BlockConfig":
        return cls(ell_rule="fixed", fixed_ell=ell)

    @classmethod
    def cube_root(cls) -> "BlockConfig":
        return cls(ell_rule="cube_root")

    @classmethod
    def log_square_capped(cls) -> "BlockConfig":
        return cls(ell_rule="log_square_capped")

    @classmethod
    def from_string(cls, text: str) -> "BlockConfig":
        """Parse 'cube_root', 'log_square_capped' or 'fixed(K)'."""
        text = text.strip()
        m = _FIXED_RE.match(text)
        if m:
            return cls.fixed(int(m.group(1)))
        if text in ("cube_root", "log_square_capped"):
            return cls(ell_rule=text)
        raise ValueError(f"cannot parse ell rule {text!r}")

    def describe(self) -> str:
        return f"fixed({self.fixed_ell})" if self.ell_rule == "fixed" else self.ell_rule

    def ell(self, n: int) -> int:
        if n < 1:
            raise ValueError("n must be >= 1")
        if self.ell_rule == "fixed":
            if self.fixed_ell > n:
                raise ValueError(f"fixed block length {self.fixed_ell} exceeds n = {n}")
            return self.fixed_ell
        cube = max(1, integer_cube_root(n))
        if self.ell_rule == "cube_root":
            return cube
        log_cap = int(n / math.log(n) ** 2) if n >= 2 else 1
        return max(1, min(cube, log_cap))


@dataclass(frozen=True)
class LongRunEstimate:
    """B_n value with block length, derived sigma_f, and fluctuation scale.

    ``sigma_f_hat = b_n * sqrt(pi/2)`` inverts the B_n limit;
    ``fluct_scale = sqrt(ell/n) * A`` with A the (monotone or dominated)
    deviation constant evaluated at sigma_f_hat.
    """

    b_n: float
    ell: int
    n: int
    sigma_f_hat: float
    fluct_scale: float
    monotone_variant: bool
    warning: str | None = None

    def to_json_dict(self) -> dict:
        return {
            "b_n": self.b_n,
            "ell": self.ell,
            "n": self.n,
            "sigma_f_hat": self.sigma_f_hat,
            "fluct_scale": self.fluct_scale,
            "monotone_variant": self.monotone_variant,
            "warning": self.warning,
        }


def block_sums(series: np.ndarray, ell: int) -> np.ndarray:
    """Sliding sums S_j(ell), j = 0..n-ell, via prefix sums (O(n))."""
    c = np.concatenate(([0.0], np.cumsum(series)))
    return c[ell:] - c[: len(c) - ell]


def block_estimator(series, config: BlockConfig, monotone_variant: bool = False) -> LongRunEstimate:
    """Overlapping-block estimate of sigma_f sqrt(2/pi) for the given series."""
    y = np.asarray(series, dtype=float)
    if y.ndim != 1 or len(y) < 2:
        raise ValueError("series must be one-dimensional with length >= 2")
    if not np.all(np.isfinite(y)):
        raise ValueError("series contains non-finite values")
    n = len(y)
    ell = config.ell(n)
    s = block_sums(y, ell)
    b_n = float(np.mean(np.abs(s - ell * y.mean())) / math.sqrt(ell))
    sigma_f_hat = b_n * math.sqrt(math.pi / 2.0)
    a_unit = A_MONOTONE if monotone_variant else A_NON_MONOTONE
    warning = None
    if np.min(y) == np.max(y):
        warning = "degenerate zero-variance series; block estimate is 0"
        warnings.warn(warning, stacklevel=2)
    return LongRunEstimate(
        b_n=b_n,
        ell=ell,
        n=n,
        sigma_f_hat=sigma_f_hat,
        fluct_scale=math.sqrt(ell / n) * a_unit * sigma_f_hat,
        monotone_variant=monotone_variant,
        warning=warning,
    )


def fluctuation_bound(estimate: LongRunEstimate, confidence_x: float) -> float:
    """Half-width sqrt(ell/n) A x of the asymptotic deviation bound at level x."""
    if confidence_x <= 0.0:
        raise ValueError("confidence_x must be positive")
    return estimate.fluct_scale * confidence_x


def leave_one_out_rho1(sample, kernel: SymmetricKernel) -> np.ndarray:
    """Empirical first projection: at X_i, average the kernel over the other points.

    Degree 2 is evaluated in O(n^2) blocks; degree 3 enumerates all pairs per
    point and is only meant for moderate n.
    """
    x = np.asarray(sample, dtype=float)
    n = len(x)
    k = kernel.degree
    if n < k:
        raise ValueError(f"sample size {n} is below the kernel degree {k}")
    if k == 2:
        out = np.empty(n)
        chunk = max(1, 10**7 // max(n, 1))
        for lo in range(0, n, chunk):
            block = np.asarray(kernel.fn(x[lo : lo + chunk, None], x[None, :]), dtype=float)
            diag = np.asarray(kernel.fn(x[lo : lo + chunk], x[lo : lo + chunk]), dtype=float)
            out[lo : lo + chunk] = (block.sum(axis=1) - diag) / (n - 1)
        return out
    if k == 3:
        pairs = subset_indices(n, 2)
        a, b = x[pairs[:, 0]], x[pairs[:, 1]]
        out = np.empty(n)
        for i in range(n):
            keep = (pairs[:, 0] != i) & (pairs[:, 1] != i)
            out[i] = float(np.mean(kernel.fn(x[i], a[keep], b[keep])))
        return out
    raise ValueError("empirical first projection supports kernel degrees 2 and 3")


def sigma_u_plugin(
    sample,
    kernel: SymmetricKernel,
    config: BlockConfig,
    marginal: MarginalModel | None = None,
    monotone_variant: bool | None = None,
) -> LongRunEstimate:
    """Block estimate of the limiting U-statistic scale sigma_U.

    Applies the block estimator to the first-projection series rho_1(X_j),
    using the kernel's closed form when a marginal is supplied and the
    leave-one-out empirical projection otherwise.  ``sigma_f_hat`` then
    estimates sigma_U.
    """
    x = np.asarray(sample, dtype=float)
    if marginal is not None and kernel.rho1 is not None:
        series = np.asarray(kernel.rho1(marginal)(x), dtype=float)
    else:
        series = leave_one_out_rho1(x, kernel)
    if monotone_variant is None:
        monotone_variant = kernel.monotone is Monotonicity.MONOTONE
    return block_estimator(series, config, monotone_variant=monotone_variant)
