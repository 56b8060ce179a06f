"""U-statistics over stationary positively associated time series.

Kernels and their Hoeffding decompositions, exact and fast U-statistic
evaluation, associated-process generators, the overlapping-block estimator of
the long-run standard deviation (including its extension to non-monotone
transforms), and a Monte Carlo harness that checks the limit theorems against
analytic oracles.
"""

from .assocgen import (
    AssocProcessSpec,
    GaussianAR1Spec,
    IIDSpec,
    PositiveMASpec,
    SeedSpec,
    TransformedSpec,
    TruncatedSpec,
    generate,
    generate_batch,
    truncate_bounded,
)
from .harness import (
    ExperimentConfig,
    ExperimentResult,
    WienerPath,
    ks_distance,
    run_bn_consistency,
    run_clt_experiment,
    variance_decay_fit,
    wiener_constant_mc,
)
from .hoeffding import (
    AsymptoticVariance,
    HoeffdingDecomposition,
    asymptotic_variance,
    decompose,
    empirical_component,
    reconstruction_check,
)
from .kernels import (
    DominationPair,
    Monotonicity,
    SymmetricKernel,
    builtin_squared_mean_kernel,
    builtin_third_moment_kernel,
    builtin_variance_kernel,
    bv_domination,
    check_domination,
    kernel_by_id,
)
from .longrun import (
    BlockConfig,
    LongRunEstimate,
    block_estimator,
    fluctuation_bound,
    sigma_u_plugin,
)
from .marginals import MarginalModel

__all__ = [
    "AssocProcessSpec",
    "AsymptoticVariance",
    "BlockConfig",
    "DominationPair",
    "ExperimentConfig",
    "ExperimentResult",
    "GaussianAR1Spec",
    "HoeffdingDecomposition",
    "IIDSpec",
    "LongRunEstimate",
    "MarginalModel",
    "Monotonicity",
    "PositiveMASpec",
    "SeedSpec",
    "SymmetricKernel",
    "TransformedSpec",
    "TruncatedSpec",
    "WienerPath",
    "asymptotic_variance",
    "block_estimator",
    "builtin_squared_mean_kernel",
    "builtin_third_moment_kernel",
    "builtin_variance_kernel",
    "bv_domination",
    "check_domination",
    "decompose",
    "empirical_component",
    "fluctuation_bound",
    "generate",
    "generate_batch",
    "kernel_by_id",
    "ks_distance",
    "reconstruction_check",
    "run_bn_consistency",
    "run_clt_experiment",
    "sigma_u_plugin",
    "truncate_bounded",
    "variance_decay_fit",
    "wiener_constant_mc",
]
