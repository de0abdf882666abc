"""Squared-distance covariance estimation and independence testing.

The central quantity is a nonnegative covariance between two real
random variables that is zero exactly when they are independent; it
equals the integrated squared gap between the joint distribution
function and the product of its marginals.  The package provides three
sample estimators sharing one O(n^2) pairwise engine, closed-form
population curves for the normal and exponential families with a
quadrature cross-check, the kernel eigenvalue machinery behind the
weighted chi-square null limit, samplers for six dependent bivariate
families, permutation and asymptotic independence tests, and the power,
normality, and timing studies built on them, all behind a ``kappacov``
command-line interface.
"""

from .core import (
    DEFAULT_CONFIG,
    FAMILIES,
    FamilySpec,
    NumericConfig,
    PairedSample,
    SeedSpec,
    load_sample,
    substream,
    write_sample,
)
from .errors import (
    AllValuesEqual,
    DegenerateGrid,
    DegenerateMarginal,
    DomainError,
    EmptySpectrum,
    InvalidSample,
    KappaCovError,
    NonMonotoneQuantile,
    NOnPositive,
    ParseError,
    SampleIOError,
    SampleTooSmall,
    ThetaOutOfRange,
    TooFewRows,
    UnknownEstimator,
    UnsupportedFamily,
)
from .ustats import (
    PairwiseTables,
    UStatBundle,
    bundle_for_permutation,
    compute_ustats,
    compute_ustats_bruteforce,
    pairwise_tables,
)
from .estimators import (
    KappaEstimates,
    RhoEstimates,
    delta1_plugin,
    estimate,
    kappa_hat,
    kappa_hat_direct,
    kappa_hat_relation,
    kappa_star,
    kappa_tilde,
    kappa_tilde_direct,
    kappa_trio,
    rho_estimates,
    statistic_scale,
)
from .closedform import (
    PopulationMoments,
    bvn_cdf,
    bvn_moments,
    exp_integral_G,
    exp_integral_G_scaled,
    kappa_bvn,
    kappa_bvn_second_derivative,
    kappa_from_moments,
    kappa_gbed,
    kappa_gbed_derivative,
    kappa_quadrature_oracle,
    population_kappa,
)
from .spectral import (
    DiscreteMarginal,
    EigenSpectrum,
    NullLimitModel,
    dense_kernel_eigenvalues,
    discretize_marginal,
    empirical_marginal,
    kernel_eigenvalues,
    null_limit_model,
    null_pvalue,
)
from .samplers import exponential_rate_switch, marginal_quantile, sample_family
from .inference import (
    NormalityReport,
    NormalityRow,
    PowerCell,
    PowerReport,
    TestResult,
    TimingReport,
    independence_test,
    normality_diagnostic,
    power_study,
    timing_benchmark,
)
from .cli import run

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "DEFAULT_CONFIG",
    "FAMILIES",
    "FamilySpec",
    "NumericConfig",
    "PairedSample",
    "SeedSpec",
    "load_sample",
    "substream",
    "write_sample",
    "AllValuesEqual",
    "DegenerateGrid",
    "DegenerateMarginal",
    "DomainError",
    "EmptySpectrum",
    "InvalidSample",
    "KappaCovError",
    "NonMonotoneQuantile",
    "NOnPositive",
    "ParseError",
    "SampleIOError",
    "SampleTooSmall",
    "ThetaOutOfRange",
    "TooFewRows",
    "UnknownEstimator",
    "UnsupportedFamily",
    "PairwiseTables",
    "UStatBundle",
    "bundle_for_permutation",
    "compute_ustats",
    "compute_ustats_bruteforce",
    "pairwise_tables",
    "KappaEstimates",
    "RhoEstimates",
    "delta1_plugin",
    "estimate",
    "kappa_hat",
    "kappa_hat_direct",
    "kappa_hat_relation",
    "kappa_star",
    "kappa_tilde",
    "kappa_tilde_direct",
    "kappa_trio",
    "rho_estimates",
    "statistic_scale",
    "PopulationMoments",
    "bvn_cdf",
    "bvn_moments",
    "exp_integral_G",
    "exp_integral_G_scaled",
    "kappa_bvn",
    "kappa_bvn_second_derivative",
    "kappa_from_moments",
    "kappa_gbed",
    "kappa_gbed_derivative",
    "kappa_quadrature_oracle",
    "population_kappa",
    "DiscreteMarginal",
    "EigenSpectrum",
    "NullLimitModel",
    "dense_kernel_eigenvalues",
    "discretize_marginal",
    "empirical_marginal",
    "kernel_eigenvalues",
    "null_limit_model",
    "null_pvalue",
    "exponential_rate_switch",
    "marginal_quantile",
    "sample_family",
    "NormalityReport",
    "NormalityRow",
    "PowerCell",
    "PowerReport",
    "TestResult",
    "TimingReport",
    "independence_test",
    "normality_diagnostic",
    "power_study",
    "timing_benchmark",
    "run",
]
