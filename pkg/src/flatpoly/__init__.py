"""Flatness diagnostics for Littlewood and Newman-Bourgain polynomials."""

__version__ = "0.1.0"

from .sequences import (  # noqa: E402
    BinarySequence,
    CosinePolynomial,
    DirichletSpec,
    SignSequence,
    complement,
    dirichlet,
    frequency_minus_one,
    is_palindromic,
    negate_S,
    palindromic_decomposition,
    parse_sequences,
    t_inverse,
    t_map,
    to_binary,
)
from .spectral import (  # noqa: E402
    FlatnessReport,
    evaluate_on_grid,
    flatness_report,
    flatness_residual,
    l4_norm_exact,
    littlewood_criterion_ratio,
    lp_norm,
    mahler_measure,
    merit_factor,
    mz_divergence_witness,
    sign_autocorrelation,
    sup_norm_estimate,
)
from .generators import (  # noqa: E402
    FamilySpec,
    SplitMix64,
    legendre_fekete,
    nb_random,
    random_littlewood,
    random_palindromic,
    rudin_shapiro,
)
from .covariance import (  # noqa: E402
    CovarianceDiagnostics,
    covariance_matrix,
    min_eigenvalue,
    nb_autocorrelation,
    obstruction_ratio,
)
