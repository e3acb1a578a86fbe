"""Support patterns, dependence signatures, margin-free measures and IPF for bivariate laws."""

from .dependence import (
    DependenceSignature,
    compatible_conditionals,
    is_independent,
    is_quasi_independent,
    lambda_gap,
    odds_ratios_local,
    odds_ratios_pivot,
    same_dependence,
    signature,
)
from .grid import (
    GridDensity,
    GridError,
    HaarCoefficients,
    gaussian_copula_grid,
    haar_delta,
    haar_transform,
    lambda_bar,
    local_dependence,
    mixed_local_dependence,
    odds_ratio_function,
)
from .measures import (
    MeasureReport,
    calibrate,
    concordance_order,
    cross_example_tau,
    kendall_tau,
    mutual_information,
    overall_dependence,
    pearson_rho,
    plrd_check,
    pqd_check,
    quasi_deviation,
    regional_dependence,
    spearman_rho,
)
from .projection import IpfReport, i_project, ipf, kl_divergence, pythagoras_check
from .support import (
    DependenceBasis,
    FeasibilityReport,
    Verdict,
    ZeroRectangle,
    dim_gamma,
    frechet_feasible,
    gamma_basis,
    maximal_zero_rectangles,
)
from .tables import (
    MarginPair,
    ProbTable,
    SupportPattern,
    TableError,
    conditional_cols,
    conditional_rows,
    group_transform,
    margins,
    marginal_replace_cols,
    marginal_replace_rows,
    permute,
)

__version__ = "0.1.0"
