"""Non-parametric Archimedean generator estimation and copula-calibrated multiple tests."""

from .generator import (
    ParametricGumbel,
    PiecewisePhi,
    RadialAtoms,
    copula_diagonal,
    copula_diagonal_quantile,
    fit_generator_gnz,
    fit_generator_pairwise,
    fit_radial_atoms,
    phi_eval,
    psi_eval,
)
from .kendall import KendallDF, empirical_kendall_df, kendall_df_gumbel_2d, pseudo_observations
from .mtp import (
    CalibrationResult,
    TestOutcome,
    bootstrap_lfc_statistics,
    calibrate,
    calibrate_bonferroni,
    calibrate_oracle_gumbel,
    decide,
    evaluate,
    p_two_sided_normal,
    realized_fwer_gumbel,
)
from .sampling import bootstrap_indices, sample_gauss_equicorr, sample_gumbel, tau_to_theta

__version__ = "0.1.0"
