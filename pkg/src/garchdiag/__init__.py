"""GARCH(p,q) residual diagnostics toolkit.

Simulation and quasi-maximum likelihood fitting of GARCH models, residuals
from the truncated moving-average variance representation, high-moment
partial sum processes with CUSUM change-point and moment-based normality
tests, kernel density estimation of the innovation distribution, and a
reproducible Monte Carlo harness for size/power studies.
"""

from .core import (
    DEFAULT_SPACE,
    GarchParams,
    InnovationSpec,
    MeanChange,
    NullScenario,
    ParameterSpace,
    SimulatedPath,
    VarianceChange,
    break_index,
    innovation_moment,
    sample_innovations,
    simulate,
    simulate_mean_change,
    simulate_variance_change,
    validate_params,
)
from .diagnostics import (
    TestReport,
    chi2_2_critical_value,
    chi2_2_pvalue,
    cusum_mean_test,
    cusum_var_test_1,
    cusum_var_test_2,
    jarque_bera,
    jb_corrected_critical_value,
    omnibus,
    sup_bb_critical_value,
    sup_bb_pvalue,
)
from .kde import KdeEstimate, default_bandwidth, default_grid, kde_evaluate
from .montecarlo import (
    CorrectionReport,
    McExperimentConfig,
    McRow,
    McTable,
    correction_term_check,
    null_quantiles,
    replicate_seed,
    run_experiment,
)
from .partial_sums import (
    GaussianCovSpec,
    NORMAL_LAMBDAS,
    SampleStats,
    StepProcess,
    bk_covariance,
    centered_psp,
    cusum_transform,
    moment_psp,
    omnibus_variances,
    sample_stats,
    self_normalized_psp,
)
from .qmle import (
    FitOptions,
    FitResult,
    default_init,
    fit,
    quasi_log_likelihood,
)
from .variance import (
    CoefficientVector,
    PsiEstimate,
    ResidualSeries,
    c_coefficients,
    estimate_psi,
    grad_log_sigma2,
    residuals,
    sigma2_hat_path,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
