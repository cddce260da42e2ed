"""Log-cumulant roughness and scale estimation for heavy-tailed speckle
models, with a fast polynomial estimator, a Bayesian failure-rate
correction, a synthetic sampler, a Monte Carlo harness, and sliding-window
raster mapping."""

from .estimators import (
    EstimateResult,
    EstimatorKind,
    EtaEstimate,
    FailureReason,
    SampleTooSmallError,
    Status,
    bayes_correct_eta,
    estimate_alpha,
    estimate_gamma,
    eta_hat,
    eta_sigma,
    invert_eta,
)
from .harness import (
    CellStats,
    MCConfig,
    MCReport,
    mse,
    read_report,
    run_campaign,
    trial_seed,
    write_report,
)
from .model import (
    G0Params,
    LogCumulants,
    ModelKind,
    MomentUndefinedError,
    Sample,
    moment,
    pdf,
    read_sample_csv,
    sample_g0,
    sample_log_cumulants,
    theoretical_log_cumulants,
    unit_mean_gamma,
    write_sample_csv,
)
from .raster import (
    Raster,
    RasterFormatError,
    RoughnessMap,
    read_raster,
    roughness_map,
    write_map,
)
from .specfun import (
    CONSTANTS,
    DegenerateLeadingCoefficientError,
    NoBracketError,
    NoConvergenceError,
    PolyRoots,
    digamma,
    f_cdf,
    f_quantile,
    ln_gamma,
    roughness_polynomial,
    solve_roughness_polynomial,
    trigamma,
    trigamma_approx,
    trigamma_inverse_bracketed,
)

__version__ = "0.1.0"

__all__ = [
    "CONSTANTS",
    "CellStats",
    "DegenerateLeadingCoefficientError",
    "EstimateResult",
    "EstimatorKind",
    "EtaEstimate",
    "FailureReason",
    "G0Params",
    "LogCumulants",
    "MCConfig",
    "MCReport",
    "ModelKind",
    "MomentUndefinedError",
    "NoBracketError",
    "NoConvergenceError",
    "PolyRoots",
    "Raster",
    "RasterFormatError",
    "RoughnessMap",
    "Sample",
    "SampleTooSmallError",
    "Status",
    "bayes_correct_eta",
    "digamma",
    "estimate_alpha",
    "estimate_gamma",
    "eta_hat",
    "eta_sigma",
    "f_cdf",
    "f_quantile",
    "invert_eta",
    "ln_gamma",
    "moment",
    "mse",
    "pdf",
    "read_raster",
    "read_report",
    "read_sample_csv",
    "roughness_map",
    "roughness_polynomial",
    "run_campaign",
    "sample_g0",
    "sample_log_cumulants",
    "solve_roughness_polynomial",
    "theoretical_log_cumulants",
    "trial_seed",
    "trigamma",
    "trigamma_approx",
    "trigamma_inverse_bracketed",
    "unit_mean_gamma",
    "write_map",
    "write_report",
    "write_sample_csv",
]
