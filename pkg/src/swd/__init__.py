"""Spectral detection of rank-one spikes in Wigner-type noise.

Public API: sampling (rmt), spectra (spectral), Chebyshev CLT machinery
(cheb), the optimal spectral test (lsstest), entrywise transforms
(entrywise), the adaptive test (adaptive), and the Monte Carlo harness
(harness). The CLI entry point is swd.cli:main.
"""

from .adaptive import (
    AdaptiveResult,
    SnrPrior,
    average_error,
    mean_under_lambda,
    optimize_t,
)
from .cheb import (
    AnalyticFn,
    ChebCoeffs,
    CltMoments,
    cheb_coeffs,
    clt_mean,
    clt_moments,
    clt_var,
    default_ellmax,
    lss,
    optimality_ratio,
    phi_omega,
    semicircle_avg,
    tau,
)
from .entrywise import (
    RELIABLY_DETECTABLE,
    DensitySpec,
    FisherFunctionals,
    check_delocalization,
    clt_mean_transformed,
    critical_tilde,
    edge_threshold,
    fisher_functionals,
    limiting_moments_tilde,
    phi_tilde,
    statistic_Ltilde,
    theoretical_error_tilde,
    transform,
)
from .harness import (
    ErrorCurvePoint,
    ExperimentConfig,
    HistogramResult,
    histogram_L,
    read_config,
    run_detection_experiment,
    transform_compare,
    write_config,
    write_csv,
)
from .lsstest import (
    ACCEPT,
    REJECT,
    LimitingMoments,
    TestParams,
    TestReport,
    biased_sum_statistic,
    critical_value,
    decide,
    detect_report,
    estimate_w2_w4,
    exceptional_w2_zero,
    exceptional_w4_one,
    limiting_moments,
    statistic_L,
    theoretical_error,
)
from .rmt import (
    DataMatrix,
    NoiseSpec,
    Seed,
    SpikePrior,
    assemble,
    matrix_text,
    read_matrix,
    sample_noise,
    sample_spike,
    theoretical_moments,
    write_matrix,
)
from .special import erf, erfc
from .spectral import (
    SIGNAL_CERTAIN,
    Outcome,
    SpectrumResult,
    eigvals_sym,
    log_det_shift,
    traces,
)

__version__ = "0.1.0"
