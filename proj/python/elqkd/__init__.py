"""Key rates, tolerable-region curves and detection simulations for
efficiency-loophole-free QKD post-processing."""

from ._core import (
    CoherentDecoy,
    CoherentDecoyMemory,
    CoherentParams,
    ComparisonReport,
    CurveFamily,
    CurveTag,
    DetectionStats,
    ExtremeTimeShift,
    GridSpec,
    KeyRateBreakdown,
    NoAdversary,
    Scenario,
    SinglePhoton,
    StrongPulse,
    ThresholdCurve,
    ThresholdPoint,
    TrialBatch,
    __version__,
    batch_to_json,
    binary_entropy,
    coherent_memory_stats,
    coherent_stats,
    compare_to_analytic,
    curves_to_csv,
    empirical_stats,
    find_root_bisect,
    key_rate,
    key_rate_coherent,
    key_rate_single_click,
    phase_error_single_bound,
    qber,
    rate_basis_independent_baseline,
    run_trials,
    single_photon_stats,
    solve_threshold_ed,
    sweep_curve,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
