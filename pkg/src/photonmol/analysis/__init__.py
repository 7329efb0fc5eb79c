"""Re-analysis of measured source data."""

from .brightness import (
    BrightnessFit,
    CarPoint,
    PowerSeries,
    car_curve,
    fit_brightness,
    model_rates,
    synthesize_power_series,
)
from .correlation import (
    HeraldedCounts,
    SplitCounts,
    expected_heralded_g2,
    expected_split_g2,
    g2_heralded,
    g2_unheralded,
    heralded_counts_g2,
    photon_number_pmf,
    simulate_heralded_pairs,
    simulate_thermal_split,
    split_counts_g2,
    thermal_g2,
)
from .heralding import (
    REFERENCE_IDLER_BUDGET,
    REFERENCE_SIGNAL_BUDGET,
    HeraldingEstimate,
    IntrinsicHeralding,
    LossBudget,
    LossEntry,
    intrinsic_heralding,
)
from .jsi import (
    BinError,
    MeasuredJsi,
    MonteCarloPurity,
    jsi_noise_sigma,
    monte_carlo_purity,
    purity_error_curve,
    supersample_jsi,
    synthetic_measured_jsi,
)

__all__ = [
    "BinError", "BrightnessFit", "CarPoint", "HeraldedCounts", "HeraldingEstimate",
    "IntrinsicHeralding", "LossBudget", "LossEntry", "MeasuredJsi", "MonteCarloPurity",
    "REFERENCE_IDLER_BUDGET", "REFERENCE_SIGNAL_BUDGET", "PowerSeries", "SplitCounts",
    "car_curve", "expected_heralded_g2", "expected_split_g2", "fit_brightness",
    "g2_heralded", "g2_unheralded", "heralded_counts_g2", "intrinsic_heralding",
    "jsi_noise_sigma", "model_rates", "monte_carlo_purity", "photon_number_pmf",
    "purity_error_curve", "simulate_heralded_pairs", "simulate_thermal_split",
    "split_counts_g2", "supersample_jsi", "synthesize_power_series", "synthetic_measured_jsi",
    "thermal_g2",
]
