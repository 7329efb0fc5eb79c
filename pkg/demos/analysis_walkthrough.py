"""
Analysis walkthrough on synthetic measurements.

Run with ``python3 demos/analysis_walkthrough.py``. Fits a noisy power
series, back-propagates heralding efficiencies through the reference loss
budgets, and estimates purity and its uncertainty from a supersampled JSI.
"""

from __future__ import annotations

import numpy as np

from photonmol.analysis import (
    REFERENCE_IDLER_BUDGET,
    REFERENCE_SIGNAL_BUDGET,
    HeraldingEstimate,
    fit_brightness,
    intrinsic_heralding,
    jsi_noise_sigma,
    monte_carlo_purity,
    supersample_jsi,
    synthesize_power_series,
    synthetic_measured_jsi,
)


def main() -> None:
    data = synthesize_power_series(np.linspace(0.02, 0.15, 10), noise=0.01,
                                   rng=np.random.default_rng(1))
    fit = fit_brightness(data)
    (g, es, ei), (dg, des, dei) = fit.params[:3], fit.stderr[:3]
    print(f"fit: gamma {g / 1e6:.2f} +/- {dg / 1e6:.2f} MHz/mW^2, "
          f"eta_s {es:.4f} +/- {des:.4f}, eta_i {ei:.4f} +/- {dei:.4f}")

    r = intrinsic_heralding(HeraldingEstimate(es, ei, des, dei),
                            REFERENCE_SIGNAL_BUDGET, REFERENCE_IDLER_BUDGET)
    print(f"intrinsic heralding: signal {r.eta_s_src:.3f} +/- {r.eta_s_err:.3f}, "
          f"idler {r.eta_i_src:.3f} +/- {r.eta_i_err:.3f}")

    rng = np.random.default_rng(2)
    j = synthetic_measured_jsi()
    noisy = type(j)(j.signal_nm, j.idler_nm,
                    np.clip(j.intensity * (1 + 0.04 * rng.standard_normal(j.shape)), 0, None))
    binned = supersample_jsi(noisy, 4.0)
    sigma = jsi_noise_sigma(binned)
    mc = monte_carlo_purity(binned, sigma, trials=200, seed=3)
    print(f"JSI: native {noisy.shape}, binned {binned.shape}, residual noise {sigma:.3f}")
    print(f"purity {mc.nominal:.4f} (Monte-Carlo {mc.purity:.5f} +/- {mc.err:.1e}); "
          f"noiseless {j.purity():.4f}")


if __name__ == "__main__":
    main()
