from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from photonmol.analysis.brightness import (
    PARAM_NAMES,
    PowerSeries,
    car_curve,
    fit_brightness,
    model_rates,
    synthesize_power_series,
)
from photonmol.errors import DataError, DomainError, FitError

P = np.linspace(0.5, 5.0, 10)
TRUTH = dict(gamma_eff=4.4e6, eta_s=0.072, eta_i=0.056, beta_s=300.0, beta_i=200.0, dark=500.0)


def _poisson_series(rng, T=10.0, **kw):
    """Counts drawn from the model with genuine shot noise over ``T`` seconds."""
    params = dict(TRUTH, **kw)
    clean = synthesize_power_series(P, **params)
    Cs, Ci, Ccc = (rng.poisson(c * T) / T for c in (clean.Cs_Hz, clean.Ci_Hz, clean.Ccc_Hz))
    return PowerSeries(P, Cs, Ci, Ccc, 1e-9, acc_Hz=clean.accidentals, integration_time_s=T)


@given(st.floats(1e5, 1e8), st.floats(0.01, 0.9), st.floats(0.01, 0.9),
       st.floats(0.0, 1e3), st.floats(0.0, 1e3), st.floats(0.0, 1e3))
def test_noise_free_round_trip(g, es, ei, bs, bi, dc):
    data = synthesize_power_series(P, g, es, ei, bs, bi, dc)
    fit = fit_brightness(data)
    assert fit.params == pytest.approx([g, es, ei, bs, bi, dc], rel=1e-6, abs=1e-3)
    assert fit.residual_norm < 1e-6 * np.sqrt(3 * P.size) * max(1.0, np.sqrt(g))


def test_model_rates_closed_form():
    cs, ci, cc = model_rates([2.0, 0.5, 0.25, 1.0, 2.0, 3.0], [1.0, 2.0], acc_Hz=[0.1, 0.2])
    assert np.allclose(cs, [2 * 0.5 + 1 + 3, 2 * 0.5 * 4 + 2 + 3])
    assert np.allclose(ci, [2 * 0.25 + 2 + 3, 2 * 0.25 * 4 + 4 + 3])
    assert np.allclose(cc, [2 * 0.125 + 0.1, 2 * 0.125 * 4 + 0.2])


@pytest.mark.parametrize("weighting", ["poisson", "uniform"])
def test_covariance_matches_repeat_spread(weighting):
    rng = np.random.default_rng(7)
    fits = [fit_brightness(_poisson_series(rng), weighting) for _ in range(100)]
    est = np.array([f.params for f in fits])
    err = np.mean([f.stderr for f in fits], axis=0)
    ratio = est.std(axis=0) / err
    # gamma and both efficiencies
    assert np.all((ratio[:3] > 0.6) & (ratio[:3] < 1.6)), ratio
    truth = np.array([TRUTH[k] for k in PARAM_NAMES])
    inside = np.abs(est[:, 1:3] - truth[1:3]) < 3 * np.array([[f.eta_s_err, f.eta_i_err]
                                                              for f in fits])
    assert inside.mean() > 0.95


def test_fit_reports_diagnostics():
    fit = fit_brightness(_poisson_series(np.random.default_rng(1)))
    assert fit.covariance.shape == (6, 6)
    assert np.allclose(fit.covariance, fit.covariance.T)
    assert 0.3 < fit.reduced_chi2 < 3.0
    assert fit.condition_number < 1e12
    d = fit.as_dict()
    assert set(PARAM_NAMES) <= set(d)


def test_too_few_points_and_bad_weighting():
    data = synthesize_power_series(P)
    with pytest.raises(DataError):
        fit_brightness(data.head(4))
    with pytest.raises(DomainError):
        fit_brightness(data, weighting="huber")


def test_no_net_coincidences_is_fit_error():
    d = synthesize_power_series(P)
    flat = PowerSeries(P, d.Cs_Hz, d.Ci_Hz, d.accidentals, 1e-9)
    with pytest.raises(FitError):
        fit_brightness(flat)


def test_collinear_background_is_ill_conditioned():
    # a sub-µW power span cannot separate the quadratic, linear and constant terms
    Pn = np.linspace(1.0, 1.0 + 4e-7, 6)
    d = synthesize_power_series(Pn, beta_s=10.0, beta_i=10.0, dark=5.0)
    with pytest.raises(FitError) as exc:
        fit_brightness(d)
    assert exc.value.condition_number is not None


@pytest.mark.parametrize("kw", [
    dict(P_mW=[1, 2, 2, 3, 4]), dict(P_mW=[-1, 2, 3, 4, 5]), dict(Cs_Hz=[1, 2, 3, 4]),
    dict(Ccc_Hz=[1, 2, np.nan, 4, 5]), dict(Ci_Hz=[1, -2, 3, 4, 5]),
])
def test_power_series_validation(kw):
    base = dict(P_mW=[1, 2, 3, 4, 5], Cs_Hz=[1, 2, 3, 4, 5], Ci_Hz=[1, 2, 3, 4, 5],
                Ccc_Hz=[1, 2, 3, 4, 5], coincidence_window_s=1e-9)
    base.update(kw)
    with pytest.raises(DataError):
        PowerSeries(**base)


def test_power_series_is_read_only_and_accidentals():
    d = synthesize_power_series(P)
    with pytest.raises(ValueError):
        d.P_mW[0] = 1.0
    assert np.allclose(d.accidentals, d.Cs_Hz * d.Ci_Hz * 1e-9)
    with pytest.raises(DomainError):
        PowerSeries(P, d.Cs_Hz, d.Ci_Hz, d.Ccc_Hz, 0.0)


def test_car_values_and_zero_accidentals():
    d = synthesize_power_series(P)
    car = car_curve(d)
    expected = (d.Ccc_Hz - d.accidentals) / d.accidentals
    assert np.allclose([c.car for c in car], expected)
    # CAR falls as 1/P^2 for a pure quadratic source
    assert np.all(np.diff([c.car for c in car]) < 0)
    zero = PowerSeries(P, np.zeros_like(P), d.Ci_Hz, d.Ccc_Hz, 1e-9)
    assert all(np.isinf(c.car) for c in car_curve(zero))


def test_car_flags_tpa_rolloff():
    Pw = np.linspace(0.5, 10.0, 12)
    clean = car_curve(synthesize_power_series(Pw))
    assert not any(c.tpa_flag for c in clean)
    noisy = synthesize_power_series(Pw, tpa_per_mW=0.05, noise=0.01,
                                    rng=np.random.default_rng(3))
    flags = [c.tpa_flag for c in car_curve(noisy)]
    assert flags[-1] and not any(flags[:4])
