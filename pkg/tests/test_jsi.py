from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from photonmol.analysis.jsi import (
    MeasuredJsi,
    jsi_noise_sigma,
    monte_carlo_purity,
    purity_error_curve,
    supersample_jsi,
    synthetic_measured_jsi,
)
from photonmol.errors import DataError, DomainError, UsageError


@pytest.fixture(scope="module")
def measured():
    return synthetic_measured_jsi()


def _noisy(j, sigma, seed):
    rng = np.random.default_rng(seed)
    return MeasuredJsi(j.signal_nm, j.idler_nm,
                       np.clip(j.intensity * (1 + sigma * rng.standard_normal(j.shape)), 0, None))


def _axis(n, step_pm, start=1550.0):
    return start + np.arange(n) * step_pm * 1e-3


def test_synthetic_sampling_mimics_scan_and_osa(measured):
    assert measured.signal_step_pm == pytest.approx(1.0)
    assert measured.idler_step_pm == pytest.approx(0.16)
    assert measured.shape == (364, 2267)
    assert measured.purity() == pytest.approx(0.99085, abs=2e-4)


def test_supersample_matches_explicit_loops():
    rng = np.random.default_rng(0)
    I = rng.uniform(size=(9, 14))
    j = MeasuredJsi(_axis(9, 1.0), _axis(14, 0.5), I)
    s = supersample_jsi(j, 2.0)  # 2 x 4 blocks
    assert s.shape == (4, 3)
    for a in range(4):
        for b in range(3):
            assert s.intensity[a, b] == pytest.approx(I[2 * a:2 * a + 2, 4 * b:4 * b + 4].mean())
    assert s.signal_nm[0] == pytest.approx(j.signal_nm[:2].mean())
    assert s.idler_nm[0] == pytest.approx(j.idler_nm[:4].mean())


@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_supersampling_preserves_product_states(bs, bi, seed):
    rng = np.random.default_rng(seed)
    u, v = rng.uniform(0.1, 1, 12), rng.uniform(0.1, 1, 12)
    j = MeasuredJsi(_axis(12, 1.0), _axis(12, 1.0), np.outer(u, v))
    assert j.purity() == pytest.approx(1.0, abs=1e-10)
    if bs == bi:
        assert supersample_jsi(j, float(bs)).purity() == pytest.approx(1.0, abs=1e-10)


def test_supersample_rejects_finer_and_oversized_bins(measured):
    with pytest.raises(UsageError):
        supersample_jsi(measured, 0.5)
    with pytest.raises(UsageError):
        supersample_jsi(measured, 1e4)


@pytest.mark.parametrize("args", [
    (_axis(3, 1.0), _axis(4, 1.0), np.ones((3, 3))),
    (_axis(3, 1.0), _axis(3, 1.0), -np.ones((3, 3))),
    (np.array([1550.0, 1550.001, 1550.003]), _axis(3, 1.0), np.ones((3, 3))),
    (_axis(3, 1.0)[::-1], _axis(3, 1.0), np.ones((3, 3))),
    (_axis(3, 1.0), _axis(3, 1.0), np.full((3, 3), np.inf)),
])
def test_measured_jsi_validation(args):
    with pytest.raises(DataError):
        MeasuredJsi(*args)


@pytest.mark.parametrize("sigma", [0.02, 0.04, 0.08])
def test_noise_sigma_recovers_injected_noise(measured, sigma):
    est = jsi_noise_sigma(_noisy(measured, sigma, 3))
    assert est == pytest.approx(sigma, rel=0.1)


def test_noise_sigma_small_on_clean_data(measured):
    assert jsi_noise_sigma(measured) < 1e-3
    assert jsi_noise_sigma(supersample_jsi(measured, 4.0)) < 0.01
    with pytest.raises(DataError):
        jsi_noise_sigma(MeasuredJsi(_axis(2, 1.0), _axis(2, 1.0), np.ones((2, 2))))


def test_monte_carlo_deterministic_and_thread_independent(measured):
    j = supersample_jsi(measured, 4.0)
    a = monte_carlo_purity(j, 0.04, trials=100, seed=5)
    b = monte_carlo_purity(j, 0.04, trials=100, seed=5, threads=4)
    assert a == b
    assert a.nominal == j.purity()


def test_monte_carlo_zero_noise_and_validation(measured):
    j = supersample_jsi(measured, 4.0)
    r = monte_carlo_purity(j, 0.0, trials=100)
    assert r.purity == pytest.approx(r.nominal, abs=1e-14) and r.err < 1e-14
    with pytest.raises(DomainError):
        monte_carlo_purity(j, 0.04, trials=99)
    with pytest.raises(DomainError):
        monte_carlo_purity(j, -0.1)


def test_noise_lowers_purity(measured):
    j = supersample_jsi(measured, 4.0)
    r = monte_carlo_purity(j, 0.04, trials=100)
    assert r.purity < r.nominal


def test_error_curve_decreases_with_bin(measured):
    curve = purity_error_curve(measured, [0, 1, 2, 4], 0.04, trials=5)
    rms = [c.rms for c in curve]
    assert all(a > b for a, b in zip(rms, rms[1:]))
    assert curve[0].bin_pm == 0 and curve[0].reference == measured.purity()


@pytest.mark.xfail(strict=True, reason="Monte-Carlo spread at 4 pm bins is ~5e-5, not ~1e-3; "
                                       "the 1e-3 scale only appears as noise-induced bias")
def test_monte_carlo_spread_is_one_permille(measured):
    r = monte_carlo_purity(supersample_jsi(measured, 4.0), 0.04, trials=200)
    assert r.err == pytest.approx(1e-3, rel=0.5)
