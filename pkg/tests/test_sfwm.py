from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from _oracles import gram_purity, lorentzian_cw_jsa
from photonmol.errors import DataError, DomainError, UsageError
from photonmol.molecule import field_enhancement, primary_linewidth_pm
from photonmol.sfwm import (
    SECH_FWHM_FACTOR,
    JointSpectrum,
    PumpPulse,
    build_jsa,
    design_grids,
    jsi_purity_gap,
    pump_envelope,
    pump_overlap,
    relative_brightness,
    schmidt_purity,
)
from photonmol.spectral import WavelengthGrid, pm_to_thz

vectors = st.integers(2, 12).flatmap(
    lambda n: st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False), min_size=n, max_size=n))


@pytest.mark.parametrize("shape", ["gaussian", "sech"])
def test_pump_amplitude_half_maximum(shape):
    pulse = PumpPulse(fwhm=340.0, shape=shape)
    half = pulse.center_thz + 0.5 * pulse.fwhm_thz
    assert pulse.amplitude(pulse.center_thz) == pytest.approx(1.0)
    assert pulse.amplitude(half) ** 2 == pytest.approx(0.5, rel=1e-12)


def test_sech_fwhm_factor():
    assert 1 / np.cosh(SECH_FWHM_FACTOR / 2) ** 2 == pytest.approx(0.5)


@pytest.mark.parametrize("kw", [dict(fwhm=0.0), dict(center=-1.0), dict(shape="square")])
def test_pump_invariants(kw):
    with pytest.raises(DomainError):
        PumpPulse(**kw)


def test_pump_envelope_norm_and_span_check():
    pulse = PumpPulse()
    env = pump_envelope(pulse, WavelengthGrid.centered(1550.0, 2.0, 401))
    assert np.linalg.norm(env.values) == pytest.approx(1.0)
    with pytest.raises(UsageError):
        pump_envelope(pulse, WavelengthGrid.centered(1550.0, 1.0, 401))


@given(vectors, vectors)
def test_rank_one_amplitude_is_pure(u, v):
    u, v = np.array(u), np.array(v)
    if np.linalg.norm(u) < 1e-6 or np.linalg.norm(v) < 1e-6:
        return
    res = schmidt_purity(np.outer(u, v))
    assert res.purity == pytest.approx(1.0, abs=1e-9)
    assert res.schmidt_number == pytest.approx(1.0, abs=1e-9)


@given(st.floats(0.0, 1.0))
def test_rank_two_purity(w):
    # orthogonal modes with weights w and 1 - w
    a = np.diag([np.sqrt(w), np.sqrt(1 - w), 0.0])
    assert schmidt_purity(a).purity == pytest.approx(w**2 + (1 - w) ** 2, abs=1e-12)


@given(st.integers(0, 2**32 - 1))
def test_purity_matches_gram_oracle(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(32, 24)) + 1j * rng.normal(size=(32, 24))
    res = schmidt_purity(a)
    assert res.purity == pytest.approx(gram_purity(a), rel=1e-10)
    assert np.sum(res.schmidt_probs) == pytest.approx(1.0)
    assert np.all(np.diff(res.schmidt_probs) <= 1e-15)
    assert 1 / 24 - 1e-12 <= res.purity <= 1.0 + 1e-12


@given(st.integers(0, 2**32 - 1), st.floats(0.1, 10.0))
def test_purity_is_scale_and_phase_invariant(seed, scale):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    ph = np.exp(1j * rng.uniform(0, 2 * np.pi, 8))
    b = scale * ph[:, None] * a * ph[None, ::-1]
    assert schmidt_purity(b).purity == pytest.approx(schmidt_purity(a).purity, rel=1e-10)


@pytest.mark.parametrize("bad", [np.zeros((3, 3)), np.array([[1.0, np.nan]]), np.ones(4)])
def test_schmidt_rejects_bad_input(bad):
    with pytest.raises(DataError):
        schmidt_purity(bad)


def test_joint_spectrum_normalises_and_checks_shape():
    g = WavelengthGrid(1549.0, 1551.0, 4)
    j = JointSpectrum(g, g, 3 * np.ones((4, 4)))
    assert np.linalg.norm(j.amplitude) == pytest.approx(1.0)
    assert np.sum(j.intensity) == pytest.approx(1.0)
    with pytest.raises(UsageError):
        JointSpectrum(g, g, np.ones((4, 3)))
    with pytest.raises(DataError):
        JointSpectrum(g, g, np.zeros((4, 4)))


def test_design_jsa_is_normalised(design_jsas):
    J, _ = design_jsas
    assert np.sum(J.intensity) == pytest.approx(1.0, rel=1e-12)
    assert J.amplitude.shape == (128, 128)


def test_pump_overlap_matches_adaptive_quadrature(design):
    pulse = PumpPulse()
    sums, g = pump_overlap(design, pulse, pump_points=2049)
    nu_p = pulse.center_thz
    half = min(4.0 * pulse.fwhm_thz, 0.5 * design.fsr_thz)

    def f(w):
        return pulse.amplitude(nu_p + w) * field_enhancement(design, nu_p + w)

    norm = np.sqrt(quad(lambda w: pulse.amplitude(nu_p + w) ** 2, -half, half)[0])
    for s in (-0.02, 0.0, 0.015):
        lo, hi = max(-half, s - half), min(half, s + half)
        re = quad(lambda w: (f(w) * f(s - w)).real, lo, hi, limit=200)[0]
        im = quad(lambda w: (f(w) * f(s - w)).imag, lo, hi, limit=200)[0]
        got = np.interp(s, sums, g.real) + 1j * np.interp(s, sums, g.imag)
        assert got == pytest.approx((re + 1j * im) / norm**2, rel=2e-3)


def test_pump_overlap_needs_points(design):
    with pytest.raises(DomainError):
        pump_overlap(design, PumpPulse(), pump_points=2)


def test_single_ring_broadband_limit_matches_lorentzian_oracle(design):
    ring = design.single_ring()
    lw = primary_linewidth_pm(ring)
    sg, ig = design_grids(ring, 1550.0, window_fwhm=5.0, points=101)
    J = build_jsa(ring, PumpPulse(fwhm=20 * lw), sg, ig, pump_points=2049)
    oracle = lorentzian_cw_jsa(5.0, 101)
    oracle /= np.linalg.norm(oracle)
    overlap = np.vdot(np.abs(oracle), np.abs(J.amplitude))
    assert abs(overlap) ** 2 > 0.999
    assert schmidt_purity(J).purity == pytest.approx(gram_purity(oracle), abs=0.005)


def test_lorentzian_oracle_tends_to_eleven_twelfths():
    assert gram_purity(lorentzian_cw_jsa(60.0, 1201)) == pytest.approx(11 / 12, abs=2e-3)


def test_design_grids_are_energy_matched(design):
    sg, ig = design_grids(design, 1550.0)
    pulse = PumpPulse()
    total = float(np.mean(sg.frequencies[[0, -1]])) + float(np.mean(ig.frequencies[[0, -1]]))
    step = abs(sg.frequencies[1] - sg.frequencies[0])
    # uniform in wavelength, so only matched to a small fraction of a step
    assert abs(total - 2 * pulse.center_thz) < 0.05 * step
    assert sg.center < 1550.0 < ig.center


def test_window_beyond_half_fsr_rejected(design):
    with pytest.raises(UsageError):
        design_grids(design, 1550.0, window_fwhm=11.0)
    with pytest.raises(DomainError):
        design_grids(design, 1550.0, window_fwhm=0.0)


def test_misaligned_grids_rejected(design):
    sg, ig = design_grids(design, 1550.0)
    shifted = WavelengthGrid(ig.start + 0.05, ig.stop + 0.05, ig.points)
    with pytest.raises(UsageError):
        build_jsa(design, PumpPulse(), sg, shifted)


def test_design_values(design_jsas):
    J, ref = design_jsas
    assert schmidt_purity(J).purity == pytest.approx(0.99049, abs=1e-4)
    assert jsi_purity_gap(J) < 1e-3
    assert relative_brightness(J, ref) == pytest.approx(0.2484, abs=1e-3)
    assert relative_brightness(ref, ref) == 1.0


def test_gap_detects_quadratic_phase(design_jsas):
    J, _ = design_jsas
    n, m = J.amplitude.shape
    x = np.linspace(-1, 1, n)[:, None] + np.linspace(-1, 1, m)[None, :]
    chirped = JointSpectrum(J.signal_grid, J.idler_grid, J.amplitude * np.exp(8j * x**2))
    # the phase is non-separable, so |JSA| overstates the purity
    assert jsi_purity_gap(chirped) > 0.01
    assert schmidt_purity(chirped).purity == pytest.approx(gram_purity(chirped.amplitude), rel=1e-10)


def test_brightness_requires_same_grids(design):
    pulse = PumpPulse()
    a = build_jsa(design, pulse, *design_grids(design, 1550.0, points=32))
    b = build_jsa(design, pulse, *design_grids(design, 1550.0, points=33))
    with pytest.raises(UsageError):
        relative_brightness(a, b)


def test_frequency_cells_agree_with_pm_conversion(design):
    sg, _ = design_grids(design, 1550.0)
    assert abs(sg.frequencies[1] - sg.frequencies[0]) == pytest.approx(
        pm_to_thz(sg.step * 1e3, sg.center), rel=1e-3)
