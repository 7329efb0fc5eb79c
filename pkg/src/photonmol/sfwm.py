"""
Joint spectral amplitude of resonant SFWM, Schmidt purity and brightness.

The biphoton amplitude is the product of the signal and idler field
enhancements with the pump-pump overlap at the sum frequency::

    A(ωs, ωi) = FE(ωs) FE(ωi) ∫ α(ω) α(ωs + ωi - ω) FE(ω) FE(ωs + ωi - ω) dω

where ``FE = E_ins1 / E_in`` of the primary ring and ``α`` is the pump
spectral amplitude. Everything is computed in optical frequency; wavelength
grids are only the labelling of rows and columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.interpolate import CubicSpline

from .errors import DataError, DomainError, UsageError
from .molecule import (
    MoleculeParams,
    field_enhancement,
    primary_linewidth_thz,
    primary_resonance_frequency,
    resonance_grid,
)
from .spectral import (
    ComplexSpectrum,
    WavelengthGrid,
    pm_to_thz,
    thz_to_pm,
    wavelength_to_frequency,
)

SECH_FWHM_FACTOR = 2.0 * np.arccosh(np.sqrt(2.0))  # intensity FWHM of sech² in units of τ

DEFAULT_WINDOW_FWHM = 3.0
DEFAULT_POINTS = 128
DEFAULT_PUMP_POINTS = 513
DEFAULT_PUMP_SPAN_FWHM = 8.0


@dataclass(frozen=True)
class PumpPulse:
    """
    Transform-limited pump pulse.

    Parameters
    ----------
    center : float
        Centre wavelength [nm].
    fwhm : float
        Intensity FWHM [pm].
    shape : {"gaussian", "sech"}
    rep_rate : float
        Repetition rate [Hz]; metadata only.
    """

    center: float = 1550.0
    fwhm: float = 340.0
    shape: Literal["gaussian", "sech"] = "gaussian"
    rep_rate: float = 51e6

    def __post_init__(self) -> None:
        if not self.fwhm > 0:
            raise DomainError(f"pump fwhm must be positive, got {self.fwhm}")
        if not self.center > 0:
            raise DomainError(f"pump centre must be positive, got {self.center}")
        if self.shape not in ("gaussian", "sech"):
            raise DomainError(f"unknown pump shape {self.shape!r}")

    @property
    def center_thz(self) -> float:
        return float(wavelength_to_frequency(self.center))

    @property
    def fwhm_thz(self) -> float:
        return pm_to_thz(self.fwhm, self.center)

    def amplitude(self, frequency_thz: ArrayLike) -> NDArray[np.float64]:
        """Unnormalised flat-phase spectral amplitude (peak 1)."""
        x = np.asarray(frequency_thz, dtype=float) - self.center_thz
        if self.shape == "gaussian":
            return np.exp(-2.0 * np.log(2.0) * (x / self.fwhm_thz) ** 2)
        tau = self.fwhm_thz / SECH_FWHM_FACTOR
        return 1.0 / np.cosh(x / tau)


def pump_envelope(pulse: PumpPulse, grid: WavelengthGrid) -> ComplexSpectrum:
    """
    Pump spectral amplitude on ``grid`` with unit discrete L2 norm.

    Raises
    ------
    UsageError
        If the grid spans less than four pump FWHM.
    """
    if grid.span * 1e3 < 4 * pulse.fwhm:
        raise UsageError(
            f"grid span {grid.span * 1e3:.1f} pm is below 4x the pump fwhm ({pulse.fwhm} pm)"
        )
    amp = pulse.amplitude(grid.frequencies)
    return ComplexSpectrum(grid, amp / np.linalg.norm(amp))


@dataclass(frozen=True)
class JointSpectrum:
    """
    Joint spectral amplitude over signal (rows) x idler (columns).

    ``raw_strength`` is the L2 norm of the amplitude before normalisation,
    weighted by the frequency cell areas, so that it approximates the
    continuum integral and can be compared between devices on equal grids.
    """

    signal_grid: WavelengthGrid
    idler_grid: WavelengthGrid
    amplitude: NDArray[np.complex128] = field(repr=False)
    raw_strength: float = 1.0
    normalized: bool = True

    def __post_init__(self) -> None:
        amp = np.array(self.amplitude, dtype=complex, copy=True)
        if amp.shape != (self.signal_grid.points, self.idler_grid.points):
            raise UsageError(
                f"amplitude shape {amp.shape} does not match grids "
                f"({self.signal_grid.points}, {self.idler_grid.points})"
            )
        if self.normalized:
            norm = np.linalg.norm(amp)
            if norm == 0 or not np.isfinite(norm):
                raise DataError("cannot normalise a zero or non-finite amplitude")
            amp = amp / norm
        amp.setflags(write=False)
        object.__setattr__(self, "amplitude", amp)

    @property
    def intensity(self) -> NDArray[np.float64]:
        return np.abs(self.amplitude) ** 2

    @property
    def phase(self) -> NDArray[np.float64]:
        return np.angle(self.amplitude)


@dataclass(frozen=True)
class SchmidtResult:
    """Schmidt probabilities (descending), purity ``Σp²`` and Schmidt number ``1/P``."""

    schmidt_probs: NDArray[np.float64] = field(repr=False)
    purity: float
    schmidt_number: float


def _cell_widths_thz(grid: WavelengthGrid) -> NDArray[np.float64]:
    return np.abs(np.gradient(grid.frequencies))


def design_grids(
    p: MoleculeParams,
    pump_center_nm: float | None = None,
    window_fwhm: float = DEFAULT_WINDOW_FWHM,
    points: int = DEFAULT_POINTS,
) -> tuple[WavelengthGrid, WavelengthGrid]:
    """
    Signal and idler grids on the primary resonances either side of the pump.

    Each grid spans ``±window_fwhm`` loaded linewidths of the bare primary
    ring, centred one FSR above (signal) and below (idler) in frequency the primary
    resonance nearest ``pump_center_nm``. The grids depend only on ``L1``,
    ``kappa1`` and loss, so every device of a coupling sweep shares them.
    """
    if not window_fwhm > 0:
        raise DomainError(f"window_fwhm must be positive, got {window_fwhm}")
    center = p.waveguide.lambda0_nm if pump_center_nm is None else pump_center_nm
    nu_p = primary_resonance_frequency(p, center)
    fsr = p.fsr_thz
    lw = primary_linewidth_thz(p)
    if window_fwhm * lw >= fsr / 2:
        raise UsageError("window exceeds half a free spectral range")
    half_pm_s = thz_to_pm(window_fwhm * lw, center)
    signal = resonance_grid(p, nu_p + fsr, half_pm_s, points)  # blue of the pump
    idler = resonance_grid(p, nu_p - fsr, half_pm_s, points)
    return signal, idler


def _check_energy_alignment(pulse: PumpPulse, signal_grid: WavelengthGrid,
                            idler_grid: WavelengthGrid) -> None:
    nu_s = float(wavelength_to_frequency(signal_grid.center))
    nu_i = float(wavelength_to_frequency(idler_grid.center))
    mismatch = abs(nu_s + nu_i - 2 * pulse.center_thz)
    tol = max(pm_to_thz(signal_grid.step * 1e3, signal_grid.center),
              pm_to_thz(idler_grid.step * 1e3, idler_grid.center))
    if mismatch > tol:
        raise UsageError(
            f"grids violate energy conservation by {mismatch * 1e3:.3f} GHz "
            f"(tolerance one grid step, {tol * 1e3:.3f} GHz)"
        )


def pump_overlap(
    p: MoleculeParams,
    pulse: PumpPulse,
    pump_points: int = DEFAULT_PUMP_POINTS,
    span_fwhm: float = DEFAULT_PUMP_SPAN_FWHM,
):
    """
    Pump-pump overlap ``g(Σ) = ∫ f(ω) f(Σ - ω) dω`` with ``f = α · FE``.

    The pump is integrated by the trapezoid rule on a uniform frequency grid
    of ``span_fwhm`` pump widths, clipped to one primary FSR around the pump
    so only the pump resonance contributes. Because the grid is uniform the
    integral for every sum frequency on the doubled lattice is one discrete
    convolution. Returns ``(sum_offsets, g)`` with offsets in THz relative to
    twice the pump centre.
    """
    if pump_points < 3:
        raise DomainError("pump integration needs at least 3 points")
    nu_p = pulse.center_thz
    half = min(0.5 * span_fwhm * pulse.fwhm_thz, 0.5 * p.fsr_thz)
    offsets = np.linspace(-half, half, pump_points)
    h = offsets[1] - offsets[0]
    alpha = pulse.amplitude(nu_p + offsets)
    alpha = alpha / np.sqrt(np.sum(alpha**2) * h)  # unit spectral energy on the pump grid
    f = alpha * field_enhancement(p, nu_p + offsets)
    weights = np.ones(pump_points)
    weights[0] = weights[-1] = 0.5
    g = np.convolve(f * weights, f) * h
    sums = 2 * offsets[0] + h * np.arange(2 * pump_points - 1)
    return sums, g


def build_jsa(
    p: MoleculeParams,
    pulse: PumpPulse,
    signal_grid: WavelengthGrid,
    idler_grid: WavelengthGrid,
    pump_points: int = DEFAULT_PUMP_POINTS,
    span_fwhm: float = DEFAULT_PUMP_SPAN_FWHM,
) -> JointSpectrum:
    """
    Normalised joint spectral amplitude of the device under ``pulse``.

    Raises
    ------
    UsageError
        If ``ω_s + ω_i`` at the grid centres misses ``2 ω_p`` by more than one
        grid step.
    """
    _check_energy_alignment(pulse, signal_grid, idler_grid)
    sums, g = pump_overlap(p, pulse, pump_points, span_fwhm)
    re = CubicSpline(sums, g.real, extrapolate=False)
    im = CubicSpline(sums, g.imag, extrapolate=False)

    nu_s = signal_grid.frequencies
    nu_i = idler_grid.frequencies
    total = nu_s[:, None] + nu_i[None, :] - 2 * pulse.center_thz
    overlap = np.nan_to_num(re(total)) + 1j * np.nan_to_num(im(total))
    amp = field_enhancement(p, nu_s)[:, None] * field_enhancement(p, nu_i)[None, :] * overlap

    cells = _cell_widths_thz(signal_grid)[:, None] * _cell_widths_thz(idler_grid)[None, :]
    raw = float(np.sqrt(np.sum(np.abs(amp) ** 2 * cells)))
    if not np.isfinite(raw) or raw == 0:
        raise DataError("joint spectral amplitude vanished or is non-finite")
    return JointSpectrum(signal_grid, idler_grid, amp, raw_strength=raw)


def schmidt_purity(J: JointSpectrum | ArrayLike) -> SchmidtResult:
    """
    Schmidt decomposition of a joint amplitude by SVD.

    Accepts a :class:`JointSpectrum` or any 2-D amplitude array (normalised
    internally).

    Raises
    ------
    DataError
        On non-finite or all-zero input.
    """
    amp = J.amplitude if isinstance(J, JointSpectrum) else np.asarray(J)
    if amp.ndim != 2:
        raise DataError(f"amplitude must be 2-D, got shape {amp.shape}")
    if not np.all(np.isfinite(amp)):
        raise DataError("amplitude contains non-finite entries")
    s = np.linalg.svd(amp, compute_uv=False)
    weight = np.sum(s**2)
    if weight == 0:
        raise DataError("amplitude is identically zero")
    probs = s**2 / weight
    purity = float(np.sum(probs**2))
    probs.setflags(write=False)
    return SchmidtResult(probs, purity, 1.0 / purity)


def jsi_purity_gap(J: JointSpectrum) -> float:
    """``|P(JSA) - P(|JSA|)|``: the purity error from discarding the joint phase."""
    return abs(schmidt_purity(J).purity - schmidt_purity(np.abs(J.amplitude)).purity)


def relative_brightness(J: JointSpectrum, J_ref: JointSpectrum) -> float:
    """
    Pair-rate ratio ``raw_strength(J)² / raw_strength(J_ref)²``.

    Raises
    ------
    UsageError
        If the two spectra are not on identical grids.
    """
    if J.signal_grid != J_ref.signal_grid or J.idler_grid != J_ref.idler_grid:
        raise UsageError("brightness ratio needs identical signal and idler grids")
    return (J.raw_strength / J_ref.raw_strength) ** 2
