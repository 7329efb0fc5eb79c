"""
Transfer-matrix model of the photonic molecule.

A bus waveguide couples (``kappa1``) to a primary ring of circumference ``L1``.
The primary ring couples (``kappa2``) to an auxiliary ring of circumference
``L2``. The auxiliary ring contains an asymmetric Mach-Zehnder interferometer
(two identical couplers ``kappa_mzi`` and a path difference ``dL_amzi``) whose
drop port acts as a wavelength-selective loss channel.

Couplers are point-like and lossless, ``[[r, iκ], [iκ, r]]``. All propagation
loss is lumped into the field factors ``r_1L``, ``r_2L`` and ``r_mziL``. The
coupler to the auxiliary ring sits half a round trip from the bus coupler, so
the primary ring phase is split as two factors ``exp(i k L1 / 2)``.

With ``D = 1 - r1 r2 r_1L exp(i k L1)`` and the auxiliary round trip
``T = (r_mzi² - κ_mzi² r_mziL exp(i k ΔL)) r_2L exp(i k L2)`` the fields
normalised to the input are::

    E_ins2 = -κ1 κ2 r_1L e^{ikL1/2} / (D (1 - r2 T) + κ2² r_1L r1 e^{ikL1} T)
    E_ins1 = (i κ2 r1 e^{ikL1/2} T E_ins2 + i κ1) / D
    E_out  = i κ1 r2 r_1L e^{ikL1} E_ins1 - κ1 κ2 e^{ikL1/2} T E_ins2 + r1
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.signal import find_peaks, peak_widths

from .errors import DomainError, SingularityError, UsageError
from .spectral import (
    C_NM_PER_PS,
    ComplexSpectrum,
    WaveguideModel,
    WavelengthGrid,
    frequency_to_wavelength,
    thz_to_pm,
    wavelength_to_frequency,
)

SINGULARITY_TOL = 1e-12

# Reconstructed device: primary circumference giving ~60 pm loaded linewidth
# at kappa1_sq = 0.23, rounded to an even mode number (682) at 1550 nm so the
# pump sits on an auxiliary resonance. Inter-ring and AMZI couplings are the
# brightest >= 0.99 purity cell of the default 25 x 25 design sweep.
DESIGN_MODE_NUMBER = 682
DESIGN_KAPPA1_SQ = 0.23
DESIGN_KAPPA2_SQ = 0.01 * 90.0 ** (11 / 24)
DESIGN_KAPPA_MZI_SQ = 0.01 * 90.0 ** (12 / 24)


def _check_power_coupling(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class MoleculeParams:
    """
    Geometry and couplings of the two-ring + AMZI device.

    Parameters
    ----------
    L1_um, L2_um : float
        Primary and auxiliary ring circumferences [µm].
    dL_amzi_um : float
        AMZI path difference [µm].
    kappa1_sq, kappa2_sq, kappa_mzi_sq : float
        Power cross-couplings of the bus-primary, primary-auxiliary and
        each AMZI coupler, in [0, 1].
    waveguide : WaveguideModel
        Dispersion and loss shared by every waveguide section.
    """

    L1_um: float
    L2_um: float
    dL_amzi_um: float
    kappa1_sq: float
    kappa2_sq: float
    kappa_mzi_sq: float
    waveguide: WaveguideModel = WaveguideModel()

    def __post_init__(self) -> None:
        for name in ("L1_um", "L2_um", "dL_amzi_um"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")
        _check_power_coupling("kappa1_sq", self.kappa1_sq)
        _check_power_coupling("kappa2_sq", self.kappa2_sq)
        _check_power_coupling("kappa_mzi_sq", self.kappa_mzi_sq)

    @classmethod
    def design(
        cls,
        kappa1_sq: float = DESIGN_KAPPA1_SQ,
        kappa2_sq: float = DESIGN_KAPPA2_SQ,
        kappa_mzi_sq: float = DESIGN_KAPPA_MZI_SQ,
        waveguide: WaveguideModel | None = None,
        mode_number: int = DESIGN_MODE_NUMBER,
    ) -> "MoleculeParams":
        """
        Device with lengths locked to a pump resonance at ``lambda0``.

        ``L1 = m λ0 / n_eff0`` with even ``m``; ``L2 = ΔL_AMZI = L1 / 2``. The
        auxiliary ring is then resonant only on even primary modes, and the
        AMZI is maximally lossy at the pump and maximally transmitting one
        primary FSR away.
        """
        waveguide = waveguide or WaveguideModel()
        if mode_number % 2:
            raise DomainError(f"mode_number must be even, got {mode_number}")
        L1 = mode_number * waveguide.lambda0_nm / waveguide.n_eff0 * 1e-3
        return cls(L1, L1 / 2, L1 / 2, kappa1_sq, kappa2_sq, kappa_mzi_sq, waveguide)

    def with_couplings(self, **kwargs: float) -> "MoleculeParams":
        return replace(self, **kwargs)

    @property
    def kappa1(self) -> float:
        return float(np.sqrt(self.kappa1_sq))

    @property
    def kappa2(self) -> float:
        return float(np.sqrt(self.kappa2_sq))

    @property
    def kappa_mzi(self) -> float:
        return float(np.sqrt(self.kappa_mzi_sq))

    @property
    def r1(self) -> float:
        return float(np.sqrt(1.0 - self.kappa1_sq))

    @property
    def r2(self) -> float:
        return float(np.sqrt(1.0 - self.kappa2_sq))

    @property
    def r_mzi(self) -> float:
        return float(np.sqrt(1.0 - self.kappa_mzi_sq))

    @property
    def r_1L(self) -> float:
        return float(self.waveguide.loss_transmission(self.L1_um))

    @property
    def r_2L(self) -> float:
        return float(self.waveguide.loss_transmission(self.L2_um))

    @property
    def r_mziL(self) -> float:
        return float(self.waveguide.loss_transmission(self.dL_amzi_um))

    @property
    def fsr_thz(self) -> float:
        """Free spectral range of the primary ring in frequency."""
        return C_NM_PER_PS / (self.waveguide.n_g * self.L1_um * 1e3)

    def single_ring(self) -> "MoleculeParams":
        """The same device with the auxiliary ring decoupled."""
        return replace(self, kappa2_sq=0.0)


@dataclass(frozen=True)
class FieldSolution:
    """Output and intra-cavity fields normalised to ``E_in = 1``."""

    E_out: ComplexSpectrum
    E_ins1: ComplexSpectrum
    E_ins2: ComplexSpectrum


@dataclass(frozen=True)
class ResonanceInfo:
    """A transmission dip: centre [nm], half-depth width [pm], extinction [dB]."""

    center: float
    fwhm: float
    extinction: float

    def __post_init__(self) -> None:
        if not self.fwhm > 0:
            raise DomainError(f"fwhm must be positive, got {self.fwhm}")


def aux_round_trip(p: MoleculeParams, k: ArrayLike) -> NDArray[np.complex128]:
    """
    Complex round-trip transmission of the auxiliary ring including the AMZI.

    Parameters
    ----------
    k : array_like
        Propagation constant [rad/nm].
    """
    k = np.asarray(k, dtype=float)
    amzi = p.r_mzi**2 - p.kappa_mzi_sq * p.r_mziL * np.exp(1j * k * p.dL_amzi_um * 1e3)
    return amzi * p.r_2L * np.exp(1j * k * p.L2_um * 1e3)


def fields_at_frequency(p: MoleculeParams, frequency_thz: ArrayLike):
    """
    Evaluate ``(E_out, E_ins1, E_ins2)`` at arbitrary frequencies [THz].

    This is the array-level kernel behind :func:`solve_fields`; it accepts
    any shape and returns three complex arrays of that shape.

    Raises
    ------
    SingularityError
        If the system denominator falls below 1e-12 in magnitude.
    """
    nu = np.asarray(frequency_thz, dtype=float)
    k = p.waveguide.propagation_constant_at_frequency(nu)
    L1 = p.L1_um * 1e3
    e_full = np.exp(1j * k * L1)
    e_half = np.exp(0.5j * k * L1)
    T = aux_round_trip(p, k)
    r1, r2, r1L = p.r1, p.r2, p.r_1L
    k1, k2 = p.kappa1, p.kappa2

    D = 1.0 - r1 * r2 * r1L * e_full
    denom = D * (1.0 - r2 * T) + p.kappa2_sq * r1L * r1 * e_full * T
    bad = (np.abs(D) < SINGULARITY_TOL) | (np.abs(denom) < SINGULARITY_TOL)
    if np.any(bad):
        lam = float(frequency_to_wavelength(nu[bad].flat[0]))
        raise SingularityError(f"field solution singular at {lam:.6f} nm", wavelength_nm=lam)

    E_ins2 = -k1 * k2 * r1L * e_half / denom
    E_ins1 = (1j * k2 * r1 * e_half * T * E_ins2 + 1j * k1) / D
    E_out = 1j * k1 * r2 * r1L * e_full * E_ins1 - k1 * k2 * e_half * T * E_ins2 + r1
    return E_out, E_ins1, E_ins2


def solve_fields(p: MoleculeParams, grid: WavelengthGrid) -> FieldSolution:
    """Transmitted and intra-cavity fields on a wavelength grid."""
    E_out, E_ins1, E_ins2 = fields_at_frequency(p, grid.frequencies)
    return FieldSolution(
        ComplexSpectrum(grid, E_out),
        ComplexSpectrum(grid, E_ins1),
        ComplexSpectrum(grid, E_ins2),
    )


def transmission_spectrum(p: MoleculeParams, grid: WavelengthGrid) -> NDArray[np.float64]:
    """Power transmission ``|E_out|²`` on ``grid``."""
    return solve_fields(p, grid).E_out.power


def field_enhancement(p: MoleculeParams, frequency_thz: ArrayLike) -> NDArray[np.complex128]:
    """Primary-ring field enhancement ``E_ins1 / E_in``."""
    return fields_at_frequency(p, frequency_thz)[1]


def primary_resonance_frequency(p: MoleculeParams, near_nm: float) -> float:
    """Frequency [THz] of the cold primary-ring resonance closest to ``near_nm``."""
    w = p.waveguide
    L1 = p.L1_um * 1e3
    nu_guess = float(wavelength_to_frequency(near_nm))
    m = np.round(w.propagation_constant_at_frequency(nu_guess) * L1 / (2 * np.pi))
    return float(C_NM_PER_PS / w.n_g * (m / L1 + (w.n_g - w.n_eff0) / w.lambda0_nm))


def primary_linewidth_thz(p: MoleculeParams) -> float:
    """
    Loaded linewidth (FWHM) of the bare primary ring in frequency.

    Uses the all-pass round-trip factor ``r1 * r_1L``; the auxiliary ring is
    transparent at the signal and idler resonances of the designed device.
    """
    rho = p.r1 * p.r_1L
    if rho <= 0:
        raise DomainError("primary ring fully over-coupled (r1 * r_1L == 0)")
    # half maximum of 1 / |1 - rho e^{iφ}|²: 1 - 2 rho cos φ + rho² = 2 (1 - rho)²
    cos_hw = (-1.0 + 4.0 * rho - rho**2) / (2.0 * rho)
    if cos_hw < -1.0:
        raise DomainError("primary ring too lossy for a resolvable linewidth")
    return float(2 * np.arccos(cos_hw) / (2 * np.pi) * p.fsr_thz)


def find_resonances(
    spectrum: ComplexSpectrum | tuple[WavelengthGrid, ArrayLike],
    min_depth: float = 0.02,
    rel_depth: float = 0.1,
) -> list[ResonanceInfo]:
    """
    Locate transmission dips and measure their half-depth widths.

    Parameters
    ----------
    spectrum : ComplexSpectrum or (WavelengthGrid, power array)
        A field spectrum (its power is used) or a grid with a power array.
        Each dip should span at least 7 samples.
    min_depth : float
        Minimum dip prominence, in power transmission units.
    rel_depth : float
        Dips shallower than this fraction of the deepest dip are ignored;
        this keeps the small central bump of a flattened pump resonance
        from being reported as a separate line.

    Returns
    -------
    list of ResonanceInfo
        Sorted by centre wavelength; empty if no dip is found. The centre is
        the midpoint of the half-depth interval. Dips centred within two
        widths of either grid edge are dropped, since their baseline is cut.
    """
    if isinstance(spectrum, ComplexSpectrum):
        grid, power = spectrum.grid, spectrum.power
    else:
        grid, power = spectrum
        power = np.asarray(power, dtype=float)
    peaks, props = find_peaks(-power, prominence=min_depth)
    if len(peaks) == 0:
        return []
    prom = props["prominences"]
    keep = prom >= rel_depth * prom.max()
    peaks = peaks[keep]
    prom_data = (prom[keep], props["left_bases"][keep], props["right_bases"][keep])
    widths, _, left, right = peak_widths(-power, peaks, rel_height=0.5, prominence_data=prom_data)

    lam0, step = grid.start, grid.step
    found: list[tuple[float, float, ResonanceInfo]] = []
    n = power.size
    for i, pk in enumerate(peaks):
        if min(0.5 * (left[i] + right[i]), n - 1 - 0.5 * (left[i] + right[i])) < 2 * widths[i]:
            continue
        baseline = power[pk] + prom_data[0][i]
        floor = max(power[pk], 1e-300)
        res = ResonanceInfo(
            center=float(lam0 + 0.5 * (left[i] + right[i]) * step),
            fwhm=float(widths[i] * step * 1e3),
            extinction=float(10 * np.log10(baseline / floor)),
        )
        found.append((float(left[i]), float(right[i]), res))
    # a flattened line yields two minima sharing one half-depth interval
    found.sort(key=lambda t: -t[2].extinction)
    kept: list[tuple[float, float, ResonanceInfo]] = []
    for lo, hi, res in found:
        if not any(lo >= klo - 1 and hi <= khi + 1 for klo, khi, _ in kept):
            kept.append((lo, hi, res))
    return sorted((r for _, _, r in kept), key=lambda r: r.center)


def escape_efficiency(p: MoleculeParams, resonance: ResonanceInfo | None = None) -> float:
    """
    Escape efficiency ``κ1² / (κ1² + A)`` of a signal/idler resonance.

    ``A = 1 - r_1L²`` is the round-trip power loss of the primary ring.
    If ``resonance`` is given it must not belong to the pump family (where
    the auxiliary ring adds loss).

    Raises
    ------
    DomainError
        If ``kappa1`` is zero.
    UsageError
        If ``resonance`` sits on an auxiliary-ring resonance.
    """
    if p.kappa1_sq == 0:
        raise DomainError("escape efficiency undefined for kappa1 = 0")
    if resonance is not None and p.kappa2_sq > 0:
        k = p.waveguide.propagation_constant_at_frequency(wavelength_to_frequency(resonance.center))
        phase = np.angle(np.exp(1j * k * p.L2_um * 1e3))
        if abs(phase) < np.pi / 2:
            raise UsageError(f"resonance at {resonance.center:.4f} nm belongs to the pump family")
    loss = 1.0 - p.r_1L**2
    return p.kappa1_sq / (p.kappa1_sq + loss)


def resonance_grid(p: MoleculeParams, center_thz: float, half_width_pm: float,
                   points: int) -> WavelengthGrid:
    """Wavelength grid of total width ``2 * half_width_pm`` around a frequency."""
    center_nm = float(frequency_to_wavelength(center_thz))
    return WavelengthGrid.centered(center_nm, 2 * half_width_pm * 1e-3, points)


def primary_linewidth_pm(p: MoleculeParams, near_nm: float | None = None) -> float:
    near_nm = p.waveguide.lambda0_nm if near_nm is None else near_nm
    return thz_to_pm(primary_linewidth_thz(p), near_nm)
