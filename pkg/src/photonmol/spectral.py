"""
Shared optical types: wavelength grids, the waveguide model and complex spectra.

Conventions
-----------
Wavelengths are in nm, lengths in µm, frequencies in THz (``nu = c / lambda``
with ``c`` in nm/ps). All spectra carry field amplitudes; power is ``|field|**2``.

The waveguide uses first-order (group-index) dispersion::

    n_eff(λ) = n_eff0 - (λ - λ0) * (n_g - n_eff0) / λ0

which makes the propagation constant exactly linear in optical frequency::

    k(ν) = 2π * (n_g * ν / c - (n_g - n_eff0) / λ0)

so ring resonances are equally spaced in frequency and energy conservation
between consecutive resonances is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DomainError

C_NM_PER_PS = 299792.458  # speed of light, nm/ps (so c / λ[nm] is in THz)


def wavelength_to_frequency(wavelength_nm: ArrayLike) -> NDArray[np.float64]:
    """Optical frequency in THz for a wavelength in nm."""
    return C_NM_PER_PS / np.asarray(wavelength_nm, dtype=float)


def frequency_to_wavelength(frequency_thz: ArrayLike) -> NDArray[np.float64]:
    """Wavelength in nm for an optical frequency in THz."""
    return C_NM_PER_PS / np.asarray(frequency_thz, dtype=float)


def pm_to_thz(width_pm: float, center_nm: float) -> float:
    """Convert a small wavelength interval (pm) at ``center_nm`` to THz."""
    return C_NM_PER_PS * width_pm * 1e-3 / center_nm**2


def thz_to_pm(width_thz: float, center_nm: float) -> float:
    """Convert a small frequency interval (THz) at ``center_nm`` to pm."""
    return width_thz * center_nm**2 / C_NM_PER_PS * 1e3


@dataclass(frozen=True)
class WavelengthGrid:
    """
    Uniform sampling of wavelengths.

    Parameters
    ----------
    start, stop : float
        First and last wavelength [nm], ``start < stop``.
    points : int
        Number of samples, at least 2.
    """

    start: float
    stop: float
    points: int

    def __post_init__(self) -> None:
        if not (np.isfinite(self.start) and np.isfinite(self.stop)):
            raise DomainError("grid bounds must be finite")
        if self.start <= 0:
            raise DomainError(f"grid start must be positive, got {self.start}")
        if not self.start < self.stop:
            raise DomainError(f"grid start {self.start} must be below stop {self.stop}")
        if int(self.points) != self.points or self.points < 2:
            raise DomainError(f"grid needs an integer count >= 2, got {self.points}")
        object.__setattr__(self, "points", int(self.points))

    @classmethod
    def centered(cls, center_nm: float, span_nm: float, points: int) -> "WavelengthGrid":
        """Grid of total width ``span_nm`` centred on ``center_nm``."""
        return cls(center_nm - span_nm / 2, center_nm + span_nm / 2, points)

    @property
    def wavelengths(self) -> NDArray[np.float64]:
        return np.linspace(self.start, self.stop, self.points)

    @property
    def frequencies(self) -> NDArray[np.float64]:
        """Sample frequencies in THz (descending, since λ ascends)."""
        return wavelength_to_frequency(self.wavelengths)

    @property
    def step(self) -> float:
        return (self.stop - self.start) / (self.points - 1)

    @property
    def center(self) -> float:
        return 0.5 * (self.start + self.stop)

    @property
    def span(self) -> float:
        return self.stop - self.start


@dataclass(frozen=True)
class WaveguideModel:
    """
    Single-mode waveguide with first-order dispersion and uniform loss.

    Defaults describe a 500 x 220 nm silicon strip guide at 1550 nm.

    Parameters
    ----------
    n_eff0 : float
        Effective index at ``lambda0_nm``.
    n_g : float
        Group index, ``n_g >= n_eff0 > 1``.
    alpha_dB_cm : float
        Propagation loss [dB/cm], non-negative.
    lambda0_nm : float
        Reference wavelength [nm].
    """

    n_eff0: float = 2.4
    n_g: float = 4.2
    alpha_dB_cm: float = 3.0
    lambda0_nm: float = 1550.0

    def __post_init__(self) -> None:
        if not self.n_eff0 > 1:
            raise DomainError(f"n_eff0 must exceed 1, got {self.n_eff0}")
        if not self.n_g >= self.n_eff0:
            raise DomainError(f"n_g ({self.n_g}) must be >= n_eff0 ({self.n_eff0})")
        if not self.alpha_dB_cm >= 0:
            raise DomainError(f"alpha_dB_cm must be >= 0, got {self.alpha_dB_cm}")
        if not self.lambda0_nm > 0:
            raise DomainError(f"lambda0_nm must be positive, got {self.lambda0_nm}")

    def n_eff(self, wavelength_nm: ArrayLike) -> NDArray[np.float64]:
        lam = np.asarray(wavelength_nm, dtype=float)
        return self.n_eff0 - (lam - self.lambda0_nm) * (self.n_g - self.n_eff0) / self.lambda0_nm

    def propagation_constant(self, wavelength_nm: ArrayLike) -> NDArray[np.float64]:
        return propagation_constant(self, wavelength_nm)

    def propagation_constant_at_frequency(self, frequency_thz: ArrayLike) -> NDArray[np.float64]:
        """k in rad/nm as an (exactly linear) function of frequency in THz."""
        nu = np.asarray(frequency_thz, dtype=float)
        return 2 * np.pi * (self.n_g * nu / C_NM_PER_PS - (self.n_g - self.n_eff0) / self.lambda0_nm)

    def loss_transmission(self, length_um: ArrayLike) -> NDArray[np.float64]:
        return loss_transmission(self, length_um)


def propagation_constant(w: WaveguideModel, wavelength_nm: ArrayLike) -> NDArray[np.float64]:
    """
    Propagation constant ``k = 2π n_eff(λ) / λ`` in rad/nm.

    Raises
    ------
    DomainError
        If any wavelength is not strictly positive.
    """
    lam = np.asarray(wavelength_nm, dtype=float)
    if np.any(~(lam > 0)):
        raise DomainError("wavelength must be positive")
    return 2 * np.pi * w.n_eff(lam) / lam


def loss_transmission(w: WaveguideModel, length_um: ArrayLike) -> NDArray[np.float64]:
    """
    Field transmission ``10**(-alpha * L_cm / 20)`` over a length in µm.

    Raises
    ------
    DomainError
        If any length is negative.
    """
    length = np.asarray(length_um, dtype=float)
    if np.any(~(length >= 0)):
        raise DomainError("length must be non-negative")
    return 10.0 ** (-w.alpha_dB_cm * length * 1e-4 / 20.0)


def _frozen_array(values: ArrayLike, dtype=complex) -> NDArray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ComplexSpectrum:
    """Complex field ratio sampled on a :class:`WavelengthGrid`."""

    grid: WavelengthGrid
    values: NDArray[np.complex128] = field(repr=False)

    def __post_init__(self) -> None:
        values = _frozen_array(self.values)
        if values.shape != (self.grid.points,):
            raise DomainError(
                f"spectrum has {values.shape} values for a {self.grid.points}-point grid"
            )
        object.__setattr__(self, "values", values)

    @property
    def power(self) -> NDArray[np.float64]:
        return np.abs(self.values) ** 2

    @property
    def wavelengths(self) -> NDArray[np.float64]:
        return self.grid.wavelengths
