"""
Transfer-matrix model of straight and bent directional couplers.

A coupler is a straight section of length ``L_s`` flanked by two bent
sections, each of arc length ``r*theta/2``. Coupling per unit length decays
exponentially with the gap and varies linearly with wavelength. In the bent
sections the coupling is scaled by ``bent_fraction`` and the two modes see a
phase mismatch, which is what lets a bent coupler trade peak coupling for
tolerance. With zero mismatch the cross-coupled power reduces to
``sin^2(C*L_s + f*C*r*theta)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from contourpy import contour_generator
from numpy.typing import ArrayLike, NDArray

from .errors import DomainError, UsageError

GAP_OFFSET_NM = 50.0
GAP_POINTS = 11
BAND_NM = (1530.0, 1565.0)
BAND_POINTS = 36
CONTOUR_STEP = 0.05


@dataclass(frozen=True)
class CouplingCoefficientModel:
    """
    Parametric coupling coefficient ``C(gap, lambda)``.

    Parameters
    ----------
    C0_rad_um : float
        Coupling per unit length at ``g_ref_nm`` and ``lambda0_nm``.
    g_ref_nm : float
        Reference gap.
    decay_length_nm : float
        Exponential decay constant of ``C`` with gap.
    wavelength_slope_per_nm : float
        Fractional change of ``C`` per nm of wavelength.
    lambda0_nm : float
        Reference wavelength.
    bent_mismatch_rad_um : float
        Propagation-constant mismatch in the bent sections at ``lambda0_nm``;
        scales as ``lambda0/lambda``. Zero recovers the pure sine model.

    Notes
    -----
    The defaults put a 300 nm gap straight coupler at 50/50 for
    ``L_s = 15 um``.
    """

    C0_rad_um: float = np.pi / 60.0
    g_ref_nm: float = 300.0
    decay_length_nm: float = 90.0
    wavelength_slope_per_nm: float = 0.007
    lambda0_nm: float = 1550.0
    bent_mismatch_rad_um: float = 0.1

    def __post_init__(self) -> None:
        if not self.C0_rad_um > 0:
            raise DomainError("C0_rad_um must be positive")
        if not self.decay_length_nm > 0:
            raise DomainError("decay_length_nm must be positive")
        if self.bent_mismatch_rad_um < 0:
            raise DomainError("bent_mismatch_rad_um must be non-negative")

    def coefficient(self, gap_nm: ArrayLike, wavelength_nm: ArrayLike) -> NDArray[np.float64]:
        gap = np.asarray(gap_nm, dtype=float)
        lam = np.asarray(wavelength_nm, dtype=float)
        return (self.C0_rad_um * np.exp(-(gap - self.g_ref_nm) / self.decay_length_nm)
                * (1.0 + self.wavelength_slope_per_nm * (lam - self.lambda0_nm)))

    def mismatch(self, wavelength_nm: ArrayLike) -> NDArray[np.float64]:
        return self.bent_mismatch_rad_um * self.lambda0_nm / np.asarray(wavelength_nm, dtype=float)


@dataclass(frozen=True)
class CouplerGeometry:
    """Gap [nm], straight length [um], bend radius [um], bend angle [rad]."""

    gap_nm: float
    L_s_um: float
    r_um: float = 10.0
    theta_rad: float = 0.0
    bent_fraction: float = 0.5

    def __post_init__(self) -> None:
        if not self.gap_nm > 0:
            raise DomainError("gap_nm must be positive")
        if self.L_s_um < 0:
            raise DomainError("L_s_um must be non-negative")
        if self.r_um < 0:
            raise DomainError("r_um must be non-negative")
        if self.theta_rad < 0:
            raise DomainError("theta_rad must be non-negative")
        if not 0.0 <= self.bent_fraction <= 1.0:
            raise DomainError("bent_fraction must lie in [0, 1]")

    @property
    def L_c_um(self) -> float:
        return self.r_um * self.theta_rad


@dataclass(frozen=True)
class CouplerMetrics:
    transmittance: float
    gap_sensitivity: float
    dispersion: float


def _section(c, delta, length):
    """Coupled-mode section ``[[a, b], [b, conj(a)]]`` (unitary)."""
    psi = np.sqrt(c * c + delta * delta)
    x = psi * length
    # sin(psi L)/psi without dividing by zero
    s_over_psi = length * np.sinc(x / np.pi)
    a = np.cos(x) + 1j * delta * s_over_psi
    b = 1j * c * s_over_psi
    return a, b


def _matrix(gap, L_s, r, theta, f, lam, m: CouplingCoefficientModel):
    C = m.coefficient(gap, lam)
    ab, bb = _section(f * C, m.mismatch(lam), 0.5 * np.asarray(r) * theta)
    as_, bs = _section(C, 0.0, np.asarray(L_s, dtype=float))
    # Mb @ Ms
    p11 = ab * as_ + bb * bs
    p12 = ab * bs + bb * np.conj(as_)
    p21 = bb * as_ + np.conj(ab) * bs
    p22 = bb * bs + np.conj(ab) * np.conj(as_)
    # (Mb @ Ms) @ Mb
    return (p11 * ab + p12 * bb, p11 * bb + p12 * np.conj(ab),
            p21 * ab + p22 * bb, p21 * bb + p22 * np.conj(ab))


def _kappa_sq(gap, L_s, r, theta, f, lam, m):
    _, _, t21, _ = _matrix(gap, L_s, r, theta, f, lam, m)
    return np.clip(np.abs(t21) ** 2, 0.0, 1.0)


def coupler_matrix(g: CouplerGeometry, m: CouplingCoefficientModel,
                   wavelength_nm: float) -> NDArray[np.complex128]:
    """Full 2x2 field transfer matrix of the coupler."""
    t = _matrix(g.gap_nm, g.L_s_um, g.r_um, g.theta_rad, g.bent_fraction, wavelength_nm, m)
    return np.array([[t[0], t[1]], [t[2], t[3]]], dtype=complex)


def coupler_transmittance(g: CouplerGeometry, m: CouplingCoefficientModel,
                          wavelength_nm: ArrayLike = 1550.0):
    """Cross-coupled power ``kappa^2``; broadcasts over ``wavelength_nm``."""
    k = _kappa_sq(g.gap_nm, g.L_s_um, g.r_um, g.theta_rad, g.bent_fraction, wavelength_nm, m)
    return float(k) if np.ndim(k) == 0 else k


def _metrics_arrays(gap, L_s, theta, r, f, m):
    """Metrics for broadcast arrays of ``L_s`` and ``theta``."""
    L_s = np.asarray(L_s, dtype=float)[..., None]
    theta = np.asarray(theta, dtype=float)[..., None]
    lam0 = m.lambda0_nm
    t0 = _kappa_sq(gap, L_s, r, theta, f, lam0, m)
    gaps = np.linspace(gap - GAP_OFFSET_NM, gap + GAP_OFFSET_NM, GAP_POINTS)
    lams = np.linspace(*BAND_NM, BAND_POINTS)
    gs = np.max(np.abs(_kappa_sq(gaps, L_s, r, theta, f, lam0, m) - t0), axis=-1)
    ds = np.max(np.abs(_kappa_sq(gap, L_s, r, theta, f, lams, m) - t0), axis=-1)
    return t0[..., 0], gs, ds


def coupler_metrics(g: CouplerGeometry, m: CouplingCoefficientModel) -> CouplerMetrics:
    """
    Transmittance at the reference wavelength plus its worst-case excursions.

    ``gap_sensitivity`` samples 11 gaps over ``gap +/- 50 nm``;
    ``dispersion`` samples 36 wavelengths over 1530-1565 nm.
    """
    t, gs, ds = _metrics_arrays(g.gap_nm, g.L_s_um, g.theta_rad, g.r_um, g.bent_fraction, m)
    return CouplerMetrics(float(t), float(gs), float(ds))


@dataclass(frozen=True)
class TolerantPoint:
    """Geometry on an iso-transmittance contour with the least gap sensitivity."""

    target: float
    L_s_um: float
    theta_rad: float
    metrics: CouplerMetrics


@dataclass(frozen=True)
class CouplerScan:
    """Row-major metric maps over ``(L_s_um, theta_rad)``."""

    gap_nm: float
    L_s_um: NDArray[np.float64]
    theta_rad: NDArray[np.float64]
    transmittance: NDArray[np.float64]
    gap_sensitivity: NDArray[np.float64]
    dispersion: NDArray[np.float64]
    contours: dict = field(default_factory=dict)
    tolerant: tuple[TolerantPoint, ...] = ()

    @property
    def shape(self) -> tuple[int, int]:
        return self.transmittance.shape

    def metrics_at(self, i: int, j: int) -> CouplerMetrics:
        return CouplerMetrics(float(self.transmittance[i, j]),
                              float(self.gap_sensitivity[i, j]),
                              float(self.dispersion[i, j]))

    def rows(self):
        """``(L_s_um, theta_rad, transmittance, gap_sensitivity, dispersion)`` tuples."""
        for i, L in enumerate(self.L_s_um):
            for j, th in enumerate(self.theta_rad):
                yield (float(L), float(th), float(self.transmittance[i, j]),
                       float(self.gap_sensitivity[i, j]), float(self.dispersion[i, j]))


def design_space_scan(
    L_s_range: ArrayLike,
    theta_range: ArrayLike,
    gap_nm: float,
    m: CouplingCoefficientModel,
    r_um: float = 10.0,
    bent_fraction: float = 0.5,
) -> CouplerScan:
    """
    Scan the coupler design space at a fixed gap.

    Iso-transmittance contours are traced at multiples of 0.05. Along each
    contour the metrics are re-evaluated at the contour vertices and the
    vertex with the smallest gap sensitivity is reported as the most
    fabrication-tolerant geometry for that target.
    """
    L_s = np.atleast_1d(np.asarray(L_s_range, dtype=float))
    th = np.atleast_1d(np.asarray(theta_range, dtype=float))
    if L_s.size == 0 or th.size == 0:
        raise UsageError("L_s_range and theta_range must be non-empty")
    CouplerGeometry(gap_nm, float(L_s.min()), r_um, float(th.min()), bent_fraction)
    LL, TT = np.meshgrid(L_s, th, indexing="ij")
    t, gs, ds = _metrics_arrays(gap_nm, LL, TT, r_um, bent_fraction, m)

    contours: dict[float, list[NDArray[np.float64]]] = {}
    tolerant: list[TolerantPoint] = []
    if L_s.size > 1 and th.size > 1:
        gen = contour_generator(x=th, y=L_s, z=t)
        for k in range(1, round(1 / CONTOUR_STEP)):
            level = round(k * CONTOUR_STEP, 2)
            lines = [np.asarray(seg) for seg in gen.lines(level) if len(seg)]
            if not lines:
                continue
            contours[level] = lines
            pts = np.concatenate(lines)
            vt, vg, vd = _metrics_arrays(gap_nm, pts[:, 1], pts[:, 0], r_um, bent_fraction, m)
            best = int(np.argmin(vg))
            tolerant.append(TolerantPoint(
                level, float(pts[best, 1]), float(pts[best, 0]),
                CouplerMetrics(float(vt[best]), float(vg[best]), float(vd[best]))))
    return CouplerScan(float(gap_nm), L_s, th, t, gs, ds, contours, tuple(tolerant))
