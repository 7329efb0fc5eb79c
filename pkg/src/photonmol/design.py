"""
Coupling sweeps over the photonic-molecule design space.

Each cell of a sweep is a device with a given primary-auxiliary coupling
``kappa2_sq`` and AMZI coupling ``kappa_mzi_sq``; all other parameters come
from a template. The pump bandwidth is held fixed across the sweep.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError, PhotonmolError
from .molecule import (
    MoleculeParams,
    find_resonances,
    primary_linewidth_thz,
    primary_resonance_frequency,
    transmission_spectrum,
)
from .sfwm import (
    DEFAULT_POINTS,
    DEFAULT_PUMP_POINTS,
    DEFAULT_WINDOW_FWHM,
    JointSpectrum,
    PumpPulse,
    build_jsa,
    design_grids,
    relative_brightness,
    schmidt_purity,
)
from .spectral import WavelengthGrid, frequency_to_wavelength, thz_to_pm

log = logging.getLogger(__name__)

LINEWIDTH_POINTS = 4001


def default_coupling_values(points: int = 25, low: float = 0.01, high: float = 0.9):
    """Log-spaced couplings; the default sweep axis."""
    return tuple(float(v) for v in np.geomspace(low, high, points))


def _check_axis(name, values):
    if len(values) == 0:
        raise DomainError(f"{name} must not be empty")
    arr = np.asarray(values, dtype=float)
    if np.any((arr <= 0) | (arr >= 1)):
        raise DomainError(f"{name} values must lie in (0, 1)")
    if np.any(np.diff(arr) <= 0):
        raise DomainError(f"{name} must be strictly increasing")


@dataclass(frozen=True)
class SweepSpec:
    """Axes, device template and pump for a design sweep."""

    kappa2_sq_range: tuple[float, ...] = field(default_factory=default_coupling_values)
    kappa_mzi_sq_range: tuple[float, ...] = field(default_factory=default_coupling_values)
    fixed: MoleculeParams = field(default_factory=MoleculeParams.design)
    pump: PumpPulse = field(default_factory=PumpPulse)
    window_fwhm: float = DEFAULT_WINDOW_FWHM
    points: int = DEFAULT_POINTS
    pump_points: int = DEFAULT_PUMP_POINTS

    def __post_init__(self) -> None:
        object.__setattr__(self, "kappa2_sq_range", tuple(float(v) for v in self.kappa2_sq_range))
        object.__setattr__(self, "kappa_mzi_sq_range",
                           tuple(float(v) for v in self.kappa_mzi_sq_range))
        _check_axis("kappa2_sq_range", self.kappa2_sq_range)
        _check_axis("kappa_mzi_sq_range", self.kappa_mzi_sq_range)


@dataclass(frozen=True)
class SweepCell:
    kappa2_sq: float
    kappa_mzi_sq: float
    purity: float
    relative_brightness: float
    pump_fwhm_sim: float
    signal_fwhm_sim: float
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class SweepGrid:
    """Row-major sweep result: rows follow ``kappa2_sq``, columns ``kappa_mzi_sq``."""

    kappa2_sq: tuple[float, ...]
    kappa_mzi_sq: tuple[float, ...]
    cells: tuple[tuple[SweepCell, ...], ...]
    metadata: dict = field(default_factory=dict)

    def __iter__(self):
        for row in self.cells:
            yield from row

    @property
    def purity(self) -> np.ndarray:
        return np.array([[c.purity for c in row] for row in self.cells])

    @property
    def brightness(self) -> np.ndarray:
        return np.array([[c.relative_brightness for c in row] for row in self.cells])

    @property
    def success_fraction(self) -> float:
        cells = list(self)
        return sum(c.ok for c in cells) / len(cells)


def _dip_width_near(p: MoleculeParams, center_thz: float) -> float:
    """Half-depth width [pm] of the transmission dip around ``center_thz``."""
    half = 0.5 * p.fsr_thz
    lo, hi = frequency_to_wavelength([center_thz + half, center_thz - half])
    grid = WavelengthGrid(float(lo), float(hi), LINEWIDTH_POINTS)
    found = find_resonances((grid, transmission_spectrum(p, grid)))
    if not found:
        return float("nan")
    target = float(frequency_to_wavelength(center_thz))
    return min(found, key=lambda r: abs(r.center - target)).fwhm


def simulated_linewidths(p: MoleculeParams, pump_center_nm: float) -> tuple[float, float]:
    """Simulated (pump, signal) transmission linewidths in pm."""
    nu_p = primary_resonance_frequency(p, pump_center_nm)
    return _dip_width_near(p, nu_p), _dip_width_near(p, nu_p + p.fsr_thz)


class _Evaluator:
    def __init__(self, spec: SweepSpec):
        self.spec = spec
        self.signal_grid, self.idler_grid = design_grids(
            spec.fixed, spec.pump.center, spec.window_fwhm, spec.points)
        self.reference = self.jsa(spec.fixed.single_ring())

    def jsa(self, p: MoleculeParams) -> JointSpectrum:
        return build_jsa(p, self.spec.pump, self.signal_grid, self.idler_grid,
                         pump_points=self.spec.pump_points)

    def cell(self, kappa2_sq: float, kappa_mzi_sq: float) -> SweepCell:
        try:
            p = replace(self.spec.fixed, kappa2_sq=kappa2_sq, kappa_mzi_sq=kappa_mzi_sq)
            J = self.jsa(p)
            pump_fw, sig_fw = simulated_linewidths(p, self.spec.pump.center)
            return SweepCell(kappa2_sq, kappa_mzi_sq, schmidt_purity(J).purity,
                             relative_brightness(J, self.reference), pump_fw, sig_fw)
        except (PhotonmolError, FloatingPointError, np.linalg.LinAlgError) as exc:
            log.warning("sweep cell (%g, %g) failed: %s", kappa2_sq, kappa_mzi_sq, exc)
            nan = float("nan")
            return SweepCell(kappa2_sq, kappa_mzi_sq, nan, nan, nan, nan, error=str(exc))


def sweep(spec: SweepSpec, threads: int = 1) -> SweepGrid:
    """
    Evaluate purity and brightness (relative to ``kappa2_sq = 0``) on the grid.

    Failing cells are recorded with ``error`` set and NaN metrics; the sweep
    always completes. Output order is row-major and independent of
    ``threads``.
    """
    ev = _Evaluator(spec)
    pairs = [(k2, km) for k2 in spec.kappa2_sq_range for km in spec.kappa_mzi_sq_range]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            flat = list(pool.map(lambda a: ev.cell(*a), pairs))
    else:
        flat = [ev.cell(*a) for a in pairs]
    ncol = len(spec.kappa_mzi_sq_range)
    rows = tuple(tuple(flat[i:i + ncol]) for i in range(0, len(flat), ncol))
    meta = {
        "pump_bandwidth_fixed": True,
        "pump_fwhm_pm": spec.pump.fwhm,
        "window_fwhm": spec.window_fwhm,
        "points": spec.points,
        "reference": "kappa2_sq = 0",
    }
    return SweepGrid(spec.kappa2_sq_range, spec.kappa_mzi_sq_range, rows, meta)


def select_design(grid: SweepGrid, min_purity: float) -> SweepCell | None:
    """
    Brightest cell with ``purity >= min_purity``.

    Ties in brightness go to the larger ``kappa2_sq``. Returns ``None`` when
    no cell qualifies.
    """
    best = None
    for c in grid:
        if not c.ok or not c.purity >= min_purity:
            continue
        key = (c.relative_brightness, c.kappa2_sq, c.kappa_mzi_sq)
        if best is None or key > best[0]:
            best = (key, c)
    return None if best is None else best[1]


def max_purity_over_pump(
    p: MoleculeParams,
    pump: PumpPulse | None = None,
    fwhm_bounds_pm: tuple[float, float] | None = None,
    window_fwhm: float = 10.0,
    points: int = 256,
    pump_points: int = 1025,
) -> tuple[float, float]:
    """
    Maximise Schmidt purity over the pump bandwidth.

    The default window (±10 linewidths) is wide enough for the truncated JSA
    to approximate the unfiltered state. Bounds default to 0.5 - 40 signal
    linewidths. Returns ``(best_fwhm_pm, purity)``.
    """
    pump = pump or PumpPulse(center=p.waveguide.lambda0_nm)
    sg, ig = design_grids(p, pump.center, window_fwhm, points)
    lw_pm = thz_to_pm(primary_linewidth_thz(p), pump.center)
    lo, hi = fwhm_bounds_pm or (0.5 * lw_pm, 40.0 * lw_pm)

    def neg(log_fwhm):
        pulse = replace(pump, fwhm=float(np.exp(log_fwhm)))
        return -schmidt_purity(build_jsa(p, pulse, sg, ig, pump_points=pump_points)).purity

    res = minimize_scalar(neg, bounds=(np.log(lo), np.log(hi)), method="bounded",
                          options={"xatol": 1e-3})
    return float(np.exp(res.x)), float(-res.fun)

