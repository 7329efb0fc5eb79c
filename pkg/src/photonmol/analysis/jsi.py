"""
Measured joint spectral intensities: supersampling, pixel noise and
Monte-Carlo purity.

Purity of a measured JSI uses ``sqrt(JSI)`` as a stand-in for the unknown
amplitude. Monte-Carlo trials draw from independent generators spawned from
one ``SeedSequence``, so results do not depend on thread scheduling.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..errors import DataError, DomainError, UsageError
from ..molecule import MoleculeParams
from ..sfwm import PumpPulse, build_jsa, design_grids, schmidt_purity
from ..spectral import WavelengthGrid

SUPPORT_THRESHOLD = 0.01
MIN_TRIALS = 100
STEP_RTOL = 1e-6


def _axis_step_pm(axis: NDArray[np.float64]) -> float:
    if axis.size < 2:
        raise DataError("JSI axes need at least two samples")
    d = np.diff(axis) * 1e3
    if np.any(d <= 0) or not np.allclose(d, d[0], rtol=1e-6, atol=0):
        raise DataError("JSI axes must be uniform and increasing")
    return float(d[0])


@dataclass(frozen=True)
class MeasuredJsi:
    """
    Joint spectral intensity on uniform wavelength axes.

    Parameters
    ----------
    signal_nm : array_like
        Row axis in nm.
    idler_nm : array_like
        Column axis in nm.
    intensity : array_like
        Non-negative matrix of shape ``(len(signal_nm), len(idler_nm))``.
    """

    signal_nm: NDArray[np.float64]
    idler_nm: NDArray[np.float64]
    intensity: NDArray[np.float64]

    def __post_init__(self) -> None:
        s = np.array(self.signal_nm, dtype=float)
        i = np.array(self.idler_nm, dtype=float)
        m = np.array(self.intensity, dtype=float)
        if m.shape != (s.size, i.size):
            raise DataError(f"intensity shape {m.shape} does not match axes ({s.size}, {i.size})")
        if not np.all(np.isfinite(m)) or np.any(m < 0):
            raise DataError("JSI intensities must be finite and non-negative")
        _axis_step_pm(s)
        _axis_step_pm(i)
        for a in (s, i, m):
            a.setflags(write=False)
        object.__setattr__(self, "signal_nm", s)
        object.__setattr__(self, "idler_nm", i)
        object.__setattr__(self, "intensity", m)

    @property
    def signal_step_pm(self) -> float:
        return _axis_step_pm(self.signal_nm)

    @property
    def idler_step_pm(self) -> float:
        return _axis_step_pm(self.idler_nm)

    @property
    def shape(self) -> tuple[int, int]:
        return self.intensity.shape

    def purity(self) -> float:
        return schmidt_purity(np.sqrt(self.intensity)).purity


def _block_sizes(j: MeasuredJsi, bin_pm: float) -> tuple[int, int]:
    out = []
    for step in (j.signal_step_pm, j.idler_step_pm):
        if bin_pm < step * (1 - STEP_RTOL):
            raise UsageError(f"bin {bin_pm} pm is finer than the native step {step:.4g} pm")
        out.append(max(1, int(round(bin_pm / step))))
    return out[0], out[1]


def _block_mean(a: NDArray[np.float64], bs: int, bi: int) -> NDArray[np.float64]:
    ns, ni = a.shape[0] // bs, a.shape[1] // bi
    return a[: ns * bs, : ni * bi].reshape(ns, bs, ni, bi).mean(axis=(1, 3))


def supersample_jsi(j: MeasuredJsi, bin_pm: float) -> MeasuredJsi:
    """
    Block-average into ``bin_pm`` x ``bin_pm`` cells.

    Each axis is binned by ``round(bin_pm / step)`` native samples; partial
    edge cells are dropped and axis values become the cell centres.

    Raises
    ------
    UsageError
        If ``bin_pm`` is finer than either native step or leaves no full cell.
    """
    bs, bi = _block_sizes(j, bin_pm)
    if j.shape[0] < bs or j.shape[1] < bi:
        raise UsageError(f"bin {bin_pm} pm is larger than the JSI")
    s = _block_mean(j.signal_nm[:, None], bs, 1)[:, 0]
    i = _block_mean(j.idler_nm[None, :], 1, bi)[0]
    return MeasuredJsi(s, i, _block_mean(j.intensity, bs, bi))


def jsi_noise_sigma(j: MeasuredJsi, threshold: float = SUPPORT_THRESHOLD) -> float:
    """
    Relative per-pixel noise from second differences along the finer axis.

    ``d = (I[x-1] - 2 I[x] + I[x+1]) / mean(I[x-1:x+2])`` cancels the local
    spectral slope, so only curvature and noise remain; for independent
    multiplicative noise ``var(d) = 6 sigma^2``. Only triples with every
    pixel above ``threshold`` times the peak are used.
    """
    I = j.intensity
    if min(I.shape) < 3:
        raise DataError("noise estimation needs at least a 3x3 JSI")
    peak = float(I.max())
    if peak <= 0:
        raise DataError("JSI is identically zero")
    if j.idler_step_pm > j.signal_step_pm:
        I = I.T
    a, b, c = I[:, :-2], I[:, 1:-1], I[:, 2:]
    floor = threshold * peak
    mask = (a > floor) & (b > floor) & (c > floor)
    if mask.sum() < 2:
        raise DataError("too few above-threshold pixels to estimate noise")
    a, b, c = a[mask], b[mask], c[mask]
    d = (a - 2.0 * b + c) / ((a + b + c) / 3.0)
    return float(np.std(d, ddof=1) / np.sqrt(6.0))


@dataclass(frozen=True)
class MonteCarloPurity:
    purity: float
    err: float
    nominal: float
    trials: int
    seed: int | None


def _noisy_purity(I, sigma, rng) -> float:
    noisy = I * (1.0 + sigma * rng.standard_normal(I.shape))
    return schmidt_purity(np.sqrt(np.clip(noisy, 0.0, None))).purity


def monte_carlo_purity(
    j: MeasuredJsi,
    sigma: float,
    trials: int = 200,
    seed: int | None = 0,
    threads: int = 1,
) -> MonteCarloPurity:
    """
    Purity mean and spread under multiplicative gaussian pixel noise.

    Trial ``k`` draws from ``default_rng(SeedSequence(seed).spawn(trials)[k])``.

    Parameters
    ----------
    j : MeasuredJsi
    sigma : float
        Relative noise per pixel.
    trials : int
        At least 100.
    seed : int or None
    threads : int
        Worker threads; the result is independent of this value.
    """
    if trials < MIN_TRIALS:
        raise DomainError(f"trials must be at least {MIN_TRIALS}")
    if not sigma >= 0:
        raise DomainError("sigma must be non-negative")
    I = j.intensity
    nominal = j.purity()
    children = np.random.SeedSequence(seed).spawn(trials)

    def run(child):
        return _noisy_purity(I, sigma, np.random.default_rng(child))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            vals = np.array(list(pool.map(run, children)))
    else:
        vals = np.array([run(c) for c in children])
    return MonteCarloPurity(float(vals.mean()), float(vals.std(ddof=1)), nominal, trials, seed)


@dataclass(frozen=True)
class BinError:
    """Noise-induced purity error at one supersampling bin."""

    bin_pm: float
    reference: float
    mean: float
    std: float

    @property
    def bias(self) -> float:
        return self.reference - self.mean

    @property
    def rms(self) -> float:
        return float(np.hypot(self.bias, self.std))


def purity_error_curve(
    j: MeasuredJsi,
    bins_pm: ArrayLike,
    sigma: float,
    trials: int = 20,
    seed: int | None = 0,
) -> list[BinError]:
    """
    Purity error versus supersampling bin for noise added at native resolution.

    Every trial perturbs the native pixels once and reuses that realisation
    for every bin. The reference at each bin is the noiseless purity at the
    same bin, so the curve isolates the noise contribution. A bin of 0 means
    native resolution.
    """
    bins = [float(b) for b in bins_pm]

    def binned(m: MeasuredJsi, b: float) -> MeasuredJsi:
        return m if b == 0 else supersample_jsi(m, b)

    refs = [binned(j, b).purity() for b in bins]
    samples = np.empty((trials, len(bins)))
    for t, child in enumerate(np.random.SeedSequence(seed).spawn(trials)):
        rng = np.random.default_rng(child)
        noisy = np.clip(j.intensity * (1.0 + sigma * rng.standard_normal(j.shape)), 0.0, None)
        nj = MeasuredJsi(j.signal_nm, j.idler_nm, noisy)
        samples[t] = [binned(nj, b).purity() for b in bins]
    return [BinError(b, r, float(samples[:, k].mean()), float(samples[:, k].std(ddof=1)))
            for k, (b, r) in enumerate(zip(bins, refs))]


def _fine_grid(g: WavelengthGrid, step_pm: float) -> WavelengthGrid:
    n = int(round((g.stop - g.start) * 1e3 / step_pm)) + 1
    return WavelengthGrid(g.start, g.start + (n - 1) * step_pm * 1e-3, n)


def synthetic_measured_jsi(
    p: MoleculeParams | None = None,
    pulse: PumpPulse | None = None,
    window_fwhm: float = 3.0,
    signal_step_pm: float = 1.0,
    idler_step_pm: float = 0.16,
) -> MeasuredJsi:
    """Noiseless simulated JSI sampled like a scan-plus-OSA measurement."""
    p = p or MoleculeParams.design()
    pulse = pulse or PumpPulse(center=p.waveguide.lambda0_nm)
    sg, ig = design_grids(p, pulse.center, window_fwhm)
    S, I = _fine_grid(sg, signal_step_pm), _fine_grid(ig, idler_step_pm)
    J = build_jsa(p, pulse, S, I)
    return MeasuredJsi(S.wavelengths, I.wavelengths, np.abs(J.amplitude) ** 2)
