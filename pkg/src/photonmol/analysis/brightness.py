"""
Joint fit of singles and coincidence rates against on-chip pump power.

Model, with ``P`` in mW and rates in Hz::

    C_i  = gamma * eta_i * P**2 + beta_i * P + DC
    C_s  = gamma * eta_s * P**2 + beta_s * P + DC
    C_cc = gamma * eta_s * eta_i * P**2 + ACC,   ACC = C_i * C_s * dt

The three quadratic coefficients identify ``gamma`` and both efficiencies
through their ratios: ``eta_s = a_cc / a_i`` and ``eta_i = a_cc / a_s``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import least_squares

from ..errors import DataError, DomainError, FitError

PARAM_NAMES = ("gamma_eff", "eta_s", "eta_i", "beta_s", "beta_i", "dark")
MIN_POINTS = 5
MAX_CONDITION = 1e12
WEIGHTINGS = ("poisson", "uniform")


def _ro(a) -> NDArray[np.float64]:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PowerSeries:
    """
    Count rates versus on-chip power.

    Parameters
    ----------
    P_mW, Cs_Hz, Ci_Hz, Ccc_Hz : array_like
        Power and signal, idler and coincidence rates.
    coincidence_window_s : float
        Coincidence window ``dt`` used for accidentals.
    acc_Hz : array_like, optional
        Accidentals measured from delayed-window histograms. When absent,
        ``ACC = C_i * C_s * dt`` from the measured singles.
    integration_time_s : float, optional
        Counting time per point; enables shot-noise error bars.
    """

    P_mW: NDArray[np.float64]
    Cs_Hz: NDArray[np.float64]
    Ci_Hz: NDArray[np.float64]
    Ccc_Hz: NDArray[np.float64]
    coincidence_window_s: float
    acc_Hz: NDArray[np.float64] | None = None
    integration_time_s: float | None = None

    def __post_init__(self) -> None:
        for name in ("P_mW", "Cs_Hz", "Ci_Hz", "Ccc_Hz"):
            object.__setattr__(self, name, _ro(getattr(self, name)))
        if self.acc_Hz is not None:
            object.__setattr__(self, "acc_Hz", _ro(self.acc_Hz))
        n = self.P_mW.shape
        arrays = [self.Cs_Hz, self.Ci_Hz, self.Ccc_Hz]
        if self.acc_Hz is not None:
            arrays.append(self.acc_Hz)
        if len(n) != 1 or any(a.shape != n for a in arrays):
            raise DataError("power series columns must be 1-D and of equal length")
        if not np.all(np.isfinite(self.P_mW)) or any(not np.all(np.isfinite(a)) for a in arrays):
            raise DataError("power series contains non-finite values")
        if np.any(self.P_mW <= 0) or np.any(np.diff(self.P_mW) <= 0):
            raise DataError("P_mW must be positive and strictly increasing")
        if any(np.any(a < 0) for a in arrays):
            raise DataError("rates must be non-negative")
        if not self.coincidence_window_s > 0:
            raise DomainError("coincidence_window_s must be positive")
        if self.integration_time_s is not None and not self.integration_time_s > 0:
            raise DomainError("integration_time_s must be positive")

    def __len__(self) -> int:
        return self.P_mW.size

    @property
    def accidentals(self) -> NDArray[np.float64]:
        if self.acc_Hz is not None:
            return self.acc_Hz
        return self.Ci_Hz * self.Cs_Hz * self.coincidence_window_s

    def head(self, n: int) -> PowerSeries:
        """First ``n`` points."""
        acc = None if self.acc_Hz is None else self.acc_Hz[:n]
        return PowerSeries(self.P_mW[:n], self.Cs_Hz[:n], self.Ci_Hz[:n], self.Ccc_Hz[:n],
                           self.coincidence_window_s, acc, self.integration_time_s)


@dataclass(frozen=True)
class BrightnessFit:
    gamma_eff: float
    eta_s: float
    eta_i: float
    beta_s: float
    beta_i: float
    dark: float
    covariance: NDArray[np.float64]
    residual_norm: float
    reduced_chi2: float
    condition_number: float
    weighting: str = "poisson"

    @property
    def params(self) -> NDArray[np.float64]:
        return np.array([getattr(self, k) for k in PARAM_NAMES])

    @property
    def stderr(self) -> NDArray[np.float64]:
        return np.sqrt(np.clip(np.diag(self.covariance), 0.0, None))

    @property
    def eta_s_err(self) -> float:
        return float(self.stderr[1])

    @property
    def eta_i_err(self) -> float:
        return float(self.stderr[2])

    def as_dict(self) -> dict:
        out = {k: float(v) for k, v in zip(PARAM_NAMES, self.params)}
        out["stderr"] = {k: float(v) for k, v in zip(PARAM_NAMES, self.stderr)}
        out["covariance"] = self.covariance.tolist()
        out["residual_norm"] = self.residual_norm
        out["reduced_chi2"] = self.reduced_chi2
        out["condition_number"] = self.condition_number
        out["weighting"] = self.weighting
        return out


def model_rates(params: ArrayLike, P_mW: ArrayLike, acc_Hz: ArrayLike = 0.0):
    """Model ``(C_s, C_i, C_cc)`` for ``params`` ordered as ``PARAM_NAMES``."""
    g, es, ei, bs, bi, dc = np.asarray(params, dtype=float)
    P = np.asarray(P_mW, dtype=float)
    Cs = g * es * P**2 + bs * P + dc
    Ci = g * ei * P**2 + bi * P + dc
    Ccc = g * es * ei * P**2 + np.asarray(acc_Hz, dtype=float)
    return Cs, Ci, Ccc


def _sigmas(data: PowerSeries, weighting: str):
    if weighting == "uniform":
        return [np.ones(len(data))] * 3
    # shot noise: var(rate) = rate / T; T cancels after chi2 rescaling
    T = data.integration_time_s or 1.0
    out = []
    for c in (data.Cs_Hz, data.Ci_Hz, data.Ccc_Hz):
        floor = max(float(np.max(c)) * 1e-9, 1.0 / T)
        out.append(np.sqrt(np.maximum(c, floor) / T))
    return out


def _initial_guess(data: PowerSeries) -> NDArray[np.float64]:
    P = data.P_mW
    X = np.stack([P**2, P, np.ones_like(P)], axis=1)
    a_s, b_s, d_s = np.linalg.lstsq(X, data.Cs_Hz, rcond=None)[0]
    a_i, b_i, d_i = np.linalg.lstsq(X, data.Ci_Hz, rcond=None)[0]
    y = data.Ccc_Hz - data.accidentals
    a_cc = float(np.dot(P**2, y) / np.dot(P**2, P**2))
    if not (a_s > 0 and a_i > 0 and a_cc > 0):
        raise FitError("quadratic coefficients are not all positive; data do not "
                       "identify gamma and the efficiencies", condition_number=float("inf"))
    es = min(a_cc / a_i, 1.0)
    ei = min(a_cc / a_s, 1.0)
    g = a_i * a_s / a_cc
    return np.array([g, es, ei, b_s, b_i, 0.5 * (d_s + d_i)])


def fit_brightness(data: PowerSeries, weighting: str = "poisson") -> BrightnessFit:
    """
    Weighted joint least-squares fit of the three rate curves.

    Parameters
    ----------
    data : PowerSeries
        At least five points, all below the TPA knee.
    weighting : {"poisson", "uniform"}
        Residual weights. Poisson uses ``1/sqrt(rate)``.

    Returns
    -------
    BrightnessFit
        Covariance is ``(J^T J)^-1`` of the weighted residuals, scaled by the
        reduced chi-square.

    Raises
    ------
    FitError
        If the weighted Jacobian is ill-conditioned.
    """
    if weighting not in WEIGHTINGS:
        raise DomainError(f"weighting must be one of {WEIGHTINGS}")
    if len(data) < MIN_POINTS:
        raise DataError(f"need at least {MIN_POINTS} power points, got {len(data)}")
    x0 = _initial_guess(data)
    sig = _sigmas(data, weighting)
    obs = (data.Cs_Hz, data.Ci_Hz, data.Ccc_Hz)
    acc = data.accidentals

    def resid(x):
        m = model_rates(x, data.P_mW, acc)
        return np.concatenate([(mi - oi) / si for mi, oi, si in zip(m, obs, sig)])

    P2, P1, zero, one = data.P_mW**2, data.P_mW, np.zeros(len(data)), np.ones(len(data))

    def jac(x):
        # analytic, so the condition number is not polluted by differencing noise
        g, es, ei = x[:3]
        blocks = (
            [es * P2, g * P2, zero, P1, zero, one],
            [ei * P2, zero, g * P2, zero, P1, one],
            [es * ei * P2, g * ei * P2, g * es * P2, zero, zero, zero],
        )
        return np.concatenate([np.stack(b, axis=1) / s[:, None] for b, s in zip(blocks, sig)])

    scale = np.maximum(np.abs(x0), 1e-12)
    scale[3:] = np.maximum(scale[3:], 1e-6 * scale[0] * data.P_mW.max())
    lower = [0.0, 0.0, 0.0, -np.inf, -np.inf, -np.inf]
    upper = [np.inf, 1.0, 1.0, np.inf, np.inf, np.inf]
    res = least_squares(resid, np.clip(x0, lower, upper), jac=jac, bounds=(lower, upper),
                        x_scale=scale, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15,
                        max_nfev=2000)
    J = res.jac * scale  # column-scaled for a meaningful condition number
    s = np.linalg.svd(J, compute_uv=False)
    cond = float(s[0] / s[-1]) if s[-1] > 0 else float("inf")
    if not cond < MAX_CONDITION:
        raise FitError(f"fit Jacobian is ill-conditioned (cond = {cond:.3g})",
                       condition_number=cond)
    dof = resid(res.x).size - res.x.size
    chi2 = float(np.sum(res.fun**2))
    red = chi2 / dof if dof > 0 else float("nan")
    JtJ_inv = np.linalg.inv(J.T @ J)
    cov = (JtJ_inv * np.outer(scale, scale)) * (red if np.isfinite(red) else 0.0)
    g, es, ei, bs, bi, dc = (float(v) for v in res.x)
    if not g > 0 or not 0 < es <= 1 or not 0 < ei <= 1:
        raise FitError("fit converged outside the physical domain", condition_number=cond)
    return BrightnessFit(g, es, ei, bs, bi, dc, cov, float(np.sqrt(chi2)), red, cond, weighting)


@dataclass(frozen=True)
class CarPoint:
    P_mW: float
    car: float
    acc_Hz: float
    tpa_flag: bool = False


def car_curve(data: PowerSeries, n_sigma: float = 3.0) -> list[CarPoint]:
    """
    Coincidence-to-accidental ratio ``(C_cc - ACC) / ACC`` per power point.

    Points whose net coincidences fall more than ``n_sigma`` below a pure
    quadratic fitted to the low-power half are flagged as past the TPA knee.
    The noise scale is shot noise when ``integration_time_s`` is known and
    the low-half residual spread otherwise. ``ACC = 0`` gives ``inf``.
    """
    P = data.P_mW
    acc = data.accidentals
    net = data.Ccc_Hz - acc
    with np.errstate(divide="ignore", invalid="ignore"):
        car = np.where(acc > 0, net / np.where(acc > 0, acc, 1.0), np.inf)

    flags = np.zeros(P.size, dtype=bool)
    n_low = (P.size + 1) // 2
    if n_low >= 2:
        x, y = P[:n_low] ** 2, net[:n_low]
        a = float(np.dot(x, y) / np.dot(x, x))
        fit = a * P**2
        if data.integration_time_s is not None:
            T = data.integration_time_s
            sigma = np.sqrt(np.maximum(fit + acc, 0.0) / T)
        else:
            r = y - a * x
            sigma = np.full(P.size, np.sqrt(np.sum(r**2) / max(n_low - 1, 1)))
        sigma = np.maximum(sigma, 1e-9 * np.max(np.abs(fit)))
        flags = (fit - net) > n_sigma * sigma
    return [CarPoint(float(p), float(c), float(a), bool(f))
            for p, c, a, f in zip(P, car, acc, flags)]


def synthesize_power_series(
    P_mW: ArrayLike,
    gamma_eff: float = 4.4e6,
    eta_s: float = 0.072,
    eta_i: float = 0.056,
    beta_s: float = 0.0,
    beta_i: float = 0.0,
    dark: float = 0.0,
    coincidence_window_s: float = 1e-9,
    noise: float = 0.0,
    rng: np.random.Generator | None = None,
    tpa_per_mW: float = 0.0,
) -> PowerSeries:
    """
    Synthetic power series from the rate model.

    ``noise`` is a relative gaussian perturbation applied independently to
    every rate. ``tpa_per_mW`` applies a pair-generation roll-off
    ``1 / (1 + tpa_per_mW * P)**2`` to mimic two-photon absorption.
    """
    P = np.asarray(P_mW, dtype=float)
    roll = 1.0 / (1.0 + tpa_per_mW * P) ** 2
    g = gamma_eff * roll
    Cs = g * eta_s * P**2 + beta_s * P + dark
    Ci = g * eta_i * P**2 + beta_i * P + dark
    Ccc = g * eta_s * eta_i * P**2 + Ci * Cs * coincidence_window_s
    if noise > 0:
        rng = rng if rng is not None else np.random.default_rng(0)
        Cs, Ci, Ccc = (c * (1.0 + noise * rng.standard_normal(c.shape)) for c in (Cs, Ci, Ccc))
    return PowerSeries(P, np.maximum(Cs, 0), np.maximum(Ci, 0), np.maximum(Ccc, 0),
                       coincidence_window_s)
