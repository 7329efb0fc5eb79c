"""
Second-order correlation estimators and photon-counting simulators.

The simulators sample detector click counts exactly but without looping
over pulses: pulses are first split into photon-number classes with a
multinomial draw, then each class is split over its click patterns with the
closed-form click probabilities. This keeps 1e13-pulse experiments cheap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.stats import poisson

from ..errors import DataError, DomainError

PMF_TAIL = 1e-15


@dataclass(frozen=True)
class SplitCounts:
    """Click counts behind a 50:50 splitter: arm A, arm B and both."""

    n_a: int
    n_b: int
    n_ab: int
    pulses: int

    def rates(self, rep_rate_Hz: float) -> dict[str, float]:
        f = rep_rate_Hz / self.pulses
        return {"C_A": self.n_a * f, "C_B": self.n_b * f, "C_AB": self.n_ab * f}


@dataclass(frozen=True)
class HeraldedCounts:
    """Herald clicks and herald-conditioned clicks of the split partner."""

    n_h: int
    n_ha: int
    n_hb: int
    n_hab: int
    pulses: int = 0


def g2_unheralded(C_A: float, C_B: float, C_AB: float, rep_rate_Hz: float) -> float:
    """
    Pulsed unheralded ``g2 = p_AB / (p_A * p_B)`` from rates in Hz.

    Raises
    ------
    DataError
        If either singles rate is zero.
    """
    if not rep_rate_Hz > 0:
        raise DomainError("rep_rate_Hz must be positive")
    if C_A <= 0 or C_B <= 0:
        raise DataError("g2 is undefined for zero singles rates")
    return (C_AB / rep_rate_Hz) / ((C_A / rep_rate_Hz) * (C_B / rep_rate_Hz))


def g2_heralded(n_h: int, n_ha: int, n_hb: int, n_hab: int) -> float:
    """
    Heralded ``g2_h = N_hab * N_h / (N_ha * N_hb)``.

    Raises
    ------
    DataError
        If ``n_h`` or either conditioned count is zero.
    """
    if n_h <= 0:
        raise DataError("g2_h needs at least one herald")
    if n_ha <= 0 or n_hb <= 0:
        raise DataError("g2_h is undefined with a zero herald-conditioned count")
    return n_hab * n_h / (n_ha * n_hb)


def g2_sigma(n_pair: int, *singles_and_norm: int) -> float:
    """Poisson relative error ``sqrt(sum 1/N)`` of a count ratio, made absolute by the caller."""
    counts = (n_pair,) + singles_and_norm
    if any(c <= 0 for c in counts):
        return float("inf")
    return float(np.sqrt(sum(1.0 / c for c in counts)))


def split_counts_g2(c: SplitCounts) -> tuple[float, float]:
    """
    ``(g2, sigma)`` from raw split counts; sigma from counting statistics.

    Zero coincidences give the one-count sigma rather than ``0 * inf``.
    """
    g = g2_unheralded(c.n_a, c.n_b, c.n_ab, c.pulses)
    n = max(c.n_ab, 1)
    return g, g2_unheralded(c.n_a, c.n_b, n, c.pulses) * g2_sigma(n, c.n_a, c.n_b)


def heralded_counts_g2(c: HeraldedCounts) -> tuple[float, float]:
    """``(g2_h, sigma)``; zero triple coincidences give the one-count sigma."""
    g = g2_heralded(c.n_h, c.n_ha, c.n_hb, c.n_hab)
    n = max(c.n_hab, 1)
    return g, g2_heralded(c.n_h, c.n_ha, c.n_hb, n) * g2_sigma(n, c.n_ha, c.n_hb)


def photon_number_pmf(mean: float, schmidt_probs: ArrayLike | None = None) -> NDArray[np.float64]:
    """
    Photon (or pair) number distribution per pulse.

    With ``schmidt_probs`` the state is a product of thermal modes with means
    ``mean * p_k``; otherwise it is Poissonian. The support is truncated once
    the tail drops below ``1e-15``.
    """
    if not mean >= 0:
        raise DomainError("mean photon number must be non-negative")
    if schmidt_probs is None:
        nmax = int(poisson.isf(PMF_TAIL, mean)) + 1 if mean > 0 else 0
        return poisson.pmf(np.arange(nmax + 1), mean)
    p = np.asarray(schmidt_probs, dtype=float)
    if p.ndim != 1 or p.size == 0 or np.any(p < 0) or not np.isclose(p.sum(), 1.0):
        raise DomainError("schmidt_probs must be a non-negative vector summing to 1")
    pmf = np.array([1.0])
    for m in mean * p[p > 0]:
        q = m / (1.0 + m)
        # tail P(N > n) = q^(n + 1)
        nmax = max(0, int(np.ceil(np.log(PMF_TAIL) / np.log(q)))) if q > 0 else 0
        # thermal: P(n) = (1 - q) q^n
        mode = (1.0 - q) * q ** np.arange(nmax + 1)
        pmf = np.convolve(pmf, mode)
    keep = np.nonzero(np.cumsum(pmf[::-1])[::-1] > PMF_TAIL)[0]
    return pmf[: keep[-1] + 1] if keep.size else pmf[:1]


def thermal_g2(schmidt_probs: ArrayLike) -> float:
    """Photon-number ``g2 = 1 + sum p_k^2`` of multimode thermal light."""
    p = np.asarray(schmidt_probs, dtype=float)
    return float(1.0 + np.sum(p**2) / np.sum(p) ** 2)


def split_click_probabilities(pmf: ArrayLike, efficiency: float = 1.0) -> NDArray[np.float64]:
    """
    Per-pulse probabilities ``[none, A only, B only, both]`` behind a 50:50 splitter.
    """
    pmf = np.asarray(pmf, dtype=float)
    n = np.arange(pmf.size)
    none = (1.0 - efficiency) ** n
    no_a = (1.0 - 0.5 * efficiency) ** n
    classes = np.stack([none, no_a - none, no_a - none, 1.0 - 2.0 * no_a + none], axis=1)
    return np.clip(classes, 0.0, None)


def expected_split_g2(pmf: ArrayLike, efficiency: float = 1.0) -> float:
    """Exact click-detector ``g2`` expected from a photon-number distribution."""
    pmf = np.asarray(pmf, dtype=float)
    c = pmf @ split_click_probabilities(pmf, efficiency)
    pa = c[1] + c[3]
    return float(c[3] / (pa * pa))


def _class_sample(rng, pulses, pmf, pattern_probs):
    """Counts of each click pattern, sampled class by class."""
    pmf = np.asarray(pmf, dtype=float)
    per_class = rng.multinomial(pulses, pmf / pmf.sum())
    totals = np.zeros(pattern_probs.shape[1], dtype=np.int64)
    for k in np.nonzero(per_class)[0]:
        row = pattern_probs[k] / pattern_probs[k].sum()
        totals += rng.multinomial(per_class[k], row)
    return totals


def simulate_thermal_split(
    schmidt_probs: ArrayLike,
    mean_photons: float,
    pulses: int,
    rng: np.random.Generator,
    efficiency: float = 1.0,
) -> SplitCounts:
    """
    Click counts from multimode thermal light on a 50:50 splitter.

    Each Schmidt mode ``k`` is thermal with mean ``mean_photons * p_k``.
    Detection is by threshold detectors with total efficiency ``efficiency``.
    """
    if pulses <= 0:
        raise DomainError("pulses must be positive")
    pmf = photon_number_pmf(mean_photons, schmidt_probs)
    t = _class_sample(rng, pulses, pmf, split_click_probabilities(pmf, efficiency))
    return SplitCounts(int(t[1] + t[3]), int(t[2] + t[3]), int(t[3]), int(pulses))


def heralded_click_probabilities(pmf: ArrayLike, eta_herald: float,
                                 eta_signal: float) -> NDArray[np.float64]:
    """
    Per-class probabilities of ``[no herald, h, h&a, h&b, h&a&b]`` patterns.

    ``h&a`` means herald and arm A but not arm B, and so on; the first entry
    collects everything without a herald.
    """
    sig = split_click_probabilities(pmf, eta_signal)
    n = np.arange(np.asarray(pmf).size)
    herald = 1.0 - (1.0 - eta_herald) ** n
    h = herald[:, None] * sig
    return np.stack([1.0 - herald, h[:, 0], h[:, 1], h[:, 2], h[:, 3]], axis=1)


def simulate_heralded_pairs(
    mean_pairs: float,
    pulses: int,
    rng: np.random.Generator,
    eta_herald: float = 0.056,
    eta_signal: float = 0.072,
    schmidt_probs: ArrayLike | None = None,
) -> HeraldedCounts:
    """
    Heralded split counts from a pair source.

    The pair number is Poissonian unless ``schmidt_probs`` is given, in which
    case it follows multimode thermal statistics. Idlers herald with
    efficiency ``eta_herald``; signals reach the splitter with ``eta_signal``.
    For Poissonian pairs and lossy detection ``g2_h`` tends to ``2 * mean_pairs``.
    """
    if pulses <= 0:
        raise DomainError("pulses must be positive")
    pmf = photon_number_pmf(mean_pairs, schmidt_probs)
    t = _class_sample(rng, pulses, pmf, heralded_click_probabilities(pmf, eta_herald, eta_signal))
    n_h = int(t[1:].sum())
    return HeraldedCounts(n_h, int(t[2] + t[4]), int(t[3] + t[4]), int(t[4]), int(pulses))


def expected_heralded_g2(pmf: ArrayLike, eta_herald: float, eta_signal: float) -> float:
    """Exact ``g2_h`` of the heralded click model."""
    pmf = np.asarray(pmf, dtype=float)
    c = pmf @ heralded_click_probabilities(pmf, eta_herald, eta_signal)
    h, ha = c[1:].sum(), c[2] + c[4]
    return float(c[4] * h / (ha * ha))
