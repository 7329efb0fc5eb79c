from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from photonmol.analysis.heralding import (
    REFERENCE_IDLER_BUDGET,
    REFERENCE_SIGNAL_BUDGET,
    HeraldingEstimate,
    LossBudget,
    LossEntry,
    back_propagate,
    intrinsic_heralding,
)
from photonmol.errors import DomainError

MEASURED = HeraldingEstimate(0.072, 0.056, 0.002, 0.002)


def test_reference_budgets_close_on_reported_values():
    r = intrinsic_heralding(MEASURED, REFERENCE_SIGNAL_BUDGET, REFERENCE_IDLER_BUDGET)
    assert r.eta_s_src == pytest.approx(0.921, abs=0.03)
    assert r.eta_i_src == pytest.approx(0.940, abs=0.03)
    assert r.warnings == ()


def test_reference_budget_components():
    for b in (REFERENCE_SIGNAL_BUDGET, REFERENCE_IDLER_BUDGET):
        labels = [e.label for e in b.entries]
        assert b.entries[0].loss_dB == 3.75 and "grating" in labels[0]
        assert 5.5 < b.entries[1].loss_dB < 7.0
    assert REFERENCE_SIGNAL_BUDGET.entries[2].loss_dB == 0.42
    assert REFERENCE_IDLER_BUDGET.entries[2].loss_dB == 0.71
    assert {REFERENCE_SIGNAL_BUDGET.entries[3].loss_dB, REFERENCE_IDLER_BUDGET.entries[3].loss_dB} == {
        0.814, 1.060}


def test_budget_arithmetic():
    b = LossBudget((LossEntry("a", 3.0, 0.3), LossEntry("b", 7.0, 0.4)))
    assert b.total_dB == 10.0
    assert b.err_dB == pytest.approx(0.5)
    assert b.transmission == pytest.approx(0.1)
    assert b.scaled_errors(2.0).err_dB == pytest.approx(1.0)
    assert LossBudget([{"label": "x", "loss_dB": 1.0}]).entries[0] == LossEntry("x", 1.0)
    assert b.as_list()[1] == {"label": "b", "loss_dB": 7.0, "err_dB": 0.4}


@given(st.floats(1e-3, 1.0), st.floats(0.0, 0.05), st.floats(0.0, 15.0), st.floats(0.0, 0.5))
def test_back_propagation_matches_finite_difference(eta, err, loss, lerr):
    b = LossBudget((LossEntry("x", loss, lerr),))
    src, tot, berr = back_propagate(eta, err, b)
    assert src == pytest.approx(eta / b.transmission, rel=1e-12)
    # first-order propagation checked by central differences
    h = 1e-6
    d_loss = (eta * 10 ** ((loss + h) / 10) - eta * 10 ** ((loss - h) / 10)) / (2 * h)
    d_eta = 10 ** (loss / 10)
    assert berr == pytest.approx(abs(d_loss) * lerr, rel=1e-5, abs=1e-12)
    assert tot == pytest.approx(np.hypot(d_eta * err, d_loss * lerr), rel=1e-5, abs=1e-12)


def test_empty_budget_is_identity():
    assert back_propagate(0.3, 0.01, LossBudget()) == pytest.approx((0.3, 0.01, 0.0))


def test_overfull_budget_warns():
    big = LossBudget((LossEntry("too much", 20.0, 0.1),))
    r = intrinsic_heralding(MEASURED, big, REFERENCE_IDLER_BUDGET)
    assert len(r.warnings) == 1 and "signal" in r.warnings[0]
    assert r.as_dict()["warnings"] == list(r.warnings)


@pytest.mark.parametrize("eta,err", [(0.0, 0.01), (1.5, 0.01), (0.5, -0.1)])
def test_back_propagate_domain(eta, err):
    with pytest.raises(DomainError):
        back_propagate(eta, err, LossBudget())


@pytest.mark.parametrize("kw", [dict(loss_dB=float("nan")), dict(loss_dB=1.0, err_dB=-1.0)])
def test_loss_entry_domain(kw):
    with pytest.raises(DomainError):
        LossEntry("x", **kw)
