"""
Deterministic CSV and JSON readers and writers.

CSV files use a header row, comma separators, '.' decimals and LF line
endings. Floats are written with ``repr`` (shortest round-trip form) so
identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .analysis.brightness import PowerSeries
from .analysis.heralding import LossBudget, LossEntry
from .analysis.jsi import MeasuredJsi
from .errors import DataError

POWER_COLUMNS = ("P_mW", "Cs_Hz", "Ci_Hz", "Ccc_Hz")
JSI_CORNER = "signal_nm\\idler_nm"


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        f = float(v)
        if math.isnan(f):
            return "nan"
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return repr(f)
    return "" if v is None else str(v)


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        # non-finite values become string markers to keep the JSON standard
        return f if math.isfinite(f) else _fmt(f)
    return obj


def write_json(path: str | Path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n"
    path.write_bytes(text.encode("utf-8"))
    return path


def read_json(path: str | Path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc})") from exc


def read_csv_columns(path: str | Path, required: Sequence[str],
                     optional: Sequence[str] = ()) -> dict[str, np.ndarray]:
    """Numeric columns by header name; a missing required column is named in the error."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"{path}: empty CSV")
    header = [h.strip() for h in rows[0]]
    for name in required:
        if name not in header:
            raise DataError(f"{path}: missing column {name!r}")
    out = {}
    for name in list(required) + [o for o in optional if o in header]:
        k = header.index(name)
        try:
            out[name] = np.array([float(r[k]) for r in rows[1:] if r], dtype=float)
        except (ValueError, IndexError) as exc:
            raise DataError(f"{path}: column {name!r} is not numeric") from exc
    return out


def read_power_series(path: str | Path, coincidence_window_s: float,
                      integration_time_s: float | None = None) -> PowerSeries:
    """Power series CSV with ``P_mW, Cs_Hz, Ci_Hz, Ccc_Hz`` and optional ``ACC_Hz``."""
    c = read_csv_columns(path, POWER_COLUMNS, optional=("ACC_Hz",))
    return PowerSeries(c["P_mW"], c["Cs_Hz"], c["Ci_Hz"], c["Ccc_Hz"], coincidence_window_s,
                       c.get("ACC_Hz"), integration_time_s)


def write_power_series(path: str | Path, d: PowerSeries) -> Path:
    cols = [d.P_mW, d.Cs_Hz, d.Ci_Hz, d.Ccc_Hz]
    header = list(POWER_COLUMNS)
    if d.acc_Hz is not None:
        cols.append(d.acc_Hz)
        header.append("ACC_Hz")
    return write_csv(path, header, zip(*cols))


def write_jsi(path: str | Path, j: MeasuredJsi) -> Path:
    """Matrix CSV: header row of idler wavelengths, first column of signal wavelengths."""
    rows = ([s, *row] for s, row in zip(j.signal_nm, j.intensity))
    return write_csv(path, [JSI_CORNER, *(_fmt(i) for i in j.idler_nm)], rows)


def read_jsi(path: str | Path) -> MeasuredJsi:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if len(rows) < 2 or len(rows[0]) < 2:
        raise DataError(f"{path}: JSI CSV needs a header row and at least one data row")
    try:
        idler = np.array([float(v) for v in rows[0][1:]])
        signal = np.array([float(r[0]) for r in rows[1:]])
        intensity = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
    except ValueError as exc:
        raise DataError(f"{path}: non-numeric JSI entry") from exc
    return MeasuredJsi(signal, idler, intensity)


def loss_budget_from_list(entries) -> LossBudget:
    try:
        return LossBudget(tuple(LossEntry(str(e["label"]), float(e["loss_dB"]),
                                          float(e.get("err_dB", 0.0))) for e in entries))
    except (KeyError, TypeError) as exc:
        raise DataError(f"loss budget entries need 'label' and 'loss_dB' ({exc})") from exc


def read_loss_budgets(path: str | Path) -> tuple[LossBudget, LossBudget]:
    """JSON object with ``signal`` and ``idler`` lists of loss entries."""
    data = read_json(path)
    for key in ("signal", "idler"):
        if key not in data:
            raise DataError(f"{path}: missing key {key!r}")
    return loss_budget_from_list(data["signal"]), loss_budget_from_list(data["idler"])
