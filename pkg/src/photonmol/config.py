"""
Run configuration: strict JSON with units in every key name.

Unknown keys are rejected with the offending key path in the message. Each
block maps onto a library type whose own invariants are enforced at load.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

import jsonschema
import numpy as np

from .analysis.heralding import REFERENCE_IDLER_BUDGET, REFERENCE_SIGNAL_BUDGET, LossBudget
from .coupler import CouplingCoefficientModel
from .design import SweepSpec
from .errors import PhotonmolError, UsageError
from .io import loss_budget_from_list, read_json
from .molecule import MoleculeParams
from .sfwm import DEFAULT_POINTS, DEFAULT_PUMP_POINTS, DEFAULT_WINDOW_FWHM, PumpPulse
from .spectral import WaveguideModel, WavelengthGrid


def _obj(props: dict, required=()) -> dict:
    return {"type": "object", "properties": props, "additionalProperties": False,
            "required": list(required)}


NUM = {"type": "number"}
INT = {"type": "integer", "minimum": 1}
STR = {"type": "string"}
LOSS_LIST = {"type": "array", "items": _obj(
    {"label": STR, "loss_dB": NUM, "err_dB": NUM}, required=("label", "loss_dB"))}

SCHEMA = _obj({
    "device": _obj({
        "mode_number": INT,
        "L1_um": NUM, "L2_um": NUM, "dL_amzi_um": NUM,
        "kappa1_sq": NUM, "kappa2_sq": NUM, "kappa_mzi_sq": NUM,
        "waveguide": _obj({"n_eff0": NUM, "n_g": NUM, "alpha_dB_cm": NUM, "lambda0_nm": NUM}),
    }),
    "pump": _obj({"center_nm": NUM, "fwhm_pm": NUM,
                  "shape": {"enum": ["gaussian", "sech"]}, "rep_rate_Hz": NUM}),
    "spectrum": _obj({"start_nm": NUM, "stop_nm": NUM, "points": INT}),
    "jsa": _obj({"window_fwhm": NUM, "points": INT, "pump_points": INT}),
    "sweep": _obj({
        "kappa2_sq_min": NUM, "kappa2_sq_max": NUM, "kappa2_sq_points": INT,
        "kappa_mzi_sq_min": NUM, "kappa_mzi_sq_max": NUM, "kappa_mzi_sq_points": INT,
        "min_purity": NUM,
    }),
    "coupler_model": _obj({
        "C0_rad_um": NUM, "g_ref_nm": NUM, "decay_length_nm": NUM,
        "wavelength_slope_per_nm": NUM, "lambda0_nm": NUM, "bent_mismatch_rad_um": NUM,
    }),
    "coupler_scan": _obj({
        "gap_nm": NUM, "r_um": NUM, "bent_fraction": NUM,
        "L_s_start_um": NUM, "L_s_stop_um": NUM, "L_s_points": {"type": "integer"},
        "theta_start_rad": NUM, "theta_stop_rad": NUM, "theta_points": {"type": "integer"},
    }),
    "analysis": _obj({
        "power_series_csv": STR, "jsi_csv": STR,
        "coincidence_window_s": NUM, "integration_time_s": NUM,
        "weighting": {"enum": ["poisson", "uniform"]},
        "budget_signal": LOSS_LIST, "budget_idler": LOSS_LIST,
        "bin_pm": NUM, "noise_sigma": NUM, "mc_trials": INT,
    }),
    "io": _obj({"out_dir": STR}),
})


@dataclass(frozen=True)
class CouplerScanConfig:
    gap_nm: float = 200.0
    r_um: float = 10.0
    bent_fraction: float = 0.5
    L_s_start_um: float = 0.0
    L_s_stop_um: float = 40.0
    L_s_points: int = 81
    theta_start_rad: float = 0.0
    theta_stop_rad: float = float(np.pi)
    theta_points: int = 61

    @property
    def L_s_range(self) -> np.ndarray:
        return np.linspace(self.L_s_start_um, self.L_s_stop_um, self.L_s_points)

    @property
    def theta_range(self) -> np.ndarray:
        return np.linspace(self.theta_start_rad, self.theta_stop_rad, self.theta_points)


@dataclass(frozen=True)
class AnalysisConfig:
    power_series_csv: str | None = None
    jsi_csv: str | None = None
    coincidence_window_s: float = 1e-9
    integration_time_s: float | None = None
    weighting: str = "poisson"
    budget_signal: LossBudget = REFERENCE_SIGNAL_BUDGET
    budget_idler: LossBudget = REFERENCE_IDLER_BUDGET
    bin_pm: float = 4.0
    noise_sigma: float | None = None
    mc_trials: int = 200


@dataclass(frozen=True)
class RunConfig:
    device: MoleculeParams = field(default_factory=MoleculeParams.design)
    pump: PumpPulse = field(default_factory=PumpPulse)
    spectrum_grid: WavelengthGrid = WavelengthGrid(1545.0, 1555.0, 20001)
    window_fwhm: float = DEFAULT_WINDOW_FWHM
    points: int = DEFAULT_POINTS
    pump_points: int = DEFAULT_PUMP_POINTS
    sweep: SweepSpec = field(default_factory=SweepSpec)
    min_purity: float = 0.99
    coupler_model: CouplingCoefficientModel = CouplingCoefficientModel()
    coupler_scan: CouplerScanConfig = CouplerScanConfig()
    analysis: AnalysisConfig = AnalysisConfig()
    out_dir: str | None = None


def _device(block: dict) -> MoleculeParams:
    wg = WaveguideModel(**block.get("waveguide", {}))
    design_keys = {k: block[k] for k in ("kappa1_sq", "kappa2_sq", "kappa_mzi_sq") if k in block}
    p = MoleculeParams.design(waveguide=wg, mode_number=block.get("mode_number", 682),
                              **design_keys)
    lengths = {k: block[k] for k in ("L1_um", "L2_um", "dL_amzi_um") if k in block}
    return replace(p, **lengths) if lengths else p


def _axis(block: dict, name: str, default: tuple[float, ...]) -> tuple[float, ...]:
    keys = [f"{name}_min", f"{name}_max", f"{name}_points"]
    if not any(k in block for k in keys):
        return default
    lo = block.get(keys[0], default[0])
    hi = block.get(keys[1], default[-1])
    n = block.get(keys[2], len(default))
    if not (0 < lo < 1 and 0 < hi < 1):
        raise UsageError(f"sweep {name} bounds must lie in (0, 1), got {lo} and {hi}")
    return tuple(float(v) for v in (np.geomspace(lo, hi, n) if n > 1 else [lo]))


def config_from_dict(data: dict, base_dir: str | Path | None = None) -> RunConfig:
    """
    Validate ``data`` and build a :class:`RunConfig`.

    Raises
    ------
    UsageError
        On unknown keys, wrong types or violated physical invariants.
    """
    try:
        jsonschema.validate(data, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise UsageError(f"config error at {where}: {exc.message}") from None
    try:
        return _build(data, Path(base_dir) if base_dir else None)
    except (PhotonmolError, TypeError) as exc:
        raise UsageError(f"config error: {exc}") from exc


def _build(data: dict, base: Path | None) -> RunConfig:
    device = _device(data.get("device", {}))
    pb = data.get("pump", {})
    pump = PumpPulse(center=pb.get("center_nm", device.waveguide.lambda0_nm),
                     fwhm=pb.get("fwhm_pm", 340.0), shape=pb.get("shape", "gaussian"),
                     rep_rate=pb.get("rep_rate_Hz", 51e6))
    sb = data.get("spectrum", {})
    d = RunConfig()
    grid = WavelengthGrid(sb.get("start_nm", d.spectrum_grid.start),
                          sb.get("stop_nm", d.spectrum_grid.stop),
                          sb.get("points", d.spectrum_grid.points))
    jb = data.get("jsa", {})
    window = jb.get("window_fwhm", d.window_fwhm)
    points = jb.get("points", d.points)
    pump_points = jb.get("pump_points", d.pump_points)
    swb = data.get("sweep", {})
    default_axis = SweepSpec().kappa2_sq_range
    sweep = SweepSpec(_axis(swb, "kappa2_sq", default_axis),
                      _axis(swb, "kappa_mzi_sq", default_axis),
                      device, pump, window, points, pump_points)
    model = CouplingCoefficientModel(**data.get("coupler_model", {}))
    scan = CouplerScanConfig(**data.get("coupler_scan", {}))
    if scan.L_s_points < 1 or scan.theta_points < 1:
        raise UsageError("coupler_scan ranges must be non-empty")
    ab = dict(data.get("analysis", {}))
    for key in ("power_series_csv", "jsi_csv"):
        if key in ab and base is not None and not Path(ab[key]).is_absolute():
            ab[key] = str(base / ab[key])
    if "budget_signal" in ab:
        ab["budget_signal"] = loss_budget_from_list(ab["budget_signal"])
    if "budget_idler" in ab:
        ab["budget_idler"] = loss_budget_from_list(ab["budget_idler"])
    analysis = AnalysisConfig(**ab)
    return RunConfig(device, pump, grid, window, points, pump_points, sweep,
                     swb.get("min_purity", 0.99), model, scan, analysis,
                     data.get("io", {}).get("out_dir"))


def load_config(path: str | Path | None) -> RunConfig:
    """Load a JSON config file; ``None`` gives the defaults."""
    if path is None:
        return config_from_dict({})
    path = Path(path)
    if not path.is_file():
        raise UsageError(f"config file not found: {path}")
    try:
        data = read_json(path)
    except PhotonmolError as exc:
        raise UsageError(str(exc)) from exc
    if not isinstance(data, dict):
        raise UsageError("config root must be a JSON object")
    return config_from_dict(data, base_dir=path.parent)
