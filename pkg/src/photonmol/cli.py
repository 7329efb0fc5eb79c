"""
Command-line front end.

Commands: ``spectrum``, ``jsa``, ``sweep``, ``coupler-scan``, ``analyze``.
Exit codes: 0 success, 2 usage or config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .analysis.brightness import car_curve, fit_brightness
from .analysis.heralding import intrinsic_heralding
from .analysis.jsi import jsi_noise_sigma, monte_carlo_purity, supersample_jsi
from .config import RunConfig, load_config
from .coupler import design_space_scan
from .design import select_design, sweep
from .errors import DataError, DomainError, FitError, PhotonmolError, SingularityError, UsageError
from .io import read_jsi, read_loss_budgets, read_power_series, write_csv, write_json
from .molecule import find_resonances, transmission_spectrum
from .sfwm import build_jsa, design_grids, jsi_purity_gap, relative_brightness, schmidt_purity

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3
MIN_SWEEP_SUCCESS = 0.9
SCHMIDT_REPORT = 10

log = logging.getLogger("photonmol")


class _Outputs:
    """Tracks declared output files so success implies all were written."""

    def __init__(self, out_dir: Path):
        self.dir = out_dir
        self.paths: list[Path] = []

    def __call__(self, name: str) -> Path:
        p = self.dir / name
        self.paths.append(p)
        return p

    def all_written(self) -> bool:
        return all(p.is_file() for p in self.paths)


def _device_dict(cfg: RunConfig) -> dict:
    d = asdict(cfg.device)
    d["pump"] = asdict(cfg.pump)
    return d


def cmd_spectrum(cfg: RunConfig, out: _Outputs, args) -> int:
    T = transmission_spectrum(cfg.device, cfg.spectrum_grid)
    write_csv(out("spectrum.csv"), ["wavelength_nm", "transmission"],
              zip(cfg.spectrum_grid.wavelengths, T))
    res = find_resonances((cfg.spectrum_grid, T))
    write_json(out("resonances.json"), {
        "device": _device_dict(cfg),
        "resonances": [{"center_nm": r.center, "fwhm_pm": r.fwhm, "extinction_dB": r.extinction}
                       for r in res],
    })
    return EXIT_OK


def cmd_jsa(cfg: RunConfig, out: _Outputs, args) -> int:
    sg, ig = design_grids(cfg.device, cfg.pump.center, cfg.window_fwhm, cfg.points)
    J = build_jsa(cfg.device, cfg.pump, sg, ig, pump_points=cfg.pump_points)
    ref = build_jsa(cfg.device.single_ring(), cfg.pump, sg, ig, pump_points=cfg.pump_points)
    s = schmidt_purity(J)
    rows = ([w, *row] for w, row in zip(sg.wavelengths, J.intensity))
    write_csv(out("jsi.csv"), ["signal_nm\\idler_nm", *(repr(float(v)) for v in ig.wavelengths)],
              rows)
    write_json(out("jsa.json"), {
        "device": _device_dict(cfg),
        "purity": s.purity,
        "schmidt_number": s.schmidt_number,
        "schmidt_probs": s.schmidt_probs[:SCHMIDT_REPORT],
        "jsi_purity_gap": jsi_purity_gap(J),
        "relative_brightness": relative_brightness(J, ref),
        "raw_strength": J.raw_strength,
        "norm": float(np.linalg.norm(J.amplitude)),
        "window_fwhm": cfg.window_fwhm,
        "points": cfg.points,
    })
    return EXIT_OK


SWEEP_HEADER = ["kappa2_sq", "kappa_mzi_sq", "purity", "relative_brightness",
                "pump_fwhm_pm", "signal_fwhm_pm", "error"]


def cmd_sweep(cfg: RunConfig, out: _Outputs, args) -> int:
    grid = sweep(cfg.sweep, threads=args.threads)
    write_csv(out("sweep.csv"), SWEEP_HEADER,
              ((c.kappa2_sq, c.kappa_mzi_sq, c.purity, c.relative_brightness,
                c.pump_fwhm_sim, c.signal_fwhm_sim, c.error or "") for c in grid))
    best = select_design(grid, cfg.min_purity)
    write_json(out("selection.json"), {
        "min_purity": cfg.min_purity,
        "selected": None if best is None else {
            "kappa2_sq": best.kappa2_sq, "kappa_mzi_sq": best.kappa_mzi_sq,
            "purity": best.purity, "relative_brightness": best.relative_brightness,
            "pump_fwhm_pm": best.pump_fwhm_sim, "signal_fwhm_pm": best.signal_fwhm_sim},
        "success_fraction": grid.success_fraction,
        "metadata": grid.metadata,
    })
    if grid.success_fraction < MIN_SWEEP_SUCCESS:
        log.error("only %.0f%% of sweep cells succeeded", 100 * grid.success_fraction)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_coupler_scan(cfg: RunConfig, out: _Outputs, args) -> int:
    sc = cfg.coupler_scan
    scan = design_space_scan(sc.L_s_range, sc.theta_range, sc.gap_nm, cfg.coupler_model,
                             r_um=sc.r_um, bent_fraction=sc.bent_fraction)
    write_csv(out("coupler_scan.csv"),
              ["L_s_um", "theta_rad", "transmittance", "gap_sensitivity", "dispersion"],
              scan.rows())
    write_json(out("tolerant_points.json"), {
        "gap_nm": scan.gap_nm,
        "model": asdict(cfg.coupler_model),
        "tolerant": [{"target": t.target, "L_s_um": t.L_s_um, "theta_rad": t.theta_rad,
                      **asdict(t.metrics)} for t in scan.tolerant],
    })
    return EXIT_OK


def cmd_analyze(cfg: RunConfig, out: _Outputs, args) -> int:
    a = cfg.analysis
    ps_path = args.power_series or a.power_series_csv
    jsi_path = args.jsi or a.jsi_csv
    if not ps_path and not jsi_path:
        raise UsageError("analyze needs a power series (--power-series) or a JSI (--jsi)")
    budget_s, budget_i = a.budget_signal, a.budget_idler
    if args.budgets:
        budget_s, budget_i = read_loss_budgets(args.budgets)
    report: dict = {"seed": args.seed}
    if ps_path:
        data = read_power_series(ps_path, a.coincidence_window_s, a.integration_time_s)
        fit = fit_brightness(data, a.weighting)
        car = car_curve(data)
        write_csv(out("car.csv"), ["P_mW", "CAR", "ACC_Hz", "tpa_flag"],
                  ((c.P_mW, c.car, c.acc_Hz, c.tpa_flag) for c in car))
        report["brightness_fit"] = fit.as_dict()
        report["intrinsic_heralding"] = intrinsic_heralding(fit, budget_s, budget_i).as_dict()
        report["budgets"] = {"signal": budget_s.as_list(), "idler": budget_i.as_list(),
                             "signal_total_dB": budget_s.total_dB,
                             "idler_total_dB": budget_i.total_dB}
        report["tpa_onset_mW"] = next((c.P_mW for c in car if c.tpa_flag), None)
    if jsi_path:
        j = read_jsi(jsi_path)
        sigma = a.noise_sigma if a.noise_sigma is not None else jsi_noise_sigma(j)
        ss = supersample_jsi(j, a.bin_pm)
        mc = monte_carlo_purity(ss, sigma, a.mc_trials, args.seed, threads=args.threads)
        report["jsi"] = {"native_purity": j.purity(), "bin_pm": a.bin_pm,
                         "supersampled_shape": list(ss.shape), "noise_sigma": sigma,
                         "purity": mc.purity, "purity_err": mc.err,
                         "nominal_purity": mc.nominal, "trials": mc.trials}
    write_json(out("analysis.json"), report)
    return EXIT_OK


COMMANDS = {
    "spectrum": (cmd_spectrum, "transmission spectrum and resonances"),
    "jsa": (cmd_jsa, "joint spectrum, Schmidt purity and brightness"),
    "sweep": (cmd_sweep, "coupling sweep and design selection"),
    "coupler-scan": (cmd_coupler_scan, "directional-coupler design space"),
    "analyze": (cmd_analyze, "fit and re-analyse measured data"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="photonmol", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", type=Path, help="JSON run configuration")
        p.add_argument("--out", type=Path, help="output directory (default: io.out_dir or .)")
        p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
        p.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "analyze":
            p.add_argument("--power-series", type=Path, help="power-series CSV")
            p.add_argument("--jsi", type=Path, help="JSI matrix CSV")
            p.add_argument("--budgets", type=Path, help="loss budget JSON {signal, idler}")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    func = COMMANDS[args.command][0]
    try:
        cfg = load_config(args.config)
        out = _Outputs(Path(args.out or cfg.out_dir or "."))
        out.dir.mkdir(parents=True, exist_ok=True)
        code = func(cfg, out, args)
    except (UsageError, DomainError, DataError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SingularityError, FitError, PhotonmolError, FloatingPointError,
            np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if code == EXIT_OK and not out.all_written():
        print("error: not all outputs were written", file=sys.stderr)
        return EXIT_NUMERIC
    return code


if __name__ == "__main__":
    sys.exit(main())
