"""``discread`` command-line driver.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import config as cfgmod
from . import detection as det
from . import noise as nz
from . import readout as ro
from .errors import ConfigError
from .focal_field import (FocusSpec, Grid2D, beam_waist, focal_field, focal_slice_x, na_scan,
                          scan_to_csv, spot_size_86, spot_size_86_radial)
from .propagation import profiles_to_csv
from .system import PRESETS, ReadoutSystem

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _dump(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _echo(run, sys_cfg=None, w0=None) -> dict:
    doc = {"run": run.as_dict()}
    if sys_cfg is not None:
        doc["resolved"] = sys_cfg.as_dict()
    if w0 is not None:
        doc["w0"] = w0
    return doc


def cmd_focus(run, out: Path) -> dict:
    lam = cfgmod.parse_length(run.wavelength)
    spec = FocusSpec(lam, run.na, run.medium_index, run.model)
    grid = Grid2D.default(lam)
    ff = focal_field(spec, grid)
    (out / "focal_map.csv").write_text(ff.to_csv())
    (out / "focal_slice.csv").write_text(focal_slice_x(ff, run.photons).to_csv())
    summary = {"peaks": ff.peaks(), "d86_grid": spot_size_86(ff.intensity, grid),
               "d86": spot_size_86_radial(spec), "w0": beam_waist(spec),
               "config": _echo(run)}
    _dump(out / "focus.json", summary)
    return summary


def cmd_scan_spot(run, out: Path) -> dict:
    lam = cfgmod.parse_length(run.wavelength)
    rows = na_scan(FocusSpec(lam, 0.5 * run.medium_index, run.medium_index), cfgmod.na_values(run))
    (out / "spot_scan.csv").write_text(scan_to_csv(rows))
    doc = {"rows": [r.__dict__ for r in rows], "wavelength": lam, "config": _echo(run)}
    _dump(out / "spot_scan.json", doc)
    return doc


def _system(run):
    sc, w0 = cfgmod.system_config(run)
    return ReadoutSystem(sc), sc, w0


def cmd_read(run, out: Path) -> dict:
    system, sc, w0 = _system(run)
    pixels = None
    doc = {}
    if run.calibrate:
        pixels, hits, ratio = det.calibrate_pixel_boundaries(
            system.merged_pixel_numbers, 0.5 * system.propagation.lens_diameter)
        doc["calibration"] = {"boundaries": list(pixels.boundaries), "sign_matches": hits,
                              "ratio_010": ratio}
    S = system.signal_matrix(pixels=pixels)
    (out / "signal_matrix.csv").write_text(S.to_csv())
    (out / "far_fields.csv").write_text(profiles_to_csv(system.far_fields()))
    doc.update(json.loads(S.to_json()))
    doc["config"] = _echo(run, sc, system.w0)
    _dump(out / "signal_matrix.json", doc)
    return doc


def _params(run, preset: str | None = None) -> nz.NoiseParams:
    if preset is None:
        return nz.NoiseParams.from_excess_db(run.excess_db, squeeze_db=run.squeeze_db, n_inc=run.photons)
    p = dict(PRESETS[preset])
    if preset == "classical":
        p["B"] = 10.0 ** (run.excess_db / 10.0)
    if preset == "squeezed":
        p["squeeze_db"] = run.squeeze_db
    return nz.NoiseParams(n_inc=run.photons, **p)


def cmd_noise(run, out: Path) -> dict:
    system, sc, _ = _system(run)
    doc = {"config": _echo(run, sc, system.w0), "presets": {}}
    for name in PRESETS:
        params = _params(run, name)
        S, _, basis, budgets = system.noise_model(params, squeezed=name == "squeezed")
        (out / f"noise_{name}.csv").write_text(nz.budget_to_csv(budgets))
        sig = system.sigma_matrix(budgets, len(S.labels))
        outcomes = [ro.decide(S.values[a], sig[a], S.labels, run.kappa, lab) for a, lab in enumerate(S.labels)]
        doc["presets"][name] = {"params": params.__dict__, "squeezed_rank": len(basis),
                                "decisions": {o.true_sequence: {"decided": o.decided,
                                                                "candidates": list(o.candidates)}
                                              for o in outcomes}}
    _dump(out / "noise.json", doc)
    return doc


def cmd_discriminate(run, out: Path) -> dict:
    system, sc, _ = _system(run)
    doc = {"config": _echo(run, sc, system.w0), "seed": run.seed, "modes": {}}
    for mode in ("coherent", "squeezed"):
        params = _params(run)
        if mode == "coherent":
            params = replace(params, squeeze_db=0.0)
        S, _, basis, budgets = system.noise_model(params, squeezed=mode == "squeezed")
        sig = system.sigma_matrix(budgets, len(S.labels))
        model = system.pixel_sampling_model(S, params, basis) if run.correlated else None
        stats = ro.monte_carlo_error_rate(S.values, sig, S.labels, run.kappa, run.trials, run.seed, model)
        doc["modes"][mode] = [s.as_dict() for s in stats]
    _dump(out / "discriminate.json", doc)
    return doc


def cmd_rate(run, out: Path) -> dict:
    lam = cfgmod.parse_length(run.wavelength)
    rate = ro.data_rate_estimate(run.power, lam, run.photons, run.oversampling)
    doc = {"photon_flux": ro.photon_flux(run.power, lam), "bits_per_second": rate,
           "mbit_per_second": rate / 1e6, "config": _echo(run)}
    _dump(out / "rate.json", doc)
    return doc


COMMANDS = {"focus": cmd_focus, "scan-spot": cmd_scan_spot, "read": cmd_read,
            "noise": cmd_noise, "discriminate": cmd_discriminate, "rate": cmd_rate}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--seed", type=int)
    common.add_argument("--offset", help="lateral disc offset, e.g. w0/6 or 50nm")
    common.add_argument("--na", type=float)
    common.add_argument("--photons", type=float, help="N_inc")
    common.add_argument("--squeeze-db", type=float)
    common.add_argument("--excess-db", type=float, help="classical excess noise, B = 10^(dB/10)")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override any config key")
    p = argparse.ArgumentParser(prog="discread", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "scan-spot":
            sp.add_argument("--na-list", help="comma separated NA values")
        if name == "read":
            sp.add_argument("--calibrate", action="store_true", default=None,
                            help="fit pixel boundaries to the reference sign pattern")
        if name == "discriminate":
            sp.add_argument("--trials", type=int)
            sp.add_argument("--correlated", action="store_true", default=None)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {k: getattr(args, k, None) for k in
                 ("seed", "offset", "na", "photons", "squeeze_db", "excess_db", "na_list",
                  "calibrate", "trials", "correlated")}
    try:
        for item in args.set:
            if "=" not in item:
                raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
            k, v = item.split("=", 1)
            k = k.strip().replace("-", "_")
            if k not in cfgmod.RunConfig.__dataclass_fields__:
                raise ConfigError(f"unknown config key {k!r}")
            overrides.setdefault(k, None)
            if overrides[k] is None:
                overrides[k] = v
        run = cfgmod.load(args.config, overrides)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with np.errstate(invalid="raise", divide="raise", over="raise"):
            COMMANDS[args.command](run, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK
