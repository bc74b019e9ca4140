"""Command-line entry point: solves, evolutions, verification suites, sweeps.

Commands
    solve_elliptic    (lam - L) u = f for the model form of the configured
                      operator, manufactured or configured forcing; prints a
                      residual line, writes solution.csv and manifest.json.
    solve_parabolic   time evolution with snapshot CSVs and a manifest.
    verify SUITE      run a registered check suite; exit 1 if any check fails.
    sweep             re-evaluate window margins and the sector sup while one
                      operator parameter ranges over configured values.

Config is a JSON file: {"operator": {flat keys as in the params module},
"grid": {num_cells, y_max, grading, num_x, box_length}, "elliptic": {...},
"parabolic": {...}, "sweep": {...}, "suite": name}.  Exit codes: 0 success,
1 check failure, 2 config error (the message names the offending key).
Outputs carry no timestamps: the same config and seed reproduce byte-identical
CSVs.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import __version__, harness, panels, semigroup
from .bessel1d import assemble_form, sector_resolvent_scan
from .grid import XBox, Field, make_grid, default_grading, lp_norm, \
    write_field_csv
from .harness import manufactured_mode_case, run_suite
from .multiplier import resolvent_nd
from .params import (config_to_problem, problem_to_config, reduce_to_model,
                     validate_window, SpaceSpec, OperatorSpec)


class ConfigError(ValueError):
    pass


DEFAULT_OPERATOR = {
    "q_matrix": [1.0],
    "q_vector": [0.0],
    "gamma": 1.0,
    "drift_b": [0.0],
    "drift_c": 0.0,
    "alpha1": 0.0,
    "alpha2": 0.0,
    "p": 2.0,
    "m": 0.0,
    "dimension": 1,
}

GRID_KEYS = {"num_cells": 128, "y_max": 1.0, "grading": None, "num_x": 16,
             "box_length": 2.0 * np.pi}
ELLIPTIC_KEYS = {"lam": [2.0, 0.0], "forcing": "manufactured", "mode": 2,
                 "center": 0.45, "width": 0.18}
PARABOLIC_KEYS = {"t_final": 0.5, "steps": 20, "scheme": "backward_euler",
                  "snapshot_stride": 5, "forcing_mode": 1}
TOP_KEYS = ("operator", "grid", "elliptic", "parabolic", "sweep", "suite")


def _section(cfg, name, defaults):
    sec = dict(defaults)
    got = cfg.get(name, {})
    if not isinstance(got, dict):
        raise ConfigError("config section %r must be a mapping" % name)
    for key, val in got.items():
        if key not in defaults:
            raise ConfigError("unknown config key: %s.%s" % (name, key))
        sec[key] = val
    return sec


def load_config(path):
    if path is None:
        return {"operator": dict(DEFAULT_OPERATOR)}
    if not os.path.exists(path):
        raise ConfigError("config file not found: %s" % path)
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError("config is not valid JSON: %s" % exc)
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a mapping")
    for key in cfg:
        if key not in TOP_KEYS:
            raise ConfigError("unknown config key: %s" % key)
    if "operator" not in cfg:
        cfg["operator"] = dict(DEFAULT_OPERATOR)
    return cfg


def _problem(cfg):
    try:
        return config_to_problem(cfg["operator"])
    except ValueError as exc:
        raise ConfigError(str(exc))


def _grid_for(cfg, model, refine=0):
    gsec = _section(cfg, "grid", GRID_KEYS)
    J = int(gsec["num_cells"]) * (2 ** max(0, int(refine)))
    grading = gsec["grading"]
    if grading is None:
        grading = default_grading(model.alpha)
    box = None
    if model.dim:
        box = XBox(float(gsec["box_length"]), int(gsec["num_x"]), model.dim)
    return make_grid(J, float(gsec["y_max"]), float(grading), box)


def _write_manifest(out_dir, name, payload):
    path = os.path.join(out_dir, name)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
    return path


def _manifest_base(command, cfg, seed, chain):
    return {
        "command": command,
        "config": cfg,
        "seed": int(seed),
        "versions": {
            "package": __version__,
            "numpy": np.__version__,
            "scipy": __import__("scipy").__version__,
        },
        "transform_chain": chain.to_dict() if chain is not None else None,
    }


def cmd_solve_elliptic(cfg, out_dir, seed, refine):
    spec, space = _problem(cfg)
    model, chain = reduce_to_model(spec, space)
    window = validate_window(spec, space)
    grid = _grid_for(cfg, model, refine)
    esec = _section(cfg, "elliptic", ELLIPTIC_KEYS)
    lam = complex(esec["lam"][0], esec["lam"][1])
    if esec["forcing"] == "manufactured":
        u_exact, f = manufactured_mode_case(model, grid, lam,
                                            int(esec["mode"]),
                                            float(esec["center"]),
                                            float(esec["width"]))
    else:
        raise ConfigError("unknown config key: elliptic.forcing value %r"
                          % (esec["forcing"],))
    u, info = resolvent_nd(lam, f, model, grid, return_info=True)
    err = (lp_norm(u.values - u_exact.values, model.p, model.m, grid)
           / lp_norm(u_exact.values, model.p, model.m, grid))
    os.makedirs(out_dir, exist_ok=True)
    sol_path = os.path.join(out_dir, "solution.csv")
    write_field_csv(sol_path, u)
    manifest = _manifest_base("solve_elliptic", cfg, seed, chain)
    manifest["outputs"] = ["solution.csv"]
    manifest["residual"] = info["residual"]
    manifest["manufactured_error"] = float(err)
    manifest["window"] = {"value": window.value, "lower": window.lower,
                          "upper": window.upper, "passed": window.passed}
    _write_manifest(out_dir, "manifest.json", manifest)
    print("solve_elliptic: residual %.3e manufactured_error %.3e -> %s"
          % (info["residual"], err, sol_path))
    return 0


def cmd_solve_parabolic(cfg, out_dir, seed, refine):
    spec, space = _problem(cfg)
    model, chain = reduce_to_model(spec, space)
    grid = _grid_for(cfg, model, refine)
    psec = _section(cfg, "parabolic", PARABOLIC_KEYS)
    steps = int(psec["steps"]) * (2 ** max(0, int(refine)))
    times = np.linspace(0.0, float(psec["t_final"]), steps + 1)
    prof = panels.bump_profile(0.4 * grid.y_max, 0.15 * grid.y_max)
    if model.dim:
        wave = panels.plane_wave(grid.x_box, [int(psec["forcing_mode"])]
                                 * model.dim)
        u0 = Field(panels.tensor_values(grid, wave, prof), grid)
    else:
        u0 = Field(prof(grid.y_nodes).astype(complex), grid)
    run = semigroup.evolve(u0, None, model, grid, psec["scheme"], times)
    os.makedirs(out_dir, exist_ok=True)
    manifest = _manifest_base("solve_parabolic", cfg, seed, chain)
    sub = run.export_csvs(out_dir, "snapshot", int(psec["snapshot_stride"]),
                          model=model, chain=chain)
    manifest["evolution"] = sub
    _write_manifest(out_dir, "manifest.json", manifest)
    final_norm = lp_norm(run.final.values, model.p, model.m, grid)
    print("solve_parabolic: %d steps of %s, final norm %.6g -> %s"
          % (steps, psec["scheme"], final_norm, out_dir))
    return 0


def cmd_verify(cfg, suite, out_dir, seed, threads):
    suite = suite or cfg.get("suite", "default")
    try:
        results = run_suite({"suite": suite, "out_dir": out_dir,
                             "seed": seed, "threads": threads})
    except ValueError as exc:
        raise ConfigError(str(exc))
    bad = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        line = "%-36s %s  constant=%.6g drift=%.6g" % (
            res.estimate_id, status, res.constant, res.drift)
        if res.error:
            line += "  error=%s" % res.error
        print(line)
        bad += 0 if res.passed else 1
    print("verify %s: %d/%d checks passed"
          % (suite, len(results) - bad, len(results)))
    return 1 if bad else 0


def cmd_sweep(cfg, out_dir, seed):
    ssec = cfg.get("sweep")
    if not isinstance(ssec, dict):
        raise ConfigError("sweep requires a config with a sweep section")
    for key in ssec:
        if key not in ("parameter", "values"):
            raise ConfigError("unknown config key: sweep.%s" % key)
    param = ssec.get("parameter")
    values = ssec.get("values")
    if param not in ("alpha1", "alpha2", "drift_c", "gamma", "m", "p"):
        raise ConfigError("unknown config key: sweep.parameter %r" % (param,))
    if not isinstance(values, (list, tuple)) or not values:
        raise ConfigError("sweep.values must be a non-empty list")
    rng = np.random.default_rng(seed)
    rows = []
    for v in values:
        op_cfg = dict(cfg["operator"])
        op_cfg[param] = float(v)
        try:
            spec, space = config_to_problem(op_cfg)
            model, _ = reduce_to_model(spec, space)
            window = validate_window(spec, space)
        except (ValueError, RuntimeError) as exc:
            rows.append((float(v), float("nan"), float("nan"), float("nan"),
                         "invalid", float("nan")))
            continue
        grid = make_grid(128, 1.0, default_grading(model.alpha))
        amod = float(np.linalg.norm(model.mixing)) if model.dim else 0.0
        op = assemble_form(grid, "model_mode", c=model.c_bessel,
                           alpha=model.alpha, mixing_freq=amod,
                           freq_norm2=1.0)
        scan = sector_resolvent_scan(op, amod, rng, probes=2, iters=2)
        rows.append((float(v), window.value, window.lower, window.upper,
                     "yes" if window.passed else "no", scan["sup"]))
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "sweep.csv")
    harness._write_csv(path, ("value", "window_value", "window_lower",
                              "window_upper", "admissible", "sector_sup"),
                       rows)
    manifest = _manifest_base("sweep", cfg, seed, None)
    manifest["outputs"] = ["sweep.csv"]
    manifest["parameter"] = param
    _write_manifest(out_dir, "manifest.json", manifest)
    print("sweep %s over %d values -> %s" % (param, len(values), path))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="degenpde",
        description="Degenerate-operator solves, evolutions and estimate "
                    "verification.")
    parser.add_argument("command",
                        choices=["solve_elliptic", "solve_parabolic",
                                 "verify", "sweep"])
    parser.add_argument("suite", nargs="?", default=None,
                        help="suite name for `verify`")
    parser.add_argument("--config", default=None)
    parser.add_argument("--out", default="out")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--refine", type=int, default=0)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config(args.config)
        if args.command == "solve_elliptic":
            return cmd_solve_elliptic(cfg, args.out, args.seed, args.refine)
        if args.command == "solve_parabolic":
            return cmd_solve_parabolic(cfg, args.out, args.seed, args.refine)
        if args.command == "verify":
            return cmd_verify(cfg, args.suite, args.out, args.seed,
                              args.threads)
        return cmd_sweep(cfg, args.out, args.seed)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    except (ValueError, RuntimeError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
