"""End-to-end command-line behavior: exit codes, outputs, reproducibility."""

import json
import os

import pytest

from degenpde.cli import main


def _write_config(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def _read_bytes(d, names):
    out = {}
    for name in names:
        with open(os.path.join(str(d), name), "rb") as fh:
            out[name] = fh.read()
    return out


SMALL_OPERATOR = {
    "q_matrix": [[1.0]],
    "q_vector": [0.3],
    "gamma": 1.0,
    "drift_b": [0.0],
    "drift_c": 1.0,
    "alpha1": 0.0,
    "alpha2": 0.5,
    "p": 2.0,
    "m": 0.2,
    "dimension": 1,
}


def test_solve_elliptic_defaults_and_reproducible(tmp_path, capsys):
    d1, d2 = tmp_path / "r1", tmp_path / "r2"
    assert main(["solve_elliptic", "--out", str(d1)]) == 0
    assert main(["solve_elliptic", "--out", str(d2)]) == 0
    out = capsys.readouterr().out
    assert "solve_elliptic: residual" in out
    b1 = _read_bytes(d1, ["solution.csv", "manifest.json"])
    b2 = _read_bytes(d2, ["solution.csv", "manifest.json"])
    assert b1 == b2
    man = json.loads(b1["manifest.json"])
    assert man["command"] == "solve_elliptic"
    assert man["residual"] < 1e-9
    assert man["window"]["passed"] is True
    assert man["outputs"] == ["solution.csv"]


def test_solve_elliptic_refinement_reduces_error(tmp_path, capsys):
    cfg = _write_config(tmp_path, {
        "operator": SMALL_OPERATOR,
        "grid": {"num_cells": 48, "num_x": 8},
    })
    errs = []
    for refine in (0, 1):
        d = tmp_path / ("ref%d" % refine)
        rc = main(["solve_elliptic", "--config", cfg, "--out", str(d),
                   "--refine", str(refine)])
        assert rc == 0
        errs.append(json.loads((d / "manifest.json").read_text())
                    ["manufactured_error"])
    assert errs[1] < 0.5 * errs[0]


def test_solve_parabolic_snapshots_reproducible(tmp_path, capsys):
    cfg = _write_config(tmp_path, {
        "operator": SMALL_OPERATOR,
        "grid": {"num_cells": 32, "num_x": 8},
        "parabolic": {"t_final": 0.2, "steps": 8, "snapshot_stride": 4},
    })
    d1, d2 = tmp_path / "p1", tmp_path / "p2"
    assert main(["solve_parabolic", "--config", cfg, "--out", str(d1)]) == 0
    assert main(["solve_parabolic", "--config", cfg, "--out", str(d2)]) == 0
    man = json.loads((d1 / "manifest.json").read_text())
    snaps = man["evolution"]["snapshots"]
    assert snaps == ["snapshot_0000.csv", "snapshot_0004.csv",
                     "snapshot_0008.csv"]
    names = snaps + ["manifest.json", "snapshot_manifest.json"]
    assert _read_bytes(d1, names) == _read_bytes(d2, names)
    assert man["evolution"]["scheme"] == "backward_euler"


def test_verify_small_suite_passes(tmp_path, capsys):
    rc = main(["verify", "spectral_1d", "--out", str(tmp_path / "v")])
    out = capsys.readouterr().out
    assert rc == 0
    assert "verify spectral_1d: 3/3 checks passed" in out
    assert os.path.exists(str(tmp_path / "v" / "summary.csv"))


def test_verify_unknown_suite_is_config_error(tmp_path, capsys):
    rc = main(["verify", "everything", "--out", str(tmp_path / "v")])
    err = capsys.readouterr().err
    assert rc == 2
    assert "config error: unknown suite" in err


def test_unknown_top_level_key(tmp_path, capsys):
    cfg = _write_config(tmp_path, {"operator": SMALL_OPERATOR,
                                   "bogus_section": {}})
    rc = main(["solve_elliptic", "--config", cfg, "--out",
               str(tmp_path / "o")])
    err = capsys.readouterr().err
    assert rc == 2
    assert "config error: unknown config key: bogus_section" in err


def test_unknown_operator_key_named(tmp_path, capsys):
    bad = dict(SMALL_OPERATOR, viscosity=1.0)
    cfg = _write_config(tmp_path, {"operator": bad})
    rc = main(["solve_elliptic", "--config", cfg, "--out",
               str(tmp_path / "o")])
    err = capsys.readouterr().err
    assert rc == 2
    assert "unknown config key" in err and "viscosity" in err


def test_missing_operator_key_named(tmp_path, capsys):
    partial = {k: v for k, v in SMALL_OPERATOR.items() if k != "gamma"}
    cfg = _write_config(tmp_path, {"operator": partial})
    rc = main(["solve_elliptic", "--config", cfg, "--out",
               str(tmp_path / "o")])
    err = capsys.readouterr().err
    assert rc == 2
    assert "missing config key" in err and "gamma" in err


def test_unknown_grid_key_named(tmp_path, capsys):
    cfg = _write_config(tmp_path, {"operator": SMALL_OPERATOR,
                                   "grid": {"cells": 64}})
    rc = main(["solve_elliptic", "--config", cfg, "--out",
               str(tmp_path / "o")])
    err = capsys.readouterr().err
    assert rc == 2
    assert "config error: unknown config key: grid.cells" in err


def test_config_file_missing_or_malformed(tmp_path, capsys):
    rc = main(["solve_elliptic", "--config", str(tmp_path / "absent.json"),
               "--out", str(tmp_path / "o")])
    assert rc == 2
    assert "config file not found" in capsys.readouterr().err
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    rc = main(["solve_elliptic", "--config", str(broken), "--out",
               str(tmp_path / "o")])
    assert rc == 2
    assert "not valid JSON" in capsys.readouterr().err


def test_sweep_writes_table_and_flags_inadmissible(tmp_path, capsys):
    cfg = _write_config(tmp_path, {
        "operator": SMALL_OPERATOR,
        "sweep": {"parameter": "m", "values": [0.2, 2.5]},
    })
    d = tmp_path / "s"
    assert main(["sweep", "--config", cfg, "--out", str(d)]) == 0
    rows = (d / "sweep.csv").read_text().strip().split("\n")
    assert rows[0] == "value,window_value,window_lower,window_upper," \
                      "admissible,sector_sup"
    assert len(rows) == 3
    flags = [r.split(",")[4] for r in rows[1:]]
    assert flags[0] == "yes" and flags[1] == "no"


def test_sweep_requires_section_and_valid_parameter(tmp_path, capsys):
    cfg = _write_config(tmp_path, {"operator": SMALL_OPERATOR})
    assert main(["sweep", "--config", cfg, "--out",
                 str(tmp_path / "o")]) == 2
    assert "sweep requires a config" in capsys.readouterr().err
    cfg2 = _write_config(tmp_path, {
        "operator": SMALL_OPERATOR,
        "sweep": {"parameter": "q_matrix", "values": [1.0]},
    }, name="c2.json")
    assert main(["sweep", "--config", cfg2, "--out",
                 str(tmp_path / "o")]) == 2
    assert "sweep.parameter" in capsys.readouterr().err
