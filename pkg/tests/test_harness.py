"""Suite runner: registry integrity, error capture, CSV reproducibility."""

import os

import numpy as np
import pytest

from degenpde import harness
from degenpde.harness import (REGISTRY, SUITES, EstimateResult, run_suite,
                              square_function_ratio)
from degenpde.grid import make_grid


def test_registry_and_suites_consistent():
    names = [name for name, _ in REGISTRY]
    assert len(names) == len(set(names))
    assert SUITES["default"] == names
    for suite, members in SUITES.items():
        for member in members:
            assert member in names, (suite, member)
    # every registered check is callable
    for _, fn in REGISTRY:
        assert callable(fn)


def test_run_suite_validation():
    with pytest.raises(ValueError, match="unknown suite"):
        run_suite({"suite": "everything"})
    with pytest.raises(ValueError, match="no executable check"):
        run_suite({"checks": ["parameter_roundtrip", "made_up_check"]})


def test_check_exception_is_recorded_not_raised(monkeypatch):
    def boom(ctx):
        raise RuntimeError("synthetic failure")

    monkeypatch.setitem(harness._REGISTRY_MAP, "synthetic_boom", boom)
    results = run_suite({"checks": ["synthetic_boom"]})
    assert len(results) == 1
    res = results[0]
    assert not res.passed
    assert "RuntimeError: synthetic failure" in res.error


def test_run_suite_single_check_and_csv(tmp_path):
    def run(d):
        results = run_suite({"checks": ["parameter_roundtrip"],
                             "out_dir": str(d)})
        assert len(results) == 1 and results[0].passed
        out = {}
        for name in ("summary.csv", "estimate_parameter_roundtrip.csv"):
            with open(os.path.join(str(d), name), "rb") as fh:
                out[name] = fh.read()
        return results[0], out

    res1, blobs1 = run(tmp_path / "a")
    res2, blobs2 = run(tmp_path / "b")
    assert blobs1 == blobs2  # byte-identical reruns
    assert res1.csv_path.endswith("estimate_parameter_roundtrip.csv")
    header = blobs1["summary.csv"].split(b"\n")[0]
    assert header == b"estimate_id,pass,constant,drift"


def test_run_suite_threaded_keeps_order():
    checks = ["parameter_roundtrip", "transform_isometries"]
    results = run_suite({"checks": checks, "threads": 2})
    assert [r.estimate_id for r in results] == checks
    assert all(r.passed for r in results)


def test_run_suite_with_operator_override():
    config = {
        "checks": ["parameter_roundtrip"],
        "q_matrix": [[2.0]],
        "q_vector": [0.4],
        "gamma": 1.0,
        "drift_b": [0.0],
        "drift_c": 1.0,
        "alpha1": -0.5,
        "alpha2": 0.5,
        "p": 2.0,
        "m": 0.2,
        "dimension": 1,
    }
    results = run_suite(config)
    assert results[0].passed


def test_estimate_result_repr_and_defaults():
    res = EstimateResult("demo", True, constant=1.5, drift=0.01)
    assert "demo" in repr(res)
    assert res.rows == [] and res.header == () and res.error == ""
    assert res.csv_path == ""


def test_square_function_ratio_guards():
    g = make_grid(32, 1.0, 2.0)

    def family(rng):
        return lambda v: v

    with pytest.raises(ValueError, match="n <= 32"):
        square_function_ratio(family, 64, 4, 2.0, 0.0, g)
    with pytest.raises(ValueError, match="trials <= 200"):
        square_function_ratio(family, 4, 500, 2.0, 0.0, g)


def test_square_function_identity_family_is_unit():
    g = make_grid(48, 1.0, 2.0)

    def family(rng):
        return lambda v: v

    r = square_function_ratio(family, 4, 6, 2.0, 0.0, g, seed=1)
    assert r == pytest.approx(1.0, abs=1e-12)
