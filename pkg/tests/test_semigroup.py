"""Time marching: scheme identities, contraction, positivity, regularity."""

import json
import os

import numpy as np
import pytest

from degenpde import semigroup as sg
from degenpde.grid import Field, XBox, make_grid
from degenpde.params import ModelParams


MODEL = ModelParams([0.3], 0.5, 1.0, 0.5, 2.0)


def _grid(J=48, nx=8):
    return make_grid(J, 1.0, 2.0, XBox(2.0 * np.pi, nx, 1))


def test_evolve_validation():
    g = _grid()
    u0 = Field(np.zeros(g.shape, dtype=complex), g)
    with pytest.raises(ValueError, match="time_grid required"):
        sg.evolve(u0, None, MODEL, g)
    with pytest.raises(ValueError, match="increase strictly"):
        sg.evolve(u0, None, MODEL, g, time_grid=np.array([0.0, 0.2, 0.1]))
    with pytest.raises(ValueError, match="unknown scheme"):
        sg.evolve(u0, None, MODEL, g, scheme="leapfrog",
                  time_grid=np.array([0.0, 0.1]))
    bad = np.zeros((3, g.num_y), dtype=complex)  # wrong x count
    with pytest.raises(ValueError, match="does not match grid"):
        sg.evolve(bad, None, MODEL, g, time_grid=np.array([0.0, 0.1]))


def test_run_snapshot_bookkeeping():
    g = _grid()
    u0 = Field(np.random.default_rng(0).standard_normal(g.shape)
               .astype(complex), g)
    ts = np.linspace(0.0, 0.2, 5)
    run = sg.evolve(u0, None, MODEL, g, "backward_euler", ts)
    assert len(run.snapshots) == 5
    assert np.array_equal(run.times, ts)
    assert run.final is run.snapshots[-1]
    with pytest.raises(ValueError, match="one snapshot per time point"):
        sg.EvolutionRun(ts, "backward_euler", run.snapshots[:-1])


def test_single_step_is_resolvent():
    assert sg.resolvent_step_identity(MODEL, _grid()) == 0.0


def test_semigroup_property_exact_with_shared_step():
    rep = sg.semigroup_property_check(MODEL, _grid())
    assert rep["exact"] < 1e-12
    assert rep["scheme_order"] > 1e-6  # mismatched steps differ at O(dt)


def test_contraction_unit_at_zero_and_decay():
    rep = sg.contraction_check(MODEL, _grid(), (0.0, 0.2), probes=3, steps=8)
    assert all(v == 1.0 for v in rep[0.0].values())
    assert rep[0.2]["l2_weighted"] <= 1.0 + 1e-10
    for v in rep[0.2].values():
        assert v <= 1.05


def test_positivity_exact_for_pure_bessel():
    model0 = ModelParams([0.0], 0.0, 0.0, 0.0, 2.0)
    grids = [make_grid(J, 1.0, 1.0, XBox(2.0 * np.pi, 8, 1))
             for J in (32, 64)]
    assert sg.positivity_check(model0, grids, steps=6) == [0.0, 0.0]


def test_mode_domination_slack_nonpositive():
    grids = [make_grid(J, 1.0, 2.0) for J in (64, 128)]
    out = sg.mode_domination_check(1.0, 0.5, 0.4, 1.0, grids, steps=8)
    assert all(v <= 1e-10 for v in out)


def test_maximal_regularity_ratio_stable():
    rep = sg.maximal_regularity_check(MODEL, _grid(), 2.0,
                                      np.linspace(0.0, 0.3, 9))
    assert np.isfinite(rep["ratio"]) and rep["ratio"] < 10.0
    assert rep["drift"] < 0.2


def test_heat_closed_form_first_order_in_time():
    rep = sg.heat_closed_form_check(levels=((48, 8), (96, 16)))
    assert rep["errors"][1] < rep["errors"][0]
    assert 1.5 <= rep["ratio"] <= 3.0  # joint dt/grid halving, O(dt) leads


def test_crank_nicolson_second_order_in_time():
    # fixed grid, fine-step reference from the same discretization, so only
    # the time error is measured: CN drops ~4x per halving, BE ~2x
    model0 = ModelParams([0.0], 0.0, 0.0, 0.0, 2.0)
    box = XBox(2.0 * np.pi, 8, 1)
    g = make_grid(64, 1.0, 1.0, box)
    x, y = box.nodes(), g.y_nodes
    u0 = Field((np.cos(x)[:, None]
                * np.cos(np.pi * y)[None, :]).astype(complex), g)
    t_final = 0.1

    def final(scheme, K):
        run = sg.evolve(u0, None, model0, g, scheme,
                        np.linspace(0.0, t_final, K + 1))
        return run.final.values

    ref = final("crank_nicolson", 512)

    def err(scheme, K):
        return np.abs(final(scheme, K) - ref).max()

    cn = [err("crank_nicolson", K) for K in (8, 32)]
    be = [err("backward_euler", K) for K in (8, 32)]
    assert cn[0] / cn[1] > 12.0   # ~16 over two halvings for second order
    assert 3.0 < be[0] / be[1] < 5.0  # ~4 over two halvings for first order
    assert cn[1] < be[1]


def test_export_csvs_deterministic(tmp_path):
    g = _grid(J=24, nx=8)
    u0 = Field(np.random.default_rng(2).standard_normal(g.shape)
               .astype(complex), g)
    run = sg.evolve(u0, None, MODEL, g, "backward_euler",
                    np.linspace(0.0, 0.1, 5))

    def export(d):
        man = run.export_csvs(str(d), stride=2, model=MODEL)
        blobs = {}
        for name in man["snapshots"]:
            with open(os.path.join(str(d), name), "rb") as fh:
                blobs[name] = fh.read()
        with open(os.path.join(str(d), "snapshot_manifest.json"), "rb") as fh:
            blobs["manifest"] = fh.read()
        return man, blobs

    d1 = tmp_path / "a"
    d2 = tmp_path / "b"
    man1, blobs1 = export(d1)
    man2, blobs2 = export(d2)
    assert man1["snapshots"] == ["snapshot_0000.csv", "snapshot_0002.csv",
                                 "snapshot_0004.csv"]
    assert blobs1 == blobs2  # byte-identical across reruns
    loaded = json.loads(blobs1["manifest"])
    assert loaded["scheme"] == "backward_euler"
    assert loaded["steps"] == 4
    assert loaded["model"]["alpha"] == 0.5
