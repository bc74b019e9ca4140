"""Frequency decoupling: per-mode solves, derived multipliers, scans."""

import numpy as np
import pytest

from degenpde import multiplier as mp
from degenpde import panels
from degenpde.grid import Field, XBox, make_grid
from degenpde.params import ModelParams, OperatorSpec, SpaceSpec


MODEL = ModelParams([0.3], 0.5, 1.0, 0.5, 2.0)


def _tensor_forcing(grid, mode=1):
    prof = panels.bump_profile(0.4, 0.15)
    wave = panels.plane_wave(grid.x_box, [mode])
    return Field(panels.tensor_values(grid, wave, prof), grid)


def _nd_grid(J=64, nx=16):
    return make_grid(J, 1.0, 2.0, XBox(2.0 * np.pi, nx, 1))


def test_mode_operators_validation_and_residual():
    g = make_grid(96, 1.0, 2.0)
    with pytest.raises(ValueError, match="c > -1"):
        mp.ModeOperators(g, -1.5, 0.5)
    ops = mp.ModeOperators(g, 1.0, 0.5)
    rng = np.random.default_rng(0)
    f = rng.standard_normal(g.num_y) + 1j * rng.standard_normal(g.num_y)
    lam, s, k2 = 1.0 + 0.5j, 0.4, 2.0
    u = ops.solve(s, k2, lam, f)
    res = lam * u - ops.apply(s, k2, u) - f
    rel = (np.sqrt(np.sum(np.abs(res) ** 2 * ops.weight))
           / np.sqrt(np.sum(np.abs(f) ** 2 * ops.weight)))
    assert rel < 1e-11


def test_xi_lattice_shape_and_values():
    box = XBox(2.0 * np.pi, 8, 2)
    lat = mp.xi_lattice(box)
    assert lat.shape == (8, 8, 2)
    k = box.wavenumbers()
    assert np.allclose(lat[:, 0, 0], k)
    assert np.allclose(lat[0, :, 1], k)


def test_plan_validation():
    with pytest.raises(ValueError, match="x-box"):
        mp.FrequencySolvePlan(1.0, MODEL, make_grid(32, 1.0, 2.0))
    box2 = XBox(1.0, 4, 2)
    with pytest.raises(ValueError, match="does not match"):
        mp.FrequencySolvePlan(1.0, MODEL, make_grid(16, 1.0, 2.0, box2))


def test_resolvent_nd_matches_monolithic_oracle():
    g = _nd_grid()
    f = _tensor_forcing(g)
    lam = 1.0 + 0.5j
    u, info = mp.resolvent_nd(lam, f, MODEL, g, return_info=True)
    assert info["residual"] < 1e-11
    um = mp.monolithic_sparse_solve(lam, f, MODEL, g)
    rel = np.abs(u.values - um.values).max() / np.abs(u.values).max()
    assert rel < 1e-10
    with pytest.raises(ValueError, match="N = 1"):
        model2 = ModelParams([0.3, 0.2], 0.5, 1.0, 0.5, 2.0)
        mp.monolithic_sparse_solve(lam, f, model2, g)


def test_derived_multiplier_sum_identity():
    g = _nd_grid()
    f = _tensor_forcing(g)
    assert mp.sum_identity_residual(1.0 + 0.5j, f, MODEL, g) < 1e-11
    d = mp.derived_multipliers(1.0 + 0.5j, f, MODEL, g)
    assert set(d) == {"solution", "x_laplacian", "mixed_gradients",
                      "bessel", "y_gradient"}
    assert len(d["mixed_gradients"]) == 1
    assert d["solution"].values.shape == g.shape


def test_xi_derivative_first_and_second_order():
    model2 = ModelParams([0.3, 0.2], 0.5, 1.0, 0.5, 2.0)
    g = make_grid(128, 1.0, 2.0)
    rep1 = mp.xi_derivative_check(1.0, model2, g, order=1)
    assert rep1["order"] >= 1.9
    assert rep1["errors"][-1] < rep1["errors"][0]
    rep2 = mp.xi_derivative_check(1.0, model2, g, order=2)
    assert rep2["order"] >= 1.9
    assert rep2["symmetry"] == 0.0
    with pytest.raises(ValueError, match="distinct"):
        mp.xi_derivative_check(1.0, model2, g, order=2, indexes=(0, 0))


def test_mikhlin_scan_deterministic_and_bounded():
    g = make_grid(96, 1.0, 2.0)
    lams = (1.0, 1.0 + 2.0j)
    xis = ((1.0,), (4.0,))
    rep = mp.mikhlin_bound_scan(lams, xis, MODEL, g)
    again = mp.mikhlin_bound_scan(lams, xis, MODEL, g)
    assert rep["suprema"] == again["suprema"]
    assert rep["table"] == again["table"]
    for family, sup in rep["suprema"].items():
        assert 0.0 < sup < 10.0
    # every (family, beta, lam, xi) cell is present
    assert len(rep["table"]) == 3 * 2 * len(lams) * len(xis)


def test_mikhlin_scan_guards():
    g = make_grid(32, 1.0, 2.0)
    model3 = ModelParams([0.3, 0.2, 0.1], 0.5, 1.0, 0.5, 2.0)
    with pytest.raises(ValueError, match="N <= 2"):
        mp.mikhlin_bound_scan((1.0,), ((1.0, 1.0, 1.0),), model3, g)
    with pytest.raises(ValueError, match="unknown family"):
        mp.mikhlin_bound_scan((1.0,), ((1.0,),), MODEL, g,
                              families=("smoothed",))


def test_reduction_consistency_decays_under_refinement():
    spec = OperatorSpec(q_matrix=np.array([[2.0]]),
                        q_vector=np.array([0.4]), gamma=1.0,
                        drift_b=np.array([0.0]), drift_c=1.0,
                        alpha1=-0.5, alpha2=0.5)
    space = SpaceSpec(2.0, 0.2)
    errs = [mp.reduction_consistency_check(spec, space, 1.5,
                                           _nd_grid(J, nx=8))
            for J in (64, 128)]
    assert errs[1] < 0.5 * errs[0]
    assert errs[1] < 1e-3


def test_general_mode_solve_drift_phase_orientation():
    # with b != 0 the reduced route conjugates by exp(+i xi (b/c) y) on the
    # data; agreement with the direct discretization pins the orientation
    spec = OperatorSpec(q_matrix=np.array([[1.0]]),
                        q_vector=np.array([0.3]), gamma=1.0,
                        drift_b=np.array([0.5]), drift_c=1.0,
                        alpha1=0.0, alpha2=0.0)
    space = SpaceSpec(2.0, 0.2)
    errs = [mp.reduction_consistency_check(spec, space, 1.5,
                                           _nd_grid(J, nx=8))
            for J in (64, 128)]
    assert errs[1] < 0.6 * errs[0]
    assert errs[1] < 5e-3
