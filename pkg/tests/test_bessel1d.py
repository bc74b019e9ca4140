"""Vertical 1-d machinery: exact assembly, resolvents, kernels, estimates."""

import numpy as np
import pytest

from degenpde import bessel1d as b1
from degenpde.grid import make_grid


def _uniform_nodes():
    return np.array([1.0, 2.0, 3.0])


def test_power_moment_matches_naive_formula():
    rng = np.random.default_rng(1)
    for _ in range(50):
        a = rng.uniform(0.1, 2.0)
        b = a + rng.uniform(0.1, 2.0)
        s = rng.uniform(-2.5, 3.0)
        if abs(s + 1.0) < 1e-3:
            continue
        exact = (b ** (s + 1) - a ** (s + 1)) / (s + 1)
        assert b1.power_moment(a, b, s) == pytest.approx(exact, rel=1e-13)
    # s = -1 branch
    assert b1.power_moment(0.5, 2.0, -1.0) == pytest.approx(np.log(4.0))


def test_power_moment_stable_for_thin_cells():
    # b - a << a: naive subtraction cancels ~9 digits, the expm1 form none
    h = 2.0 ** -30  # exactly representable next to 1
    exact = h + h * h + h ** 3 / 3.0  # Int_1^{1+h} y^2 dy expanded
    naive = ((1.0 + h) ** 3 - 1.0) / 3.0
    assert abs(naive - exact) / h > 1e-10  # the subtraction really is lossy
    assert b1.power_moment(1.0, 1.0 + h, 2.0) == pytest.approx(exact,
                                                               rel=1e-14)


def test_stiffness_tridiag_uniform_unweighted():
    sub, diag, sup = b1.stiffness_tridiag(_uniform_nodes(), 0.0)
    assert np.allclose(diag, [1.0, 2.0, 1.0])
    assert np.allclose(sub, [-1.0, -1.0])
    assert np.allclose(sup, [-1.0, -1.0])


def test_transport_tridiag_uniform_unweighted():
    sub, diag, sup = b1.transport_tridiag(_uniform_nodes(), 0.0)
    assert np.allclose(diag, [-0.5, 0.0, 0.5])
    assert np.allclose(sup, [0.5, 0.5])
    assert np.allclose(sub, [-0.5, -0.5])


def test_mass_tridiag_uniform_unweighted():
    sub, diag, sup = b1.mass_tridiag(_uniform_nodes(), 0.0)
    assert np.allclose(diag, [1.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0])
    assert np.allclose(sup, [1.0 / 6.0, 1.0 / 6.0])
    assert np.allclose(sub, sup)


def test_stiffness_annihilates_constants_any_weight():
    g = make_grid(64, 1.0, 2.0)
    for s in (-0.5, 0.0, 1.3):
        sub, diag, sup = b1.stiffness_tridiag(g.y_nodes, s)
        ones = np.ones(g.num_y)
        r = diag * ones
        r[:-1] += sup
        r[1:] += sub
        assert np.abs(r).max() < 1e-12 * np.abs(diag).max()


def test_partition_and_node_weights():
    y = _uniform_nodes()
    assert np.allclose(b1.partition_weights(y), [0.5, 1.0, 0.5])
    assert np.allclose(b1.node_weights(y, 2.0), [0.5, 4.0, 4.5])


def test_bessel_form_selfadjoint_nonnegative():
    g = make_grid(128, 1.0, 2.0)
    op = b1.assemble_form(g, "bessel", c=1.0)
    assert op.hermitian_defect() <= 1e-15
    assert op.accretivity_defect() >= -1e-12
    ev = op.symmetric_spectrum()
    assert ev.min() >= -1e-8          # nonnegative up to pencil rounding
    assert abs(ev.min()) < 1e-8       # constants are in the kernel


def test_assemble_form_validation():
    g = make_grid(32, 1.0, 2.0)
    with pytest.raises(ValueError, match="c > -1"):
        b1.assemble_form(g, "bessel", c=-1.5)
    with pytest.raises(ValueError, match="unknown form kind"):
        b1.assemble_form(g, "heat", c=0.0)
    with pytest.raises(ValueError, match="beta > -1"):
        b1.assemble_form(g, "bessel_drift", c=0.5, beta=-1.5, drift_b=0.1,
                         potential_coeff=0.0)


def test_drift_form_real_part_is_drift_free():
    # the graded transport enters exactly skew-Hermitian: Re F independent of b
    g = make_grid(96, 1.0, 2.0)
    kw = dict(c=1.0, beta=0.5, potential_coeff=0.3)
    op_b = b1.assemble_form(g, "bessel_drift", drift_b=0.7, **kw)
    op_0 = b1.assemble_form(g, "bessel_drift", drift_b=0.0, **kw)
    assert np.allclose(op_b.form_diag.real, op_0.form_diag.real)
    assert np.allclose(op_b.form_sub.real, op_0.form_sub.real)
    # the b-dependent part X = F(b) - F(0) satisfies X^H = -X
    x_diag = op_b.form_diag - op_0.form_diag
    x_sub = op_b.form_sub - op_0.form_sub
    x_sup = op_b.form_sup - op_0.form_sup
    assert np.abs(x_diag.real).max() == 0.0
    assert np.allclose(x_sub, -np.conj(x_sup))
    assert op_b.bc == "oblique" and op_0.bc == "neumann_form"


def test_resolve_residual_guarantee_and_adjoint():
    g = make_grid(256, 1.0, 2.0)
    op = b1.assemble_form(g, "model_mode", c=1.0, alpha=0.5,
                          mixing_freq=0.4, freq_norm2=4.0)
    rng = np.random.default_rng(3)
    f = rng.standard_normal(g.num_y) + 1j * rng.standard_normal(g.num_y)
    lam = 2.0 + 1.0j
    u = b1.resolve(op, lam, f)
    res = lam * u - op.apply(u) - f
    rel = (np.sqrt(np.sum(np.abs(res) ** 2 * op.inner_weight))
           / op.weighted_norm(f))
    assert rel <= 1e-10
    # adjoint identity <R f, gv>_W == <f, R* gv>_W
    gv = rng.standard_normal(g.num_y) + 1j * rng.standard_normal(g.num_y)
    lhs = op.weighted_inner(u, gv)
    rhs = op.weighted_inner(f, b1.resolve_adjoint(op, lam, gv))
    assert abs(lhs - rhs) / abs(lhs) < 1e-11


def test_resolve_batched_rhs_shape():
    g = make_grid(64, 1.0, 2.0)
    op = b1.assemble_form(g, "bessel", c=0.5)
    F = np.random.default_rng(0).standard_normal((3, g.num_y))
    U = b1.resolve(op, 1.0, F)
    assert U.shape == (3, g.num_y)
    for k in range(3):
        assert np.allclose(U[k], b1.resolve(op, 1.0, F[k]))


def test_expm_kernel_guards_and_structure():
    g = make_grid(128, 1.0, 2.0)
    op = b1.assemble_form(g, "bessel", c=1.0)
    with pytest.raises(ValueError, match="Re z > 0"):
        b1.expm_kernel(op, -0.1)
    big = b1.assemble_form(make_grid(1024, 1.0, 2.0), "bessel", c=1.0)
    with pytest.raises(ValueError, match="J <= 512"):
        b1.expm_kernel(big, 0.1)
    ker = b1.expm_kernel(op, 0.01)
    P = ker.values
    # symmetric and positive with respect to the weighted measure
    assert np.abs(P - P.T).max() / np.abs(P).max() < 1e-13
    assert P.real.min() > -1e-12
    # Neumann form preserves constants
    ones = np.ones(g.num_y, dtype=complex)
    assert np.abs(ker.apply(ones) - 1.0).max() < 1e-9


def test_weighted_opnorm_at_most_one_on_positive_axis():
    # self-adjoint nonnegative generator: ||lam (lam + B)^(-1)|| = 1 exactly
    g = make_grid(128, 1.0, 2.0)
    op = b1.assemble_form(g, "bessel", c=1.0)
    est = b1.weighted_opnorm_estimate(op, 1.0, np.random.default_rng(0))
    assert 0.9 <= est <= 1.0 + 1e-8


def test_sector_angle_frozen_values():
    assert b1.sector_angle(0.0) == pytest.approx(np.pi / 2.0)
    assert b1.sector_angle(np.sqrt(0.5)) == pytest.approx(np.pi / 4.0)
    with pytest.raises(ValueError):
        b1.sector_angle(1.0)
    with pytest.raises(ValueError):
        b1.sector_angle(-0.1)


def test_sector_resolvent_scan_small():
    g = make_grid(96, 1.0, 2.0)
    op = b1.assemble_form(g, "model_mode", c=1.0, alpha=0.5,
                          mixing_freq=0.3, freq_norm2=1.0)
    rep = b1.sector_resolvent_scan(op, 0.3, np.random.default_rng(1),
                                   n_radii=4, n_angles=4, probes=2, iters=2)
    assert rep["sup"] <= 4.0
    assert rep["estimates"].shape == (4, 4)
    assert rep["angle"] < b1.sector_angle(0.3)


def test_gaussian_envelope_fits_finite():
    g = make_grid(128, 1.0, 2.0)
    t = 0.01
    op = b1.assemble_form(g, "bessel", c=1.0)
    fit = b1.bessel_kernel_fit(b1.expm_kernel(op, t), 1.0, t)
    assert np.isfinite(fit["C"]) and np.isfinite(fit["kappa"])
    assert fit["C"] < 10.0
    opm = b1.assemble_form(g, "model_mode", c=1.0, alpha=0.5,
                           mixing_freq=0.0, freq_norm2=0.0)
    fitm = b1.model_kernel_fit(b1.expm_kernel(opm, t), 1.0, 0.5, t)
    assert np.isfinite(fitm["C"]) and np.isfinite(fitm["kappa"])
    assert fitm["C"] < 10.0


def test_semigroup_domination_small():
    g = make_grid(128, 1.0, 2.0)
    rep = b1.semigroup_domination_check(g, 1.0, 0.5, 0.4, 0.2, 0.05)
    assert rep["field_excess"] <= 1e-10
    assert rep["kernel_excess"] <= 1e-3


def test_equivalence_transform_check_converges():
    rep = b1.equivalence_transform_check(0.5, 1.0, 0.3, 1.0,
                                         levels=(128, 256))
    assert rep["order"] > 0.9
    assert rep["errors"][-1] < rep["errors"][0]


def test_two_route_resolvent_agreement():
    g = make_grid(192, 1.0, 2.0)
    f = np.exp(-((g.y_nodes - 0.4) / 0.1) ** 2).astype(complex)
    for alpha in (-0.5, 0.5):
        u1, u2 = b1.two_route_resolvent(g, alpha, 1.0, 0.3, 1.0,
                                        1.0 + 0.5j, f)
        w = b1.node_weights(g.y_nodes, 1.0 - alpha)
        rel = (np.sqrt(np.sum(np.abs(u1 - u2) ** 2 * w))
               / np.sqrt(np.sum(np.abs(u1) ** 2 * w)))
        assert rel < 1e-8


def test_interpolation_inequality_stable():
    rep = b1.interpolation_inequality_fit(0.5, 1.0, 2.0, 0.5,
                                          levels=(96, 192))
    c1, c2 = rep["constants"]
    assert 0.0 < c2 < 5.0
    assert abs(c2 - c1) / c1 < 0.2


def test_uniform_frequency_bound_scan_bounded():
    rep = b1.uniform_frequency_bound_scan(0.5, 1.0, [0.3], 2.0, 0.5, J=128,
                                          exponents=range(-3, 10))
    assert rep["max"] < 2.0              # stays bounded as |xi| grows
    cs = rep["constants"]
    # saturates toward its limit instead of blowing up with |xi|
    assert cs[-1] < 1.1 * cs[-2]
