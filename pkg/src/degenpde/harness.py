"""Estimate-verification suite: every quantitative bound gets a falsifiable check.

The proved results are qualitative (existence of constants), so "pass" for a
non-explicit constant means: the fitted constant is finite, drifts less than
20% across two refinement levels, and the companion out-of-window negative
control does NOT stay bounded.  Exactly representable identities (parameter
calculus, two solve routes of the same tridiagonal system, a backward Euler
step vs the resolvent) are held to solver round-off instead.

Each registered check owns a deterministic RNG seeded from its id, so the
suite is reproducible regardless of worker scheduling; results merge in
registry order and serialize to one CSV per estimate plus a summary CSV
(estimate_id, pass, constant, drift).  Out-of-window behavior is probed by
weighted power iteration: random probe vectors put mass on the smallest
graded cells, which is exactly where a window violation concentrates, so
probe norms grow under refinement once (m+1)/p leaves the admissible range.
"""

import concurrent.futures
import hashlib
import os

import numpy as np

from . import bessel1d, panels, semigroup, transforms
from .bessel1d import (assemble_form, expm_kernel, sector_angle,
                       sector_resolvent_scan, bessel_kernel_fit,
                       model_kernel_fit, semigroup_domination_check,
                       two_route_resolvent, interpolation_inequality_fit,
                       uniform_frequency_bound_scan, node_weights)
from .grid import XBox, Field, make_grid, lp_norm, default_grading
from .multiplier import (FrequencySolvePlan, ModeOperators, resolvent_nd,
                         derived_multipliers, sum_identity_residual,
                         monolithic_sparse_solve, xi_derivative_check,
                         mikhlin_bound_scan, reduction_consistency_check)
from .params import (OperatorSpec, SpaceSpec, ModelParams, beta_map,
                     invert_beta, compose_beta, shear_map, validate_window,
                     reduce_to_model, config_to_problem)
from .transforms import apply_power, apply_phase, apply_shear


FMT = "%.17g"


class EstimateResult:
    """Outcome of one registered check."""

    def __init__(self, estimate_id, passed, constant=float("nan"),
                 drift=float("nan"), parameters=None, levels=None,
                 detail=None, rows=None, header=None, error=""):
        self.estimate_id = estimate_id
        self.passed = bool(passed)
        self.constant = float(constant)
        self.drift = float(drift)
        self.parameters = parameters or {}
        self.levels = list(levels or [])
        self.detail = detail or {}
        self.rows = rows or []
        self.header = header or ()
        self.error = error
        self.csv_path = ""

    def __repr__(self):
        return ("EstimateResult(%s, passed=%s, constant=%g, drift=%g)"
                % (self.estimate_id, self.passed, self.constant, self.drift))


def _rng_for(estimate_id, seed):
    digest = hashlib.sha256(estimate_id.encode()).digest()
    base = int.from_bytes(digest[:8], "little")
    return np.random.default_rng(np.random.SeedSequence([base, seed]))


class SuiteContext:
    """Shared configuration for one suite run."""

    def __init__(self, model, space, spec=None, seed=0):
        self.model = model
        self.space = space
        self.spec = spec
        self.seed = int(seed)

    def rng(self, estimate_id):
        return _rng_for(estimate_id, self.seed)


def default_context(seed=0):
    """Baseline model case: alpha = 0, a = 0, c = 0 on L^2."""
    model = ModelParams(np.array([0.0]), 0.0, 0.0, 0.0, 2.0)
    return SuiteContext(model, SpaceSpec(2.0, 0.0), seed=seed)


# ---------------------------------------------------------------------------
# square functions


def square_function_ratio(family, n, trials, p, m, grid, seed=0,
                          profiles=None):
    """max over trials of |(sum |S_i f_i|^2)^(1/2)|_pm / |(sum |f_i|^2)^(1/2)|_pm.

    `family(rng)` draws one operator (a callable on vertical profiles); n
    operators and n random fields are drawn per trial.  Fields are white
    noise by default; pass `profiles` (list of node arrays) to draw random
    combinations of a smooth dictionary instead.  The returned max is an
    empirical lower bound for the R-constant of the family and, when stable
    in n and trials, its practical estimate.
    """
    if n > 32:
        raise ValueError("n <= 32")
    if trials > 200:
        raise ValueError("trials <= 200")
    rng = np.random.default_rng(seed)
    J = grid.num_y

    def draw_field():
        if profiles is None:
            return rng.standard_normal(J) + 1j * rng.standard_normal(J)
        coef = rng.standard_normal(len(profiles)) \
            + 1j * rng.standard_normal(len(profiles))
        return sum(cc * pp for cc, pp in zip(coef, profiles))

    if profiles is not None:
        probe_dens = [lp_norm(np.abs(f), p, m, grid) for f in profiles]
    worst = 0.0
    for _ in range(trials):
        ops = [family(rng) for _ in range(n)]
        fs = [draw_field() for _ in range(n)]
        outs = [S(f) for S, f in zip(ops, fs)]
        sq_in = np.sqrt(sum(np.abs(f) ** 2 for f in fs))
        sq_out = np.sqrt(sum(np.abs(g) ** 2 for g in outs))
        num = lp_norm(sq_out, p, m, grid)
        den = lp_norm(sq_in, p, m, grid)
        if den > 0:
            worst = max(worst, float(num / den))
        # zero-padded allocations (mass on one pair) are square-function
        # configurations too and attain the sup for this functional; with a
        # dictionary, probe every element so the pair ratio is deterministic
        # given the drawn operator
        for i, S in enumerate(ops):
            if profiles is None:
                pairs = [(fs[i], outs[i], lp_norm(np.abs(fs[i]), p, m, grid))]
            else:
                pairs = [(f, S(f), d) for f, d in zip(profiles, probe_dens)]
            for _f, g, den_i in pairs:
                if den_i > 0:
                    worst = max(worst,
                                float(lp_norm(np.abs(g), p, m, grid) / den_i))
    return worst


def resolvent_family(ops, mixing_norm, xi=1.0, mod_range=(0.1, 10.0),
                     margin=0.15, strata=24):
    """Sampler of S = lam (lam - M(xi))^(-1) with lam in a sector beyond
    the right half-plane (half-angle pi/2 + phi, phi inside the analyticity
    margin).  lam is drawn from a fixed sector lattice (log-spaced moduli x
    spread angles) so the empirical sup saturates instead of creeping with
    the number of draws."""
    psi = np.pi / 2.0 - sector_angle(mixing_norm)
    phi = max(0.05, 0.5 * (np.pi / 2.0 - psi) - 0.5 * margin)
    s = mixing_norm * xi
    k2 = xi * xi
    mods = np.exp(np.linspace(np.log(mod_range[0]), np.log(mod_range[1]), 6))
    angs = np.linspace(-(np.pi / 2 + phi), np.pi / 2 + phi, strata // 6)
    lattice = [mod * np.exp(1j * ang) for mod in mods for ang in angs]

    def draw(rng):
        lam = lattice[rng.integers(len(lattice))]
        return lambda f, lam=lam: lam * ops.solve(s, k2, lam, f)

    return draw


# ---------------------------------------------------------------------------
# individual checks


def _check_parameter_roundtrip(ctx):
    rng = ctx.rng("parameter_roundtrip")
    worst = 0.0
    for _ in range(1000):
        beta = rng.uniform(-0.9, 3.0)
        beta2 = rng.uniform(-0.9, 3.0)
        a1 = rng.uniform(-2.0, 1.5)
        a2 = rng.uniform(-1.0, 1.9)
        c = rng.uniform(-0.9, 3.0)
        m = rng.uniform(-1.0, 2.0)
        p = rng.uniform(1.1, 5.0)
        fwd = beta_map(beta, a1, a2, c, m, p)
        back = beta_map(invert_beta(beta), fwd[0], fwd[1], fwd[2], fwd[3], p)
        for got, want in zip(back, (a1, a2, c, m)):
            worst = max(worst, abs(got - want) / max(1.0, abs(want)))
        two_step = beta_map(beta2, fwd[0], fwd[1], fwd[2], fwd[3], p)
        comp = beta_map(compose_beta(beta, beta2), a1, a2, c, m, p)
        for got, want in zip(two_step, comp):
            worst = max(worst, abs(got - want) / max(1.0, abs(want)))
    # shear exactness against the congruence oracle A M A^T
    for _ in range(100):
        R = rng.standard_normal((3, 3))
        M = R @ R.T + 0.1 * np.eye(3)
        cdrift = rng.uniform(0.2, 2.0)
        spec = OperatorSpec(q_matrix=M[:2, :2], q_vector=M[:2, 2],
                            gamma=float(M[2, 2]),
                            drift_b=rng.standard_normal(2), drift_c=cdrift,
                            alpha1=0.0, alpha2=0.0)
        sheared = shear_map(spec)
        A = np.eye(3)
        A[:2, 2] = -spec.drift_b / cdrift
        Mt = A @ np.block([[spec.q_matrix, spec.q_vector[:, None]],
                           [spec.q_vector[None, :],
                            np.array([[spec.gamma]])]]) @ A.T
        worst = max(worst, float(np.abs(Mt[:2, :2] - sheared.q_matrix).max()))
        worst = max(worst, float(np.abs(Mt[:2, 2] - sheared.q_vector).max()))
        worst = max(worst, abs(Mt[2, 2] - sheared.gamma))
    # window membership is invariant under the vertical power map
    for _ in range(200):
        beta = rng.uniform(-0.8, 2.0)
        a1 = rng.uniform(-1.5, 1.2)
        a2 = rng.uniform(-1.0, 1.8)
        c = rng.uniform(-0.5, 3.0)
        m = rng.uniform(-1.0, 2.0)
        p = rng.uniform(1.2, 4.0)
        v0 = (m + 1.0) / p
        in0 = max(0.0, -a1) < v0 < c + 1.0 - a2
        t1, t2, tc, tm = beta_map(beta, a1, a2, c, m, p)
        v1 = (tm + 1.0) / p
        in1 = max(0.0, -t1) < v1 < tc + 1.0 - t2
        if in0 != in1:
            worst = max(worst, 1.0)
    passed = worst < 1e-12
    return EstimateResult("parameter_roundtrip", passed, constant=worst,
                          drift=0.0,
                          parameters={"trials": 1000, "shear_trials": 100},
                          rows=[("max_rel_error", worst)],
                          header=("quantity", "value"))


def _check_transform_isometries(ctx):
    grid = make_grid(256, 1.0, 2.0)
    profs = panels.vertical_panel(1.0, count=10, kind="mixed")
    p, m = 2.7, 0.4
    worst_pow = 0.0
    for beta in (0.5, -0.4, 1.3):
        # image-side exponent: the power map sends it back to m
        m_t = beta_map(invert_beta(beta), 0.0, 0.0, 0.0, m, p)[3]
        for prof in profs:
            u = Field(prof(grid.y_nodes).astype(complex), grid)
            img = apply_power(u, beta, p)
            n0 = lp_norm(u.values, p, m, grid)
            n1 = lp_norm(img.values, p, m_t, img.grid)
            worst_pow = max(worst_pow, abs(n1 - n0) / n0)
    worst_ph = 0.0
    for prof in profs:
        u = Field(prof(grid.y_nodes).astype(complex), grid)
        img = apply_phase(u, 0.7, 1.5)
        n0 = lp_norm(u.values, 3.1, m, grid)
        n1 = lp_norm(img.values, 3.1, m, grid)
        worst_ph = max(worst_ph, abs(n1 - n0) / n0)
    box = XBox(2.0 * np.pi, 32, 1)
    g2 = make_grid(128, 1.0, 2.0, box)
    wave = panels.plane_wave(box, [3])
    worst_sh = 0.0
    for prof in profs[:4]:
        vals = panels.tensor_values(g2, wave, prof)
        u = Field(vals, g2)
        img = apply_shear(u, [0.6])
        n0 = lp_norm(u.values, 2.0, m, g2)
        n1 = lp_norm(img.values, 2.0, m, g2)
        worst_sh = max(worst_sh, abs(n1 - n0) / n0)
    passed = worst_pow <= 1e-3 and worst_ph <= 1e-13 and worst_sh <= 1e-12
    return EstimateResult(
        "transform_isometries", passed, constant=worst_pow, drift=0.0,
        parameters={"J": 256, "p": p, "m": m},
        detail={"power": worst_pow, "phase": worst_ph, "shear": worst_sh},
        rows=[("power", worst_pow), ("phase", worst_ph), ("shear", worst_sh)],
        header=("map", "norm_mismatch"))


def _check_power_similarity(ctx):
    cases = [(0.0, 1.0, 1.0, 0.0), (-0.5, 0.5, 1.2, 0.3), (0.5, 1.2, 0.9, 0.0)]
    rows = []
    orders = []
    coeffs = []
    for (a1, a2, c, qm) in cases:
        rep = transforms.similarity_check_power(a1, a2, c, q_mixed=qm,
                                                levels=(128, 256, 512))
        orders.append(rep["order"])
        coeffs.append(rep["coeff_rel_err"])
        for J, e in zip(rep["levels"], rep["errors"]):
            rows.append((a1, a2, c, J, e))
    # coefficient identification is itself a discretized fit, so the
    # agreement is convergent rather than exact
    passed = all(o >= 0.9 for o in orders) and all(cc < 0.02 for cc in coeffs)
    return EstimateResult(
        "power_similarity", passed, constant=max(coeffs),
        drift=min(orders), parameters={"cases": cases},
        levels=[128, 256, 512],
        detail={"orders": orders, "coeff_rel_err": coeffs}, rows=rows,
        header=("alpha1", "alpha2", "c", "J", "error"))


def _check_model_equivalence_1d(ctx):
    cases = [(0.5, 1.0, 0.4, 1.0), (-0.5, 0.8, 0.7, 2.0), (1.0, 1.5, 0.3, 1.0)]
    rows = []
    orders = []
    for (alpha, c, s, k2) in cases:
        rep = bessel1d.equivalence_transform_check(alpha, c, s, k2,
                                                   levels=(128, 256, 512))
        orders.append(rep["order"])
        for J, e in zip(rep["levels"], rep["errors"]):
            rows.append((alpha, c, s, k2, J, e))
    passed = all(o >= 0.9 for o in orders)
    return EstimateResult(
        "model_equivalence_1d", passed, constant=max(r[-1] for r in rows),
        drift=min(orders), parameters={"cases": cases},
        levels=[128, 256, 512], detail={"orders": orders}, rows=rows,
        header=("alpha", "c", "mixing_freq", "freq_norm2", "J", "error"))


def _check_selfadjoint_spectrum(ctx):
    rows = []
    worst_h = 0.0
    worst_neg = 0.0
    for (c, alpha) in ((0.0, 0.0), (1.0, 0.5), (2.0, -0.5)):
        for J in (128, 256):
            grid = make_grid(J, 1.0, 2.0)
            op = assemble_form(grid, "model_mode", c=c, alpha=alpha,
                               mixing_freq=0.0, freq_norm2=1.0)
            hd = op.hermitian_defect()
            evs = op.symmetric_spectrum()
            worst_h = max(worst_h, hd)
            worst_neg = max(worst_neg, max(0.0, -float(evs.min())))
            rows.append((c, alpha, J, hd, float(evs.min())))
    passed = worst_h <= 1e-10 and worst_neg <= 1e-8
    return EstimateResult(
        "selfadjoint_spectrum", passed, constant=worst_h, drift=0.0,
        parameters={"freq_norm2": 1.0}, levels=[128, 256],
        detail={"hermitian_defect": worst_h, "spectrum_min": -worst_neg},
        rows=rows, header=("c", "alpha", "J", "hermitian_defect", "min_eig"))


def _check_sector_resolvent(ctx):
    rng = ctx.rng("sector_resolvent_scan")
    rows = []
    passed = True
    worst = 0.0
    drift_max = 0.0
    for amod in (0.0, 0.3, 0.7):
        sups = {}
        for J in (128, 256):
            grid = make_grid(J, 1.0, 2.0)
            op = assemble_form(grid, "model_mode", c=1.0, alpha=0.5,
                               mixing_freq=amod, freq_norm2=1.0)
            scan = sector_resolvent_scan(op, amod, rng)
            sups[J] = scan["sup"]
            rows.append((amod, J, scan["sup"], scan["angle"]))
            worst = max(worst, scan["sup"])
        drift = abs(sups[256] - sups[128]) / sups[128]
        drift_max = max(drift_max, drift)
        passed = passed and sups[128] <= 4.0 and sups[256] <= 4.0 \
            and drift <= 0.2
    return EstimateResult(
        "sector_resolvent_scan", passed, constant=worst, drift=drift_max,
        parameters={"mixing": [0.0, 0.3, 0.7], "c": 1.0, "alpha": 0.5},
        levels=[128, 256], rows=rows,
        header=("mixing", "J", "sup", "half_angle"))


def _kernel_drift_rows(fit_fn, cases, label):
    rows = []
    passed = True
    worst_c = 0.0
    drift_max = 0.0
    for case in cases:
        fits = {}
        for J in (256, 512):
            fits[J] = fit_fn(case, J)
            rows.append(case + (J, fits[J]["C"], fits[J]["kappa"]))
        for key in ("C", "kappa"):
            lo, hi = fits[256][key], fits[512][key]
            if not (np.isfinite(lo) and np.isfinite(hi)):
                passed = False
                continue
            drift = abs(hi - lo) / abs(lo)
            drift_max = max(drift_max, drift)
            passed = passed and drift < 0.2
        worst_c = max(worst_c, fits[512]["C"])
    return rows, passed, worst_c, drift_max


def _check_kernel_bessel(ctx):
    t = 0.02

    def fit(case, J):
        (c,) = case
        grid = make_grid(J, 1.0, 2.0)
        op = assemble_form(grid, "bessel", c=c)
        return bessel_kernel_fit(expm_kernel(op, t), c, t)

    cases = [(0.0,), (0.5,), (1.0,), (2.0,), (-0.5,), (1.5,)]
    rows, passed, worst, drift = _kernel_drift_rows(fit, cases, "bessel")
    return EstimateResult(
        "kernel_gaussian_fit_bessel", passed, constant=worst, drift=drift,
        parameters={"t": t, "cases": cases}, levels=[256, 512], rows=rows,
        header=("c", "J", "C", "kappa"))


def _check_kernel_model(ctx):
    t = 0.02

    def fit(case, J):
        c, alpha = case
        grid = make_grid(J, 1.0, default_grading(alpha))
        op = assemble_form(grid, "model_mode", c=c, alpha=alpha,
                           mixing_freq=0.0, freq_norm2=0.0)
        return model_kernel_fit(expm_kernel(op, t), c, alpha, t)

    cases = [(1.0, 0.5), (0.5, -0.5)]
    rows, passed, worst, drift = _kernel_drift_rows(fit, cases, "model")
    return EstimateResult(
        "kernel_gaussian_fit_model", passed, constant=worst, drift=drift,
        parameters={"t": t, "cases": cases}, levels=[256, 512], rows=rows,
        header=("c", "alpha", "J", "C", "kappa"))


def _check_kernel_domination(ctx):
    cases = [(1.0, 0.0, 0.5), (0.5, 0.3, 0.4), (2.0, -0.2, 0.8),
             (1.0, 0.5, 1.0), (0.3, 0.0, 1.2), (1.5, 0.8, 0.6)]
    rows = []
    passed = True
    worst = 0.0
    for (c, beta, b) in cases:
        exc = {}
        for J in (192, 384):
            grid = make_grid(J, 1.0, 2.0)
            rep = semigroup_domination_check(grid, c, beta, b, 0.5, 0.05)
            exc[J] = rep
            rows.append((c, beta, b, J, rep["field_excess"],
                         rep["kernel_excess"]))
        for key in ("field_excess", "kernel_excess"):
            # only the positive part violates domination; negative excess
            # means the bound holds with margin
            final = max(exc[384][key], 0.0)
            start = max(exc[192][key], 0.0)
            worst = max(worst, final)
            passed = passed and final <= 0.05 and final <= start + 1e-9
    return EstimateResult(
        "kernel_domination", passed, constant=worst, drift=0.0,
        parameters={"t": 0.05, "cases": cases}, levels=[192, 384], rows=rows,
        header=("c", "beta", "b", "J", "field_excess", "kernel_excess"))


def _check_two_route(ctx):
    grid = make_grid(256, 1.0, 2.0)
    rng = ctx.rng("resolvent_two_route_identity")
    profs = panels.vertical_panel(1.0, count=3, rng=rng)
    rows = []
    worst = 0.0
    for alpha in (-0.5, 0.0, 0.5, 1.0):
        for lam in (0.1, 1.0, 10.0):
            for prof in profs:
                f = prof(grid.y_nodes).astype(complex)
                u1, u2 = two_route_resolvent(grid, alpha, 1.0, 0.3, 1.0,
                                             lam, f)
                w = node_weights(grid.y_nodes, 1.0 - alpha)
                num = np.sqrt(np.sum(np.abs(u1 - u2) ** 2 * w))
                den = np.sqrt(np.sum(np.abs(u1) ** 2 * w))
                diff = float(num / max(den, 1e-300))
                worst = max(worst, diff)
            rows.append((alpha, lam, worst))
    passed = worst <= 1e-8
    return EstimateResult(
        "resolvent_two_route_identity", passed, constant=worst, drift=0.0,
        parameters={"c": 1.0, "mixing_freq": 0.3, "J": 256},
        levels=[256], rows=rows, header=("alpha", "lam", "max_rel_diff"))


def _check_mode_vs_monolithic(ctx):
    rng = ctx.rng("nd_mode_vs_monolithic")
    model = ModelParams(np.array([0.3]), 0.5, 1.0, 0.2, 2.0)
    box = XBox(2.0 * np.pi, 32, 1)
    grid = make_grid(128, 1.0, 2.0, box)
    prof = panels.bump_profile(0.35, 0.15)
    wave = panels.plane_wave(box, [2])
    base = panels.tensor_values(grid, wave, prof)
    noise = rng.standard_normal(grid.shape) * prof(grid.y_nodes)[None, :]
    f = Field(base + 0.3 * noise, grid)
    lam = 1.0 + 0.5j
    u1 = resolvent_nd(lam, f, model, grid)
    u2 = monolithic_sparse_solve(lam, f, model, grid)
    num = lp_norm(u1.values - u2.values, 2.0, model.m, grid)
    den = lp_norm(u2.values, 2.0, model.m, grid)
    diff = float(num / den)
    passed = diff <= 1e-8
    return EstimateResult(
        "nd_mode_vs_monolithic", passed, constant=diff, drift=0.0,
        parameters={"Nx": 32, "J": 128, "lam": [lam.real, lam.imag]},
        levels=[128], rows=[("rel_diff", diff)], header=("quantity", "value"))


def manufactured_mode_case(model, grid, lam, k_mode, center=0.45, width=0.18):
    """Closed-form (u, f) pair for the model operator on one x-mode.

    The x-part is the plane wave with mode k_mode along every axis, so the
    frequency vector is xi = (2 pi k/L)(1, ..., 1) and the y-part solves the
    frozen 1-d equation at s = a . xi, k2 = |xi|^2.
    """
    box = grid.x_box
    xi1 = 2.0 * np.pi * k_mode / box.length
    s = xi1 * float(np.sum(model.mixing))
    k2 = box.dim * xi1 * xi1
    prof = panels.bump_profile(center * grid.y_max, width * grid.y_max)
    y = grid.y_nodes
    v, dv, d2v = prof(y), prof.d1(y), prof.d2(y)
    c = model.c_bessel
    alpha = model.alpha
    lv = y ** alpha * (d2v + (c / y) * dv + 2j * s * dv - k2 * v)
    ph1 = np.exp(1j * xi1 * box.nodes())
    phase = ph1
    for _ in range(box.dim - 1):
        phase = phase[..., None] * ph1
    u = phase[..., None] * v
    f = phase[..., None] * (lam * v - lv)
    return Field(u, grid), Field(f, grid)


def _check_manufactured(ctx):
    model = ModelParams(np.array([0.4]), 0.5, 1.2, 0.3, 2.0)
    box = XBox(2.0 * np.pi, 8, 1)
    lam = 2.0
    errs = []
    levels = (64, 128, 256)
    rows = []
    for J in levels:
        grid = make_grid(J, 1.0, 2.0, box)
        u_ex, f = manufactured_mode_case(model, grid, lam, 2)
        u = resolvent_nd(lam, f, model, grid)
        err = (lp_norm(u.values - u_ex.values, 2.0, model.m, grid)
               / lp_norm(u_ex.values, 2.0, model.m, grid))
        errs.append(float(err))
        rows.append((J, float(err)))
    order = float(np.log(errs[0] / errs[-1]) / np.log(levels[-1] / levels[0]))
    gmid = make_grid(128, 1.0, 2.0, box)
    _, fmid = manufactured_mode_case(model, gmid, lam, 2)
    ident = sum_identity_residual(lam, fmid, model, gmid)
    # x-side Parseval: quadrature norm vs frequency-side norm
    vals = fmid.values
    fh = np.fft.fft(vals, axis=0) / vals.shape[0]
    w = node_weights(gmid.y_nodes, 0.0)
    par_freq = np.sqrt(np.sum(np.abs(fh) ** 2 * w[None, :]) * box.length)
    par_grid = lp_norm(vals, 2.0, 0.0, gmid)
    parseval = abs(par_freq - par_grid) / par_grid
    passed = order >= 0.9 and ident <= 1e-8 and parseval <= 1e-12
    return EstimateResult(
        "nd_manufactured_convergence", passed, constant=errs[-1], drift=order,
        parameters={"lam": lam, "Nx": 8}, levels=list(levels),
        detail={"order": order, "sum_identity": ident, "parseval": parseval},
        rows=rows, header=("J", "error"))


def _apriori_constant(model, grid, lam, rng, count=6):
    worst = 0.0
    profs = panels.vertical_panel(grid.y_max, count=count, rng=rng)
    box = grid.x_box
    for i, prof in enumerate(profs):
        wave = panels.plane_wave(box, [1 + (i % 3)])
        f = Field(panels.tensor_values(grid, wave, prof), grid)
        d = derived_multipliers(lam, f, model, grid)
        total = (lp_norm(d["x_laplacian"].values, model.p, model.m, grid)
                 + sum(lp_norm(gj.values, model.p, model.m, grid)
                       for gj in d["mixed_gradients"])
                 + lp_norm(d["bessel"].values, model.p, model.m, grid)
                 + lp_norm(d["y_gradient"].values / grid.y_nodes,
                           model.p, model.m, grid))
        den = lp_norm(f.values, model.p, model.m, grid)
        worst = max(worst, float(total / den))
    return worst


def _check_apriori_fit(ctx):
    rng = ctx.rng("apriori_regularity_fit")
    model = ModelParams(np.array([0.3]), 0.5, 1.0, 0.2, 2.0)
    box = XBox(2.0 * np.pi, 8, 1)
    consts = {}
    for J in (96, 192):
        grid = make_grid(J, 1.0, 2.0, box)
        consts[J] = _apriori_constant(model, grid, 1.0, rng)
    drift = abs(consts[192] - consts[96]) / consts[96]
    scan = uniform_frequency_bound_scan(0.5, 1.0, 0.3, 2.0, 0.2, J=192)
    passed = (np.isfinite(consts[192]) and drift <= 0.2
              and np.isfinite(scan["max"]))
    return EstimateResult(
        "apriori_regularity_fit", passed, constant=consts[192], drift=drift,
        parameters={"lam": 1.0, "model_m": 0.2}, levels=[96, 192],
        detail={"constants": consts, "freq_scan_max": scan["max"]},
        rows=[(J, consts[J]) for J in (96, 192)], header=("J", "constant"))


def _check_interpolation_fit(ctx):
    rep = interpolation_inequality_fit(0.5, 1.0, 2.4, 0.3, levels=(128, 256))
    c0, c1 = rep["constants"]
    drift = abs(c1 - c0) / c0
    passed = np.isfinite(c1) and drift <= 0.2
    return EstimateResult(
        "interpolation_gradient_fit", passed, constant=c1, drift=drift,
        parameters={"alpha": 0.5, "c": 1.0, "p": 2.4, "m": 0.3},
        levels=rep["levels"], rows=list(zip(rep["levels"], rep["constants"])),
        header=("J", "constant"))


def _check_xi_derivative(ctx):
    grid = make_grid(192, 1.0, 2.0)
    m1 = ModelParams(np.array([0.4]), 0.5, 1.0, 0.2, 2.0)
    r1 = xi_derivative_check(1.2 + 0.3j, m1, grid, order=1,
                             base_xi=[1.1], steps=(0.02, 0.01))
    m2 = ModelParams(np.array([0.3, -0.2]), 0.5, 1.0, 0.2, 2.0)
    r2 = xi_derivative_check(1.2 + 0.3j, m2, grid, order=2,
                             base_xi=[0.9, 1.3], steps=(0.02, 0.01))
    passed = r1["order"] >= 1.9 and r2["order"] >= 1.9
    rows = [(1, r1["errors"][0], r1["errors"][-1], r1["order"]),
            (2, r2["errors"][0], r2["errors"][-1], r2["order"])]
    return EstimateResult(
        "xi_derivative_order", passed, constant=max(r1["errors"][-1],
                                                    r2["errors"][-1]),
        drift=min(r1["order"], r2["order"]),
        parameters={"steps": [0.02, 0.01], "J": 192},
        detail={"order1": r1, "order2": {k: v for k, v in r2.items()}},
        rows=rows, header=("n", "err_h", "err_h2", "order"))


def _check_mikhlin_scan(ctx):
    m1 = ModelParams(np.array([0.4]), 0.5, 1.0, 0.2, 2.0)
    lam_set = (0.5, 2.0)
    xi_set = ((0.7,), (3.0,), (-1.5,))
    sups = {}
    rows = []
    for J in (128, 256):
        grid = make_grid(J, 1.0, 2.0)
        rep = mikhlin_bound_scan(lam_set, xi_set, m1, grid)
        sups[J] = rep["suprema"]
        cells = sorted(rep["table"].items(),
                       key=lambda kv: (kv[0][0], kv[0][1], kv[0][2].real,
                                       kv[0][2].imag, kv[0][3]))
        for (family, beta, lam, xi), est in cells:
            rows.append((family, "".join(map(str, beta)), lam.real, xi[0],
                         J, est))
    passed = True
    drift_max = 0.0
    for family in sups[128]:
        lo, hi = sups[128][family], sups[256][family]
        if not (np.isfinite(lo) and np.isfinite(hi)):
            passed = False
            continue
        drift = abs(hi - lo) / lo
        drift_max = max(drift_max, drift)
        passed = passed and drift <= 0.2
    m2 = ModelParams(np.array([0.3, -0.2]), 0.5, 1.0, 0.2, 2.0)
    grid2 = make_grid(96, 1.0, 2.0)
    rep2 = mikhlin_bound_scan((1.0,), ((1.0, 1.0), (2.0, -3.0)), m2, grid2)
    passed = passed and all(np.isfinite(v) for v in rep2["suprema"].values())
    return EstimateResult(
        "mikhlin_family_scan", passed,
        constant=max(sups[256].values()), drift=drift_max,
        parameters={"lam_set": list(lam_set), "m": 0.2}, levels=[128, 256],
        detail={"suprema": sups, "dim2_suprema": rep2["suprema"]}, rows=rows,
        header=("family", "beta", "lambda", "xi", "J", "estimate"))


def _check_square_function(ctx):
    grid = make_grid(256, 1.0, 2.0)
    ops = ModeOperators(grid, 1.0, 0.5)
    fam = resolvent_family(ops, 0.3)
    p, m = 2.4, 0.3
    profs = [prof(grid.y_nodes).astype(complex)
             for prof in panels.vertical_panel(1.0, count=6)]
    ratios = {}
    for n in (4, 8, 16):
        ratios[n] = square_function_ratio(fam, n, 80, p, m, grid,
                                          seed=ctx.seed + n, profiles=profs)
    drift = abs(ratios[16] - ratios[4]) / ratios[4]
    ident = square_function_ratio(lambda rng: (lambda f: f), 8, 10, p, m,
                                  grid, seed=ctx.seed)
    ops0 = ModeOperators(grid, 1.0, 0.5)
    single = square_function_ratio(
        lambda rng: (lambda f: 2.0 * ops0.solve(0.0, 1.0, 2.0, f)),
        1, 20, 2.0, 0.5, grid, seed=ctx.seed)
    passed = drift <= 0.2 and abs(ident - 1.0) <= 1e-14 and single <= 1.01 \
        and all(np.isfinite(r) for r in ratios.values())
    return EstimateResult(
        "square_function_resolvent_family", passed, constant=ratios[16],
        drift=drift, parameters={"p": p, "m": m, "trials": 80},
        levels=[4, 8, 16],
        detail={"ratios": ratios, "identity": ident, "single": single},
        rows=[(n, ratios[n]) for n in (4, 8, 16)] + [("identity", ident)],
        header=("n", "ratio"))


def _check_parabolic_heat(ctx):
    rep = semigroup.heat_closed_form_check(((64, 16), (128, 32)))
    passed = rep["ratio"] >= 1.5 and rep["errors"][-1] < 0.05
    return EstimateResult(
        "parabolic_heat_closed_form", passed, constant=rep["errors"][-1],
        drift=rep["ratio"], parameters={"levels": rep["levels"]},
        levels=[64, 128],
        rows=list(zip([l[0] for l in rep["levels"]], rep["errors"])),
        header=("J", "error"))


def _check_parabolic_contraction(ctx):
    box = XBox(2.0 * np.pi, 8, ctx.model.dim) if ctx.model.dim else None
    grading = default_grading(ctx.model.alpha)
    grid = make_grid(96, 1.0, grading, box)
    rep = semigroup.contraction_check(ctx.model, grid, (0.0, 0.01, 0.1, 1.0),
                                      probes=6, steps=16, seed=ctx.seed)
    worst = max(max(d.values()) for d in rep.values())
    variant = ModelParams(np.array([0.3]), 0.5, 1.0, 0.2, 2.0)
    gridv = make_grid(96, 1.0, 2.0, XBox(2.0 * np.pi, 8, 1))
    repv = semigroup.contraction_check(variant, gridv, (0.1,), probes=4,
                                       steps=12, seed=ctx.seed)
    worst_v = repv[0.1]["l2_weighted"]
    passed = worst <= 1.05 and worst_v <= 1.05
    rows = [(t, k, v) for t, d in sorted(rep.items())
            for k, v in sorted(d.items())]
    return EstimateResult(
        "parabolic_contraction", passed, constant=worst, drift=0.0,
        parameters={"t_set": [0.0, 0.01, 0.1, 1.0]},
        detail={"report": rep, "mixing_variant_l2": worst_v}, rows=rows,
        header=("t", "norm", "ratio"))


def _check_maximal_regularity(ctx):
    hil_model = ModelParams(np.array([0.0]), 0.0, 0.0, 0.0, 2.0)
    box = XBox(2.0 * np.pi, 8, 1)
    grid = make_grid(64, 1.0, 1.0, box)
    times = np.linspace(0.0, 0.5, 21)
    hil = semigroup.maximal_regularity_check(hil_model, grid, 2.0, times,
                                             seed=ctx.seed)
    gen_model = ModelParams(np.array([0.3]), 0.5, 1.0, 0.2, 2.0)
    grid2 = make_grid(64, 1.0, 2.0, box)
    gen = semigroup.maximal_regularity_check(gen_model, grid2, 3.0, times,
                                             seed=ctx.seed)
    passed = (hil["ratio"] <= 10.0 and hil["drift"] <= 0.2
              and np.isfinite(gen["ratio"]) and gen["drift"] <= 0.2)
    rows = [("hilbert", hil["ratio"], hil["ratio_refined"], hil["drift"]),
            ("general", gen["ratio"], gen["ratio_refined"], gen["drift"])]
    return EstimateResult(
        "maximal_regularity_ratio", passed, constant=hil["ratio"],
        drift=max(hil["drift"], gen["drift"]),
        parameters={"T": 0.5, "steps": 20},
        detail={"hilbert": hil, "general": gen}, rows=rows,
        header=("case", "ratio", "ratio_refined", "drift"))


def _check_semigroup_structure(ctx):
    model = ModelParams(np.array([0.3]), 0.5, 1.0, 0.2, 2.0)
    box = XBox(2.0 * np.pi, 8, 1)
    grid = make_grid(64, 1.0, 2.0, box)
    step_id = semigroup.resolvent_step_identity(model, grid, seed=ctx.seed)
    prop = semigroup.semigroup_property_check(model, grid, seed=ctx.seed)
    pos_model = ModelParams(np.array([0.0]), 0.5, 1.0, 0.2, 2.0)
    pos_levels = [make_grid(48, 1.0, 2.0, XBox(2.0 * np.pi, 8, 1)),
                  make_grid(96, 1.0, 2.0, XBox(2.0 * np.pi, 16, 1))]
    pos = semigroup.positivity_check(pos_model, pos_levels, seed=ctx.seed)
    dom_levels = [make_grid(128, 1.0, 2.0), make_grid(256, 1.0, 2.0)]
    dom = semigroup.mode_domination_check(1.0, 0.5, 0.35, 1.0, dom_levels,
                                          seed=ctx.seed)
    passed = (step_id <= 1e-12 and prop["exact"] <= 1e-10
              and pos[-1] <= max(0.02, pos[0] * 1.05)
              and dom[-1] <= max(0.05, dom[0] * 1.05))
    rows = [("resolvent_step_identity", step_id),
            ("composition_exact", prop["exact"]),
            ("composition_scheme_order", prop["scheme_order"]),
            ("positivity_undershoot_coarse", pos[0]),
            ("positivity_undershoot_fine", pos[-1]),
            ("mode_domination_coarse", dom[0]),
            ("mode_domination_fine", dom[-1])]
    return EstimateResult(
        "semigroup_structure", passed, constant=step_id, drift=0.0,
        parameters={"scheme": "backward_euler"},
        detail={"positivity": pos, "domination": dom, "property": prop},
        rows=rows, header=("quantity", "value"))


def _check_reduction_consistency(ctx):
    space = SpaceSpec(2.0, 0.2)
    shear_spec = OperatorSpec(q_matrix=np.array([[1.0]]),
                              q_vector=np.array([0.3]), gamma=1.0,
                              drift_b=np.array([0.5]), drift_c=1.0,
                              alpha1=0.0, alpha2=0.0)
    power_spec = OperatorSpec(q_matrix=np.array([[2.0]]),
                              q_vector=np.array([0.4]), gamma=1.0,
                              drift_b=np.array([0.0]), drift_c=1.0,
                              alpha1=-0.5, alpha2=0.5)
    rows = []
    passed = True
    worst_final = 0.0
    for name, spec in (("shear", shear_spec), ("power", power_spec)):
        errs = []
        for J in (96, 192):
            grid = make_grid(J, 1.0, 2.0, XBox(2.0 * np.pi, 8, 1))
            err = reduction_consistency_check(spec, space, 1.5, grid)
            errs.append(err)
            rows.append((name, J, err))
        passed = passed and errs[-1] <= 0.05 and errs[-1] <= errs[0]
        worst_final = max(worst_final, errs[-1])
    return EstimateResult(
        "reduction_consistency", passed, constant=worst_final, drift=0.0,
        parameters={"lam": 1.5}, levels=[96, 192], rows=rows,
        header=("case", "J", "max_rel_diff"))


def _family_norm_sup(model, grid, lam, xi, weight_m):
    rep = mikhlin_bound_scan((lam,), (xi,), model, grid, weight_m=weight_m,
                             families=("scaled",))
    return rep["suprema"]["scaled"]


def _check_window_negative_control(ctx):
    alpha, c, p = 0.5, 1.0, 2.0
    upper = c + 1.0 - alpha          # window: 0 < (m+1)/p < upper
    m_in = p * 0.5 * upper - 1.0
    model = ModelParams(np.array([0.4]), alpha, c, m_in, p)
    g1, g2 = make_grid(96, 1.0, 2.0), make_grid(384, 1.0, 2.0)
    ymin_ratio = g1.y_nodes[0] / g2.y_nodes[0]
    growth_in = (_family_norm_sup(model, g2, 1.0, (4.0,), m_in)
                 / _family_norm_sup(model, g1, 1.0, (4.0,), m_in))
    rows = [("growth_in_window", growth_in)]
    passed = growth_in <= 1.05
    # outside the window the sup diverges like y_min^(-p depth / 2), depth
    # measured in (m+1)/p units past the upper edge; fit the exponent at
    # three depths against the refined first node
    exponents = {}
    for depth in (0.25, 0.5, 0.75):
        m_out = p * (upper + depth) - 1.0
        n1 = _family_norm_sup(model, g1, 1.0, (4.0,), m_out)
        n2 = _family_norm_sup(model, g2, 1.0, (4.0,), m_out)
        expo = float(np.log(n2 / n1) / np.log(ymin_ratio))
        exponents[depth] = expo
        rows.append(("divergence_exponent_depth_%g" % depth, expo))
        passed = passed and abs(expo - p * depth / 2.0) <= 0.02
    return EstimateResult(
        "window_negative_control", passed, constant=exponents[0.5],
        drift=growth_in - 1.0,
        parameters={"m_in": m_in, "upper": upper, "p": p,
                    "depths": [0.25, 0.5, 0.75]},
        levels=[96, 384],
        detail={"growth_in": growth_in, "exponents": exponents}, rows=rows,
        header=("quantity", "value"))


REGISTRY = (
    ("parameter_roundtrip", _check_parameter_roundtrip),
    ("transform_isometries", _check_transform_isometries),
    ("power_similarity", _check_power_similarity),
    ("model_equivalence_1d", _check_model_equivalence_1d),
    ("selfadjoint_spectrum", _check_selfadjoint_spectrum),
    ("sector_resolvent_scan", _check_sector_resolvent),
    ("kernel_gaussian_fit_bessel", _check_kernel_bessel),
    ("kernel_gaussian_fit_model", _check_kernel_model),
    ("kernel_domination", _check_kernel_domination),
    ("resolvent_two_route_identity", _check_two_route),
    ("nd_mode_vs_monolithic", _check_mode_vs_monolithic),
    ("nd_manufactured_convergence", _check_manufactured),
    ("apriori_regularity_fit", _check_apriori_fit),
    ("interpolation_gradient_fit", _check_interpolation_fit),
    ("xi_derivative_order", _check_xi_derivative),
    ("mikhlin_family_scan", _check_mikhlin_scan),
    ("square_function_resolvent_family", _check_square_function),
    ("parabolic_heat_closed_form", _check_parabolic_heat),
    ("parabolic_contraction", _check_parabolic_contraction),
    ("maximal_regularity_ratio", _check_maximal_regularity),
    ("semigroup_structure", _check_semigroup_structure),
    ("reduction_consistency", _check_reduction_consistency),
    ("window_negative_control", _check_window_negative_control),
)

_REGISTRY_MAP = dict(REGISTRY)

SUITES = {
    "default": [name for name, _ in REGISTRY],
    "parameter_maps": ["parameter_roundtrip", "transform_isometries",
                       "power_similarity", "model_equivalence_1d",
                       "reduction_consistency"],
    "spectral_1d": ["selfadjoint_spectrum", "sector_resolvent_scan",
                    "resolvent_two_route_identity"],
    "kernel_bounds": ["kernel_gaussian_fit_bessel",
                      "kernel_gaussian_fit_model", "kernel_domination"],
    "multiplier_bounds": ["nd_mode_vs_monolithic",
                          "nd_manufactured_convergence",
                          "apriori_regularity_fit",
                          "interpolation_gradient_fit",
                          "xi_derivative_order", "mikhlin_family_scan",
                          "square_function_resolvent_family"],
    "parabolic": ["parabolic_heat_closed_form", "parabolic_contraction",
                  "maximal_regularity_ratio", "semigroup_structure"],
    "negative_controls": ["window_negative_control"],
}


def _write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            cells = []
            for cell in row:
                if isinstance(cell, float):
                    cells.append(FMT % cell)
                elif isinstance(cell, (int, np.integer)):
                    cells.append(str(int(cell)))
                else:
                    cells.append(str(cell))
            fh.write(",".join(cells) + "\n")


def run_suite(config=None):
    """Run registered checks; returns a list of EstimateResult.

    config keys (all optional): suite (name), checks (explicit id list),
    out_dir, seed, threads, plus the full flat operator config (all ten keys)
    to override the baseline model context.  Individual check failures are
    recorded in the results, not raised.
    """
    config = dict(config or {})
    suite = config.pop("suite", "default")
    checks = config.pop("checks", None)
    out_dir = config.pop("out_dir", None)
    seed = int(config.pop("seed", 0))
    threads = int(config.pop("threads", 1))
    if config:
        spec, space = config_to_problem(config)
        model, _ = reduce_to_model(spec, space)
        ctx = SuiteContext(model, space, spec=spec, seed=seed)
    else:
        ctx = default_context(seed=seed)
    if checks is None:
        if suite not in SUITES:
            raise ValueError("unknown suite %r (have: %s)"
                             % (suite, ", ".join(sorted(SUITES))))
        checks = SUITES[suite]
    for name in checks:
        if name not in _REGISTRY_MAP:
            raise ValueError("no executable check registered for %r" % name)
        if not callable(_REGISTRY_MAP[name]):
            raise ValueError("registry entry %r is not executable" % name)

    def run_one(name):
        try:
            return _REGISTRY_MAP[name](ctx)
        except Exception as exc:
            return EstimateResult(name, False, error="%s: %s"
                                  % (type(exc).__name__, exc))

    if threads > 1 and len(checks) > 1:
        with concurrent.futures.ThreadPoolExecutor(threads) as pool:
            done = dict(zip(checks, pool.map(run_one, checks)))
    else:
        done = {name: run_one(name) for name in checks}
    results = [done[name] for name in checks]

    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        for res in results:
            if res.rows:
                path = os.path.join(out_dir, "estimate_%s.csv"
                                    % res.estimate_id)
                _write_csv(path, res.header, res.rows)
                res.csv_path = path
        summary = [(r.estimate_id, "true" if r.passed else "false",
                    r.constant, r.drift) for r in results]
        _write_csv(os.path.join(out_dir, "summary.csv"),
                   ("estimate_id", "pass", "constant", "drift"), summary)
    return results
