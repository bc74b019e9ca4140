"""Time evolution e^{tL} for the model operator, by A-stable one-step schemes.

Backward Euler advances (I - dt L) u_{k+1} = u_k + dt f_{k+1}; with
lam = 1/dt this is exactly one call of the frequency-decoupled resolvent,
so a single step IS (I - dt L)^(-1) u_0 by construction.  Crank-Nicolson
solves (2/dt - L) u_{k+1} = (2/dt + L) u_k + 2 f_{k+1/2}.  Both schemes are
A-stable; backward Euler is additionally contractive in the weighted l2
product whenever the spatial form is accretive, and for a = 0 the lumped P1
system is an M-matrix, so it preserves positivity and the L-infinity bound
exactly at the discrete level.

The maximal-regularity check measures the discrete L^q([0,T]; L^p_m) norms
of the one-sided difference quotient D_t u and of L u = D_t u - f (the
backward Euler identity makes this exact), and reports the split ratio
(|D_t u| + |L u|) / |f| together with its drift under joint time/space
refinement.  Domination and positivity checks quantify their slack so
refinement studies can confirm it vanishes.
"""

import json
import os

import numpy as np

from .grid import Field, lp_norm, linf_norm, make_grid, write_field_csv
from .multiplier import FrequencySolvePlan, ModeOperators
from . import panels


class EvolutionRun:
    """Evolved trajectory: time grid, scheme, snapshots, forcing record."""

    def __init__(self, times, scheme, snapshots, forcing_label=""):
        self.times = np.asarray(times, dtype=float)
        self.scheme = scheme
        self.snapshots = snapshots
        self.forcing_label = forcing_label
        if len(snapshots) != self.times.size:
            raise ValueError("one snapshot per time point required")

    @property
    def final(self):
        return self.snapshots[-1]

    def export_csvs(self, outdir, basename="snapshot", stride=1, model=None,
                    chain=None, extra=None):
        """Write snapshot CSVs and a manifest JSON; returns the manifest."""
        os.makedirs(outdir, exist_ok=True)
        paths = []
        for k in range(0, self.times.size, stride):
            name = "%s_%04d.csv" % (basename, k)
            write_field_csv(os.path.join(outdir, name), self.snapshots[k])
            paths.append(name)
        manifest = {
            "scheme": self.scheme,
            "steps": int(self.times.size - 1),
            "times": [float(t) for t in self.times],
            "snapshots": paths,
            "forcing": self.forcing_label,
        }
        if model is not None:
            manifest["model"] = {
                "mixing": [float(v) for v in model.mixing],
                "alpha": model.alpha,
                "c_bessel": model.c_bessel,
                "m": model.m,
                "p": model.p,
            }
        if chain is not None:
            manifest["transform_chain"] = chain.to_dict()
        if extra:
            manifest.update(extra)
        with open(os.path.join(outdir, basename + "_manifest.json"), "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
        return manifest


def _forcing_at(forcing, k, t, grid):
    """Normalize the forcing spec: None, callable t->values, or sequence."""
    if forcing is None:
        return None
    if callable(forcing):
        out = forcing(t)
    else:
        out = forcing[k]
    if out is None:
        return None
    return np.asarray(out.values if isinstance(out, Field) else out,
                      dtype=complex)


def evolve(u0, forcing, model, grid, scheme="backward_euler", time_grid=None):
    """March (d/dt - L) u = f from u0 over time_grid; returns EvolutionRun.

    scheme: "backward_euler" or "crank_nicolson".  Each step is one
    frequency-decoupled resolvent call; solve plans are cached per distinct
    step size.
    """
    if time_grid is None:
        raise ValueError("time_grid required")
    times = np.asarray(time_grid, dtype=float)
    if times.ndim != 1 or times.size < 1:
        raise ValueError("time_grid must be a 1-d array of times")
    if times.size > 1 and np.any(np.diff(times) <= 0):
        raise ValueError("time_grid must increase strictly")
    if scheme not in ("backward_euler", "crank_nicolson"):
        raise ValueError("unknown scheme %r" % (scheme,))
    u = np.asarray(u0.values if isinstance(u0, Field) else u0, dtype=complex)
    if u.shape != grid.shape:
        raise ValueError("initial datum shape %r does not match grid %r"
                         % (u.shape, grid.shape))
    snapshots = [Field(u.copy(), grid)]
    plans = {}
    for k in range(times.size - 1):
        dt = times[k + 1] - times[k]
        key = round(float(dt), 15)
        if key not in plans:
            lam = 1.0 / dt if scheme == "backward_euler" else 2.0 / dt
            plans[key] = FrequencySolvePlan(lam, model, grid)
        plan = plans[key]
        if scheme == "backward_euler":
            rhs = u / dt
            fv = _forcing_at(forcing, k + 1, times[k + 1], grid)
            if fv is not None:
                rhs = rhs + fv
        else:
            Lu = plan.apply_operator(u).values
            rhs = 2.0 * u / dt + Lu
            fv = _forcing_at(forcing, k, 0.5 * (times[k] + times[k + 1]), grid)
            if fv is not None:
                rhs = rhs + 2.0 * fv
        u, info = plan.solve(Field(rhs, grid))
        u = u.values
        if not np.all(np.isfinite(u)):
            raise RuntimeError("step %d produced non-finite values" % (k + 1,))
        snapshots.append(Field(u.copy(), grid))
    return EvolutionRun(times, scheme, snapshots)


# ---------------------------------------------------------------------------
# contractivity and positivity


def contraction_check(model, grid, t_set, probes=8, steps=20, p_sample=(1.5,
                                                                        4.0),
                      seed=3):
    """Probe-estimated norm of e^{tL} on L^2_{c-alpha}, sampled L^p, L^inf.

    Evolves random data with zero forcing by backward Euler and records the
    worst norm ratio per horizon; t = 0 entries are exactly 1.
    """
    rng = np.random.default_rng(seed)
    w = model.c_bessel - model.alpha
    report = {}
    for t in t_set:
        worst = {"l2_weighted": 0.0, "linf": 0.0}
        for p in p_sample:
            worst["lp_%g" % p] = 0.0
        for _ in range(probes):
            u0 = rng.standard_normal(grid.shape)
            if t == 0:
                ratios = {k: 1.0 for k in worst}
            else:
                run = evolve(Field(u0.astype(complex), grid), None, model,
                             grid, "backward_euler",
                             np.linspace(0.0, t, steps + 1))
                uT = run.final.values
                ratios = {
                    "l2_weighted": lp_norm(uT, 2.0, w, grid)
                    / lp_norm(u0, 2.0, w, grid),
                    "linf": linf_norm(uT) / linf_norm(u0),
                }
                for p in p_sample:
                    ratios["lp_%g" % p] = (lp_norm(uT, p, w, grid)
                                           / lp_norm(u0, p, w, grid))
            for k in worst:
                worst[k] = max(worst[k], float(ratios[k]))
        report[float(t)] = worst
    return report


def positivity_check(model, grid_levels, t=0.2, steps=16, seed=5):
    """Relative undershoot of backward Euler from nonnegative data/forcing.

    Returns the list of max(0, -min u / max u) over the run, one entry per
    grid level; the slack must shrink under refinement (exact zero when
    a = 0, where the lumped system is an M-matrix).
    """
    out = []
    for grid in grid_levels:
        y = grid.y_nodes
        prof = panels.bump_profile(0.3 * grid.y_max, 0.12 * grid.y_max)
        vals = np.ones(grid.shape, dtype=complex)
        shape_y = prof(y)
        if grid.x_box is not None:
            x = grid.x_box.nodes()
            base = 1.0 + 0.5 * np.cos(2.0 * np.pi * x / grid.x_box.length)
            mesh = np.meshgrid(*([base] * grid.x_box.dim), indexing="ij")
            xpart = np.ones(grid.shape[:-1])
            for m in mesh:
                xpart = xpart * m
            vals = xpart[..., None] * shape_y[None, :]
        else:
            vals = shape_y.astype(complex)
        run = evolve(Field(vals.astype(complex), grid), None, model, grid,
                     "backward_euler", np.linspace(0.0, t, steps + 1))
        under = 0.0
        for snap in run.snapshots:
            re = snap.values.real
            under = max(under, -float(re.min()) / float(np.abs(re).max()))
        out.append(max(0.0, under))
    return out


# ---------------------------------------------------------------------------
# maximal regularity


def _space_norm(values, p, m, grid):
    return lp_norm(values, p, m, grid)


def maximal_regularity_check(model, grid, q, time_grid, forcing_panel=None,
                             refine=True, seed=11):
    """Split-norm ratio (|D_t u|_qp + |L u|_qp) / |f|_qp for u(0) = 0.

    D_t is the scheme's own one-sided quotient, so D_t u - L u = f holds
    exactly for backward Euler and the content is the size of each summand.
    With refine=True the same panel is rerun at doubled time and space
    resolution and the drift of the ratio is reported.
    """
    times = np.asarray(time_grid, dtype=float)
    rng = np.random.default_rng(seed)

    def make_panel(g):
        if forcing_panel is not None:
            return [f(g) if callable(f) else f for f in forcing_panel]
        out = []
        profs = panels.vertical_panel(g.y_max, count=3, kind="interior",
                                      rng=np.random.default_rng(seed))
        for i, prof in enumerate(profs):
            shape_y = prof(g.y_nodes)
            if g.x_box is not None:
                x = g.x_box.nodes()
                base = np.cos(2.0 * np.pi * (i + 1) * x / g.x_box.length)
                mesh = np.meshgrid(*([base] * g.x_box.dim), indexing="ij")
                xpart = np.ones(g.shape[:-1])
                for mm in mesh:
                    xpart = xpart * mm
                vals = xpart[..., None] * shape_y[None, :]
            else:
                vals = shape_y
            out.append(np.asarray(vals, dtype=complex))
        return out

    def one_ratio(g, ts):
        panel_fields = make_panel(g)
        worst = 0.0
        for fv in panel_fields:
            forcing = lambda t, fv=fv: fv
            run = evolve(Field(np.zeros(g.shape, dtype=complex), g), forcing,
                         model, g, "backward_euler", ts)
            dt_terms = []
            l_terms = []
            f_terms = []
            for k in range(1, ts.size):
                dt = ts[k] - ts[k - 1]
                dtu = (run.snapshots[k].values
                       - run.snapshots[k - 1].values) / dt
                lu = dtu - fv
                dt_terms.append(_space_norm(dtu, model.p, model.m, g) ** q
                                * dt)
                l_terms.append(_space_norm(lu, model.p, model.m, g) ** q * dt)
                f_terms.append(_space_norm(fv, model.p, model.m, g) ** q * dt)
            num = (sum(dt_terms) ** (1.0 / q) + sum(l_terms) ** (1.0 / q))
            den = sum(f_terms) ** (1.0 / q)
            worst = max(worst, float(num / max(den, 1e-300)))
        return worst

    ratio0 = one_ratio(grid, times)
    report = {"ratio": ratio0, "q": float(q)}
    if refine:
        if grid.grading_exponent is None:
            raise ValueError("refinement needs a structured grid")
        g2 = make_grid(2 * grid.num_y, grid.y_max, grid.grading_exponent,
                       grid.x_box)
        t2 = np.linspace(times[0], times[-1], 2 * (times.size - 1) + 1)
        ratio1 = one_ratio(g2, t2)
        report["ratio_refined"] = ratio1
        report["drift"] = abs(ratio1 - ratio0) / max(abs(ratio0), 1e-300)
    return report


# ---------------------------------------------------------------------------
# structural checks


def semigroup_property_check(model, grid, t=0.3, s=0.2, steps_t=12,
                             steps_s=8, seed=9):
    """Two-leg vs one-shot evolution.

    Same step size on both paths makes backward Euler compose exactly; a
    second comparison with mismatched steps exposes the scheme-order error.
    Returns {"exact": ..., "scheme_order": ...} relative discrepancies.
    """
    rng = np.random.default_rng(seed)
    u0 = Field(rng.standard_normal(grid.shape).astype(complex), grid)
    dt = t / steps_t
    steps_s_same = int(round(s / dt))
    s_adj = steps_s_same * dt
    leg1 = evolve(u0, None, model, grid, "backward_euler",
                  np.linspace(0.0, t, steps_t + 1))
    leg2 = evolve(leg1.final, None, model, grid, "backward_euler",
                  np.linspace(t, t + s_adj, steps_s_same + 1))
    oneshot = evolve(u0, None, model, grid, "backward_euler",
                     np.linspace(0.0, t + s_adj, steps_t + steps_s_same + 1))
    ref = lp_norm(oneshot.final.values, 2.0, model.m, grid)
    exact = lp_norm(leg2.final.values - oneshot.final.values, 2.0, model.m,
                    grid) / ref
    # mismatched steps: one-shot with a different step count
    alt = evolve(u0, None, model, grid, "backward_euler",
                 np.linspace(0.0, t + s_adj, steps_t + 2 * steps_s_same + 1))
    order_err = lp_norm(alt.final.values - oneshot.final.values, 2.0, model.m,
                        grid) / ref
    return {"exact": float(exact), "scheme_order": float(order_err)}


def resolvent_step_identity(model, grid, dt=0.05, seed=13):
    """Backward Euler single step vs (I - dt L)^(-1) u0: exact identity."""
    rng = np.random.default_rng(seed)
    u0 = Field(rng.standard_normal(grid.shape).astype(complex), grid)
    run = evolve(u0, None, model, grid, "backward_euler",
                 np.array([0.0, dt]))
    plan = FrequencySolvePlan(1.0 / dt, model, grid)
    direct, _ = plan.solve(Field(u0.values / dt, grid))
    num = lp_norm(run.final.values - direct.values, 2.0, model.m, grid)
    den = lp_norm(direct.values, 2.0, model.m, grid)
    return float(num / max(den, 1e-300))


def mode_domination_check(c, alpha, mixing_s, k2, grid_levels, t=0.3,
                          steps=24, seed=17):
    """Per-mode magnitudes vs the potential-only evolution of |f|.

    Evolves one frozen mode with s = a.xi mixing by backward Euler and the
    s = 0 comparison evolution started from |f|; returns the relative excess
    max(|u_s| - v_0)/max(v_0) per grid level (refinement-vanishing slack).
    """
    out = []
    rng = np.random.default_rng(seed)
    for grid in grid_levels:
        ops = ModeOperators(grid, c, alpha)
        prof = panels.bump_profile(0.3 * grid.y_max, 0.1 * grid.y_max)
        f = prof(grid.y_nodes).astype(complex)
        f *= np.exp(1j * rng.uniform(0, 2 * np.pi, f.size))
        u = f.copy()
        v = np.abs(f)
        dt = t / steps
        lam = 1.0 / dt
        for _ in range(steps):
            u = ops.solve(mixing_s, k2, lam, u / dt)
            v = ops.solve(0.0, k2, lam, v / dt)
        excess = float(np.max(np.abs(u) - v.real) / np.max(np.abs(v)))
        out.append(max(0.0, excess))
    return out


# ---------------------------------------------------------------------------
# closed-form heat comparison


def heat_closed_form_check(levels=((64, 16), (128, 32)), y_max=1.0,
                           box_length=2.0 * np.pi, nx=16, t_final=0.1):
    """Heat equation (a = 0, alpha = 0, c = 0) vs the separated exact solution.

    Initial datum cos(2 pi x / L) cos(pi y / Y) + 1 evolves exactly by
    Fourier-Neumann modes; the backward Euler + P1 error is O(dt) + O(grid).
    Returns per-level relative errors at t_final.
    """
    from .params import ModelParams
    from .grid import XBox

    model = ModelParams(mixing=np.array([0.0]), alpha=0.0, c_bessel=0.0,
                        m=0.0, p=2.0)
    errs = []
    for (J, K) in levels:
        box = XBox(box_length, nx, 1)
        grid = make_grid(J, y_max, 1.0, box)
        x = box.nodes()
        y = grid.y_nodes
        xi = 2.0 * np.pi / box_length
        eta = np.pi / y_max
        u0 = (np.cos(xi * x)[:, None] * np.cos(eta * y)[None, :]
              + np.ones((nx, J)))
        exact = (np.exp(-(xi ** 2 + eta ** 2) * t_final)
                 * np.cos(xi * x)[:, None] * np.cos(eta * y)[None, :]
                 + np.ones((nx, J)))
        run = evolve(Field(u0.astype(complex), grid), None, model, grid,
                     "backward_euler", np.linspace(0.0, t_final, K + 1))
        err = lp_norm(run.final.values - exact, 2.0, 0.0, grid)
        ref = lp_norm(exact, 2.0, 0.0, grid)
        errs.append(float(err / ref))
    return {"levels": [list(l) for l in levels], "errors": errs,
            "ratio": errs[0] / max(errs[-1], 1e-300)}
