"""Isometries of weighted spaces, applied on matched grids.

Three concrete maps move fields between the full operator and its model form:

  * vertical power substitution  (T_b u)(x, y) = |b+1|^(1/p) u(x, y^(b+1)),
    an isometry L^p(y^mt) -> L^p(y^m) with mt = (m-b)/(b+1); on matched grids
    (target nodes are the (1/(b+1))-th powers of the source nodes) it is a
    pure nodal relabeling times a constant, no interpolation;
  * unimodular phase  (S u)(x, y) = exp(-i s y^r) u(x, y), an isometry of
    every L^p (the modulus is untouched);
  * vertical shear  (V u)(x, y) = u(x - e y, y), an isometry of L^p(y^m dx dy)
    applied spectrally: each horizontal slice is translated by e y via the
    FFT phase factor.

A TransformChain records the sequence produced by the parameter reduction
(shear, then linear x-map, then power substitution) together with the scalar
similarity factor; chains serialize to plain dicts.  The linear x-map acts on
parameters only (whitening the diffusion matrix); resampling a periodic grid
under a general linear map is out of scope, so applying such a step to a
Field raises.

similarity_check_power verifies the conjugation identity of the power map
against the transformed coefficients in strong form, per horizontal frequency,
on panels of edge-avoiding profiles, with the finite-difference machinery of
the grid module; discrepancies must vanish at first order or better.
"""

import json

import numpy as np

from .grid import (Grid, Field, make_grid, default_grading, diff1_matrix,
                   diff2_matrix)
from .params import invert_beta, beta_map
from . import panels


class TransformStep:
    """One step of a chain: kind in {power, phase, shear, linear_x} + payload."""

    KINDS = ("power", "phase", "shear", "linear_x")

    def __init__(self, kind, payload):
        if kind not in self.KINDS:
            raise ValueError("unknown transform kind %r" % (kind,))
        self.kind = kind
        self.payload = dict(payload)

    def to_dict(self):
        return {"kind": self.kind, **self.payload}

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        kind = d.pop("kind")
        return cls(kind, d)

    def __repr__(self):
        return "TransformStep(%s, %r)" % (self.kind, self.payload)


class TransformChain:
    """Ordered sequence of isometry steps with a scalar similarity factor.

    Steps are stored outer-to-inner: applying the chain to a model-side field
    walks the list in reverse.  scale is the factor s in L = s T M T^(-1).
    """

    def __init__(self, steps, scale=1.0, p=2.0):
        self.steps = list(steps)
        self.scale = float(scale)
        self.p = float(p)

    def to_dict(self):
        return {"scale": self.scale, "p": self.p,
                "steps": [s.to_dict() for s in self.steps]}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        return cls([TransformStep.from_dict(s) for s in d["steps"]],
                   d.get("scale", 1.0), d.get("p", 2.0))

    def apply_to_model_field(self, field):
        """Map a model-side Field to the original variables (inner to outer)."""
        out = field
        for step in reversed(self.steps):
            if step.kind == "power":
                out = apply_power(out, step.payload["beta"], self.p)
            elif step.kind == "phase":
                out = apply_phase(out, step.payload["mixing_freq"],
                                  step.payload["power"])
            elif step.kind == "shear":
                out = apply_shear(out, step.payload["shift"])
            else:
                raise NotImplementedError(
                    "linear x-maps act on parameters; grid resampling under "
                    "a general linear map is not provided")
        return out

    def __repr__(self):
        return ("TransformChain(%s, scale=%g)"
                % ("->".join(s.kind for s in self.steps), self.scale))


def power_image_grid(grid, beta):
    """Image of a grid under y -> y^(beta+1) (beta > -1): matched source grid.

    Nodes and cell edges are mapped through the power; the grading exponent
    multiplies by (beta+1).  The x-box is shared.
    """
    e = float(beta) + 1.0
    if e <= 0:
        raise ValueError("power image needs beta > -1")
    nodes = grid.y_nodes ** e
    edges = grid.y_edges ** e
    grading = (None if grid.grading_exponent is None
               else grid.grading_exponent * e)
    return Grid(nodes, np.diff(edges), grid.y_max ** e, grading,
                grid.x_box, y_edges=edges)


def apply_power(field, beta, p, target_grid=None, inverse=False):
    """Vertical power isometry on matched grids (pure relabel, no resampling).

    Forward: u on the source grid S |-> |beta+1|^(1/p) u(y^(beta+1)) on the
    target grid T, where S.nodes == T.nodes^(beta+1) (matched pair).  With
    inverse=True the inverse isometry (exponent -beta/(beta+1), reciprocal
    scaling) is applied.  If target_grid is omitted it is constructed as the
    matched image; otherwise it must match to 1e-9 relative or the call
    raises (interpolation is deliberately not performed).
    """
    eff = invert_beta(beta) if inverse else float(beta)
    if eff <= -1.0:
        raise ValueError("power isometry restricted to beta > -1")
    source = field.grid
    if target_grid is None:
        target_grid = power_image_grid(source, invert_beta(eff))
    else:
        image = target_grid.y_nodes ** (eff + 1.0)
        defect = np.abs(image - source.y_nodes).max()
        if defect > 1e-9 * source.y_nodes.max():
            raise ValueError("grids are not a matched power pair "
                             "(defect %.3e); no interpolation" % defect)
    scale = abs(eff + 1.0) ** (1.0 / float(p))
    return Field(scale * field.values, target_grid)


def apply_phase(field, mixing_freq, power, inverse=False):
    """Multiply by the unimodular phase exp(-i s y^power) (exact modulus)."""
    y = field.grid.y_nodes
    sign = 1.0 if inverse else -1.0
    phase = np.exp(sign * 1j * float(mixing_freq) * y ** float(power))
    return Field(field.values * phase, field.grid)


def apply_shear(field, shift, inverse=False):
    """Vertical shear u(x - e y, y) applied spectrally per y-slice.

    shift is the vector e (length = x dimension).  The translation by e y_j
    is exact for band-limited fields (FFT phase factor).
    """
    g = field.grid
    if g.x_box is None:
        raise ValueError("shear needs an x-box")
    e = np.atleast_1d(np.asarray(shift, dtype=float))
    if e.size != g.x_box.dim:
        raise ValueError("shift length must equal the x dimension")
    # forward: multiply the k-th coefficient by exp(-i k e y), so that
    # sum_k uhat(k) e^(i k (x - e y)) = u(x - e y, y)
    sign = -1.0 if inverse else 1.0
    vals = field.values
    axes = tuple(range(g.x_box.dim))
    vh = np.fft.fftn(vals, axes=axes)
    k = g.x_box.wavenumbers()
    for ax in range(g.x_box.dim):
        shape = [1] * vals.ndim
        shape[ax] = k.size
        phase = np.exp(sign * -1j * np.outer(k * e[ax], g.y_nodes))
        vh = vh * phase.reshape(shape[:-1] + [g.num_y])
    return Field(np.fft.ifftn(vh, axes=axes), g)


def similarity_check_power(alpha1, alpha2, c, gamma=1.0, q_mixed=0.0,
                           q_diag=1.0, xi=1.0, p=2.0, levels=(128, 256, 512),
                           y_max=1.0, panel_count=6):
    """Conjugation identity of the power map, per horizontal frequency.

    For tensor fields e^(i xi x) v(y) the full operator (with b = 0) acts as

        Lhat(xi) = -Q xi^2 y^a1 + 2 i q xi y^((a1+a2)/2) Dy
                   + gamma y^a2 (Dyy + (c/gamma) Dy / y),

    and with beta = (a1-a2)/2 the power isometry intertwines Lhat with the
    transformed-coefficient operator

        -Q xi^2 y^at1 + 2 i q xi (beta+1) y^((at1+at2)/2) Dy
          + gamma (beta+1)^2 y^at2 (Dyy + (ct/y) Dy),

    at1/at2/ct from the parameter action.  Both sides are evaluated with the
    3-point stencils on matched grids over a panel of edge-avoiding profiles.
    Additionally the vertical-diffusion coefficient is recovered by least
    squares and compared against gamma (beta+1)^2.

    Returns {"levels", "errors", "order", "coeff_rel_err"}.
    """
    a1, a2 = float(alpha1), float(alpha2)
    beta = 0.5 * (a1 - a2)
    at1, at2, ct, _ = beta_map(beta, a1, a2, c / gamma, 0.0, p)
    errors = []
    coeff_err = 0.0
    for J in levels:
        g = make_grid(J, y_max, default_grading(max(a2, at2)))
        gt = power_image_grid(g, beta)
        y, rho = g.y_nodes, gt.y_nodes
        D1, D2 = diff1_matrix(y), diff2_matrix(y)
        D1t, D2t = diff1_matrix(rho), diff2_matrix(rho)
        worst = 0.0
        lhs_all, comps_all = [], []
        for prof in panels.vertical_panel(y_max ** (beta + 1.0),
                                          count=panel_count, kind="interior"):
            v = prof(rho).astype(complex)
            u = apply_power(Field(v, gt), beta, p, target_grid=g).values
            w = (-q_diag * xi ** 2 * y ** a1 * u
                 + 2j * q_mixed * xi * y ** (0.5 * (a1 + a2)) * (D1 @ u)
                 + gamma * y ** a2 * (D2 @ u + (c / gamma) * (D1 @ u) / y))
            lhs = apply_power(Field(w, g), beta, p, target_grid=gt,
                              inverse=True).values
            bess = D2t @ v + (ct / rho) * (D1t @ v)
            comps = np.stack([
                -q_diag * xi ** 2 * rho ** at1 * v,
                2j * q_mixed * xi * rho ** (0.5 * (at1 + at2)) * (D1t @ v),
                rho ** at2 * bess,
            ], axis=1)
            rhs = (comps[:, 0] + (beta + 1.0) * comps[:, 1]
                   + gamma * (beta + 1.0) ** 2 * comps[:, 2])
            worst = max(worst, float(np.abs(lhs - rhs).max()
                                     / np.abs(lhs).max()))
            lhs_all.append(lhs)
            comps_all.append(comps)
        # recover the vertical-diffusion coefficient by least squares
        A = np.concatenate(comps_all, axis=0)
        bvec = np.concatenate(lhs_all, axis=0)
        coef = np.linalg.lstsq(A, bvec, rcond=None)[0]
        target = gamma * (beta + 1.0) ** 2
        coeff_err = max(coeff_err, float(abs(coef[2] - target) / abs(target)))
        errors.append(worst)
    lv = np.asarray(levels, dtype=float)
    er = np.maximum(np.asarray(errors, dtype=float), 1e-300)
    if np.all(er < 1e-13):
        order = float("inf")
    else:
        order = float(-np.polyfit(np.log(lv), np.log(er), 1)[0])
    return {"levels": list(levels), "errors": errors, "order": order,
            "coeff_rel_err": coeff_err}
