"""One-dimensional weighted operators on the truncated half line.

Everything reduces to operators built from B = Dyy + (c/y) Dy acting in
L^2(y^w dy) on (0, Y_max]:

  * the pure Bessel operator B in L^2(y^c);
  * the frozen-frequency model operator y^alpha (B + 2i s Dy - k2), s = a . xi,
    k2 = |xi|^2, acting in L^2(y^(c-alpha));
  * its potential form (k2 - B - 2i s Dy + lam y^(-alpha)) in L^2(y^c);
  * the graded oblique family  A = B - i (b(c+beta)/2) y^(beta-1) - mu y^(2beta)
    in L^2(y^c), generated by the sesquilinear form
      a(u,v) = Int Dyu conj(Dyv) y^c - i(b/2) Int Dy(u conj v) y^(c+beta)
               + mu Int u conj v y^(c+2beta),
    whose imaginary part is controlled by its real part (sectoriality with an
    angle independent of b, beta).

Discretization: P1 finite elements on the graded node set, with *exact*
closed-form power-moment integrals for the stiffness and transport matrices
(so symmetry and skewness hold to rounding), and diagonal node-power weights
W_w[j] = y_j^w int(phi_j) for all mass-type terms.  The diagonal weights obey
W_c[j] y_j^(-alpha) = W_(c-alpha)[j] exactly in floating point, which makes
the two resolvent routes (frozen frequency vs potential form) assemble the
same linear system: their agreement then tests only the independent code
paths, not the discretization error.  The natural (Neumann-type) flux
condition y^c Dy u -> 0 is built into the form; no boundary rows are needed.

Operators are tridiagonal; solves use banded LU, semigroup kernels use dense
matrix exponentials (J <= 512).
"""

import numpy as np
from scipy.linalg import expm, solve_banded, eigh_tridiagonal

from .grid import lp_norm, make_grid, default_grading
from . import panels


# ---------------------------------------------------------------------------
# exact P1 element integrals


def power_moment(a, b, s):
    """Exact integral of y^s over [a, b], 0 < a < b, any real s.

    Stable for b - a << a via expm1/log1p; s = -1 uses the logarithm.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ratio = np.log1p((b - a) / a)
    if s == -1.0:
        return ratio
    t = s + 1.0
    return a ** t * np.expm1(t * ratio) / t


def _element_moments(y, s):
    """I_k = Int_{y_j}^{y_{j+1}} y^(s+k) dy for k = 0, 1, 2 (per element)."""
    a, b = y[:-1], y[1:]
    return (power_moment(a, b, s),
            power_moment(a, b, s + 1.0),
            power_moment(a, b, s + 2.0))


def _accumulate(J, ll, lr, rl, rr):
    """Scatter per-element 2x2 blocks into tridiagonal (sub, diag, sup)."""
    diag = np.zeros(J)
    sub = np.zeros(J - 1)
    sup = np.zeros(J - 1)
    diag[:-1] += ll
    diag[1:] += rr
    sup += lr
    sub += rl
    return sub, diag, sup


def stiffness_tridiag(y, s):
    """K[i,j] = Int Dphi_i Dphi_j y^s, exact, as (sub, diag, sup)."""
    y = np.asarray(y, dtype=float)
    h = np.diff(y)
    i0 = power_moment(y[:-1], y[1:], s)
    k = i0 / h ** 2
    return _accumulate(y.size, k, -k, -k, k)


def transport_tridiag(y, s):
    """P[i,j] = Int Dphi_j phi_i y^s (trial derivative, test value), exact."""
    y = np.asarray(y, dtype=float)
    a, b = y[:-1], y[1:]
    h = b - a
    i0, i1, _ = _element_moments(y, s)
    left = (b * i0 - i1) / h ** 2    # Int phi_L y^s / h
    right = (i1 - a * i0) / h ** 2   # Int phi_R y^s / h
    return _accumulate(y.size, -left, left, -right, right)


def mass_tridiag(y, s):
    """Consistent Galerkin mass M[i,j] = Int phi_i phi_j y^s, exact."""
    y = np.asarray(y, dtype=float)
    a, b = y[:-1], y[1:]
    h = b - a
    i0, i1, i2 = _element_moments(y, s)
    ll = (b * b * i0 - 2.0 * b * i1 + i2) / h ** 2
    lr = (-a * b * i0 + (a + b) * i1 - i2) / h ** 2
    rr = (a * a * i0 - 2.0 * a * i1 + i2) / h ** 2
    return _accumulate(y.size, ll, lr, lr, rr)


def partition_weights(y):
    """omega_j = Int phi_j dy on [y_0, y_Jm1]: half the adjacent spacings."""
    y = np.asarray(y, dtype=float)
    h = np.diff(y)
    w = np.zeros(y.size)
    w[:-1] += 0.5 * h
    w[1:] += 0.5 * h
    return w


def node_weights(y, w_exponent):
    """Diagonal inner-product weights W_w[j] = y_j^w omega_j."""
    y = np.asarray(y, dtype=float)
    return y ** float(w_exponent) * partition_weights(y)


# ---------------------------------------------------------------------------
# operator container


class DiscreteOperator:
    """Tridiagonal realization of a weighted 1-d operator M.

    Stores the form matrix F with  <-M u, v>_W = v^H F u  and the diagonal
    inner-product weights W (measure y^w dy at the nodes), so M = -W^(-1) F.
    bc is 'neumann_form' (natural flux condition only) or 'oblique' (graded
    drift term, complex flux coupling).
    """

    def __init__(self, sub, diag, sup, inner_weight, inner_exponent, bc,
                 params, grid):
        self.form_sub = np.asarray(sub, dtype=complex)
        self.form_diag = np.asarray(diag, dtype=complex)
        self.form_sup = np.asarray(sup, dtype=complex)
        self.inner_weight = np.asarray(inner_weight, dtype=float)
        self.inner_exponent = float(inner_exponent)
        self.bc = bc
        self.params = dict(params)
        self.grid = grid

    @property
    def size(self):
        return self.form_diag.size

    def form_apply(self, u):
        """F u along the last axis of u."""
        u = np.asarray(u)
        out = self.form_diag * u
        out[..., :-1] += self.form_sup * u[..., 1:]
        out[..., 1:] += self.form_sub * u[..., :-1]
        return out

    def apply(self, u):
        """M u = -W^(-1) F u."""
        return -self.form_apply(u) / self.inner_weight

    def form_dense(self):
        F = np.diag(self.form_diag)
        F += np.diag(self.form_sub, -1) + np.diag(self.form_sup, 1)
        return F

    def dense_operator(self):
        return -self.form_dense() / self.inner_weight[:, None]

    def weighted_inner(self, u, v):
        """<u, v> in the operator's L^2(y^w) quadrature."""
        return complex(np.sum(u * np.conj(v) * self.inner_weight))

    def weighted_norm(self, u):
        return float(np.sqrt(np.sum(np.abs(u) ** 2 * self.inner_weight)))

    def hermitian_defect(self):
        """max |F - F^H| relative to max |F|; 0 for self-adjoint operators."""
        scale = max(abs(self.form_diag).max(),
                    abs(self.form_sub).max(), abs(self.form_sup).max())
        d = max(abs(self.form_diag.imag).max(),
                abs(self.form_sub - np.conj(self.form_sup)).max())
        return float(d / scale)

    def accretivity_defect(self, trials=32, rng=None):
        """min over probes of Re<-Mu, u>_W / <u, u>_W (should be >= ~0)."""
        rng = np.random.default_rng(0) if rng is None else rng
        worst = np.inf
        for _ in range(trials):
            u = rng.standard_normal(self.size) + 1j * rng.standard_normal(self.size)
            num = np.real(np.vdot(u, self.form_apply(u)))
            den = np.real(np.sum(np.abs(u) ** 2 * self.inner_weight))
            worst = min(worst, num / den)
        return float(worst)

    def symmetric_spectrum(self):
        """Eigenvalues of -M for self-adjoint (b = 0) operators.

        Solves the symmetrized pencil W^(-1/2) F W^(-1/2); requires F real.
        """
        if self.hermitian_defect() > 1e-12:
            raise ValueError("spectrum helper needs a self-adjoint operator")
        w = self.inner_weight
        d = self.form_diag.real / w
        e = self.form_sub.real / np.sqrt(w[:-1] * w[1:])
        return eigh_tridiagonal(d, e, eigvals_only=True)


def _solver_bands(op, lam):
    """Banded matrix of (lam W + F) in solve_banded layout."""
    J = op.size
    ab = np.zeros((3, J), dtype=complex)
    ab[0, 1:] = op.form_sup
    ab[1, :] = op.form_diag + lam * op.inner_weight
    ab[2, :-1] = op.form_sub
    return ab


def assemble_form(grid, kind, **params):
    """Assemble a weighted 1-d operator from its sesquilinear form.

    Kinds
    -----
    'bessel' (c):
        B in L^2(y^c); form Int Dyu Dyv y^c.  Self-adjoint, nonnegative.
    'model_mode' (c, alpha, mixing_freq, freq_norm2):
        y^alpha (B + 2i s Dy - k2) in L^2(y^(c-alpha)) with s = mixing_freq,
        k2 = freq_norm2;  form K_c - 2i s P_c + k2 W_c.
    'model_potential' (c, alpha, mixing_freq, freq_norm2, lam):
        (k2 - B - 2i s Dy + lam y^(-alpha)) in L^2(y^c); the potential route
        of the same resolvent (note: this operator is -M for 'model_mode'
        shifted, so resolve() is not used on it; see two_route_resolvent).
    'bessel_drift' (c, beta, drift_b, potential_coeff):
        A = B - i (b(c+beta)/2) y^(beta-1) - mu y^(2beta) in L^2(y^c); form
        K_c - i(b/2)(P_{c+beta} + P_{c+beta}^T) + mu W_{c+2beta}.  The graded
        transport is exactly skew-Hermitian, so Re of the form is b-free.

    c > -1 is required (integrability of the measure at the edge).
    """
    y = grid.y_nodes
    J = y.size
    omega = partition_weights(y)

    def W(s):
        return y ** float(s) * omega

    c = float(params["c"])
    if not c > -1.0:
        raise ValueError("need c > -1")

    if kind == "bessel":
        sub, diag, sup = stiffness_tridiag(y, c)
        return DiscreteOperator(sub, diag, sup, W(c), c, "neumann_form",
                                {"kind": kind, **params}, grid)

    if kind in ("model_mode", "model_potential"):
        alpha = float(params["alpha"])
        s_mix = float(params["mixing_freq"])
        k2 = float(params["freq_norm2"])
        ks, kd, ku = stiffness_tridiag(y, c)
        ps, pd, pu = transport_tridiag(y, c)
        sub = ks - 2j * s_mix * ps
        diag = kd - 2j * s_mix * pd + k2 * W(c)
        sup = ku - 2j * s_mix * pu
        if kind == "model_mode":
            return DiscreteOperator(sub, diag, sup, W(c - alpha), c - alpha,
                                    "neumann_form", {"kind": kind, **params},
                                    grid)
        lam = complex(params["lam"])
        diag = diag + lam * W(c - alpha)
        return DiscreteOperator(sub, diag, sup, W(c), c, "neumann_form",
                                {"kind": kind, **params}, grid)

    if kind == "bessel_drift":
        beta = float(params["beta"])
        b = float(params["drift_b"])
        mu = float(params["potential_coeff"])
        if not beta > -1.0:
            raise ValueError("need beta > -1")
        ks, kd, ku = stiffness_tridiag(y, c)
        gs, gd, gu = transport_tridiag(y, c + beta)
        # symmetrized graded transport: P + P^T multiplies -i b/2
        sub = ks - 0.5j * b * (gs + gu)
        diag = kd - 1j * b * gd
        sup = ku - 0.5j * b * (gu + gs)
        diag = diag + mu * W(c + 2.0 * beta)
        bc = "oblique" if b != 0.0 else "neumann_form"
        return DiscreteOperator(sub, diag, sup, W(c), c, bc,
                                {"kind": kind, **params}, grid)

    raise ValueError("unknown form kind %r" % (kind,))


def resolve(op, lam, f, tol=1e-10):
    """Solve (lam - M) u = f; raises if the relative residual exceeds tol.

    The linear system is (lam W + F) u = W f (banded LU).  On poor residual
    a condition estimate is attached to the error message.
    """
    f = np.asarray(f, dtype=complex)
    ab = _solver_bands(op, lam)
    rhs = op.inner_weight * f
    if f.ndim > 1:
        u = solve_banded((1, 1), ab, rhs.reshape(-1, f.shape[-1]).T)
        u = u.T.reshape(f.shape)
        return u
    u = solve_banded((1, 1), ab, rhs)
    fnorm = max(op.weighted_norm(f), 1e-300)
    for _ in range(3):
        system_res = lam * op.inner_weight * u + op.form_apply(u) - rhs
        # ||(lam - M)u - f||_W with (lam-M)u - f = W^(-1) system_res
        num = np.sqrt(np.sum(np.abs(system_res) ** 2 / op.inner_weight))
        rel = num / fnorm
        if rel <= tol:
            return u
        # one round of iterative refinement on the banded system
        u = u - solve_banded((1, 1), ab, system_res)
    A = np.diag(ab[1]) + np.diag(ab[0, 1:], 1) + np.diag(ab[2, :-1], -1)
    cond = np.linalg.cond(A)
    raise RuntimeError("resolvent residual %.3e exceeds %.1e "
                       "(condition estimate %.3e)" % (rel, tol, cond))


def resolve_adjoint(op, lam, f):
    """Solve the W-adjoint system: u = (conj(lam) - M*)^(-1) f.

    M* is the adjoint in the weighted inner product, so the system is
    (conj(lam) W + F^H) u = W f.
    """
    f = np.asarray(f, dtype=complex)
    J = op.size
    ab = np.zeros((3, J), dtype=complex)
    ab[0, 1:] = np.conj(op.form_sub)
    ab[1, :] = np.conj(op.form_diag) + np.conj(lam) * op.inner_weight
    ab[2, :-1] = np.conj(op.form_sup)
    return solve_banded((1, 1), ab, op.inner_weight * f)


# ---------------------------------------------------------------------------
# semigroup kernels


class Kernel1D:
    """Dense semigroup kernel with respect to the weighted measure.

    values[i, j] approximates p(z, y_i, rho_j) in
    (e^{zM} f)(y_i) = sum_j p(z, y_i, rho_j) f(rho_j) rho_j^w omega_j,
    where w = measure_exponent.
    """

    def __init__(self, z, values, grid, measure_exponent, params):
        self.z = complex(z)
        self.values = np.asarray(values, dtype=complex)
        self.grid = grid
        self.measure_exponent = float(measure_exponent)
        self.params = dict(params)

    def apply(self, f):
        w = node_weights(self.grid.y_nodes, self.measure_exponent)
        return self.values @ (np.asarray(f, dtype=complex) * w)

    def __repr__(self):
        return ("Kernel1D(z=%s, J=%d, measure_exponent=%g)"
                % (self.z, self.values.shape[0], self.measure_exponent))


def expm_kernel(op, z):
    """Kernel of e^{zM} via a dense matrix exponential (Re z > 0, J <= 512)."""
    z = complex(z)
    if z.real <= 0:
        raise ValueError("need Re z > 0")
    if op.size > 512:
        raise ValueError("dense matrix exponential limited to J <= 512")
    E = expm(z * op.dense_operator())
    values = E / op.inner_weight[None, :]
    return Kernel1D(z, values, op.grid, op.inner_exponent, op.params)


# ---------------------------------------------------------------------------
# norm probes and scans


def weighted_opnorm_estimate(op, lam, rng, probes=16, iters=3):
    """Estimate ||lam (lam - M)^(-1)|| in the W-weighted operator norm.

    Randomized power iteration on T* T (T = lam R_lam, adjoint in the W inner
    product): `probes` random starts, `iters` power steps each, max taken.
    """
    best = 0.0
    absl2 = abs(lam) ** 2
    for _ in range(probes):
        v = rng.standard_normal(op.size) + 1j * rng.standard_normal(op.size)
        v /= op.weighted_norm(v)
        for _ in range(iters):
            tv = resolve(op, lam, v)
            v_new = resolve_adjoint(op, lam, tv)
            sigma2 = absl2 * np.real(op.weighted_inner(tv, tv))
            v = absl2 * v_new
            n = op.weighted_norm(v)
            if n == 0:
                break
            v /= n
        best = max(best, np.sqrt(max(sigma2, 0.0)))
    return float(best)


def sector_angle(mixing_norm):
    """Half-angle of analyticity: pi/2 - arctan(|a| / sqrt(1 - |a|^2))."""
    a = float(mixing_norm)
    if not 0.0 <= a < 1.0:
        raise ValueError("need |mixing| < 1")
    return np.pi / 2.0 - np.arctan(a / np.sqrt(1.0 - a * a))


def sector_resolvent_scan(op, mixing_norm, rng, margin=0.1, n_radii=8,
                          n_angles=8, probes=4, iters=3):
    """sup ||lam R_lam||_W over the sector of half-angle (analyticity - margin).

    lam ranges over 8 log-spaced moduli in [1e-2, 1e2] and 8 arguments
    filling the sector (64 samples).  Returns the supremum, the estimate
    grid and the half-angle used.
    """
    theta = sector_angle(mixing_norm) - margin
    radii = np.logspace(-2, 2, n_radii)
    angles = np.linspace(-theta, theta, n_angles)
    estimates = np.zeros((n_radii, n_angles))
    for i, r in enumerate(radii):
        for k, phi in enumerate(angles):
            lam = r * np.exp(1j * phi)
            estimates[i, k] = weighted_opnorm_estimate(
                op, lam, rng, probes=probes, iters=iters)
    return {"sup": float(estimates.max()), "estimates": estimates,
            "angle": float(theta)}


def semigroup_domination_check(grid, c, beta, drift_b, potential_coeff, t,
                               panel=None):
    """Check |e^{tA} f| <= (e^{tB} |f|) + slack, pointwise, plus kernels.

    A is the graded oblique operator, B the pure Bessel operator in the same
    L^2(y^c).  Returns the largest relative pointwise excess over the panel
    and the kernel-level excess max(|p_A| - p_B) / max p_B (both should be
    small and vanish under refinement).
    """
    op_b = assemble_form(grid, "bessel_drift", c=c, beta=beta,
                         drift_b=drift_b, potential_coeff=potential_coeff)
    op_0 = assemble_form(grid, "bessel", c=c)
    ker_b = expm_kernel(op_b, t)
    ker_0 = expm_kernel(op_0, t)
    if panel is None:
        panel = panels.vertical_panel(grid.y_max, count=6)
    excess_f = 0.0
    for prof in panel:
        f = prof(grid.y_nodes).astype(complex)
        lhs = np.abs(ker_b.apply(f))
        rhs = np.abs(ker_0.apply(np.abs(f)))
        excess_f = max(excess_f, float((lhs - rhs).max() / max(rhs.max(), 1e-300)))
    pk = np.abs(ker_b.values)
    p0 = ker_0.values.real
    excess_k = float((pk - p0).max() / p0.max())
    return {"field_excess": excess_f, "kernel_excess": excess_k}


def gaussian_envelope_fit(kernel, t, dist, prefactor, bins=20, thresh=1e-13):
    """Fit |p| <= C prefactor(rho) exp(-dist(y, rho)^2 / (kappa t)).

    dist: (y_i, rho_j) -> separation in the kernel's natural distance;
    prefactor: rho_j -> on-diagonal envelope (t-dependence included by the
    caller).  Envelope regression: bin s = dist^2/t, regress the per-bin max
    of log(|p| / prefactor) linearly in s; kappa = -1/slope and C is the
    uniform max of |p| / (prefactor exp(-s/kappa)).

    Returns dict with C, kappa and the masked-point count.  kappa = inf when
    no Gaussian decay is visible (slope >= 0): callers treat that as failure.
    """
    y = kernel.grid.y_nodes
    P = np.abs(kernel.values)
    pref = prefactor(y)[None, :] * np.ones((y.size, 1))
    s = dist(y[:, None], y[None, :]) ** 2 / t
    mask = P >= thresh * P.max()
    g = np.log(P[mask] / pref[mask])
    sv = s[mask]
    edges = np.linspace(0.0, sv.max() * (1 + 1e-12), bins + 1)
    smax, gmax = [], []
    for k in range(bins):
        sel = (sv >= edges[k]) & (sv < edges[k + 1])
        if np.any(sel):
            smax.append(0.5 * (edges[k] + edges[k + 1]))
            gmax.append(g[sel].max())
    smax = np.asarray(smax)
    gmax = np.asarray(gmax)
    if smax.size < 3:
        return {"C": float("inf"), "kappa": float("inf"), "points": int(mask.sum())}
    slope, intercept = np.polyfit(smax, gmax, 1)
    if slope >= 0:
        return {"C": float(np.exp(gmax.max())), "kappa": float("inf"),
                "points": int(mask.sum())}
    kappa = -1.0 / slope
    C = float(np.exp((g + sv / kappa).max()))
    return {"C": C, "kappa": float(kappa), "points": int(mask.sum())}


def bessel_kernel_fit(kernel, c, t, bins=20):
    """Gaussian-envelope fit for the Bessel kernel, distance |y - rho|.

    Envelope C t^(-1/2) rho^(-c) min(rho/sqrt(t), 1)^c exp(-|y-rho|^2/(kappa t)),
    stated with respect to the measure rho^c d rho.
    """
    rt = np.sqrt(t)

    def pref(rho):
        return t ** -0.5 * rho ** -float(c) * np.minimum(rho / rt, 1.0) ** float(c)

    return gaussian_envelope_fit(kernel, t, lambda yy, rr: np.abs(yy - rr),
                                 pref, bins=bins)


def model_kernel_fit(kernel, c, alpha, t, bins=20):
    """Gaussian-envelope fit for the degenerate model kernel.

    The substitution z = y^e with e = 1 - alpha/2 turns y^alpha B_c into
    e^2 B_ct, ct = (c - alpha/2)/e, so the kernel is exactly
    e * p_bessel(e^2 t, y^e, rho^e) and inherits the Bessel envelope

        C (e^2 t)^(-1/2) rho^(-e ct) min(rho^e / (e sqrt(t)), 1)^ct
          exp(-|y^e - rho^e|^2 / (kappa e^2 t)),

    with respect to the measure rho^(c-alpha) d rho.
    """
    a = float(alpha)
    e = 1.0 - a / 2.0
    ct = (float(c) - a / 2.0) / e
    te = e * e * t
    rte = np.sqrt(te)

    def pref(rho):
        ze = rho ** e
        return te ** -0.5 * ze ** -ct * np.minimum(ze / rte, 1.0) ** ct

    return gaussian_envelope_fit(
        kernel, te, lambda yy, rr: np.abs(yy ** e - rr ** e), pref, bins=bins)


# ---------------------------------------------------------------------------
# estimate checks (strong-form panels, grid-converged)


def equivalence_transform_check(alpha, c, mixing_freq, freq_norm2,
                                levels=(128, 256, 512), y_max=1.0,
                                panel_count=6):
    """Conjugation identity between the model mode and the graded oblique form.

    Checks, on a panel of edge-avoiding test functions f,

        y^alpha (B_c + 2i s Dy - k2) f
          = (T o S) [ (beta+1)^(-2) A_{bt,beta} ] (T o S)^(-1) f,

    with beta = alpha/(2-alpha), ct = (2c-alpha)/(2-alpha),
    bt = 2 s (beta+1), mu = (beta+1)^2 (k2 - s^2): T the vertical power
    isometry of exponent -alpha/2 (L^2(y^ct) -> L^2(y^(c-alpha))) and S the
    unimodular phase exp(-i s y^(2/(2-alpha))).  Both sides are evaluated with
    the 3-point nonuniform stencils on matched grids; the max relative
    discrepancy must decay at first order or better under refinement.

    Returns {"levels", "errors", "order"}.
    """
    from .transforms import apply_power, apply_phase, power_image_grid
    from .grid import Field, diff1_matrix, diff2_matrix

    a = float(alpha)
    if not a < 2:
        raise ValueError("need alpha < 2")
    s = float(mixing_freq)
    k2 = float(freq_norm2)
    beta = a / (2.0 - a)
    ct = (2.0 * c - a) / (2.0 - a)
    bt = 2.0 * s * (beta + 1.0)
    mu = (beta + 1.0) ** 2 * (k2 - s * s)

    errors = []
    for J in levels:
        g = make_grid(J, y_max, default_grading(a))
        gt = power_image_grid(g, -a / 2.0)   # nodes y^(1-alpha/2)
        y = g.y_nodes
        rho = gt.y_nodes
        D1, D2 = diff1_matrix(y), diff2_matrix(y)
        D1t, D2t = diff1_matrix(rho), diff2_matrix(rho)
        prof_panel = panels.vertical_panel(y_max, count=panel_count,
                                           kind="interior")
        worst = 0.0
        for prof in prof_panel:
            f = prof(y).astype(complex)
            lhs = y ** a * (D2 @ f + (c / y) * (D1 @ f)
                            + 2j * s * (D1 @ f) - k2 * f)
            # (T o S)^(-1) f: power map back, then remove the phase
            w = apply_power(Field(f, g), -a / 2.0, p=2.0, inverse=True,
                            target_grid=gt).values
            w = apply_phase(Field(w, gt), mixing_freq=s,
                            power=2.0 / (2.0 - a), inverse=True).values
            aw = (D2t @ w + (ct / rho) * (D1t @ w)
                  - 0.5j * bt * (ct + beta) * rho ** (beta - 1.0) * w
                  - mu * rho ** (2.0 * beta) * w)
            aw /= (beta + 1.0) ** 2
            back = apply_phase(Field(aw, gt), mixing_freq=s,
                               power=2.0 / (2.0 - a)).values
            rhs = apply_power(Field(back, gt), -a / 2.0, p=2.0,
                              target_grid=g).values
            scale = np.abs(lhs).max()
            worst = max(worst, float(np.abs(lhs - rhs).max() / scale))
        errors.append(worst)
    order = _decay_order(levels, errors)
    return {"levels": list(levels), "errors": errors, "order": order}


def _decay_order(levels, errors):
    """Least-squares slope of log error against log (1/J); 'inf' if exact."""
    lv = np.asarray(levels, dtype=float)
    er = np.asarray(errors, dtype=float)
    if np.all(er < 1e-13):
        return float("inf")
    er = np.maximum(er, 1e-300)
    slope = np.polyfit(np.log(lv), np.log(er), 1)[0]
    return float(-slope)


def interpolation_inequality_fit(alpha, c, p, m, levels=(128, 256),
                                 y_max=1.0, panel_count=20):
    """Best constant in ||y^a Dy u|| <= C ||y^a B u||^(1/2) ||y^a u||^(1/2).

    Norms in L^p(y^m) by grid quadrature; derivatives exact (closed-form
    panel).  Returns per-level constants; they must be finite and stable.
    """
    consts = []
    for J in levels:
        g = make_grid(J, y_max, default_grading(alpha))
        y = g.y_nodes
        best = 0.0
        prof_panel = panels.vertical_panel(y_max, count=panel_count)
        for prof in prof_panel:
            u = prof(y)
            du = prof.d1(y)
            bu = prof.d2(y) + (c / y) * du
            num = lp_norm(y ** alpha * du, p, m, g)
            den = (lp_norm(y ** alpha * bu, p, m, g) ** 0.5
                   * lp_norm(y ** alpha * u, p, m, g) ** 0.5)
            if den > 0:
                best = max(best, num / den)
        consts.append(float(best))
    return {"levels": list(levels), "constants": consts}


def uniform_frequency_bound_scan(alpha, c, mixing, p, m, J=256, y_max=1.0,
                                 exponents=range(-3, 7), lams=(0.1, 1.0, 10.0),
                                 panel_count=8):
    """Scan of || |xi|^2 y^a u || / || (lam - y^a L + |xi|^2 y^a) u ||.

    xi = 2^k e1 for k in `exponents`; the constant must stay bounded
    uniformly in xi (and lam with Re lam > 0).  Operator applied in strong
    form with exact panel derivatives; norms by grid quadrature.
    """
    g = make_grid(J, y_max, default_grading(alpha))
    y = g.y_nodes
    a1 = float(np.atleast_1d(mixing)[0])
    per_xi = []
    prof_panel = panels.vertical_panel(y_max, count=panel_count)
    for k in exponents:
        xi = 2.0 ** k
        s = a1 * xi
        k2 = xi * xi
        best = 0.0
        for lam in lams:
            for prof in prof_panel:
                u = prof(y).astype(complex)
                du, d2u = prof.d1(y), prof.d2(y)
                lu = y ** alpha * (d2u + (c / y) * du + 2j * s * du - k2 * u)
                f = lam * u - lu
                num = lp_norm(k2 * y ** alpha * u, p, m, g)
                den = lp_norm(f, p, m, g)
                best = max(best, num / den)
        per_xi.append(float(best))
    return {"exponents": list(exponents), "constants": per_xi,
            "max": float(max(per_xi))}


def two_route_resolvent(grid, alpha, c, mixing_freq, freq_norm2, lam, f):
    """Solve the frozen-mode resolvent by both routes; return (u1, u2).

    Route 1: (lam - y^a(B + 2i s Dy - k2))^(-1) f directly in L^2(y^(c-a)).
    Route 2: (k2 - B - 2i s Dy + lam y^(-a))^(-1) (f y^(-a)) in L^2(y^c).
    The two solutions agree up to solver rounding.
    """
    f = np.asarray(f, dtype=complex)
    op1 = assemble_form(grid, "model_mode", c=c, alpha=alpha,
                        mixing_freq=mixing_freq, freq_norm2=freq_norm2)
    u1 = resolve(op1, lam, f)
    op2 = assemble_form(grid, "model_potential", c=c, alpha=alpha,
                        mixing_freq=mixing_freq, freq_norm2=freq_norm2,
                        lam=lam)
    rhs = op2.inner_weight * (f * grid.y_nodes ** (-float(alpha)))
    ab = _solver_bands(op2, 0.0)
    u2 = solve_banded((1, 1), ab, rhs)
    return u1, u2
