"""Parameter calculus for degenerate operators on the half space.

The full operator on R^N x (0, oo) is

    L u = y^a1 Tr(Q Dxx u) + 2 y^((a1+a2)/2) q . Dx(Dy u)
          + gamma y^a2 Dyy u + y^(a2-1) (b . Dx u + c Dy u),

with diffusion block [[Q, q], [q^T, gamma]] positive definite, a2 < 2 and
a2 - a1 < 2.  Solvability in L^p(y^m dx dy) holds exactly on the open window

    max(-a1, 0) < (m + 1) / p < c / gamma + 1 - a2,

with strict inequalities.  Three changes of variables reduce L to a model
operator y^alpha (Dxx + 2 a . Dx(Dy) + B) with B = Dyy + (c_b / y) Dy:

  * a vertical shear x -> x - (b/c) y removes the oblique drift b . Dx;
    on the diffusion block it is the congruence M -> A M A^T with
    A = [[I, -b/c], [0, 1]], hence ellipticity is preserved exactly;
  * a linear change of x whitens the sheared Q and turns the mixed coupling
    into a single vector `a` with |a| < 1 (the Schur complement condition);
  * the vertical power substitution y -> y^(beta+1) with beta = (a1 - a2)/2
    equalizes the two degeneracy powers.

Each map is an isometry between weighted L^p spaces, so it acts on the
parameters (a1, a2, c, m) by explicit rational formulas collected here.  The
power maps form a one-parameter group: applying beta1 then beta2 equals the
single map with (beta+1) = (beta1+1)(beta2+1).
"""

import numpy as np


_CONFIG_KEYS = (
    "q_matrix", "q_vector", "gamma", "drift_b", "drift_c",
    "alpha1", "alpha2", "p", "m", "dimension",
)


class OperatorSpec:
    """Coefficients of the full operator on R^N x (0, oo).

    Parameters
    ----------
    q_matrix : (N, N) array_like
        Symmetric horizontal diffusion matrix Q.
    q_vector : (N,) array_like
        Mixed-diffusion coupling vector q.
    gamma : float
        Vertical diffusion coefficient, > 0.
    drift_b : (N,) array_like
        Oblique drift vector (coefficient of y^(a2-1) b . Dx).
    drift_c : float
        Vertical drift coefficient (of y^(a2-1) Dy).
    alpha1, alpha2 : float
        Degeneracy powers; require alpha2 < 2 and alpha2 - alpha1 < 2.

    Invariants checked on construction: the (N+1) x (N+1) block
    [[Q, q], [q^T, gamma]] is positive definite; drift_b vanishes when
    drift_c = 0 (otherwise no shear can remove it).
    """

    def __init__(self, q_matrix, q_vector, gamma, drift_b, drift_c,
                 alpha1, alpha2):
        Q = np.atleast_2d(np.asarray(q_matrix, dtype=float))
        n = Q.shape[0] if Q.size else 0
        if Q.size == 0:
            Q = np.zeros((0, 0))
        if Q.shape != (n, n):
            raise ValueError("q_matrix must be square, got shape %r" % (Q.shape,))
        q = np.asarray(q_vector, dtype=float).reshape(-1)
        b = np.asarray(drift_b, dtype=float).reshape(-1)
        if q.shape != (n,) or b.shape != (n,):
            raise ValueError("q_vector and drift_b must have length %d" % n)
        scale = max(1.0, abs(Q).max() if Q.size else 0.0)
        if Q.size and abs(Q - Q.T).max() > 1e-12 * scale:
            raise ValueError("q_matrix must be symmetric")
        Q = 0.5 * (Q + Q.T) if Q.size else Q
        gamma = float(gamma)
        drift_c = float(drift_c)
        alpha1 = float(alpha1)
        alpha2 = float(alpha2)
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        if not alpha2 < 2:
            raise ValueError("alpha2 must be < 2")
        if not alpha2 - alpha1 < 2:
            raise ValueError("alpha2 - alpha1 must be < 2")
        if drift_c == 0.0 and b.size and abs(b).max() != 0.0:
            raise ValueError("drift_b requires a nonzero drift_c to shear away")
        block = diffusion_block(Q, q, gamma)
        eigs = np.linalg.eigvalsh(block)
        if eigs.min() <= 0:
            raise ValueError("diffusion block [[Q, q], [q^T, gamma]] must be "
                             "positive definite (min eig %.3e)" % eigs.min())
        self.q_matrix = Q
        self.q_vector = q
        self.gamma = gamma
        self.drift_b = b
        self.drift_c = drift_c
        self.alpha1 = alpha1
        self.alpha2 = alpha2

    @property
    def dim(self):
        """Horizontal dimension N (0 means purely vertical)."""
        return self.q_matrix.shape[0]

    def __repr__(self):
        return ("OperatorSpec(dim=%d, gamma=%g, drift_c=%g, alpha1=%g, "
                "alpha2=%g)" % (self.dim, self.gamma, self.drift_c,
                                self.alpha1, self.alpha2))


class SpaceSpec:
    """Weighted Lebesgue space L^p(y^m dx dy): exponent p in (1, oo), weight m."""

    def __init__(self, p, m):
        p = float(p)
        m = float(m)
        if not (1.0 < p < np.inf):
            raise ValueError("p must lie in (1, oo)")
        self.p = p
        self.m = m

    def __repr__(self):
        return "SpaceSpec(p=%g, m=%g)" % (self.p, self.m)


class ModelParams:
    """Parameters of the reduced model operator in L^p(y^m dx dy).

    The model is y^alpha (Dxx + 2 mixing . Dx(Dy) + B) with
    B = Dyy + (c_bessel / y) Dy, |mixing| < 1 and alpha < 2.
    """

    def __init__(self, mixing, alpha, c_bessel, m, p):
        a = np.asarray(mixing, dtype=float).reshape(-1)
        alpha = float(alpha)
        if np.linalg.norm(a) >= 1.0:
            raise ValueError("|mixing| must be < 1 (got %g)" % np.linalg.norm(a))
        if not alpha < 2:
            raise ValueError("alpha must be < 2")
        self.mixing = a
        self.alpha = alpha
        self.c_bessel = float(c_bessel)
        self.m = float(m)
        self.p = float(p)

    @property
    def dim(self):
        return self.mixing.shape[0]

    def __repr__(self):
        return ("ModelParams(|mixing|=%g, alpha=%g, c_bessel=%g, m=%g, p=%g)"
                % (np.linalg.norm(self.mixing), self.alpha, self.c_bessel,
                   self.m, self.p))


class WindowReport:
    """Outcome of the admissibility-window test, with signed margins.

    value = (m+1)/p must satisfy lower < value < upper strictly; margins are
    value - lower and upper - value.  Comparisons are exact float comparisons:
    sitting on an endpoint fails.
    """

    def __init__(self, value, lower, upper):
        self.value = float(value)
        self.lower = float(lower)
        self.upper = float(upper)
        self.lower_margin = self.value - self.lower
        self.upper_margin = self.upper - self.value
        self.passed = (self.value > self.lower) and (self.value < self.upper)

    def __repr__(self):
        return ("WindowReport(passed=%s, value=%.6g, lower=%.6g, upper=%.6g)"
                % (self.passed, self.value, self.lower, self.upper))


def diffusion_block(Q, q, gamma):
    """Assemble the (N+1) x (N+1) diffusion block [[Q, q], [q^T, gamma]]."""
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    if Q.size == 0:
        Q = np.zeros((0, 0))
    q = np.asarray(q, dtype=float).reshape(-1, 1)
    n = Q.shape[0]
    block = np.zeros((n + 1, n + 1))
    block[:n, :n] = Q
    block[:n, n:] = q
    block[n:, :n] = q.T
    block[n, n] = float(gamma)
    return block


def validate_window(spec, space=None):
    """Admissibility window for L^p(y^m dx dy) solvability.

    For an OperatorSpec the window is
        max(-alpha1, 0) < (m+1)/p < c/gamma + 1 - alpha2,
    and `space` must be given.  For ModelParams (which carries its own m, p)
    it is max(-alpha, 0) < (m+1)/p < c_bessel + 1 - alpha.

    Returns
    -------
    WindowReport
        Strict pass/fail with signed margins to both endpoints.
    """
    if isinstance(spec, ModelParams):
        p, m = spec.p, spec.m
        lower = max(-spec.alpha, 0.0)
        upper = spec.c_bessel + 1.0 - spec.alpha
    else:
        if space is None:
            raise ValueError("validate_window(OperatorSpec, ...) needs a SpaceSpec")
        p, m = space.p, space.m
        lower = max(-spec.alpha1, 0.0)
        upper = spec.drift_c / spec.gamma + 1.0 - spec.alpha2
    return WindowReport((m + 1.0) / p, lower, upper)


def beta_map(beta, alpha1, alpha2, c, m, p):
    """Parameter action of the vertical power substitution y -> y^(beta+1).

    The substitution is an isometry of L^p(y^m dy) onto L^p(y^mt dy) and maps
    the operator class into itself with

        a1 -> a1 / (beta+1),          a2 -> (a2 + 2 beta) / (beta+1),
        c  -> (c + beta) / (beta+1),  m  -> (m - beta) / (beta+1).

    p is unchanged (listed for signature symmetry).  beta = -1 is the
    degenerate collapse and is rejected.

    Returns
    -------
    tuple
        (alpha1_new, alpha2_new, c_new, m_new).
    """
    beta = float(beta)
    if beta == -1.0:
        raise ValueError("beta = -1 collapses the substitution")
    s = beta + 1.0
    return (alpha1 / s, (alpha2 + 2.0 * beta) / s, (c + beta) / s,
            (m - beta) / s)


def invert_beta(beta):
    """Exponent of the inverse power substitution: -beta / (beta+1)."""
    beta = float(beta)
    if beta == -1.0:
        raise ValueError("beta = -1 has no inverse")
    return -beta / (beta + 1.0)


def compose_beta(beta1, beta2):
    """Exponent of beta2-after-beta1: (1+b3) = (1+b1)(1+b2)."""
    return (beta1 + 1.0) * (beta2 + 1.0) - 1.0


def shear_map(spec):
    """Remove the oblique drift by the vertical shear x -> x - (b/c) y.

    On the diffusion block [[Q, q], [q^T, gamma]] the shear acts as the
    congruence A M A^T with A = [[I, -b/c], [0, 1]], so

        q -> q - (gamma/c) b,
        Q -> Q - (b q^T + q b^T)/c + (gamma/c^2) b b^T,

    gamma, c and the powers are unchanged and the new drift_b is zero.
    Positive definiteness is preserved exactly (congruence); its loss would be
    an internal error and raises.

    Returns
    -------
    OperatorSpec
        Sheared coefficients with drift_b = 0.  If drift_b is already zero the
        spec is returned unchanged (same parameters, new object).
    """
    b = spec.drift_b
    if b.size == 0 or abs(b).max() == 0.0:
        return OperatorSpec(spec.q_matrix, spec.q_vector, spec.gamma,
                            np.zeros(spec.dim), spec.drift_c,
                            spec.alpha1, spec.alpha2)
    c = spec.drift_c
    if c == 0.0:
        raise ValueError("shear requires drift_c != 0")
    q = spec.q_vector
    g = spec.gamma
    q_new = q - (g / c) * b
    Q_new = (spec.q_matrix - (np.outer(b, q) + np.outer(q, b)) / c
             + (g / c ** 2) * np.outer(b, b))
    eigs = np.linalg.eigvalsh(diffusion_block(Q_new, q_new, g))
    if eigs.min() <= 0:
        raise RuntimeError("shear lost ellipticity; must not occur "
                           "(min eig %.3e)" % eigs.min())
    return OperatorSpec(Q_new, q_new, g, np.zeros(spec.dim), c,
                        spec.alpha1, spec.alpha2)


def _symmetric_eigh(M):
    """eigh with a deterministic sign convention.

    Eigenvalues ascending; each eigenvector is flipped so that its first
    component exceeding 1e-12 of the column max is positive.
    """
    w, V = np.linalg.eigh(M)
    for k in range(V.shape[1]):
        col = V[:, k]
        nz = np.nonzero(abs(col) > 1e-12 * abs(col).max())[0]
        if nz.size and col[nz[0]] < 0:
            V[:, k] = -col
    return w, V


def _inv_sqrt_sym(M):
    """Symmetric inverse square root of a positive definite matrix."""
    w, V = _symmetric_eigh(M)
    if w.min() <= 0:
        raise ValueError("matrix not positive definite")
    return (V * w ** -0.5) @ V.T


def reduce_to_model(spec, space):
    """Reduce the full operator to model form; return parameters and the chain.

    The pipeline is: shear away drift_b (if present), whiten the horizontal
    diffusion with the linear x-map A = (beta+1) sqrt(gamma) Q^(-1/2)
    (Q the sheared matrix, beta = (alpha1-alpha2)/2), then apply the vertical
    power substitution with that beta.  The result is

        L = s . T [ y^alpha (Dxx + 2 mixing . Dx(Dy) + B_{c_bessel}) ] T^(-1),

    with scale s = gamma (beta+1)^2, alpha = 2 alpha1 / (alpha1 - alpha2 + 2),
    c_bessel = (c/gamma + beta) / (beta+1), mixing = Q^(-1/2) q / sqrt(gamma),
    and m mapped to (m - beta)/(beta+1).  |mixing| < 1 is exactly the Schur
    complement condition gamma - q^T Q^(-1) q > 0, hence guaranteed.

    Returns
    -------
    (ModelParams, TransformChain)
        The chain applies right-to-left to model-side functions: u = T v.
    """
    from .transforms import TransformChain, TransformStep

    steps = []
    work = spec
    if spec.dim and abs(spec.drift_b).max() != 0.0:
        shift = spec.drift_b / spec.drift_c
        work = shear_map(spec)
        steps.append(TransformStep("shear", {"shift": shift.tolist()}))

    beta = 0.5 * (work.alpha1 - work.alpha2)
    g = work.gamma
    if work.dim:
        A = (beta + 1.0) * np.sqrt(g) * _inv_sqrt_sym(work.q_matrix)
        mixing = _inv_sqrt_sym(work.q_matrix) @ work.q_vector / np.sqrt(g)
        steps.append(TransformStep("linear_x", {
            "matrix": A.tolist(),
            "det": float(np.linalg.det(A)),
        }))
    else:
        mixing = np.zeros(0)

    steps.append(TransformStep("power", {"beta": beta}))

    alpha1_t, alpha2_t, c_t, m_t = beta_map(
        beta, work.alpha1, work.alpha2, work.drift_c / g, space.m, space.p)
    # beta = (a1-a2)/2 equalizes the powers: alpha1_t == alpha2_t == alpha.
    alpha = alpha1_t
    model = ModelParams(mixing, alpha, c_t, m_t, space.p)
    chain = TransformChain(steps, scale=g * (beta + 1.0) ** 2, p=space.p)
    return model, chain


def problem_to_config(spec, space):
    """Serialize an (OperatorSpec, SpaceSpec) pair to the flat config dict."""
    return {
        "q_matrix": [float(v) for v in spec.q_matrix.reshape(-1)],
        "q_vector": [float(v) for v in spec.q_vector],
        "gamma": spec.gamma,
        "drift_b": [float(v) for v in spec.drift_b],
        "drift_c": spec.drift_c,
        "alpha1": spec.alpha1,
        "alpha2": spec.alpha2,
        "p": space.p,
        "m": space.m,
        "dimension": spec.dim,
    }


def config_to_problem(cfg):
    """Parse the flat config dict; unknown or missing keys raise ValueError.

    q_matrix is a flat row-major list of length dimension^2.
    """
    if not isinstance(cfg, dict):
        raise ValueError("config must be a mapping")
    for key in cfg:
        if key not in _CONFIG_KEYS:
            raise ValueError("unknown config key: %r" % (key,))
    for key in _CONFIG_KEYS:
        if key not in cfg:
            raise ValueError("missing config key: %r" % (key,))
    n = int(cfg["dimension"])
    if n < 0:
        raise ValueError("dimension must be >= 0")
    qm = np.asarray(cfg["q_matrix"], dtype=float).reshape(-1)
    if qm.size != n * n:
        raise ValueError("q_matrix must have dimension^2 = %d entries, got %d"
                         % (n * n, qm.size))
    spec = OperatorSpec(qm.reshape(n, n) if n else np.zeros((0, 0)),
                        cfg["q_vector"], cfg["gamma"], cfg["drift_b"],
                        cfg["drift_c"], cfg["alpha1"], cfg["alpha2"])
    space = SpaceSpec(cfg["p"], cfg["m"])
    return spec, space
