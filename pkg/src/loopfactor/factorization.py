"""Triangular factorization g = l m a u and its root-subgroup calculus.

For g = k1(eta)* e^chi k2(zeta) the four factors are assembled from the
triangular data of k1 and k2:

    u = [[1, M_{0+}], [0, 1]] diag(e^{chi_+}, e^{-chi_+}) V2
    l = V1* diag(e^{-chi_+*}, e^{chi_+*}) [[1, (a0 m0)^2 M_-], [0, 1]]
    m0 = e^{chi_0},  a0 = a1 a2,
    M = (a0 m0)^{-2} e^{2 chi_+*} Y + e^{2 chi_+} X*,  Y = a1^2 y,  X = a2^{-2} x,

where k1 = [[1,0],[y*,1]] diag(a1, 1/a1) V1 and
k2 = [[1,x*],[0,1]] diag(a2, 1/a2) V2.  (The l-corner carries the (a0 m0)^2
factor: splitting [[1,A],[0,1]] D [[1,B],[0,1]] into minus/plus unipotent
factors around the constant diagonal D = a0 m0 scales the minus corner by
D^2; the pure-k2 case then reproduces l = [[1, x*],[0,1]] exactly.)
"""

from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .laurent import (
    MatrixLaurent,
    ScalarLaurent,
    exp_scalar,
    from_samples,
    mul,
    sample_grid,
)
from .loops import (
    DiagExponent,
    build_k1,
    build_k2,
    recover_eta,
    recover_zeta,
)
from .operators import (
    IdentityReport,
    det_trunc,
    hankel_trunc,
    make_report,
    product_compression_AgAginv,
    scalar_hankel_product_trunc,
    shifted_toeplitz_trunc,
    toeplitz_trunc,
)


class StratumBoundaryError(RuntimeError):
    """A truncated operator was too close to singular for the requested step."""


# ---------------------------------------------------------------------------
# x and y from the unitarity relations (exact for finite data)
# ---------------------------------------------------------------------------


def solve_x_exact(k2):
    """x (analytic, x(0)=0) with [[1, -x*],[0,1]] k2 analytic; back-substitution.

    The condition is (x* d2)_- = (-c2*)_- read from the top row of the
    triangular factorization; d2(0) > 0 makes the system triangular.
    """
    c = k2.entry(1, 0)
    d = k2.entry(1, 1)
    n = max(k2.max_deg, 0)
    d0 = d.coeff(0)
    if abs(d0) < 1e-13:
        raise StratumBoundaryError("d2(0) vanishes")
    xbar = {}
    for m in range(n, 0, -1):
        s = -np.conj(c.coeff(m))
        for j in range(m + 1, n + 1):
            s -= xbar.get(j, 0j) * d.coeff(j - m)
        xbar[m] = s / d0
    return ScalarLaurent({m: np.conj(v) for m, v in xbar.items() if v != 0})


def solve_y_exact(k1):
    """y = sum_{j>=0} y_j z^j with [[1,0],[-y*,1]] k1 having analytic (2,1) row."""
    a = k1.entry(0, 0)
    b = k1.entry(0, 1)
    n = max(k1.max_deg, 0)
    a0 = a.coeff(0)
    if abs(a0) < 1e-13:
        raise StratumBoundaryError("a(0) vanishes")
    alpha = a * (1.0 / a0)  # alpha1 with alpha1(0) = 1
    ybar = {}
    for m in range(n, -1, -1):
        s = -np.conj(b.coeff(m)) / a0
        for j in range(m + 1, n + 1):
            s -= ybar.get(j, 0j) * alpha.coeff(j - m)
        ybar[m] = s
    return ScalarLaurent({m: np.conj(v) for m, v in ybar.items() if v != 0})


# ---------------------------------------------------------------------------
# triangular factorization from parameters
# ---------------------------------------------------------------------------


@dataclass
class TriangularFactors:
    """The four factors of g = l m a u plus the k-type decorations."""

    l: MatrixLaurent
    m0: complex
    a0: float
    u: MatrixLaurent
    x: ScalarLaurent | None = None
    y: ScalarLaurent | None = None
    a1: float | None = None
    a2: float | None = None
    v1: MatrixLaurent | None = None
    v2: MatrixLaurent | None = None
    chi: DiagExponent | None = None

    def reconstruct(self):
        mid = MatrixLaurent.constant(
            np.diag([self.m0 * self.a0, 1.0 / (self.m0 * self.a0)])
        )
        return mul(mul(self.l, mid), self.u)

    def residual(self, g, grid_m=None):
        diff = self.reconstruct() - g
        if grid_m is None:
            m = 2
            while (1 << m) <= diff.span() + 1:
                m += 1
            grid_m = m
        vals = sample_grid(diff, grid_m)
        return float(np.abs(vals).max())


def _unipotent_upper(corner):
    return MatrixLaurent.from_scalars(
        [[ScalarLaurent.one(), corner], [ScalarLaurent.zero(), ScalarLaurent.one()]]
    )


def _unipotent_lower(corner):
    return MatrixLaurent.from_scalars(
        [[ScalarLaurent.one(), ScalarLaurent.zero()], [corner, ScalarLaurent.one()]]
    )


def tri_factor_from_params(etas, chi, zetas, trunc=30):
    """Triangular factorization of g = k1(eta)* e^chi k2(zeta)."""
    if not isinstance(chi, DiagExponent):
        chi = DiagExponent(chis=list(chi))
    k1 = build_k1(etas)
    k2 = build_k2(zetas)
    a1 = float(np.real(k1.entry(0, 0).coeff(0)))
    a2 = 1.0 / float(np.real(k2.entry(1, 1).coeff(0)))
    x = solve_x_exact(k2)
    y = solve_y_exact(k1)
    v1 = mul(
        MatrixLaurent.diag(
            ScalarLaurent({0: 1.0 / a1}), ScalarLaurent({0: a1})
        ),
        mul(_unipotent_lower(-y.star()), k1),
    ).trim(1e-14)
    v2 = mul(
        MatrixLaurent.diag(ScalarLaurent({0: 1.0 / a2}), ScalarLaurent({0: a2})),
        mul(_unipotent_upper(-x.star()), k2),
    ).trim(1e-14)

    chi_plus = chi.plus_part()
    e_plus = exp_scalar(chi_plus, trunc)
    e_plus_inv = exp_scalar(-chi_plus, trunc)
    e2_plus = exp_scalar(chi_plus * 2.0, trunc)
    e2_plus_star = e2_plus.star()
    m0 = cmath.exp(chi.chi0)
    a0 = a1 * a2

    Y = y * (a1**2)
    Xstar = x.star() * (a2 ** (-2))
    d2 = (a0 * m0) ** 2
    M = (e2_plus_star * Y) * (1.0 / d2) + e2_plus * Xstar

    u = mul(
        _unipotent_upper(M.part("zero_plus")),
        mul(MatrixLaurent.diag(e_plus, e_plus_inv), v2),
    )
    l = mul(
        mul(v1.star(), MatrixLaurent.diag(e_plus_inv.star(), e_plus.star())),
        _unipotent_upper(M.part("minus") * d2),
    )
    return TriangularFactors(
        l=l.trim(1e-15),
        m0=m0,
        a0=a0,
        u=u.trim(1e-15),
        x=x,
        y=y,
        a1=a1,
        a2=a2,
        v1=v1,
        v2=v2,
        chi=chi,
    )


# ---------------------------------------------------------------------------
# parameter recovery from factors
# ---------------------------------------------------------------------------


@dataclass
class RecoveredParams:
    a1: float
    a2: float
    chis: list
    k1: MatrixLaurent
    k2: MatrixLaurent
    etas: list = field(default_factory=list)
    zetas: list = field(default_factory=list)


def recover_params_from_factors(l, u, grid_m=10, tol=1e-9):
    """(a1, a2, chi_+ data, k1, k2) from the l and u factors, by quadrature.

    a1 and a2 come from trapezoid log-integrals of the first l column and the
    second u row; Re chi_+ from |u21|^2 + |u22|^2 = a2^2 exp(-2 Re chi_+), and
    the loops from l11 = alpha1* e^{chi_-}, u21 = gamma2 e^{-chi_+} etc.
    """
    G = 1 << grid_m
    lv = sample_grid(l, grid_m)
    uv = sample_grid(u, grid_m)
    Fl = np.abs(lv[:, 0, 0]) ** 2 + np.abs(lv[:, 1, 0]) ** 2
    Fu = np.abs(uv[:, 1, 0]) ** 2 + np.abs(uv[:, 1, 1]) ** 2
    if Fl.min() < 1e-14 or Fu.min() < 1e-14:
        raise StratumBoundaryError("log integrand vanishes on the grid")
    a1 = float(np.exp(-np.sum(np.log(Fl)) / (2 * G)))
    a2 = float(np.exp(np.sum(np.log(Fu)) / (2 * G)))

    h = -0.5 * np.log(Fu / a2**2)  # Re chi_+ on the grid
    spec = np.fft.fft(h) / G
    chis = [2.0 * complex(spec[j]) for j in range(1, G // 2)]
    while chis and abs(chis[-1]) < tol:
        chis.pop()
    chi_vals = np.fft.ifft(
        np.concatenate([[0.0], 2.0 * spec[1 : G // 2], np.zeros(G - G // 2 + 1)])[:G]
    ) * G  # chi_+ values on the grid

    e_minus = np.exp(-np.conj(chi_vals))  # e^{chi_-} = e^{-conj(chi_+)} on S^1
    alpha1_star = lv[:, 0, 0] / e_minus
    beta1_star = lv[:, 1, 0] / e_minus
    k1_vals = np.empty((G, 2, 2), dtype=complex)
    k1_vals[:, 0, 0] = np.conj(alpha1_star) * a1
    k1_vals[:, 0, 1] = np.conj(beta1_star) * a1
    k1_vals[:, 1, 0] = -beta1_star * a1
    k1_vals[:, 1, 1] = alpha1_star * a1

    e_plus = np.exp(chi_vals)
    gamma2 = uv[:, 1, 0] * e_plus
    delta2 = uv[:, 1, 1] * e_plus
    k2_vals = np.empty((G, 2, 2), dtype=complex)
    k2_vals[:, 0, 0] = np.conj(delta2) / a2
    k2_vals[:, 0, 1] = -np.conj(gamma2) / a2
    k2_vals[:, 1, 0] = gamma2 / a2
    k2_vals[:, 1, 1] = delta2 / a2

    half = G // 2
    k1_ml = from_samples(k1_vals, -half, half - 1, su2=True, tol=1e-10)
    k2_ml = from_samples(k2_vals, -half, half - 1, su2=True, tol=1e-10)
    etas = recover_eta(k1_ml, n_max=half - 1, tol=1e-8)
    zetas = recover_zeta(k2_ml, n_max=half - 1, tol=1e-8)
    return RecoveredParams(a1, a2, chis, k1_ml, k2_ml, etas, zetas)


def unitarity_residuals(factors, grid_m=8):
    """Grid residuals of the k2 unitarity equations for k2-type factors."""
    if factors.v2 is None or factors.x is None or factors.a2 is None:
        raise ValueError("k2-type factors required")
    a2 = factors.a2
    vv = sample_grid(factors.v2, grid_m)
    xv = sample_grid(factors.x, grid_m) if factors.x.coeffs else np.zeros(1 << grid_m)
    al, be = vv[:, 0, 0], vv[:, 0, 1]
    ga, de = vv[:, 1, 0], vv[:, 1, 1]
    xs = np.conj(xv)
    r1 = np.abs(a2 * al + xs * ga / a2 - np.conj(de) / a2).max()
    r2 = np.abs(a2 * be + xs * de / a2 + np.conj(ga) / a2).max()
    r3 = np.abs((np.abs(ga) ** 2 + np.abs(de) ** 2) / a2**2 - 1.0).max()
    r4 = np.abs(
        np.abs(al) ** 2 + np.abs(be) ** 2 - (1.0 + np.abs(xv) ** 2) / a2**2
    ).max()
    return {
        "first_row": float(r1),
        "second_row": float(r2),
        "norm_gamma_delta": float(r3),
        "norm_alpha_beta": float(r4),
    }


# ---------------------------------------------------------------------------
# Riemann-Hilbert W / Z
# ---------------------------------------------------------------------------


def riemann_hilbert_WZ(g, N, cond_limit=1e12):
    """W = A_N^{-1} B_N, Z = C_N A_N^{-1}, and the determinant report.

    For su2-flagged g the report compares det of the 2N-compression of
    A(g) A(g^{-1}) with det(1 + W W*)^{-1}; for other symbols (where g^{-1}
    is not available as g*) the report is None.
    """
    t0 = time.perf_counter()
    A = toeplitz_trunc(g, N).entries
    if np.linalg.cond(A) > cond_limit:
        raise StratumBoundaryError("A_N(g) numerically singular: stratum boundary")
    B = hankel_trunc(g, N, "B").entries
    C = hankel_trunc(g, N, "C").entries
    W = np.linalg.solve(A, B)
    Z = np.linalg.solve(A.T, C.T).T
    report = None
    if g.su2:
        lhs, _ = det_trunc(product_compression_AgAginv(g, N))
        rhs = 1.0 / np.linalg.det(np.eye(2 * N) + W @ W.conj().T).real
        report = make_report("rh/det(AA^-1)=det(1+WW*)^-1", N, lhs.real, rhs, t0)
    return W, Z, report


def x_from_k2(k2, N=None, tol=1e-9):
    """x read from the first block column of Z(k2); Z(g) = Z(g_-).

    Cross-checked: [[1, x*],[0,1]]^{-1} k2 must be analytic within ``tol``.
    """
    if N is None:
        N = max(2 * max(k2.max_deg, 1), 4)
    _, Z, _ = riemann_hilbert_WZ(k2, N)
    cc = {}
    for i in range(1, N + 1):
        v = np.conj(Z[2 * (i - 1), 1])
        if abs(v) > 1e-12:
            cc[i] = complex(v)
    x = ScalarLaurent(cc)
    check = mul(_unipotent_upper(-x.star()), k2)
    bad = max(
        (np.abs(m).max() for d, m in check.coeffs.items() if d < 0), default=0.0
    )
    if bad > tol:
        raise ArithmeticError("Z read-off inconsistent: residual %.3g" % bad)
    return x


# ---------------------------------------------------------------------------
# the (1 + B B*)^{-1} calculus
# ---------------------------------------------------------------------------


def inverse_op_apply(c2, d2, f):
    """K f = c2 (c2* f)_{0+} + d2 (d2* f)_{0+}; K = (1 + B(x) B(x)*)^{-1}."""
    t1 = c2 * (c2.star() * f).part("zero_plus")
    t2 = d2 * (d2.star() * f).part("zero_plus")
    return t1 + t2


def k_operator_matrix(zetas, N):
    """Dense N x N section of (1 + B(x) B(x)*)^{-1} via the c2/d2 formula."""
    k2 = build_k2(zetas)
    c2, d2 = k2.entry(1, 0), k2.entry(1, 1)
    K = np.zeros((N, N), dtype=complex)
    for j in range(N):
        col = inverse_op_apply(c2, d2, ScalarLaurent.monomial(1.0, j))
        for i in range(N):
            K[i, j] = col.coeff(i)
    return K


def k_operator_spectrum(zetas, N=64):
    """Eigenvalues of the truncated (1 + B B*)^{-1}; diagnostic dump only."""
    w = np.linalg.eigvalsh(k_operator_matrix(zetas, N))
    return np.sort(w)


def verify_keyidentities(zetas, N=64):
    """The identity suite tying a2, gamma2, delta2 to the Hankel calculus."""
    k2 = build_k2(zetas)
    c2, d2 = k2.entry(1, 0), k2.entry(1, 1)
    a2_sq = float(np.prod([1.0 + abs(z) ** 2 for z in zetas])) if zetas else 1.0
    a2 = math.sqrt(a2_sq)
    gamma2 = c2 * a2
    delta2 = d2 * a2
    x = solve_x_exact(k2)
    reports = []

    t0 = time.perf_counter()
    K1 = inverse_op_apply(c2, d2, ScalarLaurent.one())
    inner = K1.coeff(0).real
    reports.append(make_report("keyid/a2^2=1/<1|K1>", N, 1.0 / inner, a2_sq, t0))

    t0 = time.perf_counter()
    delta_res = (K1 * a2_sq - delta2).norm_inf()
    reports.append(make_report("keyid/delta2=a2^2 K(1)", N, delta_res, 0.0, t0))

    t0 = time.perf_counter()
    n = max(k2.max_deg, 1)
    # B*B on the z^{-j} side (j = 1..n): entry (i,j) = sum_{k>=0} conj(x_{i+k}) x_{j+k}
    P = np.zeros((n, n), dtype=complex)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            P[i - 1, j - 1] = sum(
                np.conj(x.coeff(i + k)) * x.coeff(j + k) for k in range(0, n)
            )
    xvec = np.array([np.conj(x.coeff(j)) for j in range(1, n + 1)])
    sol = np.linalg.solve(np.eye(n) + P, xvec)
    gvec = np.array([np.conj(gamma2.coeff(j)) for j in range(1, n + 1)])
    gamma_res = np.abs(-a2_sq * sol - gvec).max() if n else 0.0
    reports.append(make_report("keyid/gamma2*=-a2^2(1+B*B)^-1 x*", N, gamma_res, 0.0, t0))

    t0 = time.perf_counter()
    Kdense = np.linalg.inv(np.eye(N) + scalar_hankel_product_trunc(x, N).entries)
    Kform = k_operator_matrix(zetas, N)
    reports.append(
        make_report("keyid/K-formula-vs-dense-inverse", N, np.abs(Kdense - Kform).max(), 0.0, t0)
    )

    t0 = time.perf_counter()
    diag_expect = np.empty(N)
    acc = 1.0
    for i in range(N):
        if i:
            acc += abs(gamma2.coeff(i)) ** 2 + abs(delta2.coeff(i)) ** 2
        diag_expect[i] = acc / a2_sq
    diag_res = np.abs(np.diag(Kdense).real - diag_expect).max()
    reports.append(make_report("keyid/diagonal-formula", N, diag_res, 0.0, t0))

    t0 = time.perf_counter()
    x_sh = ScalarLaurent({d - 1: v for d, v in x.coeffs.items() if d >= 2})
    M = scalar_hankel_product_trunc(x, N).entries
    Ms = scalar_hankel_product_trunc(x_sh, N).entries
    vec = np.array([x.coeff(i + 1) for i in range(N)])
    rank1_res = np.abs(M - Ms - np.outer(vec, vec.conj())).max()
    reports.append(make_report("keyid/rank-one-difference", N, rank1_res, 0.0, t0))

    t0 = time.perf_counter()
    det_ratio = (
        np.linalg.det(np.eye(N) + M).real / np.linalg.det(np.eye(N) + Ms).real
    )
    reports.append(make_report("keyid/a2^2=det-ratio", N, det_ratio, a2_sq, t0))

    t0 = time.perf_counter()
    xv = vec  # rank-one vector of the difference: entries x_{i+1}
    inner2 = 1.0 + (xv.conj() @ np.linalg.solve(np.eye(N) + Ms, xv)).real
    reports.append(make_report("keyid/a2^2=1+<x|(1+BB*)_sh^-1 x>", N, inner2, a2_sq, t0))
    return reports


# ---------------------------------------------------------------------------
# Birkhoff strata
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StratumLabel:
    epsilon: int
    n: int

    def __post_init__(self):
        if self.epsilon not in (0, 1):
            raise ValueError("epsilon must be 0 or 1")


_ROT = np.array([[0.0, 1.0], [-1.0, 0.0]])


def w_loop(label):
    """[[0,1],[-1,0]]^epsilon diag(z^n, z^-n)."""
    if not isinstance(label, StratumLabel):
        label = StratumLabel(*label)
    cc = {}
    n = label.n
    for d, (i, j), v in ((n, (0, 0), 1.0), (-n, (1, 1), 1.0)):
        if d not in cc:
            cc[d] = np.zeros((2, 2), dtype=complex)
        cc[d][i, j] += v
    g = MatrixLaurent(cc, su2=True)
    if label.epsilon:
        g = mul(MatrixLaurent.constant(_ROT, su2=True), g)
    return g


def _zero_conditions(label):
    """Indices forced to zero: ('zeta', 1-based ks) or ('eta', 0-based is)."""
    eps, n = label.epsilon, label.n
    if eps == 0 and n == 0:
        return None, []
    if eps == 0 and n > 0:
        return "zeta", list(range(1, 2 * n + 1))
    if eps == 0 and n < 0:
        return "eta", list(range(0, 2 * abs(n)))
    if eps == 1 and n > 0:
        return "zeta", list(range(1, 2 * n + 2))
    return "eta", list(range(0, 2 * abs(n) + 1))


def stratum_synthesize(label, etas, chi, zetas, trunc=30):
    """g = k1(eta)* w diag(e^chi, e^-chi) k2(zeta), with the case conditions.

    Rejects parameter lists violating the zeroed-coordinate conditions of the
    stratum (zeta_1..zeta_{2n} for epsilon=0, n>0, and the analogous ranges
    for the other cases).
    """
    if not isinstance(label, StratumLabel):
        label = StratumLabel(*label)
    if not isinstance(chi, DiagExponent):
        chi = DiagExponent(chis=list(chi))
    which, idxs = _zero_conditions(label)
    if which == "zeta":
        bad = [k for k in idxs if k - 1 < len(zetas) and zetas[k - 1] != 0]
        if bad:
            raise ValueError("zeta_%s must vanish for stratum %s" % (bad, label))
    elif which == "eta":
        bad = [i for i in idxs if i < len(etas) and etas[i] != 0]
        if bad:
            raise ValueError("eta_%s must vanish for stratum %s" % (bad, label))
    k1 = build_k1(etas)
    k2 = build_k2(zetas)
    if chi.is_zero():
        mid = w_loop(label)
    else:
        from .loops import build_diag

        mid = mul(w_loop(label), build_diag(chi, trunc))
    return mul(mul(k1.star(), mid), k2)


def _candidate_labels(n_max):
    labels = [StratumLabel(0, 0), StratumLabel(1, 0)]
    for m in range(1, n_max + 1):
        labels += [
            StratumLabel(0, m),
            StratumLabel(0, -m),
            StratumLabel(1, m),
            StratumLabel(1, -m),
        ]
    return labels


def classify_stratum(g, N=64, n_max=4, thresh=1e-6):
    """Identify the Birkhoff stratum of an su2 loop by conditioning scans.

    Returns the first label (in the canonical (0,0),(1,0),(0,1),... order)
    for which both A_N(w^{-1}g) and A_{1,N}(w^{-1}g) have smallest singular
    value >= thresh at N and 2N.  Both operators are needed: the constant
    rotation has invertible A but singular A_1.
    """
    diagnostics = {}
    for label in _candidate_labels(n_max):
        h = mul(w_loop(label).star(), g)
        smins = []
        ok = True
        for n in (N, 2 * N):
            for T in (toeplitz_trunc(h, n), shifted_toeplitz_trunc(h, n)):
                s = np.linalg.svd(T.entries, compute_uv=False)[-1]
                smins.append(float(s))
                if s < thresh:
                    ok = False
            if not ok:
                break
        diagnostics[label] = smins
        if ok:
            return label
    raise StratumBoundaryError(
        "no stratum label within |n| <= %d passed; sigma_min per label: %s"
        % (n_max, {str(k): v for k, v in diagnostics.items()})
    )


def nplus_decompose(u, label):
    """u = u_minus u_plus for the (epsilon=0, n>0) stratum conditioning.

    u_minus = [[1, p],[0,1]] with p of degree < 2n carrying the low modes of
    u_{12}; (u_plus)_{12} then has no coefficients below degree 2n.  The other
    label cases reduce to this one by the transpose/inversion symmetries
    (conjugate by the rotation for epsilon = 1, star for n < 0) and are not
    materialized separately.
    """
    if not isinstance(label, StratumLabel):
        label = StratumLabel(*label)
    if label.epsilon != 0 or label.n <= 0:
        raise ValueError("decomposition implemented for epsilon=0, n>0")
    if u.min_deg < 0:
        raise ValueError("u must be analytic")
    u0 = u.coeff(0)
    if not (
        np.isclose(u0[0, 0], 1)
        and np.isclose(u0[1, 1], 1)
        and np.isclose(u0[1, 0], 0)
    ):
        raise ValueError("u(0) must be unipotent upper triangular")
    n2 = 2 * label.n
    u12 = u.entry(0, 1)
    u22 = u.entry(1, 1)
    p = {}
    for k in range(n2):
        s = u12.coeff(k)
        for m in range(k):
            s -= p.get(m, 0j) * u22.coeff(k - m)
        if abs(s) > 1e-15:
            p[k] = s
    corner = ScalarLaurent(p)
    u_minus = _unipotent_upper(corner)
    u_plus = mul(_unipotent_upper(-corner), u).trim(1e-14)
    low = max(
        (abs(u_plus.entry(0, 1).coeff(k)) for k in range(n2)), default=0.0
    )
    if low > 1e-10:
        raise ArithmeticError("decomposition failed: low modes remain (%.3g)" % low)
    return u_minus, u_plus


# ---------------------------------------------------------------------------
# numeric Birkhoff / triangular factorization of a general loop
# ---------------------------------------------------------------------------


def triangular_factor_numeric(g, N=32, cond_limit=1e12):
    """Triangular factorization of a loop without parameter knowledge.

    Solves for the analytic matrix psi = g_+^{-1} (psi(0) = I) from the
    linear system (g psi)_m = 0, m = 1..N, then splits the constant term by
    LDU.  Raises StratumBoundaryError off the top stratum.
    """
    T = np.zeros((2 * N, 2 * N), dtype=complex)
    rhs = np.zeros((2 * N, 2), dtype=complex)
    for m in range(1, N + 1):
        for k in range(1, N + 1):
            blk = g.coeffs.get(m - k)
            if blk is not None:
                T[2 * (m - 1) : 2 * m, 2 * (k - 1) : 2 * k] = blk
        blk = g.coeffs.get(m)
        if blk is not None:
            rhs[2 * (m - 1) : 2 * m] = -blk
    if np.linalg.cond(T) > cond_limit:
        raise StratumBoundaryError("shifted system singular: loop off the top stratum")
    sol = np.linalg.solve(T, rhs)
    psi_cc = {0: np.eye(2, dtype=complex)}
    for k in range(1, N + 1):
        blk = sol[2 * (k - 1) : 2 * k]
        if np.abs(blk).max() > 1e-14:
            psi_cc[k] = blk
    psi = MatrixLaurent(psi_cc)

    h = mul(g, psi).part("minus_zero").trim(1e-11)  # g_- g_0
    g0 = h.coeff(0)
    if abs(g0[0, 0]) < 1e-9:
        raise StratumBoundaryError("constant term has vanishing (1,1) entry")
    p = g0[0, 0]
    L0 = np.array([[1.0, 0.0], [g0[1, 0] / p, 1.0]], dtype=complex)
    U0 = np.array([[1.0, g0[0, 1] / p], [0.0, 1.0]], dtype=complex)
    m0 = p / abs(p)
    a0 = abs(p)
    g_minus = mul(h, MatrixLaurent.constant(np.linalg.inv(g0)))
    # g_+ = psi^{-1} as a truncated series, by forward substitution
    inv_cc = {0: np.eye(2, dtype=complex)}
    for k in range(1, N + 1):
        acc = np.zeros((2, 2), dtype=complex)
        for j in range(1, k + 1):
            blk = psi_cc.get(j)
            if blk is not None:
                acc += inv_cc.get(k - j, np.zeros((2, 2))) @ blk
        inv_cc[k] = -acc
    g_plus = MatrixLaurent(
        {d: m for d, m in inv_cc.items() if np.abs(m).max() > 1e-14}
    )
    l = mul(g_minus, MatrixLaurent.constant(L0)).trim(1e-11)
    u = mul(MatrixLaurent.constant(U0), g_plus).trim(1e-11)
    return TriangularFactors(l=l, m0=complex(m0), a0=float(a0), u=u)
