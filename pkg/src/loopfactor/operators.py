"""Finite truncations of the multiplication-operator block decomposition.

For a 2x2 symbol g = sum g_n z^n acting on L^2(S^1, C^2) with the Hardy
polarization, the block matrix is [[A, B], [C, D]] with A the block Toeplitz
operator.  Square truncations A_N keep the Fourier block indices 0..N-1 (basis
e1 z^j, e2 z^j); the shifted operator A_1 is the compression to
{e1} + {e_i z^j : j >= 1}.

Truncated determinants of operator products (A*A, A1*A1, A(g)A(g^-1)) are
computed as determinants of the 2N-compression of the *product*, assembled
exactly from rectangular truncations; the square-truncation product
A_N^H A_N converges to a different limit and is not used for the identities.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass

import numpy as np

from .laurent import MatrixLaurent, ScalarLaurent, mul, sample_grid
from .loops import DiagExponent, assemble, build_k1, build_k2

KERNEL_TOL = 1e-8  # relative singular-value threshold for kernel counting


@dataclass
class OperatorTrunc:
    """A finite section of A, A1, B, C or a scalar Hankel product."""

    kind: str
    N: int
    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)


@dataclass
class IdentityReport:
    identity: str
    N: int
    lhs: float
    rhs: float
    abs_err: float
    rel_err: float
    seconds: float
    informational: bool = False

    def ok(self, tol):
        return self.informational or self.rel_err <= tol

    def to_json_line(self):
        return json.dumps(
            {
                "identity": self.identity,
                "N": self.N,
                "lhs": self.lhs,
                "rhs": self.rhs,
                "abs_err": self.abs_err,
                "rel_err": self.rel_err,
                "seconds": self.seconds,
            }
        )

    def to_csv_row(self):
        return "%s,%d,%.17g,%.17g,%.17g,%.17g,%.17g" % (
            self.identity,
            self.N,
            self.lhs,
            self.rhs,
            self.abs_err,
            self.rel_err,
            self.seconds,
        )


CSV_HEADER = "identity,N,lhs,rhs,abs_err,rel_err,seconds"


def make_report(identity, N, lhs, rhs, t0, informational=False):
    lhs, rhs = float(np.real(lhs)), float(np.real(rhs))
    abs_err = abs(lhs - rhs)
    # pure residual checks (rhs = 0) are gated on the absolute value; the
    # compared quantities are O(1) by construction
    rel_err = abs_err if rhs == 0.0 else abs_err / max(abs(lhs), abs(rhs), 1e-300)
    return IdentityReport(
        identity, N, lhs, rhs, abs_err, rel_err,
        time.perf_counter() - t0, informational,
    )


# ---------------------------------------------------------------------------
# truncations
# ---------------------------------------------------------------------------


def toeplitz_trunc(g, N):
    """Square block Toeplitz section: block (i, j) = g_{i-j}, i,j = 0..N-1."""
    if N < 1:
        raise ValueError("N >= 1 required")
    T = np.zeros((2 * N, 2 * N), dtype=complex)
    for d, m in g.coeffs.items():
        if -(N - 1) <= d <= N - 1:
            for i in range(max(0, d), min(N, N + d)):
                j = i - d
                T[2 * i : 2 * i + 2, 2 * j : 2 * j + 2] = m
    return OperatorTrunc("toeplitz", N, T)


def _toeplitz_rect(g, rows, N):
    """Rectangular section with block rows 0..rows-1, columns 0..N-1."""
    T = np.zeros((2 * rows, 2 * N), dtype=complex)
    for d, m in g.coeffs.items():
        for j in range(N):
            i = j + d
            if 0 <= i < rows:
                T[2 * i : 2 * i + 2, 2 * j : 2 * j + 2] = m
    return T


def _shifted_basis(N):
    """(degree, component) pairs for the 2N-truncation of the shifted space."""
    basis = [(0, 0)]
    for j in range(1, N):
        basis.append((j, 0))
        basis.append((j, 1))
    basis.append((N, 1))
    return basis


def _shifted_rect(g, row_basis, col_basis):
    T = np.zeros((len(row_basis), len(col_basis)), dtype=complex)
    for r, (jr, cr) in enumerate(row_basis):
        for c, (jc, cc) in enumerate(col_basis):
            m = g.coeffs.get(jr - jc)
            if m is not None:
                T[r, c] = m[cr, cc]
    return T


def shifted_toeplitz_trunc(g, N):
    """Square section of the shifted Toeplitz operator A_1, dimension 2N.

    Basis: e1, then (e1 z^j, e2 z^j) for j = 1..N-1, then e2 z^N.
    """
    if N < 1:
        raise ValueError("N >= 1 required")
    basis = _shifted_basis(N)
    return OperatorTrunc("shifted_toeplitz", N, _shifted_rect(g, basis, basis))


def hankel_trunc(g, N, which):
    """Hankel blocks of the multiplication operator.

    ``B`` couples negative modes into the Hardy space: B[i, j] = g_{i+j+1}
    (row degree i = 0..N-1, column z^{-(j+1)}, j = 0..N-1).  ``C`` is the
    reverse coupling: C[i, j] = g_{-(i+1)-j}.
    """
    if N < 1:
        raise ValueError("N >= 1 required")
    H = np.zeros((2 * N, 2 * N), dtype=complex)
    if which == "B":
        for i in range(N):
            for j in range(N):
                m = g.coeffs.get(i + j + 1)
                if m is not None:
                    H[2 * i : 2 * i + 2, 2 * j : 2 * j + 2] = m
        return OperatorTrunc("hankel_B", N, H)
    if which == "C":
        for i in range(N):
            for j in range(N):
                m = g.coeffs.get(-(i + 1) - j)
                if m is not None:
                    H[2 * i : 2 * i + 2, 2 * j : 2 * j + 2] = m
        return OperatorTrunc("hankel_C", N, H)
    raise ValueError("which must be 'B' or 'C'")


def scalar_hankel_product_trunc(x, N):
    """N x N section of B(x) B(x)*: entry (i, j) = sum_{n>=1} x_{i+n} conj(x_{j+n}).

    ``x`` must be analytic with x(0) = 0.  The sum starts at n = 1 (the Hankel
    factor couples through the strictly negative modes), which is what makes
    the single-coefficient case x = c z produce the lone entry |c|^2 at (0,0).
    """
    if x.coeffs and (x.min_deg < 1 or any(d < 1 for d in x.coeffs)):
        raise ValueError("x must be analytic with x(0) = 0")
    hi = x.max_deg
    M = np.zeros((N, N), dtype=complex)
    for i in range(N):
        for j in range(N):
            s = 0j
            for n in range(1, hi + 1):
                a = x.coeff(i + n)
                if a == 0:
                    continue
                b = x.coeff(j + n)
                if b != 0:
                    s += a * np.conj(b)
            M[i, j] = s
    return OperatorTrunc("scalar_hankel", N, M)


def det_trunc(T):
    """Determinant by LU with partial pivoting; also returns (sign, log|det|)."""
    entries = T.entries if isinstance(T, OperatorTrunc) else np.asarray(T, dtype=complex)
    if entries.shape[0] != entries.shape[1]:
        raise ValueError("square matrix required")
    sign, logabs = np.linalg.slogdet(entries)
    if sign == 0:
        return 0j, (0j, -math.inf)
    return sign * np.exp(logabs), (sign, logabs)


# ---------------------------------------------------------------------------
# exact compressions of operator products
# ---------------------------------------------------------------------------


def gram_toeplitz(g, N):
    """The 2N-compression of A(g)* A(g), assembled exactly.

    Entry sums run over all block rows where the symbol is supported, so the
    result is the section of the infinite product, not A_N^H A_N.
    """
    rows = N + max(0, g.max_deg)
    R = _toeplitz_rect(g, rows, N)
    return R.conj().T @ R


def gram_shifted_toeplitz(g, N):
    """The 2N-compression of A_1(g)* A_1(g)."""
    col_basis = _shifted_basis(N)
    jmax = N + max(0, g.max_deg) + 1
    row_basis = [(0, 0)] + [(j, c) for j in range(1, jmax + 1) for c in (0, 1)]
    R = _shifted_rect(g, row_basis, col_basis)
    return R.conj().T @ R


def compression_identity_minus_cstarc(g, N):
    """1_2N - compression of C(g)* C(g); equals gram_toeplitz for unitary g."""
    depth = max(0, -g.min_deg)
    C = np.zeros((2 * depth, 2 * N), dtype=complex)
    for d, m in g.coeffs.items():
        if d >= 0:
            continue
        for j in range(N):
            i = -(j + d)  # row degree -i with i >= 1
            if 1 <= i <= depth:
                C[2 * (i - 1) : 2 * (i - 1) + 2, 2 * j : 2 * j + 2] = m
    return np.eye(2 * N) - C.conj().T @ C


def product_compression_AgAginv(g, N, g_inv=None):
    """The 2N-compression of A(g) A(g^{-1}) as 1 - B(g) C(g^{-1})."""
    if g_inv is None:
        if not g.su2:
            raise ValueError("need g_inv for non-su2 symbols")
        g_inv = g.star()
    depth = max(max(0, g.max_deg), max(0, -g_inv.min_deg))
    B = np.zeros((2 * N, 2 * depth), dtype=complex)
    C = np.zeros((2 * depth, 2 * N), dtype=complex)
    for d, m in g.coeffs.items():
        for k in range(1, depth + 1):
            i = d - k
            if 0 <= i < N:
                B[2 * i : 2 * i + 2, 2 * (k - 1) : 2 * (k - 1) + 2] = m
    for d, m in g_inv.coeffs.items():
        if d >= 0:
            continue
        for j in range(N):
            k = -(j + d)
            if 1 <= k <= depth:
                C[2 * (k - 1) : 2 * (k - 1) + 2, 2 * j : 2 * j + 2] = m
    return np.eye(2 * N) - B @ C


# ---------------------------------------------------------------------------
# identity verification suites
# ---------------------------------------------------------------------------


def planch_closed_form(params, kind):
    """prod (1+|p_k|^2)^(-k) with k2 indexing from 1, k1 from 0."""
    start = 1 if kind == "k2" else 0
    out = 1.0
    for k, p in enumerate(params, start=start):
        out *= (1.0 + abs(p) ** 2) ** (-k)
    return out


def verify_planch(k, params, N, kind="k2"):
    """Plancherel-type determinant identity for a pure k1/k2 loop.

    Compares det of the compressions of A*A and of 1 - C*C against the
    closed-form product over the parameters.
    """
    t0 = time.perf_counter()
    rhs = planch_closed_form(params, kind)
    det_gram, _ = det_trunc(OperatorTrunc("gram", N, gram_toeplitz(k, N)))
    det_cc, _ = det_trunc(OperatorTrunc("cc", N, compression_identity_minus_cstarc(k, N)))
    r1 = make_report("planch/%s/det(A*A)" % kind, N, det_gram.real, rhs, t0)
    r2 = make_report("planch/%s/det(1-C*C)" % kind, N, det_cc.real, rhs, t0)
    return [r1, r2]


def toeplitz_closed_forms(etas, chi, zetas):
    """Closed-form values for (det A*A, det A1*A1, a0^2)."""
    chis = chi.chis if isinstance(chi, DiagExponent) else list(chi)
    t0 = t1 = ratio = 1.0
    for i, e in enumerate(etas):
        f = 1.0 + abs(e) ** 2
        t0 *= f ** (-i)
        t1 *= f ** (-(i + 1))
        ratio /= f
    for j, c in enumerate(chis, start=1):
        f = math.exp(-2.0 * j * abs(c) ** 2)
        t0 *= f
        t1 *= f
    for k, z in enumerate(zetas, start=1):
        f = 1.0 + abs(z) ** 2
        t0 *= f ** (-k)
        t1 *= f ** (-(k - 1))
        ratio *= f
    return t0, t1, ratio


def verify_toeplitz_identities(etas, chi, zetas, N, exp_trunc=30):
    """The determinant triple for g = k1* e^chi k2 at truncations N and 2N."""
    if not isinstance(chi, DiagExponent):
        chi = DiagExponent(chis=list(chi))
    g = assemble(etas, chi, zetas, trunc=exp_trunc)
    rhs0, rhs1, rhs_ratio = toeplitz_closed_forms(etas, chi, zetas)
    out = []
    for n in (N, 2 * N):
        t0 = time.perf_counter()
        d0, _ = det_trunc(OperatorTrunc("gram", n, gram_toeplitz(g, n)))
        d1, _ = det_trunc(OperatorTrunc("gram1", n, gram_shifted_toeplitz(g, n)))
        out.append(make_report("toeplitz/det(A*A)", n, d0.real, rhs0, t0))
        out.append(make_report("toeplitz/det(A1*A1)", n, d1.real, rhs1, t0))
        out.append(make_report("toeplitz/a0^2-ratio", n, d1.real / d0.real, rhs_ratio, t0))
    return out


def _exp_diag(plus_part, trunc, sign=1):
    """diag(e^{s phi}, e^{-s phi}) for an analytic or anti-analytic exponent phi."""
    from .laurent import exp_scalar

    e = exp_scalar(plus_part * float(sign), trunc)
    em = exp_scalar(plus_part * float(-sign), trunc)
    return MatrixLaurent.diag(e, em)


def operator_factor_symbols(etas, chi, zetas, exp_trunc=30):
    """The three factors k1* e^{chi_-}, e^{chi_0}, e^{chi_+} k2 as symbols."""
    if not isinstance(chi, DiagExponent):
        chi = DiagExponent(chis=list(chi))
    chi_plus = chi.plus_part()
    chi_minus = chi_plus.star() * (-1.0)  # chi_- = -(chi_+)*
    f1 = mul(build_k1(etas).star(), _exp_diag(chi_minus, exp_trunc))
    m0 = np.exp(chi.chi0)
    f2 = MatrixLaurent.constant(np.diag([m0, 1.0 / m0]))
    f3 = mul(_exp_diag(chi_plus, exp_trunc), build_k2(zetas))
    return f1, f2, f3


def verify_operator_factorization(etas, chi, zetas, N, exp_trunc=30):
    """Residuals of A(g) = A(k1* e^{chi_-}) A(e^{chi_0}) A(e^{chi_+} k2).

    The truncated product agrees with the truncation of the product symbol on
    block rows below N minus the anti-analytic bandwidth of the first factor;
    the comparison is restricted to that central window.  Also reports the
    Hankel vanishing  B(k1* e^{chi_-}) C(e^{chi_0+} k2)  and the smallest
    singular value of A_N(e^{chi_0+} k2) at N and 2N (injectivity probe).
    """
    t0 = time.perf_counter()
    f1, f2, f3 = operator_factor_symbols(etas, chi, zetas, exp_trunc)
    f23 = mul(f2, f3)
    g = mul(f1, f23)
    margin = max(0, -f1.min_deg) + 1
    if margin >= N:
        raise ValueError("N too small for the factor bandwidth")
    out = []

    P = toeplitz_trunc(f1, N).entries @ toeplitz_trunc(f2, N).entries @ toeplitz_trunc(f3, N).entries
    G = toeplitz_trunc(g, N).entries
    w = 2 * (N - margin)
    res = np.abs((P - G)[:w, :w]).max()
    out.append(make_report("opfact/A-central-residual", N, res, 0.0, t0))

    t0 = time.perf_counter()
    P1 = (
        shifted_toeplitz_trunc(f1, N).entries
        @ shifted_toeplitz_trunc(f2, N).entries
        @ shifted_toeplitz_trunc(f3, N).entries
    )
    G1 = shifted_toeplitz_trunc(g, N).entries
    res1 = np.abs((P1 - G1)[:w, :w]).max()
    out.append(make_report("opfact/A1-central-residual", N, res1, 0.0, t0))

    t0 = time.perf_counter()
    K = max(max(0, f1.max_deg), max(0, -f23.min_deg)) + 1
    BC = hankel_trunc(f1, max(N, K), "B").entries @ hankel_trunc(f23, max(N, K), "C").entries
    out.append(make_report("opfact/hankel-BC-norm", N, np.abs(BC).max(), 0.0, t0))

    t0 = time.perf_counter()
    smin_N = np.linalg.svd(toeplitz_trunc(f23, N).entries, compute_uv=False)[-1]
    smin_2N = np.linalg.svd(toeplitz_trunc(f23, 2 * N).entries, compute_uv=False)[-1]
    out.append(
        make_report(
            "opfact/A(e^chi0+ k2)-sigma_min", N, smin_2N, smin_N, t0, informational=True
        )
    )
    return out


# ---------------------------------------------------------------------------
# degree / index
# ---------------------------------------------------------------------------


def scalar_toeplitz_rect(lam, rows, N):
    T = np.zeros((rows, N), dtype=complex)
    for d, v in lam.coeffs.items():
        for j in range(N):
            i = j + d
            if 0 <= i < rows:
                T[i, j] = v
    return T


def _kernel_count(M, tol=KERNEL_TOL):
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return M.shape[1]
    return int(np.sum(s < tol * s[0])) + max(0, M.shape[1] - len(s))


def winding_number(values):
    """Winding of a unimodular sample sequence by summed phase increments."""
    values = np.asarray(values, dtype=complex)
    ratios = values[np.r_[1 : len(values), 0]] / values
    incr = np.angle(ratios)
    if np.max(np.abs(incr)) >= np.pi - 1e-9:
        raise ValueError("grid too coarse: phase increment >= pi")
    total = float(np.sum(incr)) / (2 * np.pi)
    d = round(total)
    if abs(total - d) > 1e-6:
        raise ValueError("winding sum %.3g not close to an integer" % total)
    return int(d)


def toeplitz_index_estimate(lam, N=48, tol=KERNEL_TOL):
    """dim ker - dim coker of the scalar Toeplitz operator from tall sections."""
    rows = N + max(0, lam.max_deg)
    kern = _kernel_count(scalar_toeplitz_rect(lam, rows, N), tol)
    lam_star = lam.star()
    rows2 = N + max(0, lam_star.max_deg)
    coker = _kernel_count(scalar_toeplitz_rect(lam_star, rows2, N), tol)
    return kern - coker


def scalar_degree(lam, m, index_N=48):
    """Degree (winding number) of a unimodular scalar symbol on a 2^m grid.

    Cross-checks the phase-increment winding against minus the Fredholm index
    estimated from tall Toeplitz sections; raises on disagreement.
    """
    vals = sample_grid(lam, m)
    mods = np.abs(vals)
    if np.max(np.abs(mods - 1.0)) > 1e-6:
        raise ValueError("symbol is not unimodular on the grid")
    d = winding_number(vals)
    idx = toeplitz_index_estimate(lam, index_N)
    if idx != -d:
        raise ArithmeticError(
            "degree %d and truncated index %d violate degree = -index" % (d, idx)
        )
    return d


# ---------------------------------------------------------------------------
# report emission
# ---------------------------------------------------------------------------


def emit_reports(reports, fmt="json", stream=None):
    """Write reports as JSON lines or CSV in canonical (identity, N) order."""
    import sys

    stream = stream or sys.stdout
    ordered = sorted(reports, key=lambda r: (r.identity, r.N))
    if fmt == "csv":
        print(CSV_HEADER, file=stream)
        for r in ordered:
            print(r.to_csv_row(), file=stream)
    else:
        for r in ordered:
            print(r.to_json_line(), file=stream)
