"""Exact-rational expansion of root-subgroup products and iterated integrals.

Commuting polynomials live on the variables zeta_k^- and zeta_k^+ (appendix
conventions are native: factor matrices [[1, -z^-_k z^{-k}],[z^+_k z^k, 1]];
the su2 specialization is zeta^- = -zeta, zeta^+ = -conj(zeta)).
Noncommuting polynomials are rational combinations of words in the symbols
theta_i, indexed by positive Fourier degrees.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .laurent import MatrixLaurent


# ---------------------------------------------------------------------------
# commutative polynomials in zeta_k^-/zeta_k^+
# ---------------------------------------------------------------------------

# variable: ("-", k) or ("+", k); monomial: sorted tuple of (variable, power)


def _mono_mul(m1, m2):
    d = dict(m1)
    for v, p in m2:
        d[v] = d.get(v, 0) + p
    return tuple(sorted(d.items()))


class CommPoly:
    """Polynomial with exact Fraction coefficients on zeta^{+/-} monomials."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        tt = {}
        for m, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                tt[m] = tt.get(m, Fraction(0)) + c
        self.terms = {m: c for m, c in tt.items() if c}

    @staticmethod
    def zero():
        return CommPoly()

    @staticmethod
    def const(c):
        return CommPoly({(): Fraction(c)})

    @staticmethod
    def one():
        return CommPoly.const(1)

    @staticmethod
    def var(sign, k, power=1):
        return CommPoly({(((sign, k), power),): Fraction(1)})

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, CommPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        tt = dict(self.terms)
        for m, c in other.terms.items():
            tt[m] = tt.get(m, Fraction(0)) + c
        return CommPoly(tt)

    def __neg__(self):
        return CommPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CommPoly({m: c * other for m, c in self.terms.items()})
        tt = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                tt[m] = tt.get(m, Fraction(0)) + c1 * c2
        return CommPoly(tt)

    __rmul__ = __mul__

    def swap_conj(self):
        """Formal conjugation: swap every zeta^- with zeta^+ (su2-compatible)."""
        tt = {}
        flip = {"-": "+", "+": "-"}
        for m, c in self.terms.items():
            m2 = tuple(sorted((((flip[s], k), p) for (s, k), p in m)))
            tt[m2] = tt.get(m2, Fraction(0)) + c
        return CommPoly(tt)

    def indices(self):
        out = set()
        for m in self.terms:
            for (s, k), p in m:
                out.add(k)
        return out

    def filter_terms(self, pred):
        return CommPoly({m: c for m, c in self.terms.items() if pred(m)})

    def evaluate(self, assign):
        """Numeric value for assign[(sign, k)] -> complex."""
        out = 0j
        for m, c in self.terms.items():
            v = complex(c)
            for var, p in m:
                v *= assign[var] ** p
            out += v
        return out

    def evaluate_su2(self, zetas):
        """Specialize zeta_k^- = -zeta_k, zeta_k^+ = -conj(zeta_k)."""
        assign = {}
        for k, z in enumerate(zetas, start=1):
            assign[("-", k)] = -z
            assign[("+", k)] = -np.conj(z)
        return self.evaluate(assign)

    def div_var(self, sign, k):
        """Exact division by the variable; every monomial must contain it."""
        tt = {}
        for m, c in self.terms.items():
            d = dict(m)
            if d.get((sign, k), 0) < 1:
                raise ArithmeticError("monomial not divisible by zeta%s_%d" % (sign, k))
            d[(sign, k)] -= 1
            if d[(sign, k)] == 0:
                del d[(sign, k)]
            tt[tuple(sorted(d.items()))] = c
        return CommPoly(tt)

    def div_one_plus_pair(self, j):
        """Exact division by (1 + zeta_j^- zeta_j^+), by zeta_j^- grading."""
        by_w = {}
        for m, c in self.terms.items():
            d = dict(m)
            w = d.pop(("-", j), 0)
            by_w.setdefault(w, {})[tuple(sorted(d.items()))] = c
        plus = CommPoly.var("+", j)
        wmax = max(by_w) if by_w else 0
        q = {}
        prev = CommPoly.zero()
        for w in range(0, wmax + 1):
            pw = CommPoly(by_w.get(w, {}))
            qw = pw - prev * plus
            q[w] = qw
            prev = qw
        if not (prev * plus).is_zero():
            raise ArithmeticError("division by (1 + pair) leaves a remainder")
        out = CommPoly.zero()
        wvar = CommPoly.var("-", j)
        wpow = CommPoly.one()
        for w in range(0, wmax + 1):
            out = out + q[w] * wpow
            wpow = wpow * wvar
        return out

    def mono_strings(self):
        """{pretty monomial: Fraction} with keys like 'z1- z2+^2'."""
        out = {}
        for m, c in sorted(self.terms.items()):
            parts = []
            for (s, k), p in sorted(m, key=lambda t: (t[0][1], t[0][0])):
                parts.append("z%d%s" % (k, s) + ("^%d" % p if p > 1 else ""))
            out[" ".join(parts) if parts else "1"] = c
        return out

    def __repr__(self):
        ms = self.mono_strings()
        return " + ".join("%s*%s" % (c, m) for m, c in ms.items()) or "0"


# series in z with CommPoly coefficients: plain dict {degree: CommPoly}


def series_mul(a, b, lo=None, hi=None):
    out = {}
    for d1, c1 in a.items():
        for d2, c2 in b.items():
            d = d1 + d2
            if (lo is not None and d < lo) or (hi is not None and d > hi):
                continue
            out[d] = out.get(d, CommPoly.zero()) + c1 * c2
    return {d: c for d, c in out.items() if not c.is_zero()}


def series_inverse(a, order):
    """Inverse of a series with constant term 1, through degree ``order``."""
    if a.get(0) != CommPoly.one():
        raise ValueError("constant term must be 1")
    inv = {0: CommPoly.one()}
    for d in range(1, order + 1):
        acc = CommPoly.zero()
        for k in range(1, d + 1):
            if k in a and (d - k) in inv:
                acc = acc + inv[d - k] * a[k]
        if not acc.is_zero():
            inv[d] = -acc
    return inv


# ---------------------------------------------------------------------------
# root-subgroup product expansion
# ---------------------------------------------------------------------------

MAX_FACTORS = 10


@dataclass
class ProductExpansion:
    n: int
    convention: str
    entries: list  # 2x2 nest of {degree: CommPoly}

    @property
    def gamma(self):
        return self.entries[1][0]

    @property
    def delta(self):
        return self.entries[1][1]

    @property
    def beta_star(self):
        return self.entries[0][1]


def product_expand(n, convention="complex"):
    """Symbolic product of n root-subgroup factors (no scalar prefactors).

    ``complex`` uses the appendix factors [[1, -z^-_k z^-k],[z^+_k z^k, 1]];
    ``su2`` the main-text display [[1, z^-_k z^-k],[z^+_k z^k, 1]].  The two
    differ by zeta^- -> -zeta^-.
    """
    if n > MAX_FACTORS:
        raise ValueError("n exceeds the configured bound %d" % MAX_FACTORS)
    if convention not in ("complex", "su2"):
        raise ValueError("unknown convention %r" % convention)
    sgn = -1 if convention == "complex" else 1
    one = CommPoly.one()
    acc = [[{0: one}, {}], [{}, {0: one}]]
    for k in range(1, n + 1):
        fac = [
            [{0: one}, {-k: CommPoly.var("-", k) * sgn}],
            [{k: CommPoly.var("+", k)}, {0: one}],
        ]
        new = [[{}, {}], [{}, {}]]
        for i in range(2):
            for j in range(2):
                s = {}
                for m in range(2):
                    for d, c in series_mul(fac[i][m], acc[m][j]).items():
                        s[d] = s.get(d, CommPoly.zero()) + c
                new[i][j] = {d: c for d, c in s.items() if not c.is_zero()}
        acc = new
    return ProductExpansion(n, convention, acc)


def gamma_delta_multiindex(n, deg):
    """The displayed interleaved multi-index sums for gamma/delta coefficients.

    In the su2 (no inserted sign) convention:
    gamma_deg = sum zeta^+_{i1} zeta^-_{j1} ... zeta^+_{i_{r+1}} over
    0 < i1 < j1 < ... < jr < i_{r+1}, sum i - sum j = deg, and
    delta_deg = sum zeta^-_{j1} zeta^+_{i1} ... over 0 < j1 < i1 < ... < ir,
    sum (i - j) = deg.  Independent oracle for product_expand.
    """

    def build(seq_signs, start, need, used, target, out, mono):
        # alternately pick strictly increasing indices with the given signs
        if not seq_signs:
            if target == 0:
                out.append(tuple(mono))
            return
        s = seq_signs[0]
        for idx in range(start + 1, n + 1):
            delta = idx if s == "+" else -idx
            build(seq_signs[1:], idx, need, used, target - delta, out, mono + [(s, idx)])

    gamma = CommPoly.zero()
    delta = CommPoly.zero()
    for r in range(0, n + 1):
        out = []
        build(list("+-" * r + "+"), 0, None, None, deg, out, [])
        for mono in out:
            term = CommPoly.one()
            for s, idx in mono:
                term = term * CommPoly.var(s, idx)
            gamma = gamma + term
        out = []
        build(list("-+" * r), 0, None, None, deg, out, [])
        for mono in out:
            if not mono:
                continue
            term = CommPoly.one()
            for s, idx in mono:
                term = term * CommPoly.var(s, idx)
            delta = delta + term
    return gamma, delta


def partitions(n):
    """Decreasing positive integer sequences summing to n."""
    if n == 0:
        yield ()
        return
    def gen(rem, maxpart):
        if rem == 0:
            yield ()
            return
        for p in range(min(rem, maxpart), 0, -1):
            for rest in gen(rem - p, p):
                yield (p,) + rest
    yield from gen(n, n)


def partition_bound_check(n, zeta_values):
    """|delta_{2,n}| <= sum over partitions of n of |zeta|_{l2}^{2 len}."""
    m = len(zeta_values)
    exp = product_expand(m, "su2")
    dn = exp.delta.get(n, CommPoly.zero())
    lhs = abs(dn.evaluate_su2(zeta_values))
    norm_sq = float(sum(abs(z) ** 2 for z in zeta_values))
    rhs = sum(norm_sq ** len(p) for p in partitions(n) if len(p) > 0)
    return {"lhs": lhs, "rhs": rhs, "ok": lhs <= rhs + 1e-12}


# ---------------------------------------------------------------------------
# p_{n,k}, s_m and the integer tables
# ---------------------------------------------------------------------------


@dataclass
class TableResult:
    polys: dict
    tables: dict
    all_positive_integers: bool
    violations: list = field(default_factory=list)


def _integer_table(poly):
    table = {}
    violations = []
    for mono, c in poly.mono_strings().items():
        table[mono] = c
        if c.denominator != 1 or c <= 0:
            violations.append((mono, c))
    return table, violations


def xi_series(n, convention="complex", hi=None):
    """gamma/delta ratio coefficients xi_1..xi_hi as CommPoly."""
    exp = product_expand(n, convention)
    hi = hi or n
    dinv = series_inverse(exp.delta, hi)
    return series_mul(exp.gamma, dinv, lo=1, hi=hi), exp


def extract_pnk(n, k=None, convention="complex"):
    """p_{n,k} polynomials from xi_n = sum_k zeta^+_k prod_{j<k}(1+pair_j) p_{n,k}.

    Extraction peels the top-index part: monomials of xi_n with maximal index
    k are exactly the k-th summand.  Returns a TableResult; nonintegral or
    nonpositive coefficients are reported in ``violations`` rather than fixed.
    """
    xi, _ = xi_series(n, convention, hi=n)
    residual = xi.get(n, CommPoly.zero())
    polys = {}
    for kk in range(n, 0, -1):
        part = residual.filter_terms(
            lambda m, kk=kk: (max((idx for (s, idx), p in m), default=0) == kk)
        )
        if part.is_zero():
            polys[kk] = CommPoly.zero()
            continue
        q = part.div_var("+", kk)
        for j in range(kk - 1, 0, -1):
            q = q.div_one_plus_pair(j)
        polys[kk] = q
        residual = residual - part
    if not residual.is_zero():
        raise ArithmeticError("xi_n extraction left a residual")
    tables = {}
    violations = []
    for kk, poly in polys.items():
        t, v = _integer_table(poly)
        tables[kk] = t
        violations += [(kk,) + tup for tup in v]
    result = TableResult(polys, tables, not violations, violations)
    if k is not None:
        return polys[k], result
    return result


@dataclass
class XStarResult:
    order: int
    x_star: dict  # degree (negative) -> CommPoly
    s_polys: dict  # m -> CommPoly
    tables: dict
    all_positive_integers: bool
    violations: list


def x_star_symbolic(order, convention="complex"):
    """x* as the strictly negative part of entry(1,2)/entry(2,2).

    From x_1* (the z^{-1} coefficient) the s_m are peeled off via
    x_1* = sum_m (-zeta_m^-) prod_{j>m}(1 + pair_j) s_m; the coefficient
    tables C_{ij} must be positive integers.
    """
    if order > MAX_FACTORS:
        raise ValueError("order exceeds the configured bound %d" % MAX_FACTORS)
    exp = product_expand(order, convention)
    dinv = series_inverse(exp.delta, 2 * order)
    quot = series_mul(exp.beta_star, dinv, lo=-order, hi=-1)
    x_star = {d: c for d, c in quot.items() if not c.is_zero()}

    x1 = x_star.get(-1, CommPoly.zero())
    s_polys = {}
    residual = x1
    for m in range(1, order + 1):
        part = residual.filter_terms(
            lambda mono, m=m: (min((idx for (s, idx), p in mono), default=10**9) == m)
        )
        if part.is_zero():
            s_polys[m] = CommPoly.zero()
            continue
        q = part.div_var("-", m) * (-1)
        for j in range(m + 1, order + 1):
            q = q.div_one_plus_pair(j)
        s_polys[m] = q
        residual = residual - part
    if not residual.is_zero():
        raise ArithmeticError("x_1* extraction left a residual")
    tables = {}
    violations = []
    for m, poly in s_polys.items():
        t, v = _integer_table(poly)
        tables[m] = t
        violations += [(m,) + tup for tup in v]
    return XStarResult(order, x_star, s_polys, tables, not violations, violations)


# ---------------------------------------------------------------------------
# noncommutative polynomials in theta symbols
# ---------------------------------------------------------------------------


class NCPoly:
    """Fraction-linear combination of words in the symbols theta_i."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        tt = {}
        for w, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                tt[tuple(w)] = tt.get(tuple(w), Fraction(0)) + c
        self.terms = {w: c for w, c in tt.items() if c}

    @staticmethod
    def zero():
        return NCPoly()

    @staticmethod
    def one():
        return NCPoly({(): 1})

    @staticmethod
    def word(letters, c=1):
        return NCPoly({tuple(letters): Fraction(c)})

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, NCPoly) and self.terms == other.terms

    def __add__(self, other):
        tt = dict(self.terms)
        for w, c in other.terms.items():
            tt[w] = tt.get(w, Fraction(0)) + c
        return NCPoly(tt)

    def __neg__(self):
        return NCPoly({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return NCPoly({w: c * other for w, c in self.terms.items()})
        tt = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                tt[w] = tt.get(w, Fraction(0)) + c1 * c2
        return NCPoly(tt)

    __rmul__ = __mul__

    def evaluate(self, assign, dim=2):
        """Matrix value: words become products of assign[i]."""
        out = np.zeros((dim, dim), dtype=complex)
        for w, c in self.terms.items():
            m = np.eye(dim, dtype=complex)
            for letter in w:
                m = m @ assign[letter]
            out += complex(c) * m
        return out

    def commutative_specialize(self):
        """Collapse words to commutative monomials (letter multiset)."""
        tt = {}
        for w, c in self.terms.items():
            key = tuple(sorted(w))
            tt[key] = tt.get(key, Fraction(0)) + c
        return {k: v for k, v in tt.items() if v}

    def __repr__(self):
        return " + ".join(
            "%s*t%s" % (c, "".join(map(str, w)) or "1")
            for w, c in sorted(self.terms.items())
        ) or "0"


# ---------------------------------------------------------------------------
# multi-indices, c(I), the subset bijection
# ---------------------------------------------------------------------------


def compositions(n):
    """All positive multi-indices (ordered compositions) of order n."""
    if n == 0:
        return [()]
    out = []
    for first in range(1, n + 1):
        for rest in compositions(n - first):
            out.append((first,) + rest)
    return out


def c_of(I):
    """prod_j 1/(i_1 + ... + i_j), as an exact Fraction."""
    if any(i < 1 for i in I):
        raise ValueError("multi-index entries must be positive")
    out = Fraction(1)
    acc = 0
    for i in I:
        acc += i
        out /= acc
    return out


def subset_bijection(n):
    """[(I, S)] pairs for |I| = n, S = {1..n-1} complement of partial sums.

    Verifies c(I) = prod_S lambda / n! for every pair.
    """
    if n > 16:
        raise ValueError("n <= 16 required")
    fact = 1
    for i in range(2, n + 1):
        fact *= i
    pairs = []
    for I in compositions(n):
        lam = []
        acc = 0
        for i in I:
            acc += i
            lam.append(acc)
        S = frozenset(range(1, n)) - frozenset(lam)
        prod = 1
        for s in sorted(S):
            prod *= s
        if c_of(I) != Fraction(prod, fact):
            raise ArithmeticError("c(I) != prod_S lambda / n! for I=%s" % (I,))
        pairs.append((I, S))
    if len({S for _, S in pairs}) != len(pairs) or len(pairs) != 2 ** max(n - 1, 0):
        raise ArithmeticError("subset correspondence is not bijective at n=%d" % n)
    return pairs


# ---------------------------------------------------------------------------
# g_+ from theta, inverse series, W blocks
# ---------------------------------------------------------------------------


def _theta_mode(theta):
    for v in theta.values():
        if isinstance(v, np.ndarray):
            return "numeric"
    return "symbolic"


def gplus_series(theta, order):
    """g_n = sum_{|I| = n} c(I) theta_{i_1} ... theta_{i_l}, n = 0..order.

    ``theta`` maps the Fourier degree i >= 1 to either a 2x2 array (numeric
    mode) or any non-array marker (symbolic mode, words over the degrees).
    Missing degrees contribute nothing.
    """
    mode = _theta_mode(theta)
    avail = set(theta)
    out = {0: NCPoly.one() if mode == "symbolic" else np.eye(2, dtype=complex)}
    for n in range(1, order + 1):
        if mode == "symbolic":
            g = NCPoly.zero()
        else:
            g = np.zeros((2, 2), dtype=complex)
        for I in compositions(n):
            if any(i not in avail for i in I):
                continue
            w = c_of(I)
            if mode == "symbolic":
                g = g + NCPoly.word(I, w)
            else:
                m = np.eye(2, dtype=complex)
                for i in I:
                    m = m @ np.asarray(theta[i], dtype=complex)
                g = g + complex(w) * m
        out[n] = g
    return out


def ginv_series(g, order):
    """Formal inverse of 1 + g_1 z + ...: (g^-1)_n = -sum_k (g^-1)_{n-k} g_k."""
    numeric = isinstance(next(iter(g.values())), np.ndarray) if g else False
    one = np.eye(2, dtype=complex) if numeric else NCPoly.one()
    zero = (lambda: np.zeros((2, 2), dtype=complex)) if numeric else NCPoly.zero
    inv = {0: one}
    for n in range(1, order + 1):
        acc = zero()
        for k in range(1, n + 1):
            gk = g.get(k)
            if gk is None:
                continue
            prev = inv.get(n - k)
            acc = acc + (prev @ gk if numeric else prev * gk)
        inv[n] = -acc
    return inv


def ginv_multiindex(g, n):
    """(g^-1)_n by the direct sum over multi-indices (oracle for ginv_series)."""
    numeric = isinstance(next(iter(g.values())), np.ndarray) if g else False
    acc = np.zeros((2, 2), dtype=complex) if numeric else NCPoly.zero()
    for I in compositions(n):
        if any(i not in g for i in I):
            continue
        term = np.eye(2, dtype=complex) if numeric else NCPoly.one()
        for i in I:
            term = term @ g[i] if numeric else term * g[i]
        acc = acc + (-1) ** len(I) * term
    return acc


def _splits(I):
    """All ways of cutting I into consecutive nonempty blocks."""
    L = len(I)
    out = []
    for cuts in itertools.product((0, 1), repeat=max(L - 1, 0)):
        blocks = []
        cur = [I[0]]
        for pos in range(1, L):
            if cuts[pos - 1]:
                blocks.append(tuple(cur))
                cur = [I[pos]]
            else:
                cur.append(I[pos])
        blocks.append(tuple(cur))
        out.append(blocks)
    return out


def C_of(I, j):
    """sum over tuples (I_1..I_l) splitting I with |I_l| >= j of
    (-1)^{l+1} c(I_1)...c(I_l)."""
    total = Fraction(0)
    for blocks in _splits(I):
        if sum(blocks[-1]) < j:
            continue
        term = Fraction(1)
        for b in blocks:
            term *= c_of(b)
        total += (-1) ** (len(blocks) + 1) * term
    return total


def W_blocks(theta, i_max, j_max, mode=None):
    """W_{i,-j} blocks of A^{-1}B for the loop with log-derivative data theta.

    Computes every block two ways -- the C(I) formula and the multi-index sum
    over g-products with last index >= j -- and requires exact agreement.  In
    numeric mode a third route (dense A_N^{-1} B_N of the truncated loop) is
    compared within 1e-8.
    """
    mode = mode or _theta_mode(theta)
    order = i_max + j_max
    g = gplus_series(theta, order)
    numeric = mode == "numeric"
    blocks = {}
    for i in range(0, i_max + 1):
        for j in range(1, j_max + 1):
            n = i + j
            via_C = np.zeros((2, 2), dtype=complex) if numeric else NCPoly.zero()
            for I in compositions(n):
                if any(k not in theta for k in I):
                    continue
                w = C_of(I, j)
                if w == 0:
                    continue
                if numeric:
                    m = np.eye(2, dtype=complex)
                    for k in I:
                        m = m @ np.asarray(theta[k], dtype=complex)
                    via_C = via_C + complex(w) * m
                else:
                    via_C = via_C + NCPoly.word(I, w)
            via_g = np.zeros((2, 2), dtype=complex) if numeric else NCPoly.zero()
            for I in compositions(n):
                if I[-1] < j:
                    continue
                term = np.eye(2, dtype=complex) if numeric else NCPoly.one()
                for k in I:
                    term = term @ g[k] if numeric else term * g[k]
                via_g = via_g + (-1) ** (len(I) + 1) * term
            if numeric:
                if np.abs(via_C - via_g).max() > 1e-10:
                    raise ArithmeticError("C(I) and g-product routes disagree")
            else:
                if via_C != via_g:
                    raise ArithmeticError(
                        "C(I) and g-product routes disagree at (%d,-%d)" % (i, j)
                    )
            blocks[(i, j)] = via_C
    if numeric:
        _wblocks_numeric_check(theta, blocks, i_max, j_max)
    return blocks


def _wblocks_numeric_check(theta, blocks, i_max, j_max, tol=1e-8):
    from .operators import hankel_trunc, toeplitz_trunc

    order = i_max + j_max
    g = gplus_series(theta, order)
    ml = MatrixLaurent({n: m for n, m in g.items() if np.abs(m).max() > 0})
    N = max(i_max + 1, j_max) + order + 2
    A = toeplitz_trunc(ml, N).entries
    B = hankel_trunc(ml, N, "B").entries
    W = np.linalg.solve(A, B)
    for (i, j), blk in blocks.items():
        got = W[2 * i : 2 * i + 2, 2 * (j - 1) : 2 * (j - 1) + 2]
        if np.abs(got - blk).max() > tol:
            raise ArithmeticError(
                "numeric A^-1 B disagrees with the symbolic block at (%d,-%d)" % (i, j)
            )
