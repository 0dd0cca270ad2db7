"""Scalar and 2x2-matrix Laurent polynomials with FFT sampling.

Coefficients are double-precision complex, keyed by integer degree.  A value
carries a declared support window [min_deg, max_deg]; absent degrees are
exactly zero.  All operations are pure and return new objects.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

ZERO_TOL = 1e-13  # threshold for declaring a leading coefficient zero in division


def _as_complex(v):
    c = complex(v)
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise ValueError("non-finite coefficient %r" % (v,))
    return c


class ScalarLaurent:
    """A finite Laurent series sum_d c_d z^d held as {degree: coeff}."""

    __slots__ = ("coeffs", "min_deg", "max_deg")

    def __init__(self, coeffs=None, min_deg=None, max_deg=None):
        cc = {}
        for d, v in (coeffs or {}).items():
            c = _as_complex(v)
            if c != 0:
                cc[int(d)] = c
        self.coeffs = cc
        if min_deg is None:
            min_deg = min(cc) if cc else 0
        if max_deg is None:
            max_deg = max(cc) if cc else 0
        self.min_deg = int(min_deg)
        self.max_deg = int(max_deg)
        if cc and (min(cc) < self.min_deg or max(cc) > self.max_deg):
            raise ValueError("coefficients outside declared support")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero():
        return ScalarLaurent({})

    @staticmethod
    def one():
        return ScalarLaurent({0: 1.0})

    @staticmethod
    def monomial(c, d):
        return ScalarLaurent({int(d): c})

    # -- basic queries -----------------------------------------------------

    def coeff(self, d):
        return self.coeffs.get(int(d), 0j)

    @property
    def support(self):
        return (self.min_deg, self.max_deg)

    def span(self):
        return self.max_deg - self.min_deg

    def is_zero(self, tol=0.0):
        return all(abs(c) <= tol for c in self.coeffs.values())

    def norm_l1(self):
        return sum(abs(c) for c in self.coeffs.values())

    def norm_inf(self):
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def __eq__(self, other):
        if not isinstance(other, ScalarLaurent):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __repr__(self):
        terms = ", ".join("%d: %s" % (d, self.coeffs[d]) for d in sorted(self.coeffs))
        return "ScalarLaurent({%s})" % terms

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, ScalarLaurent):
            other = ScalarLaurent({0: other})
        cc = dict(self.coeffs)
        for d, v in other.coeffs.items():
            cc[d] = cc.get(d, 0j) + v
        return ScalarLaurent(
            cc,
            min(self.min_deg, other.min_deg),
            max(self.max_deg, other.max_deg),
        )

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return ScalarLaurent(
            {d: -v for d, v in self.coeffs.items()}, self.min_deg, self.max_deg
        )

    def __sub__(self, other):
        if not isinstance(other, ScalarLaurent):
            other = ScalarLaurent({0: other})
        return self.__add__(other.__neg__())

    def __mul__(self, other):
        if isinstance(other, MatrixLaurent):
            return NotImplemented
        if not isinstance(other, ScalarLaurent):
            c = _as_complex(other)
            return ScalarLaurent(
                {d: c * v for d, v in self.coeffs.items()}, self.min_deg, self.max_deg
            )
        cc = {}
        for d1, v1 in self.coeffs.items():
            for d2, v2 in other.coeffs.items():
                d = d1 + d2
                cc[d] = cc.get(d, 0j) + v1 * v2
        return ScalarLaurent(
            cc, self.min_deg + other.min_deg, self.max_deg + other.max_deg
        )

    def __rmul__(self, other):
        return self.__mul__(other)

    def shift(self, k):
        """Multiply by z^k."""
        k = int(k)
        return ScalarLaurent(
            {d + k: v for d, v in self.coeffs.items()},
            self.min_deg + k,
            self.max_deg + k,
        )

    def star(self):
        """f*(z) = sum conj(f_{-n}) z^n; equals conj(f(z)) on |z|=1."""
        return ScalarLaurent(
            {-d: v.conjugate() for d, v in self.coeffs.items()},
            -self.max_deg,
            -self.min_deg,
        )

    def part(self, which):
        """Fourier projection: one of minus, zero, plus, zero_plus, minus_zero."""
        lo, hi = _PART_RANGES[which]
        cc = {d: v for d, v in self.coeffs.items() if lo <= d <= hi}
        new_lo = max(self.min_deg, lo) if lo > -(10**9) else self.min_deg
        new_hi = min(self.max_deg, hi) if hi < 10**9 else self.max_deg
        if new_lo > new_hi:  # empty window
            new_lo = new_hi = 0
        return ScalarLaurent(cc, min(new_lo, new_hi), max(new_lo, new_hi))

    def trim(self, tol=0.0):
        """Drop coefficients with |c| <= tol and shrink the declared support."""
        cc = {d: v for d, v in self.coeffs.items() if abs(v) > tol}
        return ScalarLaurent(cc)

    def truncate(self, lo, hi):
        """Keep degrees in [lo, hi]."""
        cc = {d: v for d, v in self.coeffs.items() if lo <= d <= hi}
        return ScalarLaurent(cc, lo, hi)

    # -- evaluation --------------------------------------------------------

    def __call__(self, z):
        z = complex(z)
        return sum(v * z**d for d, v in self.coeffs.items())

    def sample(self, m):
        """Values on the 2^m roots of unity, FFT-accelerated."""
        return sample_grid(self, m)

    def to_json(self):
        return {
            "min_deg": self.min_deg,
            "max_deg": self.max_deg,
            "coeffs": {str(d): [v.real, v.imag] for d, v in sorted(self.coeffs.items())},
        }

    @staticmethod
    def from_json(obj):
        cc = {int(d): complex(p[0], p[1]) for d, p in obj["coeffs"].items()}
        return ScalarLaurent(cc, obj.get("min_deg"), obj.get("max_deg"))


_BIG = 10**9
_PART_RANGES = {
    "minus": (-_BIG, -1),
    "zero": (0, 0),
    "plus": (1, _BIG),
    "zero_plus": (0, _BIG),
    "minus_zero": (-_BIG, 0),
}


class MatrixLaurent:
    """A 2x2-matrix-valued Laurent polynomial, {degree: 2x2 complex array}.

    ``su2`` marks loops constructed to take values in SU(2) on |z|=1; the flag
    propagates through products, star and inversion of flagged inputs.
    """

    __slots__ = ("coeffs", "min_deg", "max_deg", "su2")

    def __init__(self, coeffs=None, min_deg=None, max_deg=None, su2=False):
        cc = {}
        for d, mat in (coeffs or {}).items():
            a = np.asarray(mat, dtype=complex)
            if a.shape != (2, 2):
                raise ValueError("matrix coefficients must be 2x2")
            if not np.all(np.isfinite(a)):
                raise ValueError("non-finite matrix coefficient at degree %d" % d)
            if np.any(a != 0):
                cc[int(d)] = a.copy()
        self.coeffs = cc
        if min_deg is None:
            min_deg = min(cc) if cc else 0
        if max_deg is None:
            max_deg = max(cc) if cc else 0
        self.min_deg = int(min_deg)
        self.max_deg = int(max_deg)
        if cc and (min(cc) < self.min_deg or max(cc) > self.max_deg):
            raise ValueError("coefficients outside declared support")
        self.su2 = bool(su2)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def identity(su2=True):
        return MatrixLaurent({0: np.eye(2)}, su2=su2)

    @staticmethod
    def constant(mat, su2=False):
        return MatrixLaurent({0: np.asarray(mat, dtype=complex)}, su2=su2)

    @staticmethod
    def from_scalars(rows, su2=False):
        """Assemble from a 2x2 nest of ScalarLaurent."""
        cc = {}
        for i in range(2):
            for j in range(2):
                for d, v in rows[i][j].coeffs.items():
                    if d not in cc:
                        cc[d] = np.zeros((2, 2), dtype=complex)
                    cc[d][i, j] = v
        return MatrixLaurent(cc, su2=su2)

    @staticmethod
    def diag(s1, s2, su2=False):
        return MatrixLaurent.from_scalars(
            [[s1, ScalarLaurent.zero()], [ScalarLaurent.zero(), s2]], su2=su2
        )

    # -- queries -----------------------------------------------------------

    def coeff(self, d):
        return self.coeffs.get(int(d), np.zeros((2, 2), dtype=complex))

    def entry(self, i, j):
        return ScalarLaurent(
            {d: m[i, j] for d, m in self.coeffs.items() if m[i, j] != 0},
            self.min_deg,
            self.max_deg,
        )

    @property
    def support(self):
        return (self.min_deg, self.max_deg)

    def span(self):
        return self.max_deg - self.min_deg

    def norm_inf(self):
        return max((np.abs(m).max() for m in self.coeffs.values()), default=0.0)

    def __repr__(self):
        return "MatrixLaurent(support=[%d, %d], su2=%r)" % (
            self.min_deg,
            self.max_deg,
            self.su2,
        )

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        cc = {d: m.copy() for d, m in self.coeffs.items()}
        for d, m in other.coeffs.items():
            cc[d] = cc.get(d, np.zeros((2, 2), dtype=complex)) + m
        return MatrixLaurent(
            cc, min(self.min_deg, other.min_deg), max(self.max_deg, other.max_deg)
        )

    def __neg__(self):
        return MatrixLaurent(
            {d: -m for d, m in self.coeffs.items()}, self.min_deg, self.max_deg, self.su2
        )

    def __sub__(self, other):
        return self.__add__(other.__neg__())

    def __mul__(self, other):
        if isinstance(other, MatrixLaurent):
            return mul(self, other)
        if isinstance(other, ScalarLaurent):
            cc = {}
            for d1, m in self.coeffs.items():
                for d2, v in other.coeffs.items():
                    d = d1 + d2
                    if d not in cc:
                        cc[d] = np.zeros((2, 2), dtype=complex)
                    cc[d] += m * v
            return MatrixLaurent(
                cc, self.min_deg + other.min_deg, self.max_deg + other.max_deg
            )
        c = _as_complex(other)
        return MatrixLaurent(
            {d: c * m for d, m in self.coeffs.items()}, self.min_deg, self.max_deg
        )

    def __rmul__(self, other):
        # scalar * matrix only; matrix*matrix goes through __mul__
        return self.__mul__(other)

    def star(self):
        """Pointwise adjoint: star(g)(z) = g(z)^H on |z|=1.

        Entrywise Fourier star combined with transposition, so that
        star(a b) = star(b) star(a); for su2-flagged loops this is the
        pointwise inverse.
        """
        return MatrixLaurent(
            {-d: m.conj().T for d, m in self.coeffs.items()},
            -self.max_deg,
            -self.min_deg,
            self.su2,
        )

    def transpose(self):
        return MatrixLaurent(
            {d: m.T for d, m in self.coeffs.items()}, self.min_deg, self.max_deg
        )

    def part(self, which):
        lo, hi = _PART_RANGES[which]
        cc = {d: m for d, m in self.coeffs.items() if lo <= d <= hi}
        return MatrixLaurent(cc)

    def trim(self, tol=0.0):
        cc = {d: m for d, m in self.coeffs.items() if np.abs(m).max() > tol}
        return MatrixLaurent(cc, su2=self.su2)

    def truncate(self, lo, hi):
        cc = {d: m for d, m in self.coeffs.items() if lo <= d <= hi}
        return MatrixLaurent(cc, lo, hi, su2=self.su2)

    def det(self):
        a, b = self.entry(0, 0), self.entry(0, 1)
        c, d = self.entry(1, 0), self.entry(1, 1)
        return a * d - b * c

    # -- evaluation --------------------------------------------------------

    def __call__(self, z):
        z = complex(z)
        out = np.zeros((2, 2), dtype=complex)
        for d, m in self.coeffs.items():
            out += m * z**d
        return out

    def sample(self, m):
        return sample_grid(self, m)

    def unitarity_residual(self, m=None):
        """max over a grid of (||g(z)^H g(z) - I||_max, |det g(z) - 1|)."""
        if m is None:
            m = _fit_grid_exponent(self.span())
        vals = self.sample(m)
        eye = np.eye(2)
        res_u = max(np.abs(v.conj().T @ v - eye).max() for v in vals)
        res_d = max(abs(np.linalg.det(v) - 1.0) for v in vals)
        return res_u, res_d

    def to_json(self):
        return {
            "min_deg": self.min_deg,
            "max_deg": self.max_deg,
            "coeffs": {
                str(d): [[v.real, v.imag] for v in m.reshape(4)]
                for d, m in sorted(self.coeffs.items())
            },
        }

    @staticmethod
    def from_json(obj, su2=False):
        cc = {}
        for d, flat in obj["coeffs"].items():
            vals = [complex(p[0], p[1]) for p in flat]
            cc[int(d)] = np.array(vals, dtype=complex).reshape(2, 2)
        return MatrixLaurent(cc, obj.get("min_deg"), obj.get("max_deg"), su2=su2)


# ---------------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------------


def mul(a, b):
    """Coefficient convolution: (ab)_n = sum_k a_k b_{n-k}."""
    if isinstance(a, ScalarLaurent) and isinstance(b, ScalarLaurent):
        return a * b
    cc = {}
    for d1, m1 in a.coeffs.items():
        for d2, m2 in b.coeffs.items():
            d = d1 + d2
            if d not in cc:
                cc[d] = np.zeros((2, 2), dtype=complex)
            cc[d] += m1 @ m2
    return MatrixLaurent(
        cc,
        a.min_deg + b.min_deg,
        a.max_deg + b.max_deg,
        su2=(a.su2 and b.su2),
    )


def star(f):
    return f.star()


def part(f, which):
    if which not in _PART_RANGES:
        raise ValueError("unknown part %r" % (which,))
    return f.part(which)


def exp_scalar(chi, trunc_order):
    """exp of a scalar Laurent polynomial, truncated to degrees |d| <= trunc_order.

    The series is summed to an order K for which the discarded tail satisfies
    exp(||chi||_1) ||chi||_1^(K+1)/(K+1)! <= 1e-14.
    """
    if trunc_order < 0:
        raise ValueError("trunc_order must be >= 0")
    for v in chi.coeffs.values():
        _as_complex(v)
    n1 = chi.norm_l1()
    bound = math.exp(min(n1, 700.0))
    K = 1
    term = n1  # n1^(K+1)/(K+1)! at K=0 is n1/1!
    while bound * term > 1e-14 and K < 400:
        K += 1
        term *= n1 / K
    acc = ScalarLaurent.one()
    power = ScalarLaurent.one()
    fact = 1.0
    for k in range(1, K + 1):
        power = (power * chi).truncate(-trunc_order, trunc_order)
        fact *= k
        acc = acc + power * (1.0 / fact)
    return acc.truncate(-trunc_order, trunc_order)


def _fit_grid_exponent(span):
    m = 2
    while (1 << m) <= span + 1:
        m += 1
    return m


def sample_grid(f, m):
    """Evaluate f at the 2^m roots of unity exp(2 pi i k / 2^m), k = 0..2^m-1.

    Exact (up to roundoff) for 2^m > max_deg - min_deg; raises otherwise since
    aliasing would fold distinct coefficients together.
    """
    n = 1 << m
    if n <= f.span():
        raise ValueError("grid 2^%d too small for support span %d" % (m, f.span()))
    if isinstance(f, ScalarLaurent):
        a = np.zeros(n, dtype=complex)
        for d, v in f.coeffs.items():
            a[d % n] += v
        return np.fft.ifft(a) * n
    a = np.zeros((n, 2, 2), dtype=complex)
    for d, v in f.coeffs.items():
        a[d % n] += v
    return np.fft.ifft(a, axis=0) * n


def from_samples(values, min_deg, max_deg, su2=False, tol=0.0):
    """Inverse of sample_grid for a declared degree window [min_deg, max_deg]."""
    values = np.asarray(values, dtype=complex)
    n = values.shape[0]
    if n <= max_deg - min_deg:
        raise ValueError("window larger than grid")
    spec = np.fft.fft(values, axis=0) / n
    if values.ndim == 1:
        cc = {}
        for d in range(min_deg, max_deg + 1):
            v = spec[d % n]
            if abs(v) > tol:
                cc[d] = complex(v)
        return ScalarLaurent(cc, min_deg, max_deg)
    cc = {}
    for d in range(min_deg, max_deg + 1):
        v = spec[d % n]
        if np.abs(v).max() > tol:
            cc[d] = v
    return MatrixLaurent(cc, min_deg, max_deg, su2=su2)


def div_series(num, den, hi, tol=ZERO_TOL):
    """Formal Laurent division num/den up to degree hi.

    The denominator must have a nonzero leading (lowest-degree) coefficient;
    coefficients of magnitude <= tol are treated as exactly zero when locating
    it.  The quotient q satisfies q*den = num + O(z^(hi+1)).
    """
    v = None
    for d in sorted(den.coeffs):
        if abs(den.coeffs[d]) > tol:
            v = d
            break
    if v is None:
        raise ZeroDivisionError("denominator is numerically zero")
    lead = den.coeffs[v]
    if not num.coeffs:
        return ScalarLaurent.zero()
    lo = num.min_deg - v
    if lo > hi:
        return ScalarLaurent.zero()
    r = dict(num.coeffs)
    den_rel = {d - v: c for d, c in den.coeffs.items() if d > v and abs(c) > 0}
    q = {}
    for d in range(lo, hi + 1):
        c = r.pop(d + v, 0j) / lead
        if c != 0:
            q[d] = c
            for rd, rc in den_rel.items():
                key = d + v + rd
                if key <= hi + v:
                    r[key] = r.get(key, 0j) - c * rc
    return ScalarLaurent(q, lo, hi)
