"""Synthesis and recovery of SU(2) loops from root-subgroup parameters.

A k2 loop is the ordered product of elementary factors
    a(zeta_n) [[1, zeta_n z^-n], [-conj(zeta_n) z^n, 1]] ... (down to n = 1),
a k1 loop the mirrored product with parameters eta_i indexed from 0, and the
diagonal factor is diag(e^chi, e^-chi) for an iR-valued exponent chi.  The
full loop is g = k1* e^chi k2.

Recovery peels one elementary factor at a time off the Taylor expansion of
the (2,1)/(2,2) entry ratio (resp. (1,2)/(1,1) for k1).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .laurent import MatrixLaurent, ScalarLaurent, div_series, exp_scalar, mul


def a_factor(zeta):
    """The normalizing scalar (1 + |zeta|^2)^(-1/2)."""
    zeta = complex(zeta)
    if not (math.isfinite(zeta.real) and math.isfinite(zeta.imag)):
        raise ValueError("non-finite parameter")
    return 1.0 / math.sqrt(1.0 + abs(zeta) ** 2)


def _elementary(upper, lower, n):
    """Identity plus ``upper`` at degree -n in slot (1,2) and ``lower`` at n in (2,1)."""
    cc = {0: np.eye(2, dtype=complex)}
    for d, (i, j), v in ((-n, (0, 1), upper), (n, (1, 0), lower)):
        if d not in cc:
            cc[d] = np.zeros((2, 2), dtype=complex)
        cc[d][i, j] += v
    return cc


def k2_elementary(zeta, n, normalized=True):
    """a(zeta) [[1, zeta z^-n], [-conj(zeta) z^n, 1]]."""
    f = MatrixLaurent(_elementary(zeta, -np.conj(zeta), n), su2=True)
    return f * a_factor(zeta) if normalized else f


def k1_elementary(eta, n, normalized=True):
    """a(eta) [[1, -conj(eta) z^n], [eta z^-n, 1]]."""
    f = MatrixLaurent(_elementary(-np.conj(eta), eta, -n), su2=True)
    return f * a_factor(eta) if normalized else f


def build_k2(zetas):
    """Ordered product of k2 factors for zeta_1..zeta_n (leftmost index n)."""
    g = MatrixLaurent.identity()
    for k, zeta in enumerate(zetas, start=1):
        g = mul(k2_elementary(zeta, k), g)
    g.su2 = True
    return g


def build_k1(etas):
    """Ordered product of k1 factors for eta_0..eta_n (leftmost index n)."""
    g = MatrixLaurent.identity()
    for i, eta in enumerate(etas):
        g = mul(k1_elementary(eta, i), g)
    g.su2 = True
    return g


@dataclass
class DiagExponent:
    """Exponent data chi: purely imaginary chi0 plus chi_j for j >= 1.

    The reconstructed Laurent polynomial has chi_{-j} = -conj(chi_j), so
    chi* = -chi and chi is iR-valued on the circle.
    """

    chi0: complex = 0j
    chis: list = field(default_factory=list)

    def __post_init__(self):
        c0 = complex(self.chi0)
        if abs(c0.real) > 1e-14:
            raise ValueError("chi0 must be purely imaginary")
        self.chi0 = c0
        self.chis = [complex(c) for c in self.chis]

    def laurent(self):
        cc = {}
        if self.chi0 != 0:
            cc[0] = self.chi0
        for j, c in enumerate(self.chis, start=1):
            if c != 0:
                cc[j] = c
                cc[-j] = -np.conj(c)
        return ScalarLaurent(cc)

    def plus_part(self):
        return ScalarLaurent({j: c for j, c in enumerate(self.chis, start=1) if c != 0})

    def is_zero(self):
        return self.chi0 == 0 and all(c == 0 for c in self.chis)


def build_diag(chi, trunc):
    """diag(exp(chi), exp(-chi)) truncated to degrees |d| <= trunc."""
    lau = chi.laurent() if isinstance(chi, DiagExponent) else chi
    if trunc < max(lau.max_deg, -lau.min_deg, 0):
        raise ValueError("trunc must cover the support of chi")
    e_plus = exp_scalar(lau, trunc)
    e_minus = exp_scalar(-lau, trunc)
    g = MatrixLaurent.diag(e_plus, e_minus, su2=True)
    return g


def assemble(etas, chi, zetas, trunc=30):
    """g = k1(eta)* diag(e^chi, e^-chi) k2(zeta)."""
    k1 = build_k1(etas)
    k2 = build_k2(zetas)
    if isinstance(chi, DiagExponent) and chi.is_zero():
        mid = MatrixLaurent.identity()
    else:
        mid = build_diag(chi, trunc)
    return mul(mul(k1.star(), mid), k2)


def _is_near_constant(g, tol):
    return all(
        np.abs(m).max() <= tol for d, m in g.coeffs.items() if d != 0
    )


def recover_zeta(k2, n_max=64, tol=1e-12):
    """Recover (zeta_k) by Taylor peeling of the c/d = (2,1)/(2,2) ratio.

    At step k the current loop carries parameters (0,..,0, zeta_k, ...), so the
    z^k coefficient of its c/d expansion is -conj(zeta_k) with unit leading
    normalization; the recovered factor is then divided out on the right and
    the ratio re-expanded.
    """
    d0 = k2.entry(1, 1).coeff(0)
    if abs(d0) < tol:
        raise ZeroDivisionError("d2(0) vanishes; not a k2-type loop")
    if abs(k2.entry(1, 0).coeff(0)) > 1e-8:
        raise ValueError("entry (2,1) does not vanish at 0")
    cur = k2
    zetas = []
    for k in range(1, n_max + 1):
        if _is_near_constant(cur, tol):
            break
        c = cur.entry(1, 0)
        d = cur.entry(1, 1)
        xi = div_series(c, d, k).coeff(k)
        if abs(xi) < tol:
            zetas.append(0j)
            continue
        zeta = -np.conj(xi)
        zetas.append(complex(zeta))
        cur = mul(cur, k2_elementary(-zeta, k))
    while zetas and zetas[-1] == 0:
        zetas.pop()
    return zetas


def recover_eta(k1, n_max=64, tol=1e-12):
    """Recover (eta_i) by peeling the b/a = (1,2)/(1,1) ratio from degree 0."""
    a0 = k1.entry(0, 0).coeff(0)
    if abs(a0) < tol:
        raise ZeroDivisionError("a(0) vanishes; not a k1-type loop")
    cur = k1
    etas = []
    for i in range(0, n_max + 1):
        if i > 0 and _is_near_constant(cur, tol):
            break
        a = cur.entry(0, 0)
        b = cur.entry(0, 1)
        xi = div_series(b, a, i).coeff(i)
        if abs(xi) < tol:
            etas.append(0j)
            continue
        eta = -np.conj(xi)
        etas.append(complex(eta))
        cur = mul(cur, k1_elementary(-eta, i))
    while etas and etas[-1] == 0:
        etas.pop()
    return etas


@dataclass
class SingularInnerSpec:
    """Atomic singular measure: finitely many point masses on the circle."""

    atoms: list  # list of (angle theta in radians, mass nu > 0)

    def __post_init__(self):
        atoms = [(float(t), float(nu)) for t, nu in self.atoms]
        if any(nu <= 0 for _, nu in atoms):
            raise ValueError("masses must be positive")
        angles = [t for t, _ in atoms]
        if len(set(angles)) != len(angles):
            raise ValueError("atom angles must be distinct")
        self.atoms = atoms

    def total_mass(self):
        return sum(nu for _, nu in self.atoms)


def singular_inner(spec, z, normalized=False):
    """exp(sum_k nu_k (z + e^{i theta_k})/(z - e^{i theta_k})) for |z| < 1.

    With ``normalized`` the value is divided by the value at 0, so the result
    is 1 at the origin (at the price of losing |.| <= 1 on the disk).
    """
    z = complex(z)
    if abs(z) >= 1:
        raise ValueError("singular inner function evaluated only inside the disk")
    s = 0j
    for theta, nu in spec.atoms:
        w = cmath.exp(1j * theta)
        s += nu * (z + w) / (z - w)
    if normalized:
        s += spec.total_mass()
    return cmath.exp(s)


def singular_inner_taylor(spec, order, inverse=False, normalized=False):
    """Truncated Taylor series of the singular inner function (or its reciprocal).

    (z + w)/(z - w) = -(1 + 2 sum_{m>=1} (z/w)^m), so the exponent is
    -nu_total - 2 sum_m (sum_k nu_k e^{-i m theta_k}) z^m.
    """
    cc = {0: -spec.total_mass()}
    for m in range(1, order + 1):
        c = sum(nu * cmath.exp(-1j * m * theta) for theta, nu in spec.atoms)
        cc[m] = -2.0 * c
    expo = ScalarLaurent(cc)
    if inverse:
        expo = -expo
    if normalized:
        expo = expo - expo.coeff(0)
    return exp_scalar(expo, order)
