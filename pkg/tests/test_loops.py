import cmath
import math

import numpy as np
import pytest

from loopfactor.laurent import MatrixLaurent, ScalarLaurent, div_series, mul
from loopfactor.loops import (
    DiagExponent,
    SingularInnerSpec,
    a_factor,
    assemble,
    build_diag,
    build_k1,
    build_k2,
    k1_elementary,
    k2_elementary,
    recover_eta,
    recover_zeta,
    singular_inner,
    singular_inner_taylor,
)


def random_zetas(rng, n, rad=0.8):
    return [rad * (rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1)) / 2 for _ in range(n)]


def test_a_factor_values():
    assert a_factor(0) == 1.0
    assert np.isclose(a_factor(1), 1 / math.sqrt(2))
    assert np.isclose(a_factor(2j), 1 / math.sqrt(5))


def test_build_k2_empty_and_single():
    assert np.allclose(build_k2([]).coeff(0), np.eye(2))
    k2 = build_k2([1.0])
    # single factor: d2(0) = 1/sqrt(2), c2 = -(1/sqrt 2) z
    assert np.isclose(k2.entry(1, 1).coeff(0), 1 / math.sqrt(2))
    assert np.isclose(k2.entry(1, 0).coeff(1), -1 / math.sqrt(2))
    assert k2.entry(1, 0).coeff(0) == 0


def test_taylor_expansion_leading_coefficient():
    # ratio c2/d2 starts at -conj(zeta_1) z
    k2 = build_k2([0.5, 0.25])
    ratio = div_series(k2.entry(1, 0), k2.entry(1, 1), 2)
    assert np.isclose(ratio.coeff(1), -0.5)
    # second coefficient carries the (1+|zeta_1|^2) normalization
    assert np.isclose(ratio.coeff(2), -0.25 * 1.25)


def test_taylor_expansion_degree_four():
    # full degree-4 expansion against a symbolically derived closed form
    rng = np.random.default_rng(11)
    z = random_zetas(rng, 4, rad=0.9)
    k2 = build_k2(z)
    ratio = div_series(k2.entry(1, 0), k2.entry(1, 1), 4)
    zb = [np.conj(w) for w in z]
    n1 = 1 + abs(z[0]) ** 2
    n2 = 1 + abs(z[1]) ** 2
    n3 = 1 + abs(z[2]) ** 2
    assert np.isclose(ratio.coeff(1), -zb[0])
    assert np.isclose(ratio.coeff(2), -zb[1] * n1)
    c3 = -zb[2] * n1 * n2 - zb[1] * n1 * (zb[1] * z[0])
    assert np.isclose(ratio.coeff(3), c3)
    c4 = (
        -zb[3] * n1 * n2 * n3
        - zb[2] * n1 * n2 * (zb[2] * z[1] + 2 * zb[1] * z[0])
        - zb[1] * n1 * (zb[1] ** 2 * z[0] ** 2)
    )
    assert np.isclose(ratio.coeff(4), c4)


def test_build_k1_normalization():
    assert np.allclose(build_k1([]).coeff(0), np.eye(2))
    k1 = build_k1([1.0])
    assert np.isclose(k1.entry(0, 0).coeff(0), 1 / math.sqrt(2))
    # product with a padding zero matches explicit factor multiplication
    k1b = build_k1([0.0, 0.3])
    direct = mul(k1_elementary(0.3, 1), k1_elementary(0.0, 0))
    for d in range(-1, 2):
        assert np.allclose(k1b.coeff(d), direct.coeff(d))


def test_d2_at_zero_is_product_of_a_factors():
    rng = np.random.default_rng(12)
    for n in (1, 5, 12):
        z = random_zetas(rng, n)
        k2 = build_k2(z)
        expect = np.prod([a_factor(w) for w in z])
        assert abs(k2.entry(1, 1).coeff(0) - expect) < 1e-12
        assert abs(k2.entry(1, 0).coeff(0)) < 1e-14


def test_build_k2_su2_on_grid():
    rng = np.random.default_rng(13)
    k2 = build_k2(random_zetas(rng, 6))
    res_u, res_d = k2.unitarity_residual()
    assert res_u < 1e-12 and res_d < 1e-12


def test_build_diag_cases():
    assert np.allclose(build_diag(DiagExponent(), 5).coeff(0), np.eye(2))
    d = build_diag(DiagExponent(chi0=1j * math.pi / 2), 5)
    assert np.allclose(d.coeff(0), np.diag([1j, -1j]))
    d2 = build_diag(DiagExponent(chis=[0.2j]), 30)
    res_u, _ = d2.unitarity_residual(6)
    assert res_u < 1e-10


def test_assemble():
    assert np.allclose(assemble([], DiagExponent(), []).coeff(0), np.eye(2))
    k2 = build_k2([1.0])
    g = assemble([], DiagExponent(), [1.0])
    for d in range(-1, 2):
        assert np.allclose(g.coeff(d), k2.coeff(d))
    g2 = assemble([0.5], DiagExponent(chis=[0.1j]), [0.5], trunc=30)
    res_u, res_d = g2.unitarity_residual()
    assert res_u < 1e-9 and res_d < 1e-9


def test_recover_zeta_roundtrips():
    assert recover_zeta(MatrixLaurent.identity()) == []
    assert np.allclose(recover_zeta(build_k2([0.5])), [0.5])
    z = [0.4, -0.2j, 0.1]
    got = recover_zeta(build_k2(z))
    assert np.allclose(got, z, atol=1e-10)
    # zeros inside the list survive the roundtrip
    z2 = [0.3, 0.0, 0.25j]
    assert np.allclose(recover_zeta(build_k2(z2)), z2, atol=1e-10)


def test_recover_zeta_random_lengths():
    rng = np.random.default_rng(14)
    for n in (2, 7, 12):
        z = [0.9 * (rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1)) / 2 for _ in range(n)]
        got = recover_zeta(build_k2(z))
        assert np.allclose(got, z, atol=1e-9)


def test_recover_zeta_rejects_bad_input():
    # swapped normalization: entry (2,1) not vanishing at 0
    bad = MatrixLaurent({0: [[0, -1], [1, 0]]})
    with pytest.raises((ValueError, ZeroDivisionError)):
        recover_zeta(bad)


def test_recover_eta_roundtrips():
    assert recover_eta(MatrixLaurent.identity()) == []
    assert np.allclose(recover_eta(build_k1([0.3])), [0.3])
    e = [0.3, 0.2]
    assert np.allclose(recover_eta(build_k1(e)), e, atol=1e-10)
    e2 = [0.1j, 0.0, -0.4, 0.2j]
    assert np.allclose(recover_eta(build_k1(e2)), e2, atol=1e-9)


def test_singular_inner_values():
    empty = SingularInnerSpec(atoms=[])
    assert singular_inner(empty, 0.3 + 0.1j) == 1.0
    one = SingularInnerSpec(atoms=[(0.0, 1.0)])
    assert np.isclose(singular_inner(one, 0.0), math.exp(-1.0))
    # inner: modulus < 1 inside the disk
    rng = np.random.default_rng(15)
    spec = SingularInnerSpec(atoms=[(0.0, 0.5), (2.0, 0.25)])
    for _ in range(20):
        z = 0.95 * math.sqrt(rng.uniform()) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
        assert abs(singular_inner(spec, z)) < 1.0
    assert np.isclose(singular_inner(spec, 0.0, normalized=True), 1.0)
    with pytest.raises(ValueError):
        singular_inner(spec, 1.0)


def test_singular_inner_taylor_matches_eval():
    spec = SingularInnerSpec(atoms=[(0.7, 0.3)])
    tay = singular_inner_taylor(spec, 60)
    for z in (0.2, -0.3 + 0.1j, 0.4j):
        assert np.isclose(tay(z), singular_inner(spec, z), atol=1e-10)
    inv = singular_inner_taylor(spec, 60, inverse=True)
    assert np.isclose(inv(0.2) * singular_inner(spec, 0.2), 1.0, atol=1e-10)


def test_singular_inner_nonuniqueness_demo():
    # multiplying by diag(lambda, lambda^-1) leaves the recovered zetas fixed
    spec = SingularInnerSpec(atoms=[(0.9, 0.2), (3.5, 0.15)])
    zetas = [0.4, -0.25j, 0.15]
    k2 = build_k2(zetas)
    order = 40
    lam = singular_inner_taylor(spec, order)
    lam_inv = singular_inner_taylor(spec, order, inverse=True)
    twisted = mul(MatrixLaurent.diag(lam, lam_inv), k2)
    got = recover_zeta(twisted, n_max=len(zetas), tol=1e-9)
    assert np.allclose(got, zetas, atol=1e-6)
    # the twisted loop itself differs from k2 (different d2(0))
    assert abs(twisted.entry(1, 1).coeff(0) - k2.entry(1, 1).coeff(0)) > 1e-3
