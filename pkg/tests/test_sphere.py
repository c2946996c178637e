import json
import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import eval_gegenbauer

from cliffwave.clifford import Multivector, bar_array, mul_array
from cliffwave.poly import CliffordPolynomial, dirac, eigenvalue, gamma
from cliffwave.sphere import (
    SphereSignal,
    SphereTransform,
    SpectralCoefficients,
    build_basis,
    build_quadrature,
    ck_extension,
    gegenbauer,
    multi_indices,
    outer_basis,
    reproducing_kernel,
    rotate_signal,
    sphere_area,
    sphere_moment,
    zonal_kernel,
)
from cliffwave.spin import random_spin


@pytest.fixture(scope="module")
def s2_basis():
    return build_basis(2, 8)


@pytest.fixture(scope="module")
def s2_transform(s2_basis):
    return SphereTransform(s2_basis)


def test_sphere_area():
    assert sphere_area(1) == pytest.approx(2 * math.pi)
    assert sphere_area(2) == pytest.approx(4 * math.pi)
    assert sphere_area(3) == pytest.approx(2 * math.pi ** 2)


@given(st.lists(st.integers(0, 6), min_size=2, max_size=5))
def test_sphere_moment_gamma_oracle(beta):
    # int x^beta = 2 prod Gamma((b+1)/2) / Gamma((|b| + n)/2) over the area
    n = len(beta)
    if any(b % 2 for b in beta):
        assert sphere_moment(beta) == 0
        return
    g = sympy.gamma
    val = 2 * sympy.prod([g(sympy.Rational(b + 1, 2)) for b in beta]) / g(sympy.Rational(sum(beta) + n, 2))
    area = 2 * sympy.pi ** sympy.Rational(n, 2) / g(sympy.Rational(n, 2))
    ref = sympy.nsimplify(sympy.simplify(val / area))
    assert sphere_moment(beta) == Fraction(int(ref.p), int(ref.q))


@pytest.mark.parametrize("m,degree", [(1, 7), (2, 6), (2, 9), (3, 5), (4, 4)])
def test_quadrature_exactness(m, degree):
    rule = build_quadrature(m, degree)
    assert np.allclose(np.linalg.norm(rule.nodes, axis=1), 1)
    assert rule.weights.sum() == pytest.approx(sphere_area(m))
    for beta in product(range(degree + 1), repeat=m + 1):
        if sum(beta) > degree:
            continue
        got = rule.integrate(np.prod(rule.nodes ** np.array(beta), axis=1))
        assert got == pytest.approx(float(sphere_moment(beta)) * sphere_area(m), abs=1e-12)


def test_quadrature_cap():
    with pytest.raises(MemoryError):
        build_quadrature(5, 40, max_nodes=1000)


@pytest.mark.parametrize("m,k", [(2, 0), (2, 3), (3, 4), (4, 2)])
def test_multi_index_count(m, k):
    idx = multi_indices(m, k)
    assert len(idx) == math.comb(k + m - 1, m - 1)
    assert idx == sorted(idx, reverse=True)


@pytest.mark.parametrize("alpha", [(0, 0), (1, 0), (2, 1), (0, 3), (1, 1, 1), (2, 0, 1)])
def test_ck_extension_is_monogenic(alpha):
    p = ck_extension(alpha)
    assert not dirac(p, 0)
    assert p.degree() == sum(alpha)
    # restriction to x_0 = 0 is x^alpha / alpha!
    N = len(alpha) + 1
    expo = (0,) + alpha
    assert p.terms[expo] == Multivector(N, {0: Fraction(1, math.prod(math.factorial(a) for a in alpha))})
    assert all(e[0] > 0 for e in p.terms if e != expo)


@pytest.mark.parametrize("alpha", [(0, 0, 0), (0, 1, 0), (0, 2, 1), (0, 0, 3), (0, 1, 1, 1)])
def test_outer_function_is_monogenic(alpha):
    # d(P / |x|^p) = (|x|^2 dP - p x P) / |x|^{p+2}
    W = outer_basis(alpha)
    P, p = W.numerator, W.power
    x = CliffordPolynomial.vector_variable(P.vs, P.m, 0)
    r2 = -(x * x)
    assert r2 * dirac(P, 0) - x * P * p == CliffordPolynomial.zero(P.vs, P.m)
    assert p - P.degree() == sum(alpha) + len(alpha) - 1


@pytest.mark.parametrize("m", [2, 3])
def test_gamma_eigenvalues_on_raw_basis(m):
    for k in range(3):
        for a in multi_indices(m, k):
            v = ck_extension(a)
            w = outer_basis((0,) + a).restriction()
            assert eigenvalue(gamma(v, 0), v) == -k
            assert eigenvalue(gamma(w, 0), w) == k + m


def _gram(tr):
    B = tr.values
    G = mul_array(bar_array(B, tr.N)[:, None], B[None], tr.N)
    return np.einsum("p,ijpc->ijc", tr.rule.weights, G)


@pytest.mark.parametrize("m,K", [(2, 5), (3, 3)])
def test_basis_orthonormal(m, K):
    tr = SphereTransform(build_basis(m, K))
    G = _gram(tr)
    ref = np.zeros_like(G)
    ref[:, :, 0] = np.eye(len(G))
    assert np.abs(G - ref).max() < 1e-10


@pytest.mark.parametrize("m,K", [(2, 4), (3, 2)])
def test_basis_dimensions(m, K):
    basis = build_basis(m, K)
    assert not basis.dropped
    for k in range(K + 1):
        for part in ("V", "W"):
            assert basis.dimension(k, part) == math.comb(k + m - 1, m - 1)


def test_basis_json(s2_basis):
    data = json.loads(json.dumps(s2_basis.to_json()))
    assert [e["key"] for e in data["elements"]] == s2_basis.keys
    assert data["dimensions"][3] == {"k": 3, "V": 4, "W": 4}
    assert len(data["orthonormalization"]) == 2 * (s2_basis.K + 1)


def test_requires_enough_quadrature(s2_basis):
    with pytest.raises(ValueError):
        SphereTransform(s2_basis, build_quadrature(2, 10))


def test_analyze_basis_element(s2_transform):
    tr = s2_transform
    j = tr.basis.keys.index("3/2,1/W")
    c = tr.analyze(tr.values[j])
    ref = np.zeros_like(c.values)
    ref[j, 0] = 1
    assert np.abs(c.values - ref).max() < 1e-10


def test_analyze_zero(s2_transform):
    c = s2_transform.analyze(np.zeros((s2_transform.rule.size, 8)))
    assert c.norm() == 0


def test_roundtrip_k8(s2_transform, rng):
    tr = s2_transform
    c = tr.random_coefficients(rng)
    f = tr.synthesize(c)
    g = tr.synthesize(tr.analyze(f))
    assert tr.norm(g.values - f.values) / tr.norm(f) <= 1e-10
    assert np.abs(tr.analyze(f).values - c.values).max() < 1e-10


def test_synthesize_off_grid(s2_transform, rng):
    tr = s2_transform
    c = tr.random_coefficients(rng)
    pts = rng.normal(size=(5, 3))
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    direct = sum(mul_array(b.evaluate(pts), v[None], 3) for b, v in zip(tr.basis.elements, c.values))
    assert np.allclose(tr.synthesize(c, pts).values, direct)


@pytest.mark.parametrize("mode", ["H", "L"])
def test_rotation_preserves_degree_blocks(s2_transform, rng, mode):
    tr = s2_transform
    c = tr.random_coefficients(rng)
    f = tr.synthesize(c)
    s = random_spin(3, rng)
    g = rotate_signal(s, f, mode, tr)
    cg = tr.analyze(g)
    for k in range(tr.basis.K + 1):
        for part in ("V", "W"):
            idx = tr.basis.index(k, part)
            assert np.linalg.norm(cg.values[idx]) == pytest.approx(np.linalg.norm(c.values[idx]), rel=1e-9)
    # signal is recovered from its samples, so rotation is exact at the nodes
    h = rotate_signal(s.inverse(), g, mode, tr)
    assert np.abs(h.values - f.values).max() < 1e-9


def test_rotate_signal_rejects_wrong_algebra(s2_transform, rng):
    f = s2_transform.synthesize(s2_transform.random_coefficients(rng))
    with pytest.raises(ValueError):
        rotate_signal(random_spin(4, rng), f, "H", s2_transform)
    with pytest.raises(ValueError):
        rotate_signal(random_spin(3, rng), f, "X", s2_transform)


@given(st.integers(0, 8), st.sampled_from([0.5, 1.0, 1.5, 2.0]), st.floats(-1, 1))
def test_gegenbauer_scipy_oracle(n, lam, t):
    assert gegenbauer(n, lam, t) == pytest.approx(eval_gegenbauer(n, lam, t), abs=1e-10)


@pytest.mark.parametrize("m", [2, 3])
def test_zonal_kernels_reproduce(m, rng):
    basis = build_basis(m, 3)
    A = sphere_area(m)
    for _ in range(3):
        xi, om = rng.normal(size=(2, m + 1))
        xi /= np.linalg.norm(xi)
        om /= np.linalg.norm(om)
        for k in range(4):
            assert np.allclose(zonal_kernel(k, "+", om, xi) / A, reproducing_kernel(basis, k, "V", xi, om), atol=1e-12)
            assert np.allclose(zonal_kernel(k, "-", xi, om) / A, reproducing_kernel(basis, k, "W", xi, om), atol=1e-12)


def test_zonal_kernel_sign_validation():
    with pytest.raises(ValueError):
        zonal_kernel(1, "x", [1, 0, 0], [0, 1, 0])


def test_signal_json_roundtrip(s2_transform, rng):
    f = s2_transform.synthesize(s2_transform.random_coefficients(rng))
    back = SphereSignal.from_json(json.loads(json.dumps(f.to_json())))
    assert np.array_equal(back.nodes, f.nodes)
    assert np.array_equal(back.values, f.values)


def test_coefficients_json_and_alignment(s2_transform, rng):
    c = s2_transform.random_coefficients(rng)
    back = SpectralCoefficients.from_json(json.loads(json.dumps(c.to_json())))
    assert back.keys == c.keys
    assert np.array_equal(back.values, c.values)
    bad = SpectralCoefficients(2, ["9/9,0/V"], c.values[:1])
    with pytest.raises(ValueError):
        bad.aligned(s2_transform.basis)
