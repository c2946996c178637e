import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cliffwave.clifford import (
    QQ_I,
    Multivector,
    bar_array,
    basis_vector,
    blade,
    blade_label,
    blade_sign,
    blade_sign_bruteforce,
    clifford_inner_product,
    exact,
    grade_project,
    left_rep,
    main_anti_involution,
    mul_array,
    random_multivector,
    vector,
    wedge,
)
from conftest import exact_multivectors, float_multivectors

M = st.integers(1, 5)


@given(st.integers(0, 63), st.integers(0, 63))
def test_blade_sign_matches_bruteforce(a, b):
    assert blade_sign(a, b) == blade_sign_bruteforce(a, b)


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_generators_square_to_minus_one(m):
    for i in range(1, m + 1):
        e = basis_vector(m, i)
        assert e * e == Multivector.scalar(m, -1)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_generators_anticommute(m):
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            ei, ej = basis_vector(m, i), basis_vector(m, j)
            assert ei * ej == -(ej * ei)
            assert ei * ej == blade(m, i, j)


def test_pauli_representation():
    # e_j -> i sigma_j is a representation of Cl_3
    sig = [
        np.array([[0, 1], [1, 0]], complex),
        np.array([[0, -1j], [1j, 0]]),
        np.array([[1, 0], [0, -1]], complex),
    ]

    def rep(a):
        out = np.zeros((2, 2), complex)
        for bits, v in a.items():
            mat = np.eye(2, dtype=complex)
            for g in range(3):
                if bits >> g & 1:
                    mat = mat @ (1j * sig[g])
            out += complex(float(v.x), float(v.y)) * mat
        return out

    rng = np.random.default_rng(3)
    for _ in range(20):
        a = random_multivector(3, rng)
        b = random_multivector(3, rng)
        assert np.allclose(rep(a * b), rep(a) @ rep(b))
    assert np.allclose(rep(blade(3, 1, 2, 3)), np.eye(2))


@given(st.data())
def test_associativity_exact(data):
    m = data.draw(M)
    a, b, c = (data.draw(exact_multivectors(m)) for _ in range(3))
    assert (a * b) * c == a * (b * c)


@given(st.data())
def test_distributivity_exact(data):
    m = data.draw(M)
    a, b, c = (data.draw(exact_multivectors(m)) for _ in range(3))
    assert a * (b + c) == a * b + a * c
    assert (b + c) * a == b * a + c * a


@given(st.data())
def test_bar_is_anti_involution(data):
    m = data.draw(M)
    a, b = data.draw(exact_multivectors(m)), data.draw(exact_multivectors(m))
    assert (a * b).bar() == b.bar() * a.bar()
    assert a.bar().bar() == a
    assert main_anti_involution(a) == a.bar()


@given(st.data())
def test_inner_product_positive_definite(data):
    m = data.draw(M)
    a = data.draw(exact_multivectors(m))
    ip = clifford_inner_product(a, a)
    assert ip.y == 0
    if a:
        assert ip.x > 0
    else:
        assert ip.x == 0


@given(st.data())
def test_inner_product_is_scalar_part(data):
    m = data.draw(M)
    a, b = data.draw(exact_multivectors(m)), data.draw(exact_multivectors(m))
    assert clifford_inner_product(a, b) == (a.bar() * b)[0]


def test_inner_product_on_basis_is_orthonormal():
    m = 3
    for x in range(8):
        for y in range(8):
            ip = clifford_inner_product(Multivector(m, {x: 1}), Multivector(m, {y: 1}))
            assert ip == exact(int(x == y))


@given(st.data())
def test_wedge_of_vectors(data):
    m = data.draw(st.integers(2, 5))
    u = vector(m, data.draw(st.lists(st.integers(-3, 3), min_size=m, max_size=m)))
    v = vector(m, data.draw(st.lists(st.integers(-3, 3), min_size=m, max_size=m)))
    assert wedge(u, v) == -wedge(v, u)
    assert wedge(u, u) == Multivector.zero(m)
    assert wedge(u, v) == grade_project(u * v, 2)
    assert (u ^ v) == wedge(u, v)


def test_grade_project_range():
    a = Multivector(3, {0: 1, 3: 2, 7: 5})
    assert grade_project(a, 2) == Multivector(3, {3: 2})
    with pytest.raises(ValueError):
        grade_project(a, 4)
    with pytest.raises(ValueError):
        grade_project(a, -1)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        basis_vector(2, 1) * basis_vector(3, 1)


@given(st.data())
def test_dense_product_matches_sparse(data):
    m = data.draw(M)
    a, b = data.draw(float_multivectors(m)), data.draw(float_multivectors(m))
    dense = mul_array(a.to_array(), b.to_array(), m)
    assert np.allclose(dense, (a * b).to_array())
    assert np.allclose(bar_array(a.to_array(), m), a.bar().to_array())
    assert np.allclose(left_rep(a.to_array(), m) @ b.to_array(), dense)


@given(st.data())
def test_exact_and_approx_agree(data):
    m = data.draw(M)
    a, b = data.draw(exact_multivectors(m)), data.draw(exact_multivectors(m))
    assert (a * b).to_approx().close_to(a.to_approx() * b.to_approx())


def test_mixing_backends_promotes_to_approx():
    a = Multivector(2, {1: 1})
    assert a.is_exact
    assert not (a + Multivector(2, {1: 0.5})).is_exact


@given(st.data())
def test_json_roundtrip_exact(data):
    m = data.draw(M)
    a = data.draw(exact_multivectors(m)) * Multivector.scalar(m, exact(QQ_I(1, 0))) / 3
    back = Multivector.from_json(json.loads(json.dumps(a.to_json())))
    assert back == a
    assert back.is_exact


def test_json_uses_rational_strings():
    a = Multivector(2, {3: exact(1)}) / 3
    row = a.to_json()["coeffs"][0]
    assert row == {"blade": 3, "re": "1/3", "im": "0"}


def test_json_roundtrip_float():
    a = Multivector(3, {0: 0.25 + 1j, 5: -2.5})
    assert Multivector.from_json(a.to_json()).close_to(a, 0)


def test_blade_label():
    assert blade_label(0) == "1"
    assert blade_label(0b101) == "e13"


def test_exact_rejects_inexact():
    with pytest.raises(TypeError):
        exact(0.3)
    assert exact("2/4") == QQ_I(exact(1).x / 2, 0)


def _bruteforce_product(a, b):
    out = {}
    for x, u in a.items():
        for y, v in b.items():
            w = u * v * blade_sign_bruteforce(x, y)
            out[x ^ y] = out.get(x ^ y, exact(0)) + w
    return Multivector(a.m, {k: v for k, v in out.items() if v != exact(0)})


@pytest.mark.parametrize("m", [3, 4, 5])
def test_dense_exact_product_matches_bruteforce(m, rng):
    for _ in range(5):
        a = random_multivector(m, rng)
        b = random_multivector(m, rng)
        assert a * b == _bruteforce_product(a, b)


def test_dense_exact_product_big_integers(rng):
    m = 4
    a = random_multivector(m, rng) * exact(10**20)
    b = random_multivector(m, rng) * exact(QQ_I(3**40, -(7**20)))
    assert a * b == _bruteforce_product(a, b)
