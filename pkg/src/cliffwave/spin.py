"""Spin(m): even unit multivectors, bivector exponentials and the actions h, l, H, L."""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass
from typing import Callable

import numpy as np
import sympy

from .clifford import (
    Multivector,
    blade_bits,
    exact,
    grade_blades,
    to_complex,
    vector,
)

SPIN_TOL = 1e-12


@dataclass(frozen=True)
class SpinElement:
    """Even multivector s with s * bar(s) == 1."""

    mv: Multivector

    def __post_init__(self):
        check_spin(self.mv)

    @property
    def m(self) -> int:
        return self.mv.m

    @classmethod
    def identity(cls, m: int) -> SpinElement:
        return cls(Multivector.scalar(m, 1))

    def __mul__(self, other: SpinElement) -> SpinElement:
        return SpinElement(self.mv * other.mv)

    def __neg__(self) -> SpinElement:
        return SpinElement(-self.mv)

    def inverse(self) -> SpinElement:
        return SpinElement(self.mv.bar())

    def to_json(self) -> dict:
        return self.mv.to_json()

    @classmethod
    def from_json(cls, data: dict) -> SpinElement:
        return cls(Multivector.from_json(data))


def check_spin(s: Multivector, tol: float = SPIN_TOL) -> None:
    if not s.is_even():
        raise ValueError("spin element has odd-grade components")
    d = s * s.bar() - 1
    if s.is_exact:
        if d:
            raise ValueError("s * bar(s) != 1")
    elif d.max_abs() > tol:
        raise ValueError(f"s * bar(s) deviates from 1 by {d.max_abs():.3e}")


def _as_spin(s) -> Multivector:
    if isinstance(s, SpinElement):
        return s.mv
    check_spin(s)
    return s


def _trig(t):
    """cos and sin of t, exact when both are rational."""
    if isinstance(t, sympy.Basic):
        c, s = sympy.cos(t), sympy.sin(t)
        if c.is_Rational and s.is_Rational:
            return exact(_frac(c)), exact(_frac(s))
        return float(c), float(s)
    return math.cos(t), math.sin(t)


def _frac(r):
    return Fraction(int(r.p), int(r.q))


def exp_bivector(X: Multivector, t=1.0) -> SpinElement:
    """exp(tX) for a bivector X.

    A unit blade e_jk uses cos t + e_jk sin t. Anything else is summed as a
    power series after scaling by a power of two, then squared back.
    """
    if X.grades() - {2}:
        raise ValueError("exp_bivector expects a pure bivector")
    items = list(X.items())
    if len(items) == 1:
        bits, v = items[0]
        if to_complex(v) in (1, -1):
            c, s = _trig(t)
            return SpinElement(Multivector(X.m, {0: c, bits: s if to_complex(v) == 1 else -s}))
    if not items:
        return SpinElement.identity(X.m)
    Y = X.to_approx().scale(float(t))
    nrm = max(Y.norm(), 1e-300)
    k = max(0, math.ceil(math.log2(nrm / 0.5))) if nrm > 0.5 else 0
    Y = Y.scale(2.0 ** -k)
    total = Multivector.scalar(X.m, 1.0)
    term = Multivector.scalar(X.m, 1.0)
    n = 1
    while True:
        term = (term * Y).scale(1.0 / n)
        total = total + term
        if term.norm() < 1e-17:
            break
        n += 1
    for _ in range(k):
        total = total * total
    return SpinElement(total)


def torus_element(m: int, angles) -> SpinElement:
    """prod_j exp(t_j e_{2j-1} e_{2j})."""
    s = SpinElement.identity(m)
    for j, t in enumerate(angles, start=1):
        s = s * exp_bivector(Multivector(m, {blade_bits(2 * j - 1, 2 * j): 1}), t)
    return s


def random_spin(m: int, rng, pairs: int | None = None) -> SpinElement:
    """Product of an even number of random unit vectors."""
    pairs = pairs if pairs is not None else int(rng.integers(1, 7))
    s = Multivector.scalar(m, 1.0)
    for _ in range(2 * pairs):
        u = rng.normal(size=m)
        s = s * vector(m, u / np.linalg.norm(u))
    return SpinElement(s)


def action_h(s, a: Multivector) -> Multivector:
    """h(s) a = s a bar(s)."""
    s = _as_spin(s)
    return s * a * s.bar()


def action_l(s, a: Multivector) -> Multivector:
    """l(s) a = s a."""
    return _as_spin(s) * a


def tensor_h(s, f: Callable[[Multivector], Multivector]) -> Callable[[Multivector], Multivector]:
    """H(s) f (a) = s f(bar(s) a s) bar(s)."""
    s = _as_spin(s)
    sb = s.bar()
    return lambda a: s * f(sb * a * s) * sb


def tensor_l(s, f: Callable[[Multivector], Multivector]) -> Callable[[Multivector], Multivector]:
    """L(s) f (a) = s f(bar(s) a s)."""
    s = _as_spin(s)
    sb = s.bar()
    return lambda a: s * f(sb * a * s)


def rotation_matrix(s) -> np.ndarray:
    """Matrix of h(s) on 1-vectors; column j holds the image of e_{j+1}."""
    s = _as_spin(s)
    m = s.m
    R = np.zeros((m, m))
    for j in range(m):
        img = action_h(s, Multivector(m, {1 << j: 1}))
        for i in range(m):
            R[i, j] = to_complex(img[1 << i]).real
    return R


def _ad_matrix(X: Multivector) -> list[list]:
    basis = grade_blades(X.m, 2)
    index = {b: i for i, b in enumerate(basis)}
    cols = []
    for b in basis:
        Z = Multivector(X.m, {b: 1})
        img = X * Z - Z * X
        col = [0] * len(basis)
        for k, v in img.items():
            col[index[k]] = v
        cols.append(col)
    return [[cols[j][i] for j in range(len(basis))] for i in range(len(basis))]


def _trace_prod(A, B):
    n = len(A)
    return sum(A[i][j] * B[j][i] for i in range(n) for j in range(n))


def killing_form(X: Multivector, Y: Multivector):
    """tr(ad_X ad_Y), scaled so that the form is 1 on (e_12/2, e_12/2)."""
    if X.m != Y.m:
        raise ValueError("dimension mismatch")
    m = X.m
    if m < 3:
        raise ValueError("spin(m) is abelian for m < 3; the Killing form vanishes")
    for Z in (X, Y):
        if Z and Z.grades() - {2}:
            raise ValueError("killing_form expects bivectors")
    ref = Multivector(m, {3: exact(1)}) / 2
    norm = _trace_prod(_ad_matrix(ref), _ad_matrix(ref))
    val = _trace_prod(_ad_matrix(X), _ad_matrix(Y))
    if isinstance(val, int) and val == 0:
        return 0
    if X.is_exact and Y.is_exact:
        q = val / norm
        return Fraction(int(q.x.numerator), int(q.x.denominator)) if q.y == 0 else q
    return to_complex(val).real / to_complex(norm).real


def spin_dimension(m: int) -> int:
    """Number of independent bivectors, m(m-1)/2."""
    return m * (m - 1) // 2


__all__ = [
    "SpinElement",
    "check_spin",
    "exp_bivector",
    "torus_element",
    "random_spin",
    "action_h",
    "action_l",
    "tensor_h",
    "tensor_l",
    "rotation_matrix",
    "killing_form",
    "spin_dimension",
]
