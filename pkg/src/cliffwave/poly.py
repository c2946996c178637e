"""Clifford-valued polynomials in several vector variables and their operators.

Indexing is 0-based throughout: variable ``i`` has coordinates ``x[i, a]`` for
``a < n`` and coordinate ``a`` pairs with the generator ``e_{a+1}`` (bit ``a``).

Sign conventions:

* ``L_ab = x_a d_b - x_b d_a``;
* ``Gamma = -sum_{a<b} e_ab L_ab``, so inner monogenics of degree k have
  eigenvalue ``-k``;
* the regular action of ``e_ab / 2`` on functions is ``-L_ab`` and the left
  action adds left multiplication by ``e_ab / 2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np

from .clifford import (
    ONE,
    ZERO,
    Multivector,
    blade_bits,
    exact,
    is_exact,
)


@dataclass(frozen=True)
class VarSystem:
    """k vector variables with n real components each."""

    k: int
    n: int

    def __post_init__(self):
        if self.k < 1 or self.n < 1:
            raise ValueError("need k >= 1 and n >= 1")

    @property
    def size(self) -> int:
        return self.k * self.n

    def index(self, i: int, a: int) -> int:
        if not (0 <= i < self.k and 0 <= a < self.n):
            raise IndexError(f"x[{i},{a}] outside a {self.k}x{self.n} system")
        return i * self.n + a


class CliffordPolynomial:
    """Sparse map from exponent tuples to multivector coefficients."""

    __slots__ = ("vs", "m", "terms")

    def __init__(self, vs: VarSystem, m: int, terms=None):
        self.vs = vs
        self.m = m
        t = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != vs.size:
                raise ValueError("exponent length does not match the variable system")
            if not isinstance(c, Multivector):
                c = Multivector.scalar(m, c)
            if c.m != m:
                raise ValueError("coefficient dimension mismatch")
            if c:
                t[e] = c
        self.terms = t

    # constructors
    @classmethod
    def zero(cls, vs, m):
        return cls(vs, m)

    @classmethod
    def constant(cls, vs, m, c=1):
        return cls(vs, m, {(0,) * vs.size: c})

    @classmethod
    def coordinate(cls, vs, m, i, a, c=1):
        e = [0] * vs.size
        e[vs.index(i, a)] = 1
        return cls(vs, m, {tuple(e): c})

    @classmethod
    def vector_variable(cls, vs, m, i):
        """x_i = sum_a x[i,a] e_{a+1}."""
        if vs.n > m:
            raise ValueError("Clifford dimension smaller than the variable dimension")
        out = cls.zero(vs, m)
        for a in range(vs.n):
            out = out + cls.coordinate(vs, m, i, a, Multivector(m, {1 << a: 1}))
        return out

    # queries
    @property
    def is_exact(self) -> bool:
        return all(c.is_exact for c in self.terms.values())

    def __bool__(self):
        return bool(self.terms)

    def degree(self, i: int | None = None) -> int:
        if not self.terms:
            return -1
        if i is None:
            return max(sum(e) for e in self.terms)
        lo, hi = i * self.vs.n, (i + 1) * self.vs.n
        return max(sum(e[lo:hi]) for e in self.terms)

    def _same(self, other):
        if not isinstance(other, CliffordPolynomial):
            raise TypeError("expected a CliffordPolynomial")
        if other.vs != self.vs or other.m != self.m:
            raise ValueError("polynomials live in different spaces")

    # arithmetic
    def __add__(self, other):
        if not isinstance(other, CliffordPolynomial):
            other = CliffordPolynomial.constant(self.vs, self.m, other)
        self._same(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t[e] + c if e in t else c
        return CliffordPolynomial(self.vs, self.m, t)

    __radd__ = __add__

    def __neg__(self):
        return CliffordPolynomial(self.vs, self.m, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, CliffordPolynomial):
            self._same(other)
            t = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    e = tuple(a + b for a, b in zip(e1, e2))
                    c = c1 * c2
                    t[e] = t[e] + c if e in t else c
            return CliffordPolynomial(self.vs, self.m, t)
        if isinstance(other, Multivector):
            return CliffordPolynomial(self.vs, self.m, {e: c * other for e, c in self.terms.items()})
        return CliffordPolynomial(self.vs, self.m, {e: c * other for e, c in self.terms.items()})

    def __rmul__(self, other):
        if isinstance(other, Multivector):
            return CliffordPolynomial(self.vs, self.m, {e: other * c for e, c in self.terms.items()})
        return CliffordPolynomial(self.vs, self.m, {e: c * other for e, c in self.terms.items()})

    def __pow__(self, k: int):
        out = CliffordPolynomial.constant(self.vs, self.m, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) or is_exact(other):
            other = CliffordPolynomial.constant(self.vs, self.m, other)
        if not isinstance(other, CliffordPolynomial):
            return NotImplemented
        return not (self - other).terms

    __hash__ = None

    def map_coeffs(self, fn) -> CliffordPolynomial:
        return CliffordPolynomial(self.vs, self.m, {e: fn(c) for e, c in self.terms.items()})

    def to_approx(self):
        return self.map_coeffs(lambda c: c.to_approx())

    # calculus
    def diff(self, idx: int) -> CliffordPolynomial:
        t = {}
        for e, c in self.terms.items():
            p = e[idx]
            if p:
                e2 = e[:idx] + (p - 1,) + e[idx + 1:]
                t[e2] = c * p
        return CliffordPolynomial(self.vs, self.m, t)

    def mul_coord(self, idx: int) -> CliffordPolynomial:
        t = {}
        for e, c in self.terms.items():
            t[e[:idx] + (e[idx] + 1,) + e[idx + 1:]] = c
        return CliffordPolynomial(self.vs, self.m, t)

    def left(self, a: Multivector) -> CliffordPolynomial:
        return a * self

    # evaluation
    def to_arrays(self):
        exps = np.array(list(self.terms), dtype=int).reshape(-1, self.vs.size)
        coeffs = np.array([c.to_array() for c in self.terms.values()]).reshape(-1, 1 << self.m)
        return exps, coeffs

    def evaluate(self, points) -> np.ndarray:
        """Values at points of shape (P, k*n); returns (P, 2^m) coefficients."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        exps, coeffs = self.to_arrays()
        if not len(exps):
            return np.zeros((len(pts), 1 << self.m), dtype=complex)
        mono = np.prod(pts[:, None, :] ** exps[None, :, :], axis=2)
        return mono @ coeffs

    def evaluate_exact(self, point) -> Multivector:
        vals = [exact(v) for v in point]
        out = Multivector.zero(self.m)
        for e, c in self.terms.items():
            w = ONE
            for v, p in zip(vals, e):
                for _ in range(p):
                    w = w * v
            out = out + c * w
        return out

    # serialization
    def to_json(self) -> dict:
        return {
            "k": self.vs.k,
            "n": self.vs.n,
            "m": self.m,
            "terms": [{"exps": list(e), "coeff": c.to_json()} for e, c in sorted(self.terms.items())],
        }

    @classmethod
    def from_json(cls, data: dict) -> CliffordPolynomial:
        vs = VarSystem(int(data["k"]), int(data["n"]))
        terms = {tuple(t["exps"]): Multivector.from_json(t["coeff"]) for t in data["terms"]}
        m = int(data.get("m", next(iter(terms.values())).m if terms else vs.n))
        return cls(vs, m, terms)

    def __repr__(self):
        return f"CliffordPolynomial(k={self.vs.k}, n={self.vs.n}, m={self.m}, terms={len(self.terms)})"


def _e(m, a):
    return Multivector(m, {1 << a: 1})


def _eab(m, a, b):
    return Multivector(m, {(1 << a) | (1 << b): 1})


def _check_var(p, i):
    if not 0 <= i < p.vs.k:
        raise IndexError(f"variable {i} outside 0..{p.vs.k - 1}")


# ------------------------------------------------------------------ operators

def dirac(p: CliffordPolynomial, i: int) -> CliffordPolynomial:
    """sum_a e_a d_{x[i,a]} p, generators acting from the left."""
    _check_var(p, i)
    out = CliffordPolynomial.zero(p.vs, p.m)
    for a in range(p.vs.n):
        out = out + _e(p.m, a) * p.diff(p.vs.index(i, a))
    return out


def laplacian(p, i):
    _check_var(p, i)
    out = CliffordPolynomial.zero(p.vs, p.m)
    for a in range(p.vs.n):
        idx = p.vs.index(i, a)
        out = out + p.diff(idx).diff(idx)
    return out


def angular_momentum(p, i, a, b):
    """L_ab in variable i: x_a d_b - x_b d_a."""
    _check_var(p, i)
    if not 0 <= a < b < p.vs.n:
        raise ValueError(f"invalid coordinate pair ({a}, {b})")
    ia, ib = p.vs.index(i, a), p.vs.index(i, b)
    return p.diff(ib).mul_coord(ia) - p.diff(ia).mul_coord(ib)


def gamma(p, i):
    """Gamma_i = -sum_{a<b} e_ab L_ab."""
    out = CliffordPolynomial.zero(p.vs, p.m)
    for a, b in combinations(range(p.vs.n), 2):
        out = out - _eab(p.m, a, b) * angular_momentum(p, i, a, b)
    return out


def wedge_dirac(p, i):
    """x_i wedge d_{x_i}: sum over a != b of (e_a wedge e_b) x_a d_b."""
    _check_var(p, i)
    out = CliffordPolynomial.zero(p.vs, p.m)
    for a in range(p.vs.n):
        for b in range(p.vs.n):
            if a == b:
                continue
            w = _e(p.m, a) ^ _e(p.m, b)
            out = out + w * p.diff(p.vs.index(i, b)).mul_coord(p.vs.index(i, a))
    return out


def euler(p, i):
    _check_var(p, i)
    out = CliffordPolynomial.zero(p.vs, p.m)
    for a in range(p.vs.n):
        idx = p.vs.index(i, a)
        out = out + p.diff(idx).mul_coord(idx)
    return out


def mixed_euler(p, i, j):
    """<x_i, d_{x_j}> = sum_a x[i,a] d_{x[j,a]}."""
    _check_var(p, i)
    _check_var(p, j)
    if i == j:
        raise ValueError("mixed_euler needs distinct variables")
    out = CliffordPolynomial.zero(p.vs, p.m)
    for a in range(p.vs.n):
        out = out + p.diff(p.vs.index(j, a)).mul_coord(p.vs.index(i, a))
    return out


def mixed_dirac_inner(p, i, j):
    """<d_{x_i}, d_{x_j}> = sum_a d_{x[i,a]} d_{x[j,a]}."""
    _check_var(p, i)
    _check_var(p, j)
    out = CliffordPolynomial.zero(p.vs, p.m)
    for a in range(p.vs.n):
        out = out + p.diff(p.vs.index(i, a)).diff(p.vs.index(j, a))
    return out


def mixed_laplacian(p, i, j):
    """sum_{a<b} L_{(i),ab} L_{(j),ab} p."""
    if i == j:
        raise ValueError("mixed_laplacian needs distinct variables")
    out = CliffordPolynomial.zero(p.vs, p.m)
    for a, b in combinations(range(p.vs.n), 2):
        out = out + angular_momentum(angular_momentum(p, j, a, b), i, a, b)
    return out


def overdot_form(p, i, j):
    """-sum_{a,b} x[j,a] x[i,b] d_{x[i,a]} d_{x[j,b]} p.

    The derivative in variable i does not touch the factor x[i,b].
    """
    out = CliffordPolynomial.zero(p.vs, p.m)
    n = p.vs.n
    for a in range(n):
        for b in range(n):
            q = p.diff(p.vs.index(j, b)).diff(p.vs.index(i, a))
            out = out - q.mul_coord(p.vs.index(i, b)).mul_coord(p.vs.index(j, a))
    return out


def inner_variables(p_like, i, j):
    """The polynomial <x_i, x_j>."""
    vs, m = p_like.vs, p_like.m
    out = CliffordPolynomial.zero(vs, m)
    for a in range(vs.n):
        out = out + CliffordPolynomial.coordinate(vs, m, i, a) * CliffordPolynomial.coordinate(vs, m, j, a)
    return out


def regular_action(p, a, b):
    """Derivative of f(bar(s) x s) along s = exp(t e_ab / 2), in every variable."""
    out = CliffordPolynomial.zero(p.vs, p.m)
    for i in range(p.vs.k):
        out = out - angular_momentum(p, i, a, b)
    return out


def left_action(p, a, b):
    """Derivative of s f(bar(s) x s) along s = exp(t e_ab / 2)."""
    return regular_action(p, a, b) + (_eab(p.m, a, b) / 2) * p


def conjugation_action(p, a, b):
    """Derivative of s f(bar(s) x s) bar(s) along s = exp(t e_ab / 2)."""
    h = _eab(p.m, a, b) / 2
    return regular_action(p, a, b) + h * p - p * h


def casimir_H(p):
    """sum_{a<b} (H_*(e_ab / 2))^2 with H_* the regular action."""
    out = CliffordPolynomial.zero(p.vs, p.m)
    for a, b in combinations(range(p.vs.n), 2):
        out = out + regular_action(regular_action(p, a, b), a, b)
    return out


def casimir_L(p):
    """sum_{a<b} (L_*(e_ab / 2))^2 with L_* the left action."""
    out = CliffordPolynomial.zero(p.vs, p.m)
    for a, b in combinations(range(p.vs.n), 2):
        out = out + left_action(left_action(p, a, b), a, b)
    return out


def casimir_constant(n: int) -> Fraction:
    """c in L_*(Omega) = H_*(Omega) + Gamma - c: one quarter of binom(n, 2)."""
    return Fraction(comb(n, 2), 4)


def casimir_L_assembled(p, c: Fraction | None = None):
    """H_*(Omega) p + sum_i Gamma_i p - c p."""
    c = casimir_constant(p.vs.n) if c is None else c
    out = casimir_H(p) - p * exact(c)
    for i in range(p.vs.k):
        out = out + gamma(p, i)
    return out


def sum_l_squared(p, i):
    out = CliffordPolynomial.zero(p.vs, p.m)
    for a, b in combinations(range(p.vs.n), 2):
        out = out + angular_momentum(angular_momentum(p, i, a, b), i, a, b)
    return out


def gamma_quadratic(p, i):
    """Gamma (n - 2 - Gamma) p."""
    g = gamma(p, i)
    return g * (p.vs.n - 2) - gamma(g, i)


# ----------------------------------------------------------------- predicates

def is_harmonic(p) -> bool:
    for i in range(p.vs.k):
        if laplacian(p, i):
            return False
    for i, j in combinations(range(p.vs.k), 2):
        if mixed_dirac_inner(p, i, j):
            return False
    return True


def is_monogenic(p) -> bool:
    return not any(dirac(p, i) for i in range(p.vs.k))


def is_simplicial(p) -> bool:
    return not any(mixed_euler(p, i, j) for i, j in combinations(range(p.vs.k), 2))


def eigenvalue(image: CliffordPolynomial, p: CliffordPolynomial):
    """Exact scalar mu with image == mu p, or None."""
    if not p.terms:
        raise ValueError("zero polynomial has no eigenvalue")
    e, c = next(iter(p.terms.items()))
    d = image.terms.get(e, Multivector.zero(p.m))
    bits, v = next(iter(c.items()))
    mu = d[bits] / v
    if image != p * mu:
        return None
    if mu.y == 0:
        return Fraction(int(mu.x.numerator), int(mu.x.denominator))
    return mu


# ------------------------------------------------------- idempotents, weights

def T(m: int, j: int, prime: bool = False) -> Multivector:
    """T_j = (e_{2j-1} - i e_{2j}) / 2; the primed version flips the sign of i."""
    if not 1 <= j <= m // 2:
        raise ValueError(f"T_{j} needs 2j <= m")
    s = 1 if prime else -1
    return Multivector(m, {1 << (2 * j - 2): Fraction(1, 2), 1 << (2 * j - 1): _gauss(0, Fraction(s, 2))})


def I(m: int, j: int, prime: bool = False) -> Multivector:
    """Monogenic idempotent T_j bar(T_j) = (1 -+ i e_{2j-1} e_{2j}) / 2."""
    t = T(m, j, prime)
    return t * t.bar()


def I_paired(m: int, j: int) -> Multivector:
    """(1 + i e_j e_{j+m}) / 2 in Cl_{2m}."""
    if not 1 <= j <= m:
        raise ValueError("index outside 1..m")
    return Multivector(2 * m, {0: Fraction(1, 2), blade_bits(j, j + m): _gauss(0, Fraction(1, 2))})


def _gauss(re, im):
    return exact(re) + exact(im) * exact(1j)


def idempotents(m: int) -> dict:
    r = m // 2
    return {"T": [T(m, j) for j in range(1, r + 1)], "I": [I(m, j) for j in range(1, r + 1)]}


@dataclass(frozen=True)
class Weight:
    """Weight stored as doubled integers so half-integers stay exact."""

    twice: tuple

    @classmethod
    def of(cls, *entries) -> Weight:
        return cls(tuple(int(Fraction(x) * 2) for x in entries))

    @property
    def entries(self) -> tuple:
        return tuple(Fraction(t, 2) for t in self.twice)

    @property
    def kind(self) -> str:
        if all(t % 2 == 0 for t in self.twice):
            return "harmonic"
        if all(t % 2 for t in self.twice):
            return "monogenic"
        raise ValueError("weight entries must be all integers or all half-integers")

    def is_dominant(self, n: int) -> bool:
        w = self.twice
        k = len(w)
        if k > n // 2 or k == 0:
            return False
        if any(w[j] < w[j + 1] for j in range(k - 2)):
            return False
        if k >= 2 and w[k - 2] < abs(w[k - 1]):
            return False
        return w[-1] >= 0 or (n % 2 == 0 and k == n // 2)

    def integer_part(self) -> tuple:
        """Entries with the +-1/2 shift of monogenic weights removed."""
        out = []
        for t in self.twice:
            if t % 2 == 0:
                out.append(t // 2)
            else:
                out.append((t - 1) // 2 if t > 0 else (t + 1) // 2)
        return tuple(out)


def _dot_poly(vs, m, i, t: Multivector):
    """Bilinear x_i . t for a vector t (no conjugation)."""
    out = CliffordPolynomial.zero(vs, m)
    for a in range(vs.n):
        c = t[1 << a]
        if c != ZERO:
            out = out + CliffordPolynomial.coordinate(vs, m, i, a, c)
    return out


def _det(mat):
    """Leibniz determinant of a small matrix of polynomials."""
    k = len(mat)
    if k == 1:
        return mat[0][0]
    out = None
    for c in range(k):
        minor = [row[:c] + row[c + 1:] for row in mat[1:]]
        term = mat[0][c] * _det(minor)
        if c % 2:
            term = -term
        out = term if out is None else out + term
    return out


def simplicial_form(vs, m, j: int, last_prime: bool = False):
    """<x_1 ^ ... ^ x_j, T_1 ^ ... ^ T_j> as det[x_r . T_c]."""
    Ts = [T(m, c + 1, prime=(last_prime and c == j - 1)) for c in range(j)]
    mat = [[_dot_poly(vs, m, r, Ts[c]) for c in range(j)] for r in range(j)]
    return _det(mat)


def highest_weight_vector(w: Weight, n: int, m: int | None = None) -> CliffordPolynomial:
    """Simplicial highest-weight polynomial of weight w in len(w) variables of dimension n."""
    m = n if m is None else m
    if not w.is_dominant(n):
        raise ValueError(f"weight {w.entries} is not dominant for n={n}")
    kind = w.kind
    k = len(w.twice)
    if kind == "monogenic" and k != n // 2:
        raise ValueError("monogenic weights need n//2 entries")
    lam = w.integer_part()
    neg = lam[-1] < 0 or w.twice[-1] < 0
    lam_abs = lam[:-1] + (abs(lam[-1]),)
    vs = VarSystem(k, n)
    p = CliffordPolynomial.constant(vs, m, 1)
    for j in range(1, k + 1):
        nxt = lam_abs[j] if j < k else 0
        e = lam_abs[j - 1] - nxt
        if e < 0:
            raise ValueError("weight is not dominant")
        if e:
            p = p * simplicial_form(vs, m, j, last_prime=neg and j == k) ** e
    if kind == "monogenic":
        for j in range(1, k + 1):
            p = p * I(m, j, prime=neg and j == k)
    return p


def casimir_H_eigenvalue(w: Weight, n: int) -> int:
    lam = w.integer_part()
    return -sum(l * (l + n - 2 * j) for j, l in enumerate(lam, start=1))


def casimir_L_eigenvalue(w: Weight, n: int) -> Fraction:
    """Uses mu_j = m_j - 1/2, which is the floor for negative entries too."""
    mu = [(t - 1) // 2 for t in w.twice]
    return -sum(u * (u + n - 2 * j + 1) for j, u in enumerate(mu, start=1)) - Fraction(n * (n - 1), 8)


def dominant_weights(n: int, total: int, kind: str = "harmonic"):
    """Dominant weights of length 1..n//2 whose integer parts have |sum| <= total.

    Monogenic weights always have n//2 entries.
    """
    r = n // 2
    lengths = [r] if kind == "monogenic" else range(1, r + 1)
    out = []
    for k in lengths:
        for lam in _partitions_len(k, total):
            twice = [2 * x for x in lam] if kind == "harmonic" else [2 * x + 1 for x in lam]
            cands = [tuple(twice)]
            if n % 2 == 0 and k == r and twice[-1] > 0:
                cands.append(tuple(twice[:-1]) + (-twice[-1],))
            out.extend(Weight(c) for c in cands if Weight(c).is_dominant(n))
    return out


def _partitions_len(k, total):
    """Non-increasing non-negative k-tuples with sum <= total."""
    def rec(prefix, left, cap):
        if len(prefix) == k:
            yield tuple(prefix)
            return
        for v in range(min(cap, left), -1, -1):
            yield from rec(prefix + [v], left - v, v)
    yield from rec([], total, total)


def random_polynomial(vs, m, rng, degree: int = 3, n_terms: int = 4, density: float = 0.3):
    """Sparse random exact polynomial with small Gaussian-integer coefficients."""
    from .clifford import random_multivector

    t = {}
    for _ in range(n_terms):
        d = int(rng.integers(0, degree + 1))
        e = [0] * vs.size
        for _ in range(d):
            e[int(rng.integers(vs.size))] += 1
        t[tuple(e)] = random_multivector(m, rng, exact_mode=True, density=density, bound=3)
    return CliffordPolynomial(vs, m, t)


__all__ = [
    "VarSystem",
    "CliffordPolynomial",
    "Weight",
    "dirac",
    "laplacian",
    "angular_momentum",
    "gamma",
    "wedge_dirac",
    "euler",
    "mixed_euler",
    "mixed_dirac_inner",
    "mixed_laplacian",
    "overdot_form",
    "inner_variables",
    "regular_action",
    "left_action",
    "conjugation_action",
    "casimir_H",
    "casimir_L",
    "casimir_L_assembled",
    "casimir_constant",
    "sum_l_squared",
    "gamma_quadratic",
    "is_harmonic",
    "is_monogenic",
    "is_simplicial",
    "eigenvalue",
    "T",
    "I",
    "I_paired",
    "idempotents",
    "highest_weight_vector",
    "casimir_H_eigenvalue",
    "casimir_L_eigenvalue",
    "dominant_weights",
    "random_polynomial",
]
