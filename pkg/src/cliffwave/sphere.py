"""Spherical monogenics on S^m in R^{m+1}, quadrature and spectral transforms.

Coordinates are x_0, ..., x_m and x_c pairs with the generator of bit c, so
functions take values in Cl_{m+1}. Inner monogenics V_alpha come from the
Cauchy-Kovalevskaya extension in x_0; outer monogenics W_alpha are derivatives
of the Cauchy kernel bar(x) / |x|^{m+1}.

Expansions are right-linear: f = sum_j B_j fhat_j with fhat_j in Cl_{m+1}
and fhat_j = int bar(B_j) f.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np
from scipy.special import roots_jacobi

from .clifford import (
    Multivector,
    bar_array,
    left_rep,
    mul_array,
)
from .poly import CliffordPolynomial, VarSystem
from .spin import rotation_matrix

PARTS = ("V", "W")


# -------------------------------------------------------------- measure, rule

def sphere_area(m: int) -> float:
    """Area A_m of the unit sphere S^m in R^{m+1}."""
    return 2 * math.pi ** ((m + 1) / 2) / math.gamma((m + 1) / 2)


def sphere_moment(beta) -> Fraction:
    """int_{S^m} x^beta dsigma / A_m, exact (len(beta) = m + 1)."""
    if any(b % 2 for b in beta):
        return Fraction(0)
    n = len(beta)
    num = 1
    for b in beta:
        num *= _double_factorial(b - 1)
    den = 1
    for j in range(sum(beta) // 2):
        den *= n + 2 * j
    return Fraction(num, den)


def _double_factorial(k: int) -> int:
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


@dataclass
class QuadratureRule:
    m: int
    nodes: np.ndarray
    weights: np.ndarray
    degree: int

    @property
    def size(self) -> int:
        return len(self.weights)

    def integrate(self, values: np.ndarray) -> np.ndarray:
        return np.tensordot(self.weights, values, axes=(0, 0))


def build_quadrature(m: int, degree: int, max_nodes: int = 2_000_000) -> QuadratureRule:
    """Product rule exact for polynomials of total degree <= ``degree``.

    Polar variables t_j = cos(theta_j) use Gauss-Jacobi nodes for the weight
    (1 - t^2)^((m - j - 1)/2); the azimuth uses a uniform trapezoid.
    """
    if m < 1:
        raise ValueError("need m >= 1")
    if degree < 0:
        raise ValueError("degree must be non-negative")
    q = degree // 2 + 1
    n_az = degree + 1
    count = q ** (m - 1) * n_az
    if count > max_nodes:
        raise MemoryError(f"quadrature with {count} nodes exceeds the cap of {max_nodes}")
    phi = 2 * np.pi * np.arange(n_az) / n_az
    nodes = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    weights = np.full(n_az, 2 * np.pi / n_az)
    # build from the azimuthal circle outwards: S^1 -> S^2 -> ... -> S^m
    for j in range(m - 1, 0, -1):
        a = (m - j - 1) / 2
        t, w = roots_jacobi(q, a, a)
        s = np.sqrt(1 - t ** 2)
        nodes = np.concatenate(
            [np.repeat(t, len(nodes))[:, None], np.kron(s[:, None], nodes)], axis=1
        )
        weights = np.kron(w, weights)
    return QuadratureRule(m, nodes, weights, degree)


# ------------------------------------------------------------------ raw bases

def multi_indices(m: int, k: int) -> list[tuple]:
    """alpha in N^m with |alpha| = k, lexicographically descending."""
    out = []
    for combo in combinations_with_replacement(range(m), k):
        a = [0] * m
        for c in combo:
            a[c] += 1
        out.append(tuple(a))
    return sorted(set(out), reverse=True)


def _vs(m: int) -> VarSystem:
    return VarSystem(1, m + 1)


def ck_extension(alpha) -> CliffordPolynomial:
    """V_alpha = sum_j (-x_0)^j / j! [(bar(e_0) d_x)^j x^alpha / alpha!]."""
    m = len(alpha)
    vs, N = _vs(m), m + 1
    e = (0,) + tuple(alpha)
    den = 1
    for a in alpha:
        den *= math.factorial(a)
    p = CliffordPolynomial(vs, N, {e: Fraction(1, den)})
    ebar0 = Multivector(N, {1: -1})
    out = CliffordPolynomial.zero(vs, N)
    term = p
    j = 0
    while term:
        coeff = Fraction((-1) ** j, math.factorial(j))
        piece = term
        for _ in range(j):
            piece = piece.mul_coord(0)
        out = out + piece * coeff
        nxt = CliffordPolynomial.zero(vs, N)
        for c in range(1, N):
            nxt = nxt + Multivector(N, {1 << c: 1}) * term.diff(c)
        term = ebar0 * nxt
        j += 1
    return out


@dataclass
class OuterFunction:
    """W = numerator(x) / |x|^power, up to the constant 1/A_m."""

    numerator: CliffordPolynomial
    power: int
    alpha: tuple

    def restriction(self) -> CliffordPolynomial:
        return self.numerator

    def evaluate(self, points) -> np.ndarray:
        pts = np.atleast_2d(points)
        r = np.linalg.norm(pts, axis=1)
        return self.numerator.evaluate(pts) / (r ** self.power)[:, None]


def outer_basis(alpha_full) -> OuterFunction:
    """(-1)^{|alpha|} d^alpha (bar(x) / |x|^{m+1}) for alpha over x_0..x_m."""
    N = len(alpha_full)
    m = N - 1
    vs = _vs(m)
    P = CliffordPolynomial.zero(vs, N)
    for c in range(N):
        P = P + CliffordPolynomial.coordinate(vs, N, 0, c, Multivector(N, {1 << c: -1}))
    s = m + 1
    r2 = CliffordPolynomial.zero(vs, N)
    for c in range(N):
        r2 = r2 + CliffordPolynomial.coordinate(vs, N, 0, c) ** 2
    for c, a in enumerate(alpha_full):
        for _ in range(a):
            P = r2 * P.diff(c) - P.mul_coord(c) * s
            s += 2
    if sum(alpha_full) % 2:
        P = -P
    return OuterFunction(P, s, tuple(alpha_full))


# --------------------------------------------------------------- orthonormal

@dataclass
class BasisElement:
    k: int
    alpha: tuple
    part: str
    exps: np.ndarray
    coeffs: np.ndarray

    @property
    def key(self) -> str:
        return f"{self.k}/{','.join(map(str, self.alpha))}/{self.part}"

    def evaluate(self, points) -> np.ndarray:
        pts = np.atleast_2d(points)
        mono = np.prod(pts[:, None, :] ** self.exps[None, :, :], axis=2)
        return mono @ self.coeffs

    def polynomial(self) -> CliffordPolynomial:
        N = self.coeffs.shape[1].bit_length() - 1
        return CliffordPolynomial(
            _vs(N - 1), N, {tuple(int(x) for x in e): Multivector.from_array(N, c) for e, c in zip(self.exps, self.coeffs)}
        )


@dataclass
class MonogenicBasis:
    m: int
    K: int
    elements: list
    dropped: list = field(default_factory=list)
    transforms: dict = field(default_factory=dict)  # (k, part) -> (alphas, kept, T)

    @property
    def N(self) -> int:
        return self.m + 1

    @property
    def keys(self) -> list[str]:
        return [b.key for b in self.elements]

    def index(self, k: int, part: str | None = None) -> list[int]:
        return [i for i, b in enumerate(self.elements) if b.k == k and (part is None or b.part == part)]

    def degrees(self) -> np.ndarray:
        return np.array([b.k for b in self.elements])

    def parts(self) -> np.ndarray:
        return np.array([b.part for b in self.elements])

    def evaluate(self, points) -> np.ndarray:
        """Array (n_elements, P, 2^N)."""
        return np.stack([b.evaluate(points) for b in self.elements])

    def dimension(self, k: int, part: str) -> int:
        return len(self.index(k, part))

    def to_json(self) -> dict:
        """Metadata, element polynomials and the orthonormalization matrices."""
        N = self.N

        def mv(c):
            return Multivector.from_array(N, c).to_json()

        blocks = []
        for (k, part), (alphas, kept, T) in sorted(self.transforms.items()):
            blocks.append(
                {
                    "k": k,
                    "part": part,
                    "raw": [list(a) for a in alphas],
                    "kept": list(kept),
                    "T": [[mv(T[i, j]) for j in range(T.shape[1])] for i in range(T.shape[0])],
                }
            )
        return {
            "m": self.m,
            "K": self.K,
            "dimensions": [
                {"k": k, "V": self.dimension(k, "V"), "W": self.dimension(k, "W")} for k in range(self.K + 1)
            ],
            "elements": [
                {"key": b.key, "exps": b.exps.tolist(), "coeffs": [mv(c) for c in b.coeffs]} for b in self.elements
            ],
            "dropped": [f"{k}/{','.join(map(str, a))}/{part}" for k, a, part in self.dropped],
            "orthonormalization": blocks,
        }


def _poly_arrays(polys):
    """Common exponent table for several one-variable polynomials."""
    exps = sorted({e for p in polys for e in p.terms})
    pos = {e: i for i, e in enumerate(exps)}
    N = polys[0].m
    C = np.zeros((len(polys), len(exps), 1 << N), dtype=complex)
    for j, p in enumerate(polys):
        for e, c in p.terms.items():
            C[j, pos[e]] = c.to_array()
    return np.array(exps, dtype=int), C


def _moment_matrix(exps: np.ndarray, area: float) -> np.ndarray:
    n = len(exps)
    M = np.zeros((n, n))
    cache = {}
    for i in range(n):
        for j in range(i, n):
            beta = tuple(exps[i] + exps[j])
            if beta not in cache:
                cache[beta] = float(sphere_moment(beta)) * area
            M[i, j] = M[j, i] = cache[beta]
    return M


def clifford_gram(polys, m: int) -> np.ndarray:
    """G[i, j] = int_{S^m} bar(p_i) p_j as dense Cl_{m+1} arrays."""
    N = m + 1
    exps, C = _poly_arrays(polys)
    mom = _moment_matrix(exps, sphere_area(m))
    Cb = bar_array(C, N)
    # X[i, j, a, b] = sum_{t,u} bar(c_i)[t,a] mom[t,u] c_j[u,b]
    X = np.einsum("ita,tu,jub->ijab", Cb, mom, C)
    from .clifford import product_tensor

    return np.einsum("ijab,abc->ijc", X, product_tensor(N))


def _hsqrt(S):
    w, U = np.linalg.eigh(S)
    return (U * np.sqrt(w)) @ U.conj().T, w


def block_orthonormalize(G: np.ndarray, N: int, rtol: float = 1e-10):
    """Right-module Gram-Schmidt: T with bar(T)^T G T = I, T block upper triangular.

    Works in the left-regular representation, where every block stays inside
    the image of the algebra. Members with singular Schur blocks are dropped.
    Returns (kept indices, T as dense Cl arrays of shape (n, n_kept, 2^N)).
    """
    n = G.shape[0]
    R = left_rep(G, N)  # (n, n, d, d)
    d = R.shape[-1]
    scale = max(np.abs(R[i, i]).max() for i in range(n)) if n else 1.0
    Lb: dict = {}
    kept: list[int] = []
    for j in range(n):
        S = R[j, j] - sum((Lb[j, l] @ Lb[j, l].conj().T for l in kept), np.zeros((d, d), complex))
        S = (S + S.conj().T) / 2
        root, w = _hsqrt(S)
        if w.min() <= rtol * scale:
            continue
        inv_h = np.linalg.inv(root).conj().T
        for i in range(j, n):
            if i == j:
                Lb[j, j] = root
            else:
                acc = R[i, j] - sum((Lb[i, l] @ Lb[j, l].conj().T for l in kept), np.zeros((d, d), complex))
                Lb[i, j] = acc @ inv_h
        kept.append(j)
    r = len(kept)
    Lfull = np.zeros((r * d, r * d), complex)
    for a, i in enumerate(kept):
        for b, j in enumerate(kept):
            if b <= a:
                Lfull[a * d:(a + 1) * d, b * d:(b + 1) * d] = Lb[i, j]
    Tfull = np.linalg.inv(Lfull).conj().T
    T = np.zeros((n, r, d), complex)
    for a, i in enumerate(kept):
        for b in range(r):
            T[i, b] = Tfull[a * d:(a + 1) * d, b * d]
    return kept, T


def _combine(polys, T, N):
    """Polynomials sum_i p_i T[i, j] as (exps, coeff arrays)."""
    exps, C = _poly_arrays(polys)
    # B[j, t, c] = sum_i C[i, t, a] T[i, j, b] M[a, b, c]
    from .clifford import product_tensor

    B = np.einsum("ita,ijb,abc->jtc", C, T, product_tensor(N))
    return exps, B


def raw_basis(m: int, k: int, part: str):
    """Raw polynomials (restrictions to S^m) and their indices."""
    alphas = multi_indices(m, k)
    if part == "V":
        return alphas, [ck_extension(a) for a in alphas]
    return alphas, [outer_basis((0,) + a).restriction() for a in alphas]


def build_basis(m: int, K: int) -> MonogenicBasis:
    if K < 0:
        raise ValueError("K must be non-negative")
    if m < 2:
        raise ValueError("need m >= 2")
    N = m + 1
    elements, dropped, transforms = [], [], {}
    for k in range(K + 1):
        for part in PARTS:
            alphas, polys = raw_basis(m, k, part)
            G = clifford_gram(polys, m)
            kept, T = block_orthonormalize(G, N)
            transforms[k, part] = (alphas, kept, T)
            dropped += [(k, alphas[i], part) for i in range(len(alphas)) if i not in kept]
            exps, B = _combine(polys, T, N)
            for b, i in enumerate(kept):
                nz = np.abs(B[b]).max(axis=1) > 0
                elements.append(BasisElement(k, alphas[i], part, exps[nz], B[b][nz]))
    return MonogenicBasis(m, K, elements, dropped, transforms)


# ------------------------------------------------------------ signals, coeffs

@dataclass
class SphereSignal:
    m: int
    nodes: np.ndarray
    values: np.ndarray  # (P, 2^{m+1})

    def to_json(self) -> dict:
        N = self.m + 1
        return {
            "m": self.m,
            "nodes": self.nodes.tolist(),
            "values": [Multivector.from_array(N, v).to_json() for v in self.values],
        }

    @classmethod
    def from_json(cls, data: dict) -> SphereSignal:
        m = int(data["m"])
        vals = np.array([Multivector.from_json(v).to_array() if Multivector.from_json(v).m == m + 1 else _pad(v, m + 1) for v in data["values"]])
        return cls(m, np.asarray(data["nodes"], dtype=float), vals.reshape(len(data["nodes"]), 1 << (m + 1)))


def _pad(v, N):
    mv = Multivector.from_json(v)
    if mv.m > N:
        raise ValueError("value algebra larger than Cl_{m+1}")
    return Multivector(N, mv.coeffs).to_array()


@dataclass
class SpectralCoefficients:
    m: int
    keys: list
    values: np.ndarray  # (n_elements, 2^{m+1})

    def to_json(self) -> dict:
        N = self.m + 1
        return {
            "m": self.m,
            "coeffs": {k: Multivector.from_array(N, v).to_json() for k, v in zip(self.keys, self.values)},
        }

    @classmethod
    def from_json(cls, data: dict) -> SpectralCoefficients:
        m = int(data["m"])
        keys = list(data["coeffs"])
        vals = np.array([_pad(data["coeffs"][k], m + 1) for k in keys]).reshape(len(keys), 1 << (m + 1))
        return cls(m, keys, vals)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2)))

    def aligned(self, basis: MonogenicBasis) -> np.ndarray:
        """Values reordered to the basis order; unknown keys are rejected."""
        pos = {k: i for i, k in enumerate(basis.keys)}
        out = np.zeros((len(basis.elements), 1 << basis.N), complex)
        for k, v in zip(self.keys, self.values):
            if k not in pos:
                raise ValueError(f"coefficient {k} outside the basis band")
            out[pos[k]] = v
        return out


class SphereTransform:
    """Basis evaluations cached on a quadrature rule."""

    def __init__(self, basis: MonogenicBasis, rule: QuadratureRule | None = None):
        self.basis = basis
        need = 2 * basis.K + 2
        if rule is None:
            rule = build_quadrature(basis.m, need)
        if rule.degree < need:
            raise ValueError(f"quadrature exactness {rule.degree} < {need} required for K={basis.K}")
        self.rule = rule
        self.values = basis.evaluate(rule.nodes)
        self.N = basis.N

    def analyze(self, f) -> SpectralCoefficients:
        F = f.values if isinstance(f, SphereSignal) else np.asarray(f)
        Bb = bar_array(self.values, self.N)
        c = mul_array(Bb, F[None, :, :], self.N)
        vals = np.einsum("p,jpc->jc", self.rule.weights, c)
        return SpectralCoefficients(self.basis.m, self.basis.keys, vals)

    def synthesize(self, coeffs, points=None) -> SphereSignal:
        C = coeffs.aligned(self.basis) if isinstance(coeffs, SpectralCoefficients) else np.asarray(coeffs)
        if points is None:
            pts, Bv = self.rule.nodes, self.values
        else:
            pts = np.atleast_2d(points)
            Bv = self.basis.evaluate(pts)
        vals = mul_array(Bv, C[:, None, :], self.N).sum(axis=0)
        return SphereSignal(self.basis.m, pts, vals)

    def norm(self, f) -> float:
        F = f.values if isinstance(f, SphereSignal) else f
        return float(np.sqrt(self.rule.weights @ np.sum(np.abs(F) ** 2, axis=1)))

    def random_coefficients(self, rng) -> SpectralCoefficients:
        n = len(self.basis.elements)
        vals = rng.normal(size=(n, 1 << self.N)) + 1j * rng.normal(size=(n, 1 << self.N))
        return SpectralCoefficients(self.basis.m, self.basis.keys, vals)


def analyze(f, basis, rule=None):
    return SphereTransform(basis, rule).analyze(f)


def synthesize(c, basis, rule=None, points=None):
    return SphereTransform(basis, rule).synthesize(c, points)


# ------------------------------------------------------------ group actions

def rotate_signal(s, f: SphereSignal, mode: str, transform: SphereTransform) -> SphereSignal:
    """H(s) f (x) = s f(bar(s) x s) bar(s); L(s) drops the right factor."""
    if mode not in ("H", "L"):
        raise ValueError("mode must be 'H' or 'L'")
    N = transform.N
    smv = s.mv if hasattr(s, "mv") else s
    if smv.m != N:
        raise ValueError(f"spin element must live in Cl_{N}")
    R = rotation_matrix(s)
    c = transform.analyze(f)
    pts = f.nodes @ R  # rows: R^T x = bar(s) x s
    g = transform.synthesize(c, pts).values
    sa = smv.to_array()
    out = mul_array(sa[None, :], g, N)
    if mode == "H":
        out = mul_array(out, bar_array(sa, N)[None, :], N)
    return SphereSignal(f.m, f.nodes, out)


# ----------------------------------------------------------- zonal kernels

def gegenbauer(n: int, lam: float, t):
    """C_n^lam(t) by the three-term recurrence."""
    t = np.asarray(t, dtype=float)
    if n < 0:
        return np.zeros_like(t)
    c0 = np.ones_like(t)
    if n == 0:
        return c0
    c1 = 2 * lam * t
    for k in range(1, n):
        c0, c1 = c1, (2 * (k + lam) * t * c1 - (k + 2 * lam - 1) * c0) / (k + 1)
    return c1


def zonal_kernel(k: int, sign: str, omega, xi) -> np.ndarray:
    """C^-_{m+1,k}(omega, xi) from the Gegenbauer display; C^+ by C^- bar(xi) = C^+ bar(omega)."""
    omega, xi = np.asarray(omega, float), np.asarray(xi, float)
    N = len(omega)
    m = N - 1
    if m < 2:
        raise ValueError("zonal kernels need m >= 2")
    t = float(omega @ xi)
    lam = (m - 1) / 2
    scal = (k + 1) * gegenbauer(k + 1, lam, t)
    g = (1 - m) * gegenbauer(k, (m + 1) / 2, t)
    wv = np.zeros(1 << N, complex)
    xv = np.zeros(1 << N, complex)
    for c in range(1, N):
        wv[1 << c] = omega[c]
        xv[1 << c] = xi[c]
    e0 = np.zeros(1 << N, complex)
    e0[1] = 1
    wedge = (mul_array(wv, xv, N) - mul_array(xv, wv, N)) / 2
    biv = mul_array(xi[0] * wv - omega[0] * xv, e0, N) + wedge
    cm = g * biv
    cm[0] += scal
    cm = cm / (m - 1)
    if sign == "-":
        return cm
    if sign != "+":
        raise ValueError("sign must be '+' or '-'")
    xb = bar_array(_vec(xi), N)
    wb = bar_array(_vec(omega), N)
    # C^+ = C^- bar(xi) bar(omega)^{-1}, and bar(omega)^{-1} = -bar(omega) = omega
    return mul_array(mul_array(cm, xb, N), -wb, N)


def _vec(x):
    N = len(x)
    v = np.zeros(1 << N, complex)
    for c in range(N):
        v[1 << c] = x[c]
    return v


def reproducing_kernel(basis: MonogenicBasis, k: int, part: str, xi, omega) -> np.ndarray:
    """sum_j B_j(xi) bar(B_j(omega)) over the degree-k elements of one part."""
    N = basis.N
    idx = basis.index(k, part)
    bx = np.stack([basis.elements[i].evaluate(xi)[0] for i in idx])
    bo = np.stack([basis.elements[i].evaluate(omega)[0] for i in idx])
    return mul_array(bx, bar_array(bo, N), N).sum(axis=0)


__all__ = [
    "sphere_area",
    "sphere_moment",
    "QuadratureRule",
    "build_quadrature",
    "multi_indices",
    "ck_extension",
    "OuterFunction",
    "outer_basis",
    "BasisElement",
    "MonogenicBasis",
    "clifford_gram",
    "block_orthonormalize",
    "raw_basis",
    "build_basis",
    "SphereSignal",
    "SpectralCoefficients",
    "SphereTransform",
    "analyze",
    "synthesize",
    "rotate_signal",
    "gegenbauer",
    "zonal_kernel",
    "reproducing_kernel",
]
