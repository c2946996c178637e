"""Eigenfunctions, Dirac operator and diffusive wavelets on Spin(m).

A pair (alpha, beta) of simplicial polynomials in frame variables u_1..u_k
defines f(s) = H(s) alpha(a) + L(s) beta(a), evaluated on the standard frame
a = (e_1, ..., e_m): the variable u_j is replaced by bar(s) e_j s.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .clifford import Multivector, bar_array, mul_array
from .poly import (
    CliffordPolynomial,
    Weight,
    angular_momentum,
    casimir_H_eigenvalue,
    casimir_L_eigenvalue,
    conjugation_action,
    dominant_weights,
    eigenvalue,
    gamma,
    highest_weight_vector,
    is_harmonic,
    is_monogenic,
    is_simplicial,
    left_action,
    mixed_laplacian,
)
from .spin import SpinElement, exp_bivector, rotation_matrix
from .wavelets import ScaleGrid, WaveletFamily


def frame_point(s, k: int) -> np.ndarray:
    """Flattened coordinates of bar(s) e_j s for j < k."""
    R = rotation_matrix(s)
    return R[:k].reshape(-1)


def _value(p: CliffordPolynomial | None, s, m: int) -> np.ndarray:
    if p is None:
        return np.zeros(1 << m, complex)
    return p.evaluate(frame_point(s, p.vs.k)[None])[0]


@dataclass
class SpinEigenfunction:
    """f(s) = H(s) alpha + L(s) beta on the standard frame."""

    m: int
    alpha: CliffordPolynomial | None = None
    beta: CliffordPolynomial | None = None

    def __post_init__(self):
        if self.alpha is not None:
            if not (is_simplicial(self.alpha) and is_harmonic(self.alpha)):
                raise ValueError("alpha must be a simplicial harmonic")
        if self.beta is not None:
            if not (is_simplicial(self.beta) and is_monogenic(self.beta)):
                raise ValueError("beta must be a simplicial monogenic")

    def evaluate(self, s) -> np.ndarray:
        sa = (s.mv if isinstance(s, SpinElement) else s).to_array()
        m = self.m
        a = _value(self.alpha, s, m)
        b = _value(self.beta, s, m)
        out = mul_array(mul_array(sa, a, m), bar_array(sa, m), m)
        return out + mul_array(sa, b, m)


# ------------------------------------------------------------- operators

def delta_spin_H(p):
    """Casimir of the conjugation action: sum_{a<b} H_*(e_ab/2)^2."""
    out = CliffordPolynomial.zero(p.vs, p.m)
    for a, b in combinations(range(p.vs.n), 2):
        out = out + conjugation_action(conjugation_action(p, a, b), a, b)
    return out


def delta_spin_L(p):
    out = CliffordPolynomial.zero(p.vs, p.m)
    for a, b in combinations(range(p.vs.n), 2):
        out = out + left_action(left_action(p, a, b), a, b)
    return out


def delta_spin_split(p):
    """sum_j Delta_{u_j} + sum_{k<l} Delta_{u_k u_l} with Delta_u = sum L_ab^2."""
    out = CliffordPolynomial.zero(p.vs, p.m)
    for i in range(p.vs.k):
        for a, b in combinations(range(p.vs.n), 2):
            out = out + angular_momentum(angular_momentum(p, i, a, b), i, a, b)
    for i, j in combinations(range(p.vs.k), 2):
        out = out + mixed_laplacian(p, i, j)
    return out


def split_degree_formula(degrees, m: int) -> int:
    """sum_j k_j (m - 2 - k_j) in terms of the per-variable degrees."""
    return sum(k * (m - 2 - k) for k in degrees)


def spin_gamma(p):
    """Gamma_S = sum_{a<b} e_ab (regular action of e_ab) = 2 sum_i Gamma_i."""
    out = CliffordPolynomial.zero(p.vs, p.m)
    for i in range(p.vs.k):
        out = out + gamma(p, i) * 2
    return out


def spin_dirac_at_identity(alpha, beta):
    """sum_{a<b} e_ab d/dt f(exp(t e_ab)) at t = 0, as polynomials in the frame."""
    p = alpha if alpha is not None else beta
    out = CliffordPolynomial.zero(p.vs, p.m)
    for a, b in combinations(range(p.vs.n), 2):
        e = Multivector(p.m, {(1 << a) | (1 << b): 1})
        if alpha is not None:
            out = out + e * conjugation_action(alpha, a, b) * 2
        if beta is not None:
            out = out + e * left_action(beta, a, b) * 2
    return out


def spin_dirac_formula(alpha, beta):
    """Gamma_S alpha + (Gamma_S - binom(m, 2)) beta."""
    p = alpha if alpha is not None else beta
    out = CliffordPolynomial.zero(p.vs, p.m)
    if alpha is not None:
        out = out + spin_gamma(alpha)
    if beta is not None:
        out = out + spin_gamma(beta) - beta * comb(p.vs.n, 2)
    return out


# ----------------------------------------------------- numerical oracles

def _step(s: SpinElement, a: int, b: int, t: float) -> SpinElement:
    X = Multivector(s.m, {(1 << a) | (1 << b): 1.0})
    return exp_bivector(X, t) * s


def spin_derivative(F, s: SpinElement, a: int, b: int, h: float = 1e-4) -> np.ndarray:
    """Central difference of t -> F(exp(t e_ab) s)."""
    return (F(_step(s, a, b, h)) - F(_step(s, a, b, -h))) / (2 * h)


def numeric_dirac(F, s: SpinElement, h: float = 1e-4) -> np.ndarray:
    m = s.m
    out = np.zeros(1 << m, complex)
    for a, b in combinations(range(m), 2):
        e = np.zeros(1 << m)
        e[(1 << a) | (1 << b)] = 1
        out += mul_array(e, spin_derivative(F, s, a, b, h), m)
    return out


def numeric_laplacian(F, s: SpinElement, h: float = 1e-3) -> np.ndarray:
    """sum_{a<b} second central difference along exp(t e_ab / 2) s (bi-invariant)."""
    f0 = F(s)
    out = np.zeros_like(f0)
    for a, b in combinations(range(s.m), 2):
        out += (F(_step(s, a, b, h / 2)) - 2 * f0 + F(_step(s, a, b, -h / 2))) / h ** 2
    return out


# ---------------------------------------------------------- enumeration

@dataclass
class SpinMode:
    kind: str  # "H" or "L"
    weight: Weight
    poly: CliffordPolynomial
    eigenvalue: object

    @property
    def degrees(self) -> tuple:
        return tuple(self.poly.degree(i) for i in range(self.poly.vs.k))

    @property
    def total(self) -> int:
        return sum(self.degrees)

    def function(self, m: int) -> SpinEigenfunction:
        if self.kind == "H":
            return SpinEigenfunction(m, alpha=self.poly)
        return SpinEigenfunction(m, beta=self.poly)

    @property
    def label(self) -> str:
        return f"{self.kind}:" + ",".join(str(x) for x in self.weight.entries)


def enumerate_spin_modes(m: int, bound: int = 4, verify: bool = True) -> list[SpinMode]:
    """Highest-weight eigenfunctions with total degree <= bound.

    H-modes come from simplicial harmonics, L-modes from simplicial
    monogenics. With ``verify`` every eigenvalue is confirmed symbolically.
    """
    if bound > 6:
        raise ValueError("weight bound above 6 is not supported")
    modes = []
    for kind, wkind in (("H", "harmonic"), ("L", "monogenic")):
        for w in dominant_weights(m, bound, wkind):
            p = highest_weight_vector(w, m)
            if p.degree() > bound:
                continue
            if kind == "H":
                lam = casimir_H_eigenvalue(w, m)
                if verify and eigenvalue(delta_spin_H(p), p) != lam:
                    raise AssertionError(f"H eigenvalue mismatch for {w}")
            else:
                lam = casimir_L_eigenvalue(w, m)
                if verify and eigenvalue(delta_spin_L(p), p) != lam:
                    raise AssertionError(f"L eigenvalue mismatch for {w}")
            modes.append(SpinMode(kind, w, p, lam))
    return modes


def design_matrix(modes, samples, m: int) -> np.ndarray:
    """Phi[p, j] = value of mode j at sample p, shape (P, J, 2^m)."""
    funcs = [md.function(m) for md in modes]
    return np.array([[f.evaluate(s) for f in funcs] for s in samples])


def synthesize_spin(Phi: np.ndarray, coeffs: np.ndarray, m: int) -> np.ndarray:
    """F(s_p) = sum_j Phi[p, j] c_j."""
    return mul_array(Phi, coeffs[None], m).sum(axis=1)


def analyze_spin(Phi: np.ndarray, values: np.ndarray, m: int) -> np.ndarray:
    """Least-squares right coefficients c_j from samples."""
    from .clifford import product_tensor

    P, J, d = Phi.shape
    # A[(p, c), (j, b)] = sum_a Phi[p, j, a] M[a, b, c]
    A = np.einsum("pja,abc->pcjb", Phi, product_tensor(m)).reshape(P * d, J * d)
    sol, *_ = np.linalg.lstsq(A, values.reshape(-1), rcond=None)
    return sol.reshape(J, d)


def spin_wavelet_family(modes, grid: ScaleGrid | None = None) -> WaveletFamily:
    """Spectral weights sqrt(lam) exp(-lam rho / 2) with lam = -eigenvalue."""
    lam = np.array([-float(md.eigenvalue) for md in modes])
    if (lam < -1e-12).any():
        raise ValueError("spin eigenvalues must be non-positive")
    return WaveletFamily("spin", grid or ScaleGrid(), np.clip(lam, 0, None))


__all__ = [
    "frame_point",
    "SpinEigenfunction",
    "delta_spin_H",
    "delta_spin_L",
    "delta_spin_split",
    "split_degree_formula",
    "spin_gamma",
    "spin_dirac_at_identity",
    "spin_dirac_formula",
    "spin_derivative",
    "numeric_dirac",
    "numeric_laplacian",
    "SpinMode",
    "enumerate_spin_modes",
    "design_matrix",
    "synthesize_spin",
    "analyze_spin",
    "spin_wavelet_family",
]
