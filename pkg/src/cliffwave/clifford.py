"""Complex Clifford algebra Cl_m with e_i e_j + e_j e_i = -2 delta_ij.

Blades are bitmasks: bit ``g`` set means generator ``e_{g+1}`` is present.
Coefficients live in one of two scalar backends:

* exact: sympy ``QQ_I`` Gaussian rationals, no rounding;
* approx: Python ``complex``.

A multivector is exact when every stored coefficient is exact. Mixing an
exact value with a float or complex promotes the result to approx.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import lcm
from itertools import combinations
from numbers import Number

import numpy as np
from sympy.polys.domains import QQ, QQ_I

GaussianRational = type(QQ_I.one)
ZERO = QQ_I.zero
ONE = QQ_I.one


# --------------------------------------------------------------------- scalars

def exact(x) -> GaussianRational:
    """Convert ``x`` to an exact Gaussian rational.

    Accepts ints, ``Fraction``, ``"p/q"`` strings, complex numbers with
    integral parts and existing Gaussian rationals.
    """
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, bool):
        x = int(x)
    if isinstance(x, int):
        return QQ_I(x, 0)
    if isinstance(x, Fraction):
        return QQ_I(QQ(x.numerator, x.denominator), 0)
    if isinstance(x, str):
        return QQ_I(_qq(x), 0)
    if isinstance(x, complex):
        if x.real.is_integer() and x.imag.is_integer():
            return QQ_I(int(x.real), int(x.imag))
        raise TypeError(f"cannot convert inexact complex {x!r} to exact")
    if isinstance(x, float) and x.is_integer():
        return QQ_I(int(x), 0)
    if type(x).__name__ == "mpq":
        return QQ_I(x, 0)
    raise TypeError(f"cannot convert {type(x).__name__} to exact scalar")


def _qq(s):
    f = Fraction(s)
    return QQ(f.numerator, f.denominator)


def is_exact(x) -> bool:
    return isinstance(x, GaussianRational)


def conj(x):
    if isinstance(x, GaussianRational):
        return QQ_I(x.x, -x.y)
    return complex(x).conjugate()


def to_complex(x) -> complex:
    if isinstance(x, GaussianRational):
        return complex(float(x.x), float(x.y))
    return complex(x)


def is_zero(x) -> bool:
    if isinstance(x, GaussianRational):
        return x == ZERO
    return x == 0


def _coerce(x, exact_mode: bool):
    """Bring scalar ``x`` into the backend of a multivector."""
    if exact_mode:
        if isinstance(x, (GaussianRational, int, Fraction)) or type(x).__name__ == "mpq":
            return exact(x), True
        return to_complex(x), False
    return to_complex(x), False


def rational_str(q) -> str:
    q = Fraction(int(q.numerator), int(q.denominator))
    return str(q)


# ---------------------------------------------------------------------- blades

def popcount(x: int) -> int:
    return bin(x).count("1")


@lru_cache(maxsize=None)
def blade_sign(a: int, b: int) -> int:
    """Sign of e_a e_b relative to e_{a^b}.

    Counts the transpositions needed to sort the concatenated word, then one
    factor -1 per generator appearing in both blades (e_i^2 = -1).
    """
    swaps = 0
    x = a >> 1
    while x:
        swaps += popcount(x & b)
        x >>= 1
    swaps += popcount(a & b)
    return -1 if swaps & 1 else 1


def blade_sign_bruteforce(a: int, b: int) -> int:
    """Reduce the word of generators one adjacent swap at a time."""
    word = [g for g in range(a.bit_length()) if a >> g & 1]
    word += [g for g in range(b.bit_length()) if b >> g & 1]
    sign = 1
    changed = True
    while changed:
        changed = False
        for i in range(len(word) - 1):
            if word[i] > word[i + 1]:
                word[i], word[i + 1] = word[i + 1], word[i]
                sign = -sign
                changed = True
                break
            if word[i] == word[i + 1]:
                del word[i:i + 2]
                sign = -sign
                changed = True
                break
    return sign


def blade_bits(*gens: int) -> int:
    """Bitmask for the sorted blade e_{g1}...e_{gk} (1-based generator labels)."""
    bits = 0
    for g in gens:
        bits |= 1 << (g - 1)
    return bits


def blade_label(bits: int) -> str:
    if bits == 0:
        return "1"
    return "e" + "".join(str(g + 1) if g < 9 else f"({g + 1})" for g in range(bits.bit_length()) if bits >> g & 1)


def grade_blades(m: int, k: int) -> list[int]:
    return [sum(1 << g for g in c) for c in combinations(range(m), k)]


def bar_sign(bits: int) -> int:
    """bar(e_A) = bar_sign(A) e_A: reversal times (-1)^|A|."""
    k = popcount(bits)
    return -1 if (k * (k - 1) // 2 + k) & 1 else 1


# ----------------------------------------------------------------- multivector

class Multivector:
    """Immutable element of Cl_m stored as a sparse blade -> scalar map."""

    __slots__ = ("m", "_c", "_exact")

    def __init__(self, m: int, coeffs=None):
        if m < 0:
            raise ValueError("dimension must be non-negative")
        self.m = m
        c = {}
        ex = True
        for bits, v in (coeffs or {}).items():
            if bits < 0 or bits >> m:
                raise ValueError(f"blade {bits} outside Cl_{m}")
            if not isinstance(v, GaussianRational):
                if isinstance(v, (int, Fraction, str)) or type(v).__name__ == "mpq":
                    v = exact(v)
                else:
                    ex = False
            c[bits] = v
        if not ex:
            c = {k: to_complex(v) for k, v in c.items()}
        self._c = {k: v for k, v in c.items() if not is_zero(v)}
        self._exact = ex

    # construction
    @classmethod
    def scalar(cls, m: int, value=1) -> Multivector:
        return cls(m, {0: value})

    @classmethod
    def zero(cls, m: int) -> Multivector:
        return cls(m, {})

    @property
    def is_exact(self) -> bool:
        return self._exact

    @property
    def coeffs(self) -> dict:
        return dict(self._c)

    def __getitem__(self, bits: int):
        return self._c.get(bits, ZERO if self._exact else 0j)

    def items(self):
        return self._c.items()

    def blades(self):
        return self._c.keys()

    # backends
    def to_approx(self) -> Multivector:
        return Multivector(self.m, {k: to_complex(v) for k, v in self._c.items()})

    def to_exact(self, max_denominator: int | None = None) -> Multivector:
        if self._exact:
            return self
        out = {}
        for k, v in self._c.items():
            re, im = Fraction(v.real), Fraction(v.imag)
            if max_denominator:
                re, im = re.limit_denominator(max_denominator), im.limit_denominator(max_denominator)
            out[k] = QQ_I(QQ(re.numerator, re.denominator), QQ(im.numerator, im.denominator))
        return Multivector(self.m, out)

    def to_array(self) -> np.ndarray:
        """Dense complex coefficient vector of length 2^m."""
        arr = np.zeros(1 << self.m, dtype=complex)
        for k, v in self._c.items():
            arr[k] = to_complex(v)
        return arr

    @classmethod
    def from_array(cls, m: int, arr, tol: float = 0.0) -> Multivector:
        arr = np.asarray(arr, dtype=complex)
        return cls(m, {i: complex(v) for i, v in enumerate(arr) if abs(v) > tol})

    # helpers
    def _check(self, other: Multivector):
        if other.m != self.m:
            raise ValueError(f"dimension mismatch: Cl_{self.m} vs Cl_{other.m}")

    def _lift(self, other):
        if isinstance(other, Multivector):
            self._check(other)
            return other
        if isinstance(other, Number) or isinstance(other, (GaussianRational, Fraction)) or type(other).__name__ == "mpq":
            return Multivector(self.m, {0: other})
        return NotImplemented

    # arithmetic
    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        ex = self._exact and other._exact
        a = self if ex else self.to_approx()
        b = other if ex else other.to_approx()
        c = dict(a._c)
        for k, v in b._c.items():
            c[k] = c[k] + v if k in c else v
        return Multivector(self.m, c)

    __radd__ = __add__

    def __neg__(self):
        return Multivector(self.m, {k: -v for k, v in self._c.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s) -> Multivector:
        s, ex = _coerce(s, self._exact)
        src = self._c if ex else self.to_approx()._c
        return Multivector(self.m, {k: v * s for k, v in src.items()})

    def __mul__(self, other):
        if isinstance(other, Multivector):
            return geometric_product(self, other)
        if isinstance(other, (Number, GaussianRational, Fraction)) or type(other).__name__ == "mpq":
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (Number, GaussianRational, Fraction)) or type(other).__name__ == "mpq":
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and self._exact:
            return self.scale(exact(Fraction(1) / Fraction(other)))
        if isinstance(other, GaussianRational):
            return self.scale(ONE / other)
        return self.scale(1 / complex(other))

    def __xor__(self, other):
        return wedge(self, other)

    def __eq__(self, other):
        if isinstance(other, (Number, GaussianRational, Fraction)):
            other = self._lift(other)
        if not isinstance(other, Multivector) or other.m != self.m:
            return NotImplemented
        if self._exact and other._exact:
            return self._c == other._c
        return self.to_approx()._c == other.to_approx()._c

    def __hash__(self):
        return hash((self.m, frozenset(self.to_exact()._c.items()) if self._exact else frozenset(self._c.items())))

    def __bool__(self):
        return bool(self._c)

    def __repr__(self):
        if not self._c:
            return "0"
        parts = []
        for k in sorted(self._c, key=lambda b: (popcount(b), b)):
            parts.append(f"({self._c[k]})*{blade_label(k)}" if k else f"({self._c[k]})")
        return " + ".join(parts)

    # algebra
    def grade(self, k: int) -> Multivector:
        return grade_project(self, k)

    def bar(self) -> Multivector:
        return main_anti_involution(self)

    def scalar_part(self):
        return self[0]

    def grades(self) -> set[int]:
        return {popcount(k) for k in self._c}

    def is_even(self) -> bool:
        return all(popcount(k) % 2 == 0 for k in self._c)

    def norm_sq(self) -> float:
        return float(sum(abs(to_complex(v)) ** 2 for v in self._c.values()))

    def norm(self) -> float:
        return self.norm_sq() ** 0.5

    def max_abs(self) -> float:
        return max((abs(to_complex(v)) for v in self._c.values()), default=0.0)

    def close_to(self, other, tol: float = 1e-12) -> bool:
        return (self - other).max_abs() <= tol

    # serialization
    def to_json(self) -> dict:
        rows = []
        for k in sorted(self._c):
            v = self._c[k]
            if self._exact:
                rows.append({"blade": k, "re": rational_str(v.x), "im": rational_str(v.y)})
            else:
                rows.append({"blade": k, "re": v.real, "im": v.imag})
        return {"m": self.m, "coeffs": rows}

    @classmethod
    def from_json(cls, data: dict) -> Multivector:
        m = int(data["m"])
        c = {}
        for row in data["coeffs"]:
            re, im = row.get("re", 0), row.get("im", 0)
            if isinstance(re, (str, int)) and isinstance(im, (str, int)):
                c[int(row["blade"])] = QQ_I(_qq(str(re)), _qq(str(im)))
            else:
                c[int(row["blade"])] = complex(float(re), float(im))
        return cls(m, c)


# ------------------------------------------------------------------ operations

def basis_vector(m: int, i: int, coeff=1) -> Multivector:
    """The generator e_i (1-based)."""
    if not 1 <= i <= m:
        raise ValueError(f"generator index {i} outside 1..{m}")
    return Multivector(m, {1 << (i - 1): coeff})


def blade(m: int, *gens: int, coeff=1) -> Multivector:
    """The product e_{g1} e_{g2} ... in the given order (1-based labels)."""
    out = Multivector.scalar(m, coeff)
    for g in gens:
        out = out * basis_vector(m, g)
    return out


def vector(m: int, comps, offset: int = 0) -> Multivector:
    """sum_i comps[i] e_{i+1+offset}."""
    return Multivector(m, {1 << (i + offset): c for i, c in enumerate(comps)})


def geometric_product(a: Multivector, b: Multivector) -> Multivector:
    if a.m != b.m:
        raise ValueError(f"dimension mismatch: Cl_{a.m} vs Cl_{b.m}")
    ex = a._exact and b._exact
    if ex and len(a._c) * len(b._c) >= _DENSE_THRESHOLD:
        return _exact_dense_product(a, b)
    ac = a._c if ex or not a._exact else a.to_approx()._c
    bc = b._c if ex or not b._exact else b.to_approx()._c
    out: dict = {}
    for ka, va in ac.items():
        for kb, vb in bc.items():
            v = va * vb
            if blade_sign(ka, kb) < 0:
                v = -v
            k = ka ^ kb
            out[k] = out[k] + v if k in out else v
    return Multivector(a.m, out)


_DENSE_THRESHOLD = 64


def _numerators(a: Multivector):
    """Gaussian-integer arrays (re, im) and a common denominator for exact ``a``."""
    vals = list(a._c.values())
    den = 1
    for v in vals:
        den = lcm(den, int(v.x.denominator), int(v.y.denominator))
    n = 1 << a.m
    re, im = [0] * n, [0] * n
    for k, v in a._c.items():
        re[k] = int(v.x.numerator) * (den // int(v.x.denominator))
        im[k] = int(v.y.numerator) * (den // int(v.y.denominator))
    return re, im, den


def _exact_dense_product(a: Multivector, b: Multivector) -> Multivector:
    m = a.m
    ar, ai, da = _numerators(a)
    br, bi, db = _numerators(b)
    bound = max(map(abs, ar + ai)) * max(map(abs, br + bi)) << (m + 2)
    dtype = np.int64 if bound < 2**62 else object
    M = _sign_tensor(m)
    A = np.array([ar, ai], dtype=dtype)
    B = np.array([br, bi], dtype=dtype)
    # P[s, t, c] = (A_s B_t)_c for s, t in {re, im}
    P = np.einsum("sa,tb,abc->stc", A, B, M) if dtype is np.int64 else _object_product(A, B, M)
    re = P[0, 0] - P[1, 1]
    im = P[0, 1] + P[1, 0]
    D = da * db
    out = {}
    for k in range(1 << m):
        r, i = int(re[k]), int(im[k])
        if r or i:
            out[k] = QQ_I(QQ(r, D), QQ(i, D))
    return Multivector(m, out)


def _object_product(A, B, M):
    n = M.shape[0]
    P = np.zeros((2, 2, n), dtype=object)
    for x in range(n):
        for y in range(n):
            c = x ^ y
            sg = int(M[x, y, c])
            for s in range(2):
                for t in range(2):
                    P[s, t, c] += sg * A[s, x] * B[t, y]
    return P


@lru_cache(maxsize=None)
def _sign_tensor(m: int) -> np.ndarray:
    T = product_tensor(m).astype(np.int64)
    T.setflags(write=False)
    return T


def grade_project(a: Multivector, k: int) -> Multivector:
    if not 0 <= k <= a.m:
        raise ValueError(f"grade {k} outside 0..{a.m}")
    return Multivector(a.m, {b: v for b, v in a._c.items() if popcount(b) == k})


def main_anti_involution(a: Multivector) -> Multivector:
    return Multivector(a.m, {k: conj(v) if bar_sign(k) > 0 else -conj(v) for k, v in a._c.items()})


def clifford_inner_product(a: Multivector, b: Multivector):
    """[bar(a) b]_0, computed blade-wise since bar(e_A) e_A = 1."""
    if a.m != b.m:
        raise ValueError(f"dimension mismatch: Cl_{a.m} vs Cl_{b.m}")
    ex = a._exact and b._exact
    total = ZERO if ex else 0j
    for k, v in a._c.items():
        w = b._c.get(k)
        if w is None:
            continue
        if ex:
            total += conj(v) * w
        else:
            total += to_complex(v).conjugate() * to_complex(w)
    return total


def wedge(a: Multivector, b: Multivector) -> Multivector:
    """Half commutator (ab - ba)/2."""
    d = a * b - b * a
    return d / 2 if d.is_exact else d.scale(0.5)


def random_multivector(m: int, rng, exact_mode: bool = True, density: float = 1.0, bound: int = 5) -> Multivector:
    """Random element with small integer (exact) or Gaussian (approx) coefficients."""
    c = {}
    for k in range(1 << m):
        if rng.random() > density:
            continue
        if exact_mode:
            re = int(rng.integers(-bound, bound + 1))
            im = int(rng.integers(-bound, bound + 1))
            den = int(rng.integers(1, 4))
            c[k] = QQ_I(QQ(re, den), QQ(im, den))
        else:
            c[k] = complex(rng.normal(), rng.normal())
    return Multivector(m, c)


# ------------------------------------------------------------- dense helpers

@lru_cache(maxsize=None)
def product_tensor(m: int) -> np.ndarray:
    """M[A, B, C] = sign of e_A e_B when C == A ^ B, else 0."""
    n = 1 << m
    M = np.zeros((n, n, n))
    for a in range(n):
        for b in range(n):
            M[a, b, a ^ b] = blade_sign(a, b)
    M.setflags(write=False)
    return M


@lru_cache(maxsize=None)
def bar_signs(m: int) -> np.ndarray:
    s = np.array([bar_sign(b) for b in range(1 << m)], dtype=float)
    s.setflags(write=False)
    return s


def bar_array(a: np.ndarray, m: int) -> np.ndarray:
    """Main anti-involution on dense coefficient arrays (last axis = blades)."""
    return np.conj(a) * bar_signs(m)


def mul_array(a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    """Geometric product of broadcastable dense arrays."""
    return np.einsum("...a,...b,abc->...c", a, b, product_tensor(m))


def left_rep(a: np.ndarray, m: int) -> np.ndarray:
    """Matrix of x -> a x on coefficient vectors; column 0 recovers a."""
    return np.einsum("...a,abc->...cb", a, product_tensor(m))
