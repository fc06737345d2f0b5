"""Dense operators on (C^N)^{(x)n} over exact rationals or floats.

Basis order is lexicographic in the site indices with site 1 most significant.
Sites and local indices are 1-based in the public functions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations, product

import numpy as np

MAX_N, MAX_SITES = 3, 5


# ---------------------------------------------------------------- scalars

@dataclass(frozen=True)
class GaussianRational:
    """Exact a + b i with rational a, b."""
    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @staticmethod
    def _c(v):
        if isinstance(v, GaussianRational):
            return v
        if isinstance(v, (int, Fraction)):
            return GaussianRational(Fraction(v))
        return NotImplemented

    def __add__(self, o):
        o = self._c(o)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, o):
        o = self._c(o)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = self._c(o)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = self._c(o)
        if o is NotImplemented:
            return o
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("division by zero")
        return self * GaussianRational(o.re / d, -o.im / d)

    def __rtruediv__(self, o):
        return self._c(o) / self

    def __pow__(self, k: int):
        r = GaussianRational(Fraction(1))
        base = self if k >= 0 else GaussianRational(1) / self
        for _ in range(abs(k)):
            r = r * base
        return r

    def __eq__(self, o):
        o = self._c(o)
        if o is NotImplemented:
            return False
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))


def exact(v):
    """Parse an exact scalar from int, Fraction, GaussianRational or 'p/q' text."""
    if isinstance(v, (Fraction, GaussianRational)):
        return v
    if isinstance(v, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v.strip())
    if isinstance(v, float):
        return Fraction(v).limit_denominator(10**12)
    raise TypeError(f"cannot convert {v!r} to an exact scalar")


def is_exact(v) -> bool:
    return isinstance(v, (int, Fraction, GaussianRational))


def to_complex(v) -> complex:
    return complex(v)


def fmt_scalar(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, GaussianRational):
        return f"{v.re}+{v.im}i"
    if isinstance(v, int):
        return str(v)
    return repr(v)


# ---------------------------------------------------------------- indexing

@lru_cache(maxsize=None)
def basis_states(N: int, n: int) -> tuple:
    """Tuples (a_1..a_n), 0-based, in basis order."""
    return tuple(product(range(N), repeat=n))


def state_index(state, N: int) -> int:
    idx = 0
    for a in state:
        idx = idx * N + a
    return idx


def _check_dims(N: int, n: int):
    if not 1 <= N <= MAX_N or not 0 <= n <= MAX_SITES:
        raise ValueError(f"desk scale is N <= {MAX_N}, n <= {MAX_SITES}; got N={N}, n={n}")


# ---------------------------------------------------------------- arrays

def zeros(dim: int, exact_field: bool = True) -> np.ndarray:
    if exact_field:
        a = np.empty((dim, dim), dtype=object)
        a.fill(Fraction(0))
        return a
    return np.zeros((dim, dim), dtype=complex)


def eye(dim: int, exact_field: bool = True) -> np.ndarray:
    a = zeros(dim, exact_field)
    for i in range(dim):
        a[i, i] = Fraction(1) if exact_field else 1.0
    return a


def _all_rational(a: np.ndarray) -> bool:
    return a.dtype == object and all(isinstance(v, (int, Fraction)) for v in a.flat)


def _scaled(a: np.ndarray):
    den = 1
    for v in a.flat:
        if isinstance(v, Fraction) and v.denominator != 1:
            den = math.lcm(den, v.denominator)
    ints = np.empty(a.shape, dtype=object)
    for idx, v in np.ndenumerate(a):
        ints[idx] = int(v * den)
    return ints, den


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product; rational operands go through common-denominator
    integer arithmetic, which avoids a gcd per multiply-add."""
    if _all_rational(a) and _all_rational(b):
        ia, da = _scaled(a)
        ib, db = _scaled(b)
        prod_ = ia.dot(ib)
        den = da * db
        out = np.empty(prod_.shape, dtype=object)
        for idx, v in np.ndenumerate(prod_):
            out[idx] = Fraction(v, den)
        return out
    return a.dot(b)


def nonzero_count(a: np.ndarray) -> int:
    if a.dtype == object:
        return sum(1 for v in a.flat if v != 0)
    return int(np.count_nonzero(a))


def max_abs(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(max(abs(complex(v)) for v in a.flat))


def as_float(a: np.ndarray) -> np.ndarray:
    if a.dtype == object:
        return np.array([[complex(v) for v in row] for row in a], dtype=complex)
    return a.astype(complex)


# ---------------------------------------------------------------- operators

class TensorOperator:
    """Dense operator on (C^N)^{(x)n}. Treat as immutable."""

    __slots__ = ("N", "n", "mat")

    def __init__(self, N: int, n: int, mat: np.ndarray):
        dim = N ** n
        if mat.shape != (dim, dim):
            raise ValueError(f"shape {mat.shape} does not match N={N}, n={n}")
        self.N, self.n, self.mat = N, n, mat

    @property
    def dim(self) -> int:
        return self.N ** self.n

    @property
    def is_exact(self) -> bool:
        return self.mat.dtype == object

    @classmethod
    def identity(cls, N: int, n: int, exact_field: bool = True) -> TensorOperator:
        return cls(N, n, eye(N ** n, exact_field))

    @classmethod
    def zero(cls, N: int, n: int, exact_field: bool = True) -> TensorOperator:
        return cls(N, n, zeros(N ** n, exact_field))

    def _same(self, other: TensorOperator):
        if (self.N, self.n) != (other.N, other.n):
            raise ValueError("operators live on different spaces")

    def __add__(self, other):
        if isinstance(other, TensorOperator):
            self._same(other)
            return TensorOperator(self.N, self.n, self.mat + other.mat)
        return self + TensorOperator.identity(self.N, self.n, self.is_exact) * other

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other if isinstance(other, TensorOperator) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return TensorOperator(self.N, self.n, -self.mat)

    def __mul__(self, c):
        if isinstance(c, TensorOperator):
            return self @ c
        return TensorOperator(self.N, self.n, self.mat * c)

    __rmul__ = __mul__

    def __truediv__(self, c):
        if isinstance(c, int):
            c = Fraction(c)
        return TensorOperator(self.N, self.n, self.mat / c)

    def __matmul__(self, other: TensorOperator) -> TensorOperator:
        self._same(other)
        return TensorOperator(self.N, self.n, matmul(self.mat, other.mat))

    def __pow__(self, k: int) -> TensorOperator:
        r = TensorOperator.identity(self.N, self.n, self.is_exact)
        for _ in range(k):
            r = r @ self
        return r

    def __eq__(self, other):
        if not isinstance(other, TensorOperator):
            return NotImplemented
        return (self.N, self.n) == (other.N, other.n) and bool(np.all(self.mat == other.mat))

    __hash__ = None

    def commutator(self, other: TensorOperator) -> TensorOperator:
        return self @ other - other @ self

    def nnz(self) -> int:
        return nonzero_count(self.mat)

    def is_zero(self) -> bool:
        return self.nnz() == 0

    def max_abs(self) -> float:
        return max_abs(self.mat)

    def to_float(self) -> TensorOperator:
        return TensorOperator(self.N, self.n, as_float(self.mat))

    def trace(self):
        return sum(self.mat[i, i] for i in range(self.dim))

    def to_rows(self, max_dim: int = 64) -> list:
        if self.dim > max_dim:
            raise ValueError(f"operator of dimension {self.dim} exceeds the serialization guard {max_dim}")
        return [[fmt_scalar(v) for v in row] for row in self.mat]

    def __repr__(self):
        return f"TensorOperator(N={self.N}, n={self.n})"


def elem(i: int, a: int, b: int, N: int, n: int) -> TensorOperator:
    """e_ab acting on site i (all 1-based)."""
    _check_dims(N, n)
    if not (1 <= i <= n and 1 <= a <= N and 1 <= b <= N):
        raise IndexError(f"elem index out of range: i={i}, a={a}, b={b}")
    m = zeros(N ** n)
    for s in basis_states(N, n):
        if s[i - 1] == b - 1:
            t = list(s)
            t[i - 1] = a - 1
            m[state_index(t, N), state_index(s, N)] = Fraction(1)
    return TensorOperator(N, n, m)


def perm_product(sigma, tau) -> tuple:
    """rho with P_rho = P_sigma P_tau for the action of perm_op."""
    return tuple(tau[sigma[j]] for j in range(len(sigma)))


def perm_op(sigma, N: int, exact_field: bool = True) -> TensorOperator:
    """P_sigma (v_1 (x) ... (x) v_n) = v_{sigma(1)} (x) ... (x) v_{sigma(n)};
    sigma is a 0-based tuple."""
    n = len(sigma)
    _check_dims(N, n)
    m = zeros(N ** n, exact_field)
    one = Fraction(1) if exact_field else 1.0
    for s in basis_states(N, n):
        image = tuple(s[sigma[j]] for j in range(n))
        m[state_index(image, N), state_index(s, N)] = one
    return TensorOperator(N, n, m)


def transposition(i: int, j: int, n: int) -> tuple:
    p = list(range(n))
    p[i], p[j] = p[j], p[i]
    return tuple(p)


def cycles(sigma) -> list:
    seen, out = set(), []
    for start in range(len(sigma)):
        if start in seen:
            continue
        c, j = [], start
        while j not in seen:
            seen.add(j)
            c.append(j)
            j = sigma[j]
        out.append(tuple(c))
    return out


def all_perms(n: int):
    return permutations(range(n))


def perm_matrix_action(sigma, N: int) -> np.ndarray:
    """Index map: row index of P_sigma applied to each basis column."""
    n = len(sigma)
    return np.array([state_index(tuple(s[sigma[j]] for j in range(n)), N)
                     for s in basis_states(N, n)], dtype=np.int64)


def sector_states(m, N: int, n: int) -> list:
    m = tuple(m)
    if len(m) != N or any(v < 0 for v in m) or sum(m) != n:
        raise ValueError(f"invalid sector label {m} for N={N}, n={n}")
    return [k for k, s in enumerate(basis_states(N, n))
            if all(s.count(a) == m[a] for a in range(N))]


def sector_projector(m, N: int, n: int) -> TensorOperator:
    _check_dims(N, n)
    p = zeros(N ** n)
    for k in sector_states(m, N, n):
        p[k, k] = Fraction(1)
    return TensorOperator(N, n, p)


def sector_labels(N: int, n: int) -> list:
    return [m for m in product(range(n + 1), repeat=N) if sum(m) == n]


def sector_dimension(m) -> int:
    d = math.factorial(sum(m))
    for v in m:
        d //= math.factorial(v)
    return d


def embed(op: np.ndarray, N: int, positions, n: int) -> np.ndarray:
    """Place an operator on len(positions) sites into slots ``positions``
    (0-based, in the order of the operator's own tensor factors) of n sites."""
    m = len(positions)
    dim = N ** n
    if m == n and tuple(positions) == tuple(range(n)):
        return op
    exact_field = op.dtype == object
    out = zeros(dim, exact_field)
    rest = [i for i in range(n) if i not in positions]
    small = basis_states(N, m)
    for r_state in product(range(N), repeat=len(rest)):
        for ci, cs in enumerate(small):
            full_c = [0] * n
            for p, a in zip(positions, cs):
                full_c[p] = a
            for p, a in zip(rest, r_state):
                full_c[p] = a
            col = state_index(full_c, N)
            for ri, rs in enumerate(small):
                v = op[ri, ci]
                if v == 0:
                    continue
                full_r = list(full_c)
                for p, a in zip(positions, rs):
                    full_r[p] = a
                out[state_index(full_r, N), col] = v
    return out
