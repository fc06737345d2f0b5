"""Small exact algebra helpers: sparse multivariate polynomials and truncated
power series with coefficients in any field (Fraction, float, complex)."""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations


def _is_zero(c) -> bool:
    try:
        return bool(c == 0)
    except (ValueError, TypeError):
        return False


class Poly:
    """Sparse polynomial in ``nvars`` commuting variables.

    Terms are stored as ``{exponent tuple: coefficient}``.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        self.terms = {}
        if terms:
            for e, c in terms.items():
                if not _is_zero(c):
                    self.terms[tuple(e)] = c

    @classmethod
    def const(cls, nvars: int, c) -> Poly:
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int, c=1) -> Poly:
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): c})

    def _coerce(self, other) -> Poly:
        if isinstance(other, Poly):
            return other
        return Poly.const(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if _is_zero(v):
                out.pop(e, None)
            else:
                out[e] = v
        r = Poly(self.nvars)
        r.terms = out
        return r

    __radd__ = __add__

    def __neg__(self):
        r = Poly(self.nvars)
        r.terms = {e: -c for e, c in self.terms.items()}
        return r

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            if _is_zero(other):
                return Poly(self.nvars)
            r = Poly(self.nvars)
            r.terms = {e: c * other for e, c in self.terms.items()}
            return r
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly(self.nvars, out)

    __rmul__ = __mul__

    def __truediv__(self, c):
        if isinstance(c, int):
            c = Fraction(c)
        r = Poly(self.nvars)
        r.terms = {e: v / c for e, v in self.terms.items()}
        return r

    def __pow__(self, k: int):
        r = Poly.const(self.nvars, 1)
        for _ in range(k):
            r = r * self
        return r

    def __eq__(self, other):
        other = self._coerce(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def weighted_truncate(self, weights, max_degree: int) -> Poly:
        r = Poly(self.nvars)
        r.terms = {e: c for e, c in self.terms.items()
                   if sum(w * a for w, a in zip(weights, e)) <= max_degree}
        return r

    def coeff(self, e) -> object:
        return self.terms.get(tuple(e), 0)

    def evaluate(self, values):
        total = 0
        for e, c in self.terms.items():
            term = c
            for v, a in zip(values, e):
                if a:
                    term = term * v ** a
            total = total + term
        return total

    def __repr__(self):
        return f"Poly({self.nvars}, {self.terms!r})"


class Series:
    """Truncated power series ``c0 + c1 s + ... + c_{order} s^order``."""

    __slots__ = ("c",)

    def __init__(self, coeffs, order: int | None = None):
        coeffs = list(coeffs)
        if order is not None:
            coeffs = (coeffs + [0] * (order + 1))[: order + 1]
        self.c = coeffs

    @property
    def order(self) -> int:
        return len(self.c) - 1

    @classmethod
    def variable(cls, order: int, at=0) -> Series:
        return cls([at, 1], order)

    @classmethod
    def constant(cls, value, order: int) -> Series:
        return cls([value], order)

    def _coerce(self, other) -> Series:
        if isinstance(other, Series):
            if other.order != self.order:
                raise ValueError("series orders differ")
            return other
        return Series([other], self.order)

    def __add__(self, other):
        other = self._coerce(other)
        return Series([a + b for a, b in zip(self.c, other.c)])

    __radd__ = __add__

    def __neg__(self):
        return Series([-a for a in self.c])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Series):
            return Series([a * other for a in self.c])
        other = self._coerce(other)
        m = self.order
        out = [0] * (m + 1)
        for i, a in enumerate(self.c):
            if _is_zero(a):
                continue
            for j in range(m + 1 - i):
                out[i + j] = out[i + j] + a * other.c[j]
        return Series(out)

    __rmul__ = __mul__

    def inverse(self) -> Series:
        a0 = self.c[0]
        if _is_zero(a0):
            raise ZeroDivisionError("series with zero constant term is not invertible")
        m = self.order
        inv0 = Fraction(1) / a0 if isinstance(a0, int) else 1 / a0
        out = [inv0]
        for k in range(1, m + 1):
            s = 0
            for j in range(1, k + 1):
                s = s + self.c[j] * out[k - j]
            out.append(-s * inv0)
        return Series(out)

    def __truediv__(self, other):
        if isinstance(other, Series):
            return self * other.inverse()
        if isinstance(other, int):
            other = Fraction(other)
        return Series([a / other for a in self.c])

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        r = Series([1], self.order)
        for _ in range(k):
            r = r * self
        return r

    def __eq__(self, other):
        if not isinstance(other, Series):
            other = Series([other], self.order)
        return self.c == other.c

    def __hash__(self):
        return hash(tuple(self.c))

    def __getitem__(self, k: int):
        return self.c[k]

    def derivative_values(self):
        """Taylor coefficients turned into derivatives: k! c_k."""
        out, f = [], 1
        for k, a in enumerate(self.c):
            if k:
                f *= k
            out.append(a * f)
        return out

    def __repr__(self):
        return f"Series({self.c!r})"


def exp_series(s: Series) -> Series:
    """exp of a series with vanishing constant term."""
    if not _is_zero(s.c[0]):
        raise ValueError("exp_series needs a zero constant term")
    m = s.order
    out = [Fraction(1)] + [0] * m
    # E' = s' E  ->  k e_k = sum_j j s_j e_{k-j}
    for k in range(1, m + 1):
        acc = 0
        for j in range(1, k + 1):
            acc = acc + j * s.c[j] * out[k - j]
        out[k] = acc / Fraction(k) if not isinstance(acc, float) else acc / k
    return Series(out)


def det(matrix):
    """Determinant over any commutative ring by cofactor expansion memoized on
    column subsets. Fine for sizes up to about 12."""
    n = len(matrix)
    if n == 0:
        return 1
    memo = {}

    def minor(row, cols):
        # rows row.. against the column set cols; row is implied by len(cols)
        if row == n:
            return 1
        if cols in memo:
            return memo[cols]
        total = 0
        for pos, c in enumerate(cols):
            a = matrix[row][c]
            if _is_zero(a):
                continue
            sub = minor(row + 1, cols[:pos] + cols[pos + 1:])
            term = a * sub
            total = total + term if pos % 2 == 0 else total - term
        memo[cols] = total
        return total

    return minor(0, tuple(range(n)))


def subsets(seq, size: int):
    return combinations(seq, size)
