"""Young diagrams, Schur functions in time variables and GL(N) characters."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Mapping, Sequence

from .series import Poly, det


@dataclass(frozen=True, order=True)
class Partition:
    parts: tuple = ()

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p <= 0 for p in parts):
            raise ValueError(f"parts must be positive: {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"parts must be weakly decreasing: {parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def of(cls, *parts) -> Partition:
        if len(parts) == 1 and not isinstance(parts[0], int):
            parts = tuple(parts[0])
        return cls(tuple(p for p in parts if p))

    @property
    def weight(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __getitem__(self, i: int) -> int:
        # 0-based; rows beyond the length have zero boxes
        return self.parts[i] if 0 <= i < len(self.parts) else 0

    def __iter__(self):
        return iter(self.parts)

    def conjugate(self) -> Partition:
        return conjugate(self)

    def contains(self, other: Partition) -> bool:
        return all(self[i] >= other[i] for i in range(len(other)))

    def __repr__(self):
        return f"Partition{self.parts}"


def conjugate(lam: Partition) -> Partition:
    if not lam.parts:
        return Partition()
    return Partition(tuple(sum(1 for p in lam.parts if p >= i)
                           for i in range(1, lam.parts[0] + 1)))


@dataclass(frozen=True)
class FrobeniusCoords:
    alphas: tuple
    betas: tuple

    def __post_init__(self):
        if len(self.alphas) != len(self.betas):
            raise ValueError("Frobenius coordinates need equal lengths")
        for seq in (self.alphas, self.betas):
            if any(a <= b for a, b in zip(seq, seq[1:])) or any(a < 0 for a in seq):
                raise ValueError(f"not strictly decreasing nonnegative: {seq}")

    @property
    def rank(self) -> int:
        return len(self.alphas)

    def to_partition(self) -> Partition:
        d = self.rank
        if d == 0:
            return Partition()
        rows = [self.alphas[i] + i + 1 for i in range(d)]
        # rows below the diagonal come from the column lengths
        cols = [self.betas[j] + j + 1 for j in range(d)]
        length = cols[0]
        for i in range(d, length):
            rows.append(sum(1 for j in range(d) if cols[j] > i))
        return Partition(tuple(rows))


def frobenius(lam: Partition) -> FrobeniusCoords:
    lc = conjugate(lam)
    d = sum(1 for i, p in enumerate(lam.parts) if p > i)
    return FrobeniusCoords(tuple(lam[i] - i - 1 for i in range(d)),
                           tuple(lc[i] - i - 1 for i in range(d)))


def hook(alpha: int, beta: int) -> Partition:
    """The diagram (alpha+1, 1^beta)."""
    return Partition((alpha + 1,) + (1,) * beta)


def partitions_of(k: int, max_part: int | None = None) -> Iterator[Partition]:
    """Partitions of k in reverse lexicographic order."""
    if max_part is None:
        max_part = k

    def rec(rest, cap):
        if rest == 0:
            yield ()
            return
        for p in range(min(rest, cap), 0, -1):
            for tail in rec(rest - p, p):
                yield (p,) + tail

    for parts in rec(k, max_part):
        yield Partition(parts)


def partitions_up_to(k: int) -> list[Partition]:
    return [lam for m in range(k + 1) for lam in partitions_of(m)]


def sub_partitions(lam: Partition) -> Iterator[Partition]:
    """All mu contained in lam (including the empty one)."""
    def rec(i, cap):
        if i == len(lam):
            yield ()
            return
        for p in range(min(lam[i], cap), -1, -1):
            if p == 0:
                yield ()
            else:
                for tail in rec(i + 1, p):
                    yield (p,) + tail

    for parts in rec(0, lam[0] if len(lam) else 0):
        yield Partition(parts)


def binom(n: int, k: int) -> int:
    if n < 0 or k < 0 or k > n:
        return 0
    r = 1
    for i in range(k):
        r = r * (n - i) // (i + 1)
    return r


def _times(t) -> list:
    """Normalize times to a list [t_1, t_2, ...]."""
    if isinstance(t, Mapping):
        if not t:
            return []
        out = [0] * max(t)
        for k, v in t.items():
            out[k - 1] = v
        return out
    explicit = getattr(t, "explicit", None)
    if explicit is not None:
        return _times(explicit)
    return list(t)


def complete_sym_all(kmax: int, t) -> list:
    """[h_0, ..., h_kmax] from exp(sum t_m z^m) via k h_k = sum m t_m h_{k-m}."""
    ts = _times(t)
    h = [1]
    for k in range(1, kmax + 1):
        acc = 0
        for m in range(1, min(k, len(ts)) + 1):
            if isinstance(ts[m - 1], (int, Fraction)) and ts[m - 1] == 0:
                continue
            acc = acc + (m * ts[m - 1]) * h[k - m]
        h.append(acc * Fraction(1, k) if not isinstance(acc, float) else acc / k)
    return h


def complete_sym(k: int, t):
    if k < 0:
        return 0
    return complete_sym_all(k, t)[k]


def elementary_sym(k: int, t):
    if k < 0:
        return 0
    neg = [-v for v in _times(t)]
    return (-1) ** k * complete_sym(k, neg)


def schur(lam: Partition, t, dual: bool = False):
    """Schur function s_lam at times t by the Jacobi-Trudi determinant.

    ``dual=True`` uses the elementary symmetric form over the columns.
    """
    if dual:
        lc = conjugate(lam)
        size = len(lc)
        if size == 0:
            return 1
        ts = [-v for v in _times(t)]
        hs = complete_sym_all(lam.weight + size, ts)
        e = [(-1) ** k * hs[k] for k in range(len(hs))]
        get = lambda k: e[k] if 0 <= k < len(e) else 0
        return det([[get(lc[i] - i + j) for j in range(size)] for i in range(size)])
    size = len(lam)
    if size == 0:
        return 1
    hs = complete_sym_all(lam.weight + size, t)
    get = lambda k: hs[k] if 0 <= k < len(hs) else 0
    return det([[get(lam[i] - i + j) for j in range(size)] for i in range(size)])


@lru_cache(maxsize=None)
def schur_poly(lam: Partition, nvars: int | None = None) -> Poly:
    """s_lam as a polynomial in y_1..y_nvars (default nvars = |lam|)."""
    if nvars is None:
        nvars = max(lam.weight, 1)
    ys = [Poly.var(nvars, i) for i in range(nvars)]
    return Poly.const(nvars, Fraction(0)) + schur(lam, ys)


def power_sums(p: Sequence, kmax: int) -> list:
    """y_k = (sum_j p_j^k)/k for k=1..kmax."""
    out = []
    for k in range(1, kmax + 1):
        s = sum(v ** k for v in p)
        out.append(s * Fraction(1, k) if not isinstance(s, float) else s / k)
    return out


def character(lam: Partition, p: Sequence):
    """GL(N) character of lam at eigenvalues p (N = len(p))."""
    N = len(p)
    if len(lam) > N:
        return 0
    if len(set(p)) == N:
        num = det([[pj ** (lam[i] + N - i - 1) for pj in p] for i in range(N)])
        den = det([[pj ** (N - i - 1) for pj in p] for i in range(N)])
        if isinstance(num, int) and isinstance(den, int):
            return Fraction(num, den)
        return num / den
    return schur(lam, power_sums(p, max(lam.weight, 1)))


def char_shift_coeffs(lam: Partition, N: int) -> dict:
    """c_{lam,mu} with chi_lam(g-1) = sum_mu c_{lam,mu} chi_mu(g)."""
    if len(lam) > N:
        raise ValueError("length exceeds N")
    out = {}
    for mu in sub_partitions(lam):
        m = [[binom(lam[i] + N - i - 1, mu[j] + N - j - 1) for j in range(N)]
             for i in range(N)]
        c = (-1) ** (lam.weight - mu.weight) * det(m)
        if c:
            out[mu] = c
    return out


def hook_char_shift(alpha: int, beta: int, N: int):
    """Expansion of the hook character chi_{(alpha|beta)}(g-1).

    Returns ``(coeffs, constant)`` where coeffs maps (a', b') to the
    coefficient of chi_{(a'|b')}(g) and constant multiplies chi_empty = 1.
    Each coefficient is a product of an a'-factor and a b'-factor.
    """
    coeffs = {}
    for a in range(alpha + 1):
        for b in range(beta + 1):
            c = ((-1) ** (alpha - a + beta - b) * hook_alpha_factor(alpha, a, N)
                 * hook_beta_factor(beta, b, N))
            if c:
                coeffs[(a, b)] = c
    constant = sum((-1) ** (alpha + 1 - j) * binom(N + alpha + beta - j, N - 1) * binom(N, j)
                   for j in range(beta + 1))
    return coeffs, constant


def hook_alpha_factor(alpha: int, a: int, N: int) -> int:
    return binom(N + alpha, N + a)


def hook_beta_factor(beta: int, b: int, N: int) -> int:
    return binom(N - b - 1, N - beta - 1)


def hook_expansion_as_partitions(alpha: int, beta: int, N: int) -> dict:
    coeffs, constant = hook_char_shift(alpha, beta, N)
    out = {hook(a, b): c for (a, b), c in coeffs.items()}
    if constant:
        out[Partition()] = out.get(Partition(), 0) + constant
    return {k: v for k, v in out.items() if v}


def hook_generating_function(z, zeta, p: Sequence):
    """sum over hooks chi_{a,b} z^a (-zeta)^b = (w(z)/w(zeta) - 1)/(z - zeta),
    w(z) = prod 1/(1 - z p_j)."""
    wz, wzeta = 1, 1
    for v in p:
        wz = wz * (1 - z * v)
        wzeta = wzeta * (1 - zeta * v)
    # w(z)/w(zeta) = det(1 - zeta h)/det(1 - z h)
    return (wzeta / wz - 1) / (z - zeta)
