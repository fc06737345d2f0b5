"""The matrix derivative d f(h) = sum_ab e_ab d/de f(h + e e_ba) on a closed class
of functions of an N x N matrix h, a brute-force oracle working on the matrix
entries, the group co-derivative, and closed cycle-sum formulas.

Two representations live here:

* ``HFunction`` is structural. Terms are P_sigma times per-slot matrix words
  h^p prod_j (1 - zeta_j h)^{-q_j}, times a monomial in the traces tr h^k, powers
  of det(1 - zeta_j h), a monomial in the symbolic times t_k and the tag
  exp(sum_k t_k tr h^k). It never looks at matrix entries.
* ``BrutePoly`` expands everything into polynomials in the N^2 entries and
  differentiates them one partial derivative at a time.

Both are evaluated at diagonal h only.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from typing import Sequence

import numpy as np

from .series import Poly, det
from .tensor import (TensorOperator, basis_states, cycles, embed, perm_matrix_action,
                     perm_product, state_index, transposition)


class PoleError(ZeroDivisionError):
    pass


class SlotError(ValueError):
    pass


def _inv(v):
    if isinstance(v, int):
        return Fraction(1, v)
    return 1 / v


def _field_one(sample):
    return 1.0 if isinstance(sample, float) else Fraction(1)


def _finish(op_internal: np.ndarray, N: int, labels: Sequence) -> TensorOperator:
    """Reorder internal slot order (creation order) to sorted label order."""
    m = len(labels)
    order = sorted(range(m), key=lambda j: labels[j])
    positions = [order.index(j) for j in range(m)]
    mat = op_internal if positions == list(range(m)) else embed(op_internal, N, positions, m)
    return TensorOperator(N, m, mat)


def _resolvent_factors(zetas, h):
    """1 - zeta_j k_a for all j, a with pole detection."""
    out = []
    for z in zetas:
        row = []
        for k in h:
            v = 1 - z * k
            if v == 0:
                raise PoleError(f"1 - zeta*k vanishes for zeta={z}, k={k}")
            row.append(v)
        out.append(row)
    return out


# ============================================================ structured form

class HFunction:
    """Finite sum of structured terms, closed under ``mat_derive``.

    key = (perm, words, traces, dets, tmono)
      perm   - tuple, operator P_perm on the occupied slots (creation order)
      words  - per slot (p, q) meaning h^p prod_j (1 - zeta_j h)^{-q_j}
      traces - sorted ((k, e), ...) meaning prod (tr h^k)^e
      dets   - per declared zeta, exponent of det(1 - zeta h)
      tmono  - exponents of the symbolic times t_1..t_K
    """

    __slots__ = ("zetas", "ntimes", "labels", "terms")

    def __init__(self, zetas=(), ntimes: int = 0, labels=(), terms=None):
        self.zetas = tuple(zetas)
        self.ntimes = ntimes
        self.labels = tuple(labels)
        self.terms = {} if terms is None else terms

    # -- constructors
    @classmethod
    def constant(cls, c=1, zetas=(), ntimes: int = 0) -> HFunction:
        f = cls(zetas, ntimes)
        f.terms[((), (), (), (0,) * len(f.zetas), (0,) * ntimes)] = Fraction(c) if isinstance(c, int) else c
        return f

    @classmethod
    def class_function(cls, power_sum_poly: Poly | None = None, zetas=(), det_powers=(),
                       ntimes: int = 0, normalized: bool = True) -> HFunction:
        """P(y) * prod_j det(1 - zeta_j h)^{e_j} * exp(sum t_k tr h^k).

        ``power_sum_poly`` is a polynomial in y_k = tr h^k / k (or in tr h^k
        itself when ``normalized`` is False); None means 1.
        """
        zetas = tuple(zetas)
        dets = tuple(det_powers) if det_powers else (0,) * len(zetas)
        if len(dets) != len(zetas):
            raise ValueError("one det exponent per declared zeta")
        f = cls(zetas, ntimes)
        tm = (0,) * ntimes
        if power_sum_poly is None:
            f.terms[((), (), (), dets, tm)] = Fraction(1)
            return f
        for e, c in power_sum_poly.terms.items():
            traces = tuple((k + 1, a) for k, a in enumerate(e) if a)
            coef = c
            if normalized:
                for k, a in traces:
                    coef = coef * Fraction(1, k ** a)
            key = ((), (), traces, dets, tm)
            f.terms[key] = f.terms.get(key, 0) + coef
        return f

    @classmethod
    def w_ratio(cls, alphas: Sequence[int], points: Sequence) -> HFunction:
        """prod_k w(z_k)^{alpha_k} with w(z) = det(1 - z h)^{-1}."""
        return cls.class_function(None, tuple(points), tuple(-a for a in alphas))

    @classmethod
    def matrix_word(cls, p: int, label, zetas=(), resolvents=()) -> HFunction:
        """The matrix h^p prod_j (1 - zeta_j h)^{-q_j} placed in one slot."""
        zetas = tuple(zetas)
        q = tuple(resolvents) if resolvents else (0,) * len(zetas)
        f = cls(zetas, 0, (label,))
        f.terms[((0,), ((p, q),), (), (0,) * len(zetas), ())] = Fraction(1)
        return f

    # -- algebra
    def _compatible(self, other: HFunction):
        if (self.zetas, self.ntimes, self.labels) != (other.zetas, other.ntimes, other.labels):
            raise ValueError("HFunctions with different zetas, times or slots")

    def __add__(self, other: HFunction) -> HFunction:
        self._compatible(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, 0) + c
            if v == 0:
                out.pop(k, None)
            else:
                out[k] = v
        return HFunction(self.zetas, self.ntimes, self.labels, out)

    def __mul__(self, c) -> HFunction:
        if isinstance(c, HFunction):
            return self._product(c)
        return HFunction(self.zetas, self.ntimes, self.labels,
                         {k: v * c for k, v in self.terms.items()} if c != 0 else {})

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def _product(self, other: HFunction) -> HFunction:
        """Product with a scalar (slot-free) HFunction of the same zetas."""
        if other.labels and self.labels:
            raise ValueError("only one factor may carry slots")
        if other.labels:
            return other._product(self)
        if self.zetas != other.zetas or self.ntimes != other.ntimes:
            raise ValueError("declare the same zetas and times before multiplying")
        out = {}
        for (perm, words, tr1, d1, tm1), c1 in self.terms.items():
            for (_, _, tr2, d2, tm2), c2 in other.terms.items():
                tr = dict(tr1)
                for k, e in tr2:
                    tr[k] = tr.get(k, 0) + e
                key = (perm, words, tuple(sorted(tr.items())),
                       tuple(a + b for a, b in zip(d1, d2)),
                       tuple(a + b for a, b in zip(tm1, tm2)))
                out[key] = out.get(key, 0) + c1 * c2
        return HFunction(self.zetas, self.ntimes, self.labels,
                         {k: v for k, v in out.items() if v != 0})

    def extend_zetas(self, new_zetas: Sequence) -> HFunction:
        """Declare additional resolvent points (exponent zero everywhere)."""
        extra = len(new_zetas)
        out = {}
        for (perm, words, tr, dets, tm), c in self.terms.items():
            words = tuple((p, q + (0,) * extra) for p, q in words)
            out[(perm, words, tr, dets + (0,) * extra, tm)] = c
        return HFunction(self.zetas + tuple(new_zetas), self.ntimes, self.labels, out)

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"HFunction(slots={self.labels}, terms={len(self.terms)})"


def mat_derive(f: HFunction, new_slot) -> HFunction:
    """Apply d in a fresh tensor slot labelled ``new_slot``."""
    if new_slot in f.labels:
        raise SlotError(f"slot {new_slot!r} is already occupied")
    m = len(f.labels)
    nz = len(f.zetas)
    zero_q = (0,) * nz
    swap = {i: transposition(i, m, m + 1) for i in range(m)}
    out: dict = {}

    def add(key, c):
        v = out.get(key, 0) + c
        if v == 0:
            out.pop(key, None)
        else:
            out[key] = v

    for (perm, words, traces, dets, tm), c in f.terms.items():
        perm_ext = perm + (m,)
        # scalar factors put a word in the new slot only
        for idx, (k, e) in enumerate(traces):
            rest = list(traces)
            if e == 1:
                rest.pop(idx)
            else:
                rest[idx] = (k, e - 1)
            add((perm_ext, words + ((k - 1, zero_q),), tuple(rest), dets, tm), c * e * k)
        for j, e in enumerate(dets):
            if e:
                q = tuple(1 if jj == j else 0 for jj in range(nz))
                add((perm_ext, words + ((0, q),), traces, dets, tm), c * (-e) * f.zetas[j])
        for k in range(1, f.ntimes + 1):
            tm2 = tuple(a + (1 if kk == k - 1 else 0) for kk, a in enumerate(tm))
            add((perm_ext, words + ((k - 1, zero_q),), traces, dets, tm2), c * k)
        # words in occupied slots: splitting the word at the inserted e_ba
        for i, (p, q) in enumerate(words):
            new_perm = perm_product(perm_ext, swap[i])
            splits = []
            for r in range(p):
                splits.append(((r, zero_q), (p - 1 - r, q), c))
            for j in range(nz):
                for r in range(q[j]):
                    left = (p, tuple(q[jj] if jj < j else (r + 1 if jj == j else 0) for jj in range(nz)))
                    right = (0, tuple(0 if jj < j else (q[j] - r if jj == j else q[jj]) for jj in range(nz)))
                    splits.append((left, right, c * f.zetas[j]))
            for left, right, cc in splits:
                w = list(words)
                w[i] = right
                add((new_perm, tuple(w) + (left,), traces, dets, tm), cc)
    return HFunction(f.zetas, f.ntimes, f.labels + (new_slot,), out)


def derive_chain(f: HFunction, labels: Sequence) -> HFunction:
    for lab in labels:
        f = mat_derive(f, lab)
    return f


def _time_value(tm, t):
    v = 1
    for k, a in enumerate(tm):
        if a:
            tk = t[k] if k < len(t) else 0
            v = v * tk ** a
    return v


def evaluate_hfunction(f: HFunction, h: Sequence, t: Sequence = ()) -> TensorOperator:
    """Evaluate at h = diag(h) and explicit time values t (t_1, t_2, ...).

    The exponential tag is a scalar factor exp(sum t_k tr h^k) common to every
    term; it is not included (see ``tag_exponent``)."""
    N = len(h)
    m = len(f.labels)
    one = _field_one(h[0] if h else 0)
    res = _resolvent_factors(f.zetas, h)
    states = basis_states(N, m)
    dim = N ** m
    mat = np.empty((dim, dim), dtype=object)
    mat.fill(0 * one)
    trace_cache: dict = {}
    word_cache: dict = {}
    perm_rows: dict = {}

    def tr(k):
        if k not in trace_cache:
            trace_cache[k] = sum(v ** k for v in h) if k else N
        return trace_cache[k]

    def word(wd, a):
        key = (wd, a)
        if key not in word_cache:
            p, q = wd
            v = one * h[a] ** p
            for j, e in enumerate(q):
                if e:
                    v = v * _inv(res[j][a]) ** e
            word_cache[key] = v
        return word_cache[key]

    for (perm, words, traces, dets, tm), c in f.terms.items():
        scal = c * _time_value(tm, t)
        if scal == 0:
            continue
        for k, e in traces:
            scal = scal * tr(k) ** e
        for j, e in enumerate(dets):
            if e:
                d = 1
                for a in range(N):
                    d = d * res[j][a]
                scal = scal * (d ** e if e > 0 else _inv(d) ** (-e))
        if perm not in perm_rows:
            perm_rows[perm] = perm_matrix_action(perm, N) if m else np.zeros(1, dtype=np.int64)
        rows = perm_rows[perm]
        for col, s in enumerate(states):
            v = scal
            for slot in range(m):
                v = v * word(words[slot], s[slot])
            mat[rows[col], col] = mat[rows[col], col] + v
    return _finish(mat, N, f.labels)


def tag_exponent(h: Sequence, t: Sequence):
    """sum_k t_k tr h^k at diagonal h."""
    return sum(tk * sum(v ** (k + 1) for v in h) for k, tk in enumerate(t))


# ============================================================ brute force oracle

def _var(N, a, b):
    return a * N + b


def _poly_matrix(N: int, shift=0):
    """Entries of the generic matrix X - shift*1 as polynomials."""
    nv = N * N
    return [[Poly.var(nv, _var(N, a, b)) - (shift if a == b else 0) for b in range(N)]
            for a in range(N)]


def _poly_matmul(A, B):
    n = len(A)
    return [[sum((A[i][k] * B[k][j] for k in range(n)), Poly(A[0][0].nvars)) for j in range(n)]
            for i in range(n)]


def _poly_powers(N: int, kmax: int, shift=0):
    nv = N * N
    ident = [[Poly.const(nv, Fraction(1)) if a == b else Poly(nv) for b in range(N)] for a in range(N)]
    X = _poly_matrix(N, shift)
    out = [ident]
    for _ in range(kmax):
        out.append(_poly_matmul(out[-1], X))
    return out


def _poly_diff(P: Poly, v: int) -> Poly:
    out = {}
    for e, c in P.terms.items():
        if e[v]:
            e2 = list(e)
            e2[v] -= 1
            out[tuple(e2)] = c * e[v]
    return Poly(P.nvars, out)


class BrutePoly:
    """sum over keys (rows, cols, dets, tmono) of e_{rows,cols} * P(entries)
    * prod_j det(1 - zeta_j X)^{dets_j} * prod t_k^{tmono_k} * exp-tag."""

    __slots__ = ("N", "zetas", "ntimes", "labels", "terms", "shift")

    def __init__(self, N: int, zetas=(), ntimes: int = 0, labels=(), terms=None, shift=0):
        self.N = N
        self.zetas = tuple(zetas)
        self.ntimes = ntimes
        self.labels = tuple(labels)
        self.terms = {} if terms is None else terms
        self.shift = shift

    @classmethod
    def class_function(cls, N: int, power_sum_poly: Poly | None = None, zetas=(),
                       det_powers=(), ntimes: int = 0, normalized: bool = True,
                       shift=0) -> BrutePoly:
        """Same data as ``HFunction.class_function``. With ``shift`` the
        power sums are traces of (X - shift) (used for f(g - 1))."""
        nv = N * N
        zetas = tuple(zetas)
        dets = tuple(det_powers) if det_powers else (0,) * len(zetas)
        f = cls(N, zetas, ntimes, shift=shift)
        if power_sum_poly is None:
            P = Poly.const(nv, Fraction(1))
        else:
            kmax = max((len(e) for e in power_sum_poly.terms), default=0)
            pw = _poly_powers(N, kmax, shift)
            traces = [sum((pw[k][a][a] for a in range(N)), Poly(nv)) for k in range(kmax + 1)]
            P = Poly(nv)
            for e, c in power_sum_poly.terms.items():
                term = Poly.const(nv, c)
                for k, a in enumerate(e):
                    if a:
                        y = traces[k + 1] * (Fraction(1, k + 1) if normalized else 1)
                        term = term * y ** a
                P = P + term
        f.terms[((), (), dets, (0,) * ntimes)] = P
        return f

    @classmethod
    def from_poly(cls, N: int, P: Poly) -> BrutePoly:
        """A scalar polynomial in the entries, variable index a*N + b."""
        return cls(N, terms={((), (), (), ()): P})

    def __add__(self, other: BrutePoly) -> BrutePoly:
        out = dict(self.terms)
        for k, P in other.terms.items():
            out[k] = out[k] + P if k in out else P
        return BrutePoly(self.N, self.zetas, self.ntimes, self.labels, out, self.shift)

    def __repr__(self):
        return f"BrutePoly(N={self.N}, slots={self.labels}, terms={len(self.terms)})"


def brute_derive(f: BrutePoly, new_slot) -> BrutePoly:
    """d via explicit partial derivatives d/dh_ba placed at matrix position (a, b)."""
    if new_slot in f.labels:
        raise SlotError(f"slot {new_slot!r} is already occupied")
    N = f.N
    nv = N * N
    kmax_tag = f.ntimes
    pw = _poly_powers(N, max(kmax_tag - 1, 0)) if kmax_tag else None
    adj = None
    if f.zetas:
        adj = []
        for z in f.zetas:
            M = [[(Poly.const(nv, Fraction(1)) if a == b else Poly(nv)) - Poly.var(nv, _var(N, a, b), z)
                  for b in range(N)] for a in range(N)]
            cof = [[None] * N for _ in range(N)]
            for a in range(N):
                for b in range(N):
                    minor = [[M[r][c] for c in range(N) if c != a] for r in range(N) if r != b]
                    val = det(minor) if minor else Poly.const(nv, Fraction(1))
                    cof[a][b] = val * ((-1) ** (a + b))
            adj.append(cof)          # adj[j][a][b] = adjugate entry (a, b)
    out: dict = {}

    def add(key, P):
        if P.is_zero():
            return
        if key in out:
            out[key] = out[key] + P
        else:
            out[key] = P

    for (rows, cols, dets, tm), P in f.terms.items():
        for a in range(N):
            for b in range(N):
                rk, ck = rows + (a,), cols + (b,)
                add((rk, ck, dets, tm), _poly_diff(P, _var(N, b, a)))
                for j, e in enumerate(dets):
                    if e:
                        d2 = tuple(x - 1 if jj == j else x for jj, x in enumerate(dets))
                        add((rk, ck, d2, tm), P * adj[j][a][b] * (-e * f.zetas[j]))
                for k in range(1, kmax_tag + 1):
                    tm2 = tuple(x + 1 if kk == k - 1 else x for kk, x in enumerate(tm))
                    add((rk, ck, dets, tm2), P * pw[k - 1][a][b] * k)
    return BrutePoly(N, f.zetas, f.ntimes, f.labels + (new_slot,), out, f.shift)


def co_derive(f: BrutePoly, new_slot) -> BrutePoly:
    """Group co-derivative D f(g) = sum_ab e_ab d/de f(g + e e_ba g)."""
    if new_slot in f.labels:
        raise SlotError(f"slot {new_slot!r} is already occupied")
    if f.ntimes or any(any(k[2]) for k in f.terms):
        raise ValueError("co_derive needs a polynomial in the group entries")
    N = f.N
    nv = N * N
    gvars = [[Poly.var(nv, _var(N, a, b)) for b in range(N)] for a in range(N)]
    out: dict = {}
    for (rows, cols, dets, tm), P in f.terms.items():
        for a in range(N):
            for b in range(N):
                acc = Poly(nv)
                for dd in range(N):
                    dP = _poly_diff(P, _var(N, b, dd))
                    if not dP.is_zero():
                        acc = acc + gvars[a][dd] * dP
                if acc.is_zero():
                    continue
                key = (rows + (a,), cols + (b,), dets, tm)
                out[key] = out[key] + acc if key in out else acc
    return BrutePoly(N, f.zetas, f.ntimes, f.labels + (new_slot,), out, f.shift)


def evaluate_brute(f: BrutePoly, h: Sequence, t: Sequence = ()) -> TensorOperator:
    """Evaluate at X = diag(h). Entries of h may be any ring elements
    (for example truncated series)."""
    N = f.N
    if len(h) != N:
        raise ValueError("diagonal has the wrong size")
    m = len(f.labels)
    values = [0] * (N * N)
    for a in range(N):
        values[_var(N, a, a)] = h[a]
    dim = N ** m
    mat = np.empty((dim, dim), dtype=object)
    mat.fill(Fraction(0))
    res = None
    if f.zetas:
        res = _resolvent_factors(f.zetas, h)
    for (rows, cols, dets, tm), P in f.terms.items():
        v = P.evaluate(values) * _time_value(tm, t)
        for j, e in enumerate(dets):
            if e:
                d = 1
                for a in range(N):
                    d = d * res[j][a]
                v = v * (d ** e if e > 0 else _inv(d) ** (-e))
        r, c = state_index(rows, N), state_index(cols, N)
        mat[r, c] = mat[r, c] + v
    return _finish(mat, N, f.labels)


def evaluate(f, h: Sequence, t: Sequence = ()) -> TensorOperator:
    if isinstance(f, HFunction):
        return evaluate_hfunction(f, h, t)
    if isinstance(f, BrutePoly):
        return evaluate_brute(f, h, t)
    raise TypeError(f"cannot evaluate {type(f).__name__}")


# ============================================================ closed forms

def cycle_expansion(n: int, h: Sequence, cycle_factor, fixed_factor=None) -> np.ndarray:
    """sum_sigma P_sigma prod_{cycles c} F(c) as a dense array.

    ``cycle_factor(eigs)`` receives the eigenvalues on the slots of a cycle;
    one-element cycles use ``fixed_factor(slot, eig)`` when given."""
    N = len(h)
    states = basis_states(N, n)
    dim = N ** n
    mat = np.empty((dim, dim), dtype=object)
    mat.fill(Fraction(0))
    cache: dict = {}
    for sigma in permutations(range(n)):
        rows = perm_matrix_action(sigma, N)
        cyc = cycles(sigma)
        for col, s in enumerate(states):
            v = 1
            for c in cyc:
                if len(c) == 1 and fixed_factor is not None:
                    v = v * fixed_factor(c[0], h[s[c[0]]])
                    continue
                eigs = tuple(sorted(s[i] for i in c))
                key = eigs
                if key not in cache:
                    cache[key] = cycle_factor([h[a] for a in eigs])
                v = v * cache[key]
                if v == 0:
                    break
            mat[rows[col], col] = mat[rows[col], col] + v
    return mat


def w_value(z, h: Sequence):
    d = 1
    for k in h:
        d = d * (1 - z * k)
    if d == 0:
        raise PoleError(f"w has a pole at z={z}")
    return _inv(d)


def cycle_sum(alphas: Sequence[int], points: Sequence, n: int, h: Sequence) -> TensorOperator:
    """d^n prod_k w(z_k)^{alpha_k} in closed form: sum over permutations of
    P_sigma prod_cycles sum_k alpha_k prod_{i in c} z_k/(1 - h_i z_k)."""
    N = len(h)
    _resolvent_factors(points, h)

    def factor(eigs):
        total = 0
        for a, z in zip(alphas, points):
            prod_ = a
            for u in eigs:
                prod_ = prod_ * z * _inv(1 - u * z)
            total = total + prod_
        return total

    scal = 1
    for a, z in zip(alphas, points):
        wz = w_value(z, h)
        scal = scal * (wz ** a if a >= 0 else _inv(wz) ** (-a))
    return TensorOperator(N, n, cycle_expansion(n, h, factor) * scal)


def q_operator(z, zeta, n: int, h: Sequence, method: str = "derivative") -> TensorOperator:
    """Q(z, zeta) = (z - zeta)^{-1} d^n (w(z)/w(zeta)) at diagonal h.

    ``method="derivative"`` iterates ``mat_derive``; ``method="cycle"`` uses
    the closed form whose cycle factors are differences of resolvent products."""
    if z == zeta:
        raise ValueError("Q needs z != zeta")
    N = len(h)
    ratio = w_value(z, h) * _inv(w_value(zeta, h))
    if method == "derivative":
        f = derive_chain(HFunction.w_ratio((1, -1), (z, zeta)), range(1, n + 1))
        return evaluate_hfunction(f, h) * _inv(z - zeta)
    if method != "cycle":
        raise ValueError(f"unknown method {method!r}")

    def factor(eigs):
        a, b = 1, 1
        for u in eigs:
            a = a * z * _inv(1 - u * z)
            b = b * zeta * _inv(1 - u * zeta)
        return a - b

    mat = cycle_expansion(n, h, factor) if n else np.array([[Fraction(1)]], dtype=object)
    return TensorOperator(N, n, mat * (ratio * _inv(z - zeta)))


def hook_generating_derivative(z, zeta, h: Sequence) -> TensorOperator:
    """d E(z, zeta) = w(z)/w(zeta) / ((1 - z h)(1 - zeta h)) in one slot."""
    N = len(h)
    ratio = w_value(z, h) * _inv(w_value(zeta, h))
    mat = np.empty((N, N), dtype=object)
    mat.fill(Fraction(0))
    for a, k in enumerate(h):
        mat[a, a] = ratio * _inv((1 - z * k) * (1 - zeta * k))
    return TensorOperator(N, 1, mat)
