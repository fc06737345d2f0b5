"""Twisted gl(N) Gaudin model: Hamiltonians, higher T-operators built by the
matrix derivative, spin-chain and shifted-character T-operators as eta-jets,
and the master T-operator at explicit times plus Miwa points."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Sequence

import numpy as np

from .matrix_derivative import (BrutePoly, HFunction, PoleError, co_derive, cycle_expansion,
                                derive_chain, evaluate_brute, evaluate_hfunction)
from .partitions import Partition, schur_poly
from .series import Poly, Series
from .tensor import (TensorOperator, elem, embed, exact, eye, perm_op,
                     transposition, zeros)


# ---------------------------------------------------------------- data

@dataclass(frozen=True)
class GaudinModel:
    N: int
    n: int
    twist: tuple
    sites: tuple
    eta: object = None
    exact_field: bool = True

    def __post_init__(self):
        conv = exact if self.exact_field else float
        twist = tuple(conv(v) for v in self.twist)
        sites = tuple(conv(v) for v in self.sites)
        if len(twist) != self.N:
            raise ValueError(f"expected {self.N} twist values, got {len(twist)}")
        if len(sites) != self.n:
            raise ValueError(f"expected {self.n} sites, got {len(sites)}")
        if len(set(sites)) != len(sites):
            raise ValueError(f"sites must be pairwise distinct: {sites}")
        object.__setattr__(self, "twist", twist)
        object.__setattr__(self, "sites", sites)

    @property
    def dim(self) -> int:
        return self.N ** self.n

    def scalar(self, v):
        return exact(v) if self.exact_field else float(v)

    def as_float(self) -> GaudinModel:
        return GaudinModel(self.N, self.n, tuple(float(v) for v in self.twist),
                           tuple(float(v) for v in self.sites), self.eta, False)


@dataclass(frozen=True)
class TimeSpec:
    """explicit: ((k, t_k), ...); miwa: ((zeta, eps), ...) meaning a factor
    det(1 - zeta h)^{-eps} on the exponential part. The shift t + [z^{-1}] is
    the Miwa point zeta = 1/z with eps = +1."""
    explicit: tuple = ()
    miwa: tuple = ()

    @classmethod
    def of(cls, explicit=None, miwa=()) -> TimeSpec:
        if isinstance(explicit, dict):
            explicit = tuple(sorted(explicit.items()))
        elif explicit is not None:
            explicit = tuple((k + 1, v) for k, v in enumerate(explicit) if v != 0)
        return cls(explicit or (), tuple(miwa))

    def times(self) -> list:
        if not self.explicit:
            return []
        out = [0] * max(k for k, _ in self.explicit)
        for k, v in self.explicit:
            out[k - 1] = out[k - 1] + v
        return out

    def shift(self, *zs, sign: int = 1) -> TimeSpec:
        """t + sign * sum [z^{-1}]."""
        pts = tuple((1 / exact(z) if not isinstance(z, float) else 1 / z, sign) for z in zs)
        return TimeSpec(self.explicit, self.miwa + pts)

    def negated(self) -> TimeSpec:
        return TimeSpec(tuple((k, -v) for k, v in self.explicit),
                        tuple((z, -e) for z, e in self.miwa))


ZERO_TIME = TimeSpec()


class XPoly:
    """Operator-valued polynomial sum_j C_j x^j (C_j dense arrays)."""

    __slots__ = ("N", "n", "coeffs")

    def __init__(self, N: int, n: int, coeffs):
        self.N, self.n = N, n
        self.coeffs = list(coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x) -> TensorOperator:
        acc = None
        for c in reversed(self.coeffs):
            acc = c.copy() if acc is None else acc * x + c
        if acc is None:
            acc = zeros(self.N ** self.n)
        return TensorOperator(self.N, self.n, acc)

    def derivative(self, k: int = 1) -> XPoly:
        cs = self.coeffs
        for _ in range(k):
            cs = [c * j for j, c in enumerate(cs)][1:]
        if not cs:
            cs = [zeros(self.N ** self.n)]
        return XPoly(self.N, self.n, cs)

    def __add__(self, other: XPoly) -> XPoly:
        m = max(len(self.coeffs), len(other.coeffs))
        z = zeros(self.N ** self.n)
        a = self.coeffs + [z] * (m - len(self.coeffs))
        b = other.coeffs + [z] * (m - len(other.coeffs))
        return XPoly(self.N, self.n, [u + v for u, v in zip(a, b)])

    def __mul__(self, c) -> XPoly:
        return XPoly(self.N, self.n, [u * c for u in self.coeffs])

    __rmul__ = __mul__

    def __sub__(self, other):
        return self + other * -1

    def leading(self, degree: int) -> TensorOperator:
        if degree < len(self.coeffs):
            return TensorOperator(self.N, self.n, self.coeffs[degree])
        return TensorOperator.zero(self.N, self.n)


# ---------------------------------------------------------------- Hamiltonians

def _identity(model: GaudinModel) -> np.ndarray:
    return eye(model.dim, True) if model.exact_field else eye(model.dim, True) * 1.0


def _cast(model: GaudinModel, mat: np.ndarray) -> np.ndarray:
    return mat if model.exact_field else mat * 1.0


def perm_pair(model: GaudinModel, i: int, j: int) -> TensorOperator:
    """P_ij on sites i, j (1-based)."""
    return TensorOperator(model.N, model.n,
                          _cast(model, perm_op(transposition(i - 1, j - 1, model.n), model.N).mat))


def weight_op(model: GaudinModel, a: int) -> TensorOperator:
    out = TensorOperator.zero(model.N, model.n)
    for l in range(1, model.n + 1):
        out = out + elem(l, a, a, model.N, model.n)
    return TensorOperator(model.N, model.n, _cast(model, out.mat))


def twist_on_site(model: GaudinModel, i: int) -> TensorOperator:
    """h acting on site i."""
    out = TensorOperator.zero(model.N, model.n)
    for a in range(1, model.N + 1):
        out = out + elem(i, a, a, model.N, model.n) * model.twist[a - 1]
    return out


def hamiltonian(model: GaudinModel, i: int) -> TensorOperator:
    if not 1 <= i <= model.n:
        raise IndexError(f"site {i} out of range")
    H = twist_on_site(model, i)
    xi = model.sites[i - 1]
    for j in range(1, model.n + 1):
        if j != i:
            H = H + perm_pair(model, i, j) * (1 / (xi - model.sites[j - 1]))
    return H


def gaudin_h(model: GaudinModel, x) -> TensorOperator:
    """H(x) = tr h^2 / 2 + sum_i H_i / (x - x_i)."""
    half = Fraction(1, 2) if model.exact_field else 0.5
    out = TensorOperator.identity(model.N, model.n) * (half * sum(k * k for k in model.twist))
    for i in range(1, model.n + 1):
        out = out + hamiltonian(model, i) * (1 / (x - model.sites[i - 1]))
    return out


def site_poly(model: GaudinModel, x=None):
    """phi(x) = prod (x - x_i), as a value or (x=None) a coefficient list."""
    if x is not None:
        v = 1
        for s in model.sites:
            v = v * (x - s)
        return v
    return _poly_from_roots(model.sites)


def _poly_from_roots(roots) -> list:
    cs = [1]
    for r in roots:
        new = [0] * (len(cs) + 1)
        for j, c in enumerate(cs):
            new[j + 1] = new[j + 1] + c
            new[j] = new[j] - r * c
        cs = new
    return cs


# ---------------------------------------------------------------- T-operators by d-chains

def _kinds(values) -> tuple:
    # float and exact twists compare equal, so cache keys carry the types
    return tuple(type(v) for v in values)


def _derivative_stack(N: int, n: int, twist: tuple, lam: Partition) -> tuple:
    """Arrays of d_m...d_1 chi_lam(h) at the twist on m sites, m = 0..n."""
    return _derivative_stack_cached(N, n, twist, lam, _kinds(twist))


@lru_cache(maxsize=512)
def _derivative_stack_cached(N: int, n: int, twist: tuple, lam: Partition, kinds: tuple) -> tuple:
    if len(lam) > N:
        return tuple(zeros(N ** m) for m in range(n + 1))
    f = HFunction.class_function(schur_poly(lam))
    out = [evaluate_hfunction(f, twist).mat]
    for m in range(1, n + 1):
        f = derive_chain(f, [m])
        out.append(evaluate_hfunction(f, twist).mat)
    return tuple(out)


def t_operator_poly(model: GaudinModel, lam: Partition) -> XPoly:
    """T^G_lam(x) = (x - x_n + d_n)...(x - x_1 + d_1) chi_lam(h) as a polynomial in x."""
    N, n = model.N, model.n
    stack = _derivative_stack(N, n, model.twist, lam)
    dim = N ** n
    coeffs = [zeros(dim) for _ in range(n + 1)]
    for size in range(n + 1):
        for S in combinations(range(n), size):
            rest = [model.sites[i] for i in range(n) if i not in S]
            cs = _poly_from_roots(rest)
            op = embed(stack[size], N, list(S), n)
            for j, c in enumerate(cs):
                if c != 0:
                    coeffs[j] = coeffs[j] + op * c
    return XPoly(N, n, [_cast(model, c) for c in coeffs])


def t_operator(model: GaudinModel, lam: Partition, x, normalized: bool = False) -> TensorOperator:
    """T^G_lam(x); ``normalized`` divides by prod (x - x_i)."""
    T = t_operator_poly(model, lam)(x)
    if normalized:
        phi = site_poly(model, x)
        if phi == 0:
            raise ZeroDivisionError("x coincides with a site")
        return T * (1 / phi)
    return T


# ---------------------------------------------------------------- eta-jets

def _exp_jet(k, order: int) -> Series:
    cs, term = [], Fraction(1)
    for j in range(order + 1):
        cs.append(term)
        term = term * k / (j + 1)
    return Series(cs)


def _co_derivative_stack(N: int, n: int, twist: tuple, lam: Partition, shift: int, order: int):
    return _co_derivative_stack_cached(N, n, twist, lam, shift, order, _kinds(twist))


@lru_cache(maxsize=256)
def _co_derivative_stack_cached(N: int, n: int, twist: tuple, lam: Partition, shift: int, order: int,
                                kinds: tuple):
    """Coefficient arrays (per eta order) of D_m...D_1 chi_lam(g - shift) at
    g = exp(eta h), for m = 0..n."""
    f = BrutePoly.class_function(N, schur_poly(lam) if lam.weight else None, shift=shift)
    g = [_exp_jet(k, order) for k in twist]
    out = []
    for m in range(n + 1):
        if m:
            f = co_derive(f, m)
        op = evaluate_brute(f, g).mat
        per_order = []
        for j in range(order + 1):
            arr = np.empty(op.shape, dtype=object)
            for idx, v in np.ndenumerate(op):
                arr[idx] = v[j] if isinstance(v, Series) else (v if j == 0 else Fraction(0))
            per_order.append(arr)
        out.append(per_order)
    return out


def _spin_jet(model: GaudinModel, lam: Partition, x, shift: int, order: int) -> list:
    N, n = model.N, model.n
    stack = _co_derivative_stack(N, n, model.twist, lam, shift, order)
    dim = N ** n
    coeffs = [zeros(dim) for _ in range(order + 1)]
    for size in range(n + 1):
        for S in combinations(range(n), size):
            w = Fraction(1)
            for i in S:
                w = w / (x - model.sites[i])
            for j in range(order + 1 - size):
                arr = stack[size][j]
                if any(v != 0 for v in arr.flat):
                    coeffs[j + size] = coeffs[j + size] + embed(arr, N, list(S), n) * w
    return [TensorOperator(N, n, c) for c in coeffs]


def spin_t_operator(model: GaudinModel, lam: Partition, x, order: int | None = None) -> list:
    """Coefficients in eta of prod_i (1 + eta D_i/(x - x_i)) chi_lam(g), g = exp(eta h),
    with D_1 applied first."""
    if order is None:
        order = lam.weight + 2
    return _spin_jet(model, lam, x, 0, order)


def talalaev_t(model: GaudinModel, lam: Partition, x, order: int | None = None) -> list:
    """Same chain applied to chi_lam(g - 1); the eta^{|lam|} coefficient is the
    normalized Gaudin T-operator."""
    if order is None:
        order = lam.weight + 2
    return _spin_jet(model, lam, x, 1, order)


# ---------------------------------------------------------------- master T-operator

def _complete_homogeneous(m: int, values: Sequence):
    if m < 0:
        return 0
    if m == 0:
        return 1
    # h_m(u_1..u_r) by adding one variable at a time
    hs = [1] + [0] * m
    for u in values:
        for j in range(1, m + 1):
            hs[j] = hs[j] + u * hs[j - 1]
    return hs[m]


def _master_array(model: GaudinModel, tvals: Sequence, miwa: Sequence, x) -> np.ndarray:
    """Rational part of the master T-operator by the cycle expansion of
    d^n exp(tr phi(h)) with phi'(u) = sum k t_k u^{k-1} + sum eps zeta/(1 - zeta u).

    ``tvals`` and ``x`` may be numbers or polynomials."""
    h = model.twist
    for z, _ in miwa:
        for k in h:
            if 1 - z * k == 0:
                raise PoleError(f"Miwa point {z} hits the twist value {k}")

    def cyc(eigs):
        m = len(eigs)
        total = 0
        for k, tk in enumerate(tvals, start=1):
            if k >= m:
                hk = _complete_homogeneous(k - m, eigs)
                if hk != 0:
                    total = total + tk * (k * hk)
        for z, e in miwa:
            prod_ = e * z ** m
            for u in eigs:
                prod_ = prod_ / (1 - z * u)
            total = total + prod_
        return total

    def fixed(i, u):
        return x - model.sites[i] + cyc([u])

    if model.n == 0:
        mat = np.array([[Fraction(1)]], dtype=object)
    else:
        mat = cycle_expansion(model.n, h, cyc, fixed)
    scal = 1
    for z, e in miwa:
        d = 1
        for k in h:
            d = d * (1 - z * k)
        scal = scal * (d ** (-e) if e <= 0 else 1 / d ** e)
    return mat * scal


def master_exponent(model: GaudinModel, t: TimeSpec):
    """sum_k t_k tr h^k: the exponential factor omitted by ``master_t``."""
    return sum(tk * sum(k ** j for k in model.twist) for j, tk in enumerate(t.times(), start=1))


def master_t_poly(model: GaudinModel, t: TimeSpec = ZERO_TIME) -> XPoly:
    """Rational part of T^G(x, t) as a polynomial in x. The full operator is
    exp(master_exponent(model, t)) times this."""
    xv = Poly.var(1, 0)
    mat = _master_array(model, t.times(), t.miwa, xv)
    dim = model.dim
    coeffs = [zeros(dim) if model.exact_field else zeros(dim) * 1.0 for _ in range(model.n + 1)]
    for idx, v in np.ndenumerate(mat):
        if isinstance(v, Poly):
            for e, c in v.terms.items():
                coeffs[e[0]][idx] = c
        elif v != 0:
            coeffs[0][idx] = v
    return XPoly(model.N, model.n, coeffs)


def master_t(model: GaudinModel, x, t: TimeSpec = ZERO_TIME) -> TensorOperator:
    """Rational part of the master T-operator at (x, t); see ``master_exponent``."""
    mat = _master_array(model, t.times(), t.miwa, x)
    return TensorOperator(model.N, model.n, mat)


def master_t_hfunction(model: GaudinModel, t: TimeSpec = ZERO_TIME) -> XPoly:
    """The same rational part through iterated ``mat_derive`` on the class
    function exp(sum t_k tr h^k) prod det(1 - zeta h)^{-eps}."""
    N, n = model.N, model.n
    ts = t.times()
    zetas = tuple(z for z, _ in t.miwa)
    f = HFunction.class_function(None, zetas, tuple(-e for _, e in t.miwa), len(ts))
    stack = [evaluate_hfunction(f, model.twist, ts).mat]
    for m in range(1, n + 1):
        f = derive_chain(f, [m])
        stack.append(evaluate_hfunction(f, model.twist, ts).mat)
    coeffs = [zeros(N ** n) for _ in range(n + 1)]
    for size in range(n + 1):
        for S in combinations(range(n), size):
            rest = [model.sites[i] for i in range(n) if i not in S]
            op = embed(stack[size], N, list(S), n)
            for j, c in enumerate(_poly_from_roots(rest)):
                if c != 0:
                    coeffs[j] = coeffs[j] + op * c
    return XPoly(N, n, coeffs)


def master_taylor(model: GaudinModel, degree: int) -> dict:
    """Taylor coefficients in the explicit times of the full master T-operator
    (exponential included): {exponent tuple over t_1..t_degree: XPoly}."""
    D = degree
    nv = 1 + D
    xv = Poly.var(nv, 0)
    ts = [Poly.var(nv, k) for k in range(1, D + 1)]
    weights = (0,) + tuple(range(1, D + 1))
    mat = _master_array(model, ts, (), xv)
    # exp(sum t_k p_k) truncated at weighted degree D
    arg = Poly(nv)
    for k in range(1, D + 1):
        arg = arg + ts[k - 1] * sum(v ** k for v in model.twist)
    E = Poly.const(nv, Fraction(1))
    term = Poly.const(nv, Fraction(1))
    for j in range(1, D + 1):
        term = (term * arg).weighted_truncate(weights, D) / j
        E = E + term
    dim = model.dim
    out: dict = {}
    for idx, v in np.ndenumerate(mat):
        if not isinstance(v, Poly):
            v = Poly.const(nv, v)
        prod_ = (v * E).weighted_truncate(weights, D)
        for e, c in prod_.terms.items():
            key = e[1:]
            if key not in out:
                out[key] = [zeros(dim) for _ in range(model.n + 1)]
            out[key][e[0]][idx] = c
    return {k: XPoly(model.N, model.n, cs) for k, cs in out.items()}


def apply_schur_operator(lam: Partition, taylor: dict, N: int, n: int) -> XPoly:
    """s_lam(d~) at t = 0 with d~_k = (1/k) d/dt_k, given Taylor coefficients."""
    s = schur_poly(lam, max(lam.weight, 1))
    dim = N ** n
    acc = XPoly(N, n, [zeros(dim)])
    for e, c in s.terms.items():
        key = tuple(e) + (0,) * (max((len(k) for k in taylor), default=0) - len(e))
        weight = Fraction(c)
        for k, a in enumerate(e, start=1):
            weight = weight * Fraction(math.factorial(a), k ** a)
        if key in taylor:
            acc = acc + taylor[key] * weight
    return acc


def schur_coefficient_poly(model: GaudinModel, lam: Partition) -> XPoly:
    if len(lam) > model.N:
        return XPoly(model.N, model.n, [zeros(model.dim)])
    taylor = master_taylor(model, max(lam.weight, 1))
    return apply_schur_operator(lam, taylor, model.N, model.n)


def schur_coefficient(model: GaudinModel, lam: Partition, x) -> TensorOperator:
    """T^G_lam(x) recovered from the master T-operator in explicit times."""
    return schur_coefficient_poly(model, lam)(x)


def miwa_series(model: GaudinModel, x, sign: int, order: int) -> list:
    """Coefficients c_s of master_t(x, t + sign*[z^{-1}]) = sum_s c_s z^{-s}
    as operators, s = 0..order (exact power series in zeta = 1/z)."""
    zeta = Series.variable(order)
    mat = _master_array(model, [], [(zeta, sign)], x)
    out = []
    for s in range(order + 1):
        arr = np.empty(mat.shape, dtype=object)
        for idx, v in np.ndenumerate(mat):
            arr[idx] = v[s] if isinstance(v, Series) else (v if s == 0 else Fraction(0))
        out.append(TensorOperator(model.N, model.n, arr))
    return out
