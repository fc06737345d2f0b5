"""Rational Calogero-Moser system: Lax pair, integrals of motion, hierarchy
flows, the determinant tau-function and Baker-Akhiezer functions, plus
cross-checks against the Gaudin master T-operator."""
from __future__ import annotations

import csv
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np
from scipy.integrate._ivp import dop853_coefficients as dop853
from scipy.optimize import linear_sum_assignment

from .gaudin import GaudinModel, TimeSpec, hamiltonian, master_t_poly, weight_op
from .kp_verifier import CheckResult, _result
from .series import Series, det
from .tensor import TensorOperator

MIN_SEPARATION = 1e-6


class CollisionError(RuntimeError):
    """Raised when two particles (or tracked roots) come closer than the guard."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial or []


@dataclass(frozen=True)
class CMPhase:
    x: tuple
    p: tuple

    def __post_init__(self):
        if len(self.x) != len(self.p):
            raise ValueError("positions and momenta differ in length")
        _check_distinct(self.x)

    @property
    def n(self) -> int:
        return len(self.x)


@dataclass
class LaxData:
    Y: np.ndarray
    T: np.ndarray
    X: np.ndarray


def _check_distinct(xs, guard=0):
    for a, b in combinations(range(len(xs)), 2):
        if abs(xs[a] - xs[b]) <= guard:
            raise ValueError(f"coincident positions x{a + 1}, x{b + 1}")


def _zeros(n, like):
    """Zero matrix over the field of the sample values: rationals, reals or complex."""
    if all(isinstance(v, (int, Fraction)) for v in like):
        out = np.empty((n, n), dtype=object)
        out.fill(Fraction(0))
        return out
    if any(isinstance(v, (complex, np.complexfloating)) for v in like):
        return np.zeros((n, n), dtype=complex)
    return np.zeros((n, n))


def _eye(n, like):
    out = _zeros(n, like)
    for i in range(n):
        out[i, i] = 1
    return out


def _mpow(Y, k):
    out = _eye(len(Y), list(Y.flat))
    for _ in range(k):
        out = out @ Y
    return out


def _trace(A):
    return sum(A[i, i] for i in range(len(A)))


# ---------------------------------------------------------------- Lax pair

def lax_matrix(xs: Sequence, diag: Sequence) -> np.ndarray:
    """Y with the given diagonal and off-diagonal entries 1/(x_k - x_i)."""
    _check_distinct(xs)
    n = len(xs)
    Y = _zeros(n, list(xs) + list(diag))
    for i in range(n):
        Y[i, i] = diag[i]
        for k in range(n):
            if k != i:
                Y[i, k] = 1 / (xs[k] - xs[i])
    return Y


def lax(phase: CMPhase) -> LaxData:
    xs, ps = phase.x, phase.p
    n = phase.n
    Y = lax_matrix(xs, [-v for v in ps])
    T = _zeros(n, list(xs))
    X = _zeros(n, list(xs))
    for i in range(n):
        X[i, i] = xs[i]
        for k in range(n):
            if k != i:
                d = 2 / (xs[i] - xs[k]) ** 2
                T[i, k] = d
                T[i, i] = T[i, i] - d
    return LaxData(Y, T, X)


def lax_from_spectrum(sites: Sequence, H: Sequence) -> np.ndarray:
    """Y_0 built from quantum data: diagonal H_i (momenta p_i = -H_i)."""
    return lax_matrix(sites, H)


def commutator_defect(data: LaxData) -> np.ndarray:
    """[X, Y] - (1 - 1 1^t); zero for every phase."""
    n = len(data.Y)
    ones = _zeros(n, list(data.Y.flat))
    ones[:, :] = 1
    return data.X @ data.Y - data.Y @ data.X - (_eye(n, list(data.Y.flat)) - ones)


def trace_identity_defects(Y: np.ndarray, kmax: int = 5) -> list:
    """1^t Y^k 1 - tr Y^k for k = 0..kmax."""
    out = []
    P = _eye(len(Y), list(Y.flat))
    for _ in range(kmax + 1):
        out.append(P.sum() - _trace(P))
        P = P @ Y
    return out


def lax_derivative_defects(phase: CMPhase) -> list:
    """Exact residuals of dY/dp_i = -E_ii and dY/dx_i = [E_ii, T]/2, with the
    derivatives taken entrywise from the closed form of Y."""
    data = lax(phase)
    xs = phase.x
    n = phase.n
    out = []
    for i in range(n):
        E = _zeros(n, list(xs))
        E[i, i] = 1
        dYdp = _zeros(n, list(xs))
        dYdp[i, i] = -1
        out.append(dYdp + E)
        dYdx = _zeros(n, list(xs))
        for k in range(n):
            if k != i:
                # Y_ik = 1/(x_k - x_i), Y_ki = 1/(x_i - x_k)
                dYdx[i, k] = 1 / (xs[k] - xs[i]) ** 2
                dYdx[k, i] = -1 / (xs[i] - xs[k]) ** 2
        out.append(dYdx - (E @ data.T - data.T @ E) / 2)
    return out


# ---------------------------------------------------------------- integrals

def matchings(items: Sequence) -> list:
    """All (not necessarily perfect) matchings of a set, as lists of pairs."""
    items = list(items)
    if len(items) < 2:
        return [[]]
    first, rest = items[0], items[1:]
    out = matchings(rest)
    for j, other in enumerate(rest):
        for m in matchings(rest[:j] + rest[j + 1:]):
            out.append([(first, other)] + m)
    return out


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, u in enumerate(a):
        for j, v in enumerate(b):
            out[i + j] = out[i + j] + u * v
    return out


def matching_poly(xs: Sequence, roots_shift: Sequence) -> list:
    """sum over matchings M of prod_{ij in M} (x_i - x_j)^{-2} prod_{l free} (z + s_l),
    as descending coefficients [J_0, ..., J_n]."""
    n = len(xs)
    total = [0] * (n + 1)
    for M in matchings(range(n)):
        w = 1
        covered = set()
        for i, j in M:
            w = w / (xs[i] - xs[j]) ** 2
            covered |= {i, j}
        poly = [1]
        for l in range(n):
            if l not in covered:
                poly = _poly_mul(poly, [1, roots_shift[l]])
        off = n - (len(poly) - 1)
        for k, c in enumerate(poly):
            total[k + off] = total[k + off] + w * c
    return total


def char_poly(phase: CMPhase) -> list:
    """Descending coefficients J_0..J_n of det(z - Y) by the matching sum."""
    return matching_poly(phase.x, phase.p)


def charpoly_faddeev(Y: np.ndarray) -> list:
    """Descending coefficients of det(z - Y) by Faddeev-LeVerrier (exact on rationals)."""
    n = len(Y)
    like = list(Y.flat)
    I = _eye(n, like)
    M = _zeros(n, like)
    cs = [1]
    for k in range(1, n + 1):
        M = Y @ M + I * cs[-1]
        c = -_trace(Y @ M)
        cs.append(c / k if not isinstance(c, (int, Fraction)) else Fraction(c) / k)
    return cs


def charpoly_cofactor(Y: np.ndarray) -> list:
    """Descending coefficients of det(z - Y) by cofactor expansion over polynomials in z."""
    n = len(Y)
    order = n
    rows = [[Series([-Y[i, k], 1 if i == k else 0], order) for k in range(n)] for i in range(n)]
    d = det(rows)
    if not isinstance(d, Series):
        d = Series([d], order)
    return [d[n - k] for k in range(n + 1)]


def power_traces(Y: np.ndarray, kmax: int) -> list:
    """[tr Y^0, ..., tr Y^kmax]."""
    out, P = [], _eye(len(Y), list(Y.flat))
    for _ in range(kmax + 1):
        out.append(_trace(P))
        P = P @ Y
    return out


def newton_residual(J: Sequence, H: Sequence):
    """sum_k J_{n-k} H_k with H_0 = n (a Cayley-Hamilton trace)."""
    n = len(J) - 1
    return sum(J[n - k] * H[k] for k in range(n + 1))


# ---------------------------------------------------------------- flows

def _vector_field(k: int, x: np.ndarray, p: np.ndarray):
    """(dx/dt_k, dp/dt_k) for the Hamiltonian tr Y^k."""
    n = len(x)
    Y = np.empty((n, n))
    T = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i == j:
                Y[i, i] = -p[i]
            else:
                Y[i, j] = 1 / (x[j] - x[i])
                T[i, j] = 2 / (x[i] - x[j]) ** 2
                T[i, i] -= T[i, j]
    Yk1 = np.linalg.matrix_power(Y, k - 1)
    dx = -k * np.diag(Yk1).copy()
    # dp_i = -k tr(Y^{k-1} [E_ii, T]) / 2 = -k (T Y^{k-1} - Y^{k-1} T)_ii / 2
    dp = -k * np.diag(T @ Yk1 - Yk1 @ T) / 2
    return dx, dp


def _rk8_step(k, x, p, h):
    A, B = dop853.A, dop853.B
    stages = len(B)
    y = np.concatenate([x, p])
    n = len(x)
    K = np.zeros((stages, 2 * n))
    for s in range(stages):
        ys = y + h * (A[s, :s] @ K[:s]) if s else y
        dx, dp = _vector_field(k, ys[:n], ys[n:])
        K[s] = np.concatenate([dx, dp])
    y = y + h * (B @ K)
    return y[:n], y[n:]


def _min_sep(x):
    if len(x) < 2:
        return np.inf
    return min(abs(a - b) for a, b in combinations(x, 2))


def _integrate(k, x, p, span, steps, guard):
    h = span / steps
    traj = [(0.0, x.copy(), p.copy())]
    order = np.argsort(x)
    for s in range(1, steps + 1):
        x, p = _rk8_step(k, x, p, h)
        # a change of ordering means the step jumped across a collision
        if _min_sep(x) < guard or not np.all(np.diff(x[order]) > 0):
            raise CollisionError(f"minimum separation below {guard} at t={s * h:.6g}",
                                 partial=traj)
        traj.append((s * h, x.copy(), p.copy()))
    return traj


def _invariants(x, p, count):
    Y = lax_matrix(list(x), [-v for v in p]).astype(float)
    return np.array(power_traces(Y, count)[1:], dtype=float)


def flow(phase: CMPhase, k: int, dt: float, steps: int, drift_tol: float = 1e-10,
         guard: float = MIN_SEPARATION, max_halvings: int = 8, record: bool = False):
    """Integrate the t_k flow over a window of length dt * steps.

    Fixed-step eighth-order Runge-Kutta; the step is halved until the drift of
    tr Y^j (j = 1..n) over the window stays below drift_tol. Returns the final
    phase, or with ``record`` the tuple (phase, trajectory, drift) where the
    trajectory is sampled on the requested grid."""
    x = np.array(phase.x, dtype=float)
    p = np.array(phase.p, dtype=float)
    span = dt * steps
    inv0 = _invariants(x, p, phase.n)
    sub = 1
    for _ in range(max_halvings + 1):
        traj = _integrate(k, x, p, span, steps * sub, guard) if steps else [(0.0, x, p)]
        drift = max((float(np.max(np.abs(_invariants(xx, pp, phase.n) - inv0))) for _, xx, pp in traj),
                    default=0.0)
        if drift < drift_tol or span == 0:
            break
        sub *= 2
    else:
        raise RuntimeError(f"conserved-quantity drift {drift:.3g} above {drift_tol} after halving")
    sampled = traj[::sub]
    end = CMPhase(tuple(sampled[-1][1]), tuple(sampled[-1][2]))
    if record:
        return end, sampled, drift
    return end


def accelerations(xs: Sequence) -> np.ndarray:
    """Closed-form t_2 accelerations -8 sum_j (x_i - x_j)^{-3}."""
    n = len(xs)
    return np.array([-8 * sum(1 / (xs[i] - xs[j]) ** 3 for j in range(n) if j != i)
                     for i in range(n)])


def lax_evolution_residual(phase: CMPhase, h: float = 1e-3) -> float:
    """max |dY/dt_2 - [T, Y]| with dY/dt_2 from a fourth-order central stencil along the flow."""
    Ys = {j: lax(flow(phase, 2, j * h, 1)).Y.astype(float) for j in (-2, -1, 1, 2)}
    dY = (-Ys[2] + 8 * Ys[1] - 8 * Ys[-1] + Ys[-2]) / (12 * h)
    d = lax(CMPhase(tuple(float(v) for v in phase.x), tuple(float(v) for v in phase.p)))
    Y, T = d.Y.astype(float), d.T.astype(float)
    return float(np.max(np.abs(dY - (T @ Y - Y @ T))))


# ---------------------------------------------------------------- tau-function

def _times_list(t):
    if isinstance(t, TimeSpec):
        if t.miwa:
            raise ValueError("tau_det takes explicit times only")
        return t.times()
    if isinstance(t, dict):
        return TimeSpec.of(t).times()
    return list(t)


def tau_matrix(x, t, X0: np.ndarray, Y0: np.ndarray) -> np.ndarray:
    ts = _times_list(t)
    n = len(X0)
    M = X0 * -1 + _eye(n, list(Y0.flat)) * x
    P = _eye(n, list(Y0.flat))
    for k, tk in enumerate(ts, start=1):
        if tk != 0:
            M = M + P * (k * tk)
        P = P @ Y0
    return M


def tau_det(x, t, X0: np.ndarray, Y0: np.ndarray, twist: Sequence, exponential: bool = True):
    """exp(sum t_k tr h^k) det(x - X0 + sum k t_k Y0^{k-1}).

    ``exponential=False`` returns the determinant alone, which is exact on
    rational data and matches the rational part returned by ``master_t``."""
    ts = _times_list(t)
    d = det([list(r) for r in tau_matrix(x, ts, X0, Y0)])
    if not exponential:
        return d
    e = sum(tk * sum(complex(kv) ** k for kv in twist) for k, tk in enumerate(ts, start=1))
    return complex(np.exp(e)) * complex(d)


def tau_roots(t, X0: np.ndarray, Y0: np.ndarray) -> np.ndarray:
    """Roots in x of the tau determinant: eigenvalues of X0 - sum k t_k Y0^{k-1}."""
    M = tau_matrix(0, t, np.asarray(X0, dtype=complex), np.asarray(Y0, dtype=complex))
    return np.linalg.eigvals(-np.asarray(M, dtype=complex))


def operator_lax(model: GaudinModel) -> list:
    """Y_0 with the Gaudin Hamiltonians on the diagonal, as a matrix of
    mutually commuting operators."""
    one = TensorOperator.identity(model.N, model.n, model.exact_field)
    xs = model.sites
    return [[hamiltonian(model, i + 1) if i == k else one * (1 / (xs[k] - xs[i]))
             for k in range(model.n)] for i in range(model.n)]


def _op_matmul(A, B):
    n = len(A)
    return [[sum((A[i][j] @ B[j][k] for j in range(1, n)), A[i][0] @ B[0][k])
             for k in range(n)] for i in range(n)]


def operator_tau(model: GaudinModel, x, t) -> TensorOperator:
    """det(x - X0 + sum k t_k Y0^{k-1}) with operator-valued Y0."""
    ts = _times_list(t)
    n = model.n
    one = TensorOperator.identity(model.N, model.n, model.exact_field)
    if n == 0:
        return one
    Y = operator_lax(model)
    M = [[one * ((x - model.sites[i]) if i == k else 0) for k in range(n)] for i in range(n)]
    P = [[one if i == k else one * 0 for k in range(n)] for i in range(n)]
    for k, tk in enumerate(ts, start=1):
        if tk != 0:
            M = [[M[i][j] + P[i][j] * (k * tk) for j in range(n)] for i in range(n)]
        if k < len(ts):
            P = _op_matmul(P, Y)
    return det(M)


def check_tau_operator(model: GaudinModel, x, t) -> CheckResult:
    """The determinant formula with operator-valued Y0 equals the rational part
    of the master T-operator, hence agrees with it on every eigenstate."""
    start = time.perf_counter()
    ts = TimeSpec.of(t) if isinstance(t, dict) else (t if isinstance(t, TimeSpec) else TimeSpec.of(list(t)))
    r = operator_tau(model, x, ts) - master_t_poly(model, ts)(x)
    return _result("tau_operator", {"x": x, "t": ts}, [r], model.exact_field, start)


def check_lax_operator(model: GaudinModel, z) -> CheckResult:
    """det(z - Y0) with operator entries equals prod_a (z - k_a)^{M_a}."""
    start = time.perf_counter()
    one = TensorOperator.identity(model.N, model.n, model.exact_field)
    Y = operator_lax(model)
    n = model.n
    zY = [[(one * z if i == k else one * 0) - Y[i][k] for k in range(n)] for i in range(n)]
    lhs = det(zY) if n else one
    rhs = one
    for a, k in enumerate(model.twist, start=1):
        M = weight_op(model, a)
        # (z - k)^{M_a} is diagonal in the standard basis
        diag = M.mat.diagonal()
        arr = rhs.mat.copy()
        for idx, m in enumerate(diag):
            arr[idx, :] = arr[idx, :] * (z - k) ** int(m)
        rhs = TensorOperator(model.N, model.n, arr)
    return _result("lax_operator", {"z": z}, [lhs - rhs], model.exact_field, start)


# ---------------------------------------------------------------- Baker-Akhiezer functions

@dataclass
class BAData:
    """Stationary BA data at one (x, z). psi and psi_star carry the exponentials
    e^{+xz} and e^{-xz} separately: psi = exp(x z) * psi_reduced."""
    c: list
    c_star: list
    c0: object
    psi_reduced: object
    psi_star_reduced: object
    psi_det: object
    psi_star_det: object
    u: object

    def psi(self, x, z):
        return complex(np.exp(complex(x) * complex(z))) * complex(self.psi_reduced)

    def psi_star(self, x, z):
        return complex(np.exp(-complex(x) * complex(z))) * complex(self.psi_star_reduced)


def _solve(A: np.ndarray, b: list) -> list:
    """Gaussian elimination over the scalar field of A (exact for rationals)."""
    n = len(A)
    M = [list(A[i]) + [b[i]] for i in range(n)]
    for c in range(n):
        piv = max(range(c, n), key=lambda r: abs(M[r][c]))
        if M[piv][c] == 0:
            raise ZeroDivisionError("singular matrix (spectral pole)")
        M[c], M[piv] = M[piv], M[c]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c] / M[c][c]
                M[r] = [a - f * bb for a, bb in zip(M[r], M[c])]
    return [M[i][n] / M[i][i] for i in range(n)]


def _inverse(A: np.ndarray) -> np.ndarray:
    n = len(A)
    out = _zeros(n, list(A.flat))
    for j in range(n):
        e = [1 if i == j else 0 for i in range(n)]
        col = _solve(A, e)
        for i in range(n):
            out[i, j] = col[i]
    return out


def c0_value(z, twist: Sequence):
    """z^{-N} det(z - h) = prod (1 - k_a / z)."""
    v = 1
    for k in twist:
        v = v * (1 - k / z)
    return v


def ba_functions(x, z, X0: np.ndarray, Y0: np.ndarray, twist: Sequence) -> BAData:
    n = len(X0)
    xs = [X0[i, i] for i in range(n)]
    if any(x == v for v in xs):
        raise ZeroDivisionError("x hits a pole position")
    if z == 0 or any(z == k for k in twist):
        raise ZeroDivisionError("z hits a twist value")
    c0 = c0_value(z, twist)
    like = list(Y0.flat) + [x, z]
    I = _eye(n, like)
    zY = I * z - Y0
    ones = [1] * n
    r = _solve(zY, ones) if n else []
    rt = _solve(zY.T.copy(), ones) if n else []
    c = [-c0 * v for v in r]
    cs = [v / c0 for v in rt]
    xm = [x - v for v in xs]
    psi = c0 * (1 - sum(r[i] / xm[i] for i in range(n)))
    psis = (1 + sum(rt[i] / xm[i] for i in range(n))) / c0
    # determinant forms
    R = _inverse(zY) if n else zY
    xX = I * x - X0
    dx = det([list(row) for row in xX]) if n else 1
    psi_det = c0 * (det([list(row) for row in xX - R]) if n else 1) / dx
    psis_det = (det([list(row) for row in xX + R]) if n else 1) / (c0 * dx)
    u = -sum(1 / v ** 2 for v in xm)
    return BAData(c, cs, c0, psi, psis, psi_det, psis_det, u)


def det_identity_defects(x, z, X0: np.ndarray, Y0: np.ndarray) -> list:
    """The two determinant identities linking the determinant and vector forms."""
    n = len(X0)
    like = list(Y0.flat) + [x, z]
    I = _eye(n, like)
    xX, zY = I * x - X0, I * z - Y0
    ones = [1] * n
    a = _solve(zY, ones)
    lhs1 = det([list(r) for r in xX @ zY - I])
    rhs1 = det([list(r) for r in xX]) * det([list(r) for r in zY]) * (
        1 - sum(a[i] / xX[i, i] for i in range(n)))
    lhs2 = det([list(r) for r in zY @ xX + I])
    b = [1 / xX[i, i] for i in range(n)]
    sol = _solve(zY, b)
    rhs2 = det([list(r) for r in xX]) * det([list(r) for r in zY]) * (1 + sum(sol))
    return [lhs1 - rhs1, lhs2 - rhs2]


def ba_asymptotics(z, X0: np.ndarray, Y0: np.ndarray, twist: Sequence):
    """Limits x -> oo of e^{-xz} psi and e^{xz} psi*: ratios of leading
    coefficients of monic characteristic polynomials in x, times c0^{+-1}."""
    n = len(X0)
    c0 = c0_value(z, twist)
    if n == 0:
        return c0, 1 / c0
    like = list(Y0.flat) + [z]
    R = _inverse(_eye(n, like) * z - Y0)
    num1 = charpoly_faddeev(X0 + R)
    num2 = charpoly_faddeev(X0 - R)
    den = charpoly_faddeev(X0 * 1)
    return c0 * num1[0] / den[0], num2[0] / (c0 * den[0])


def _resolvent_series(Y: np.ndarray, order: int, left: bool) -> list:
    """Per component, the series in w = 1/z of (1 - wY)^{-1} 1 (or 1^t (1 - wY)^{-1})."""
    n = len(Y)
    v = [Fraction(1) if isinstance(Y.flat[0], (int, Fraction)) else 1.0] * n
    cols = [[] for _ in range(n)]
    M = Y.T if left else Y
    for _ in range(order + 1):
        for i in range(n):
            cols[i].append(v[i])
        v = [sum(M[i, j] * v[j] for j in range(n)) for i in range(n)]
    return [Series(cs, order) for cs in cols]


def residue_pole_terms(Y: np.ndarray, twist: Sequence, m: int) -> list:
    """res_oo(c_i c_i^* z^m dz) per i, by series extraction in w = 1/z.

    c_i = -c0 w (1 - wY)^{-1} 1, c_i^* = c0^{-1} w (1 - wY^t)^{-1} 1; the residue
    is the coefficient of z^{-1}, i.e. of w^{m+1}."""
    order = m + 2
    right = _resolvent_series(Y, order, left=False)
    leftv = _resolvent_series(Y, order, left=True)
    w = Series.variable(order)
    out = []
    for i in range(len(Y)):
        prod_ = (w * right[i]) * (w * leftv[i]) * -1
        out.append(prod_[m + 1])
    return out


def residue_full(x, Y: np.ndarray, X0: np.ndarray, twist: Sequence, m: int):
    """res_oo(psi psi^* z^m dz) at a point x, with psi psi^* expanded in w = 1/z."""
    order = m + 2
    n = len(Y)
    w = Series.variable(order)
    c0 = Series([1], order)
    for k in twist:
        c0 = c0 * (1 - w * k)
    right = _resolvent_series(Y, order, left=False)
    leftv = _resolvent_series(Y, order, left=True)
    a = c0 + sum((w * right[i] * c0 * (-1 / (x - X0[i, i])) for i in range(n)), Series([0], order))
    b = c0.inverse() + sum((w * leftv[i] * c0.inverse() * (1 / (x - X0[i, i])) for i in range(n)),
                           Series([0], order))
    return (a * b)[m + 1]


def log_tau_mixed(x, X0: np.ndarray, Y0: np.ndarray, m: int):
    """d_{t_m} d_{t_1} log det(x - X0 + sum k t_k Y0^{k-1}) at t = 0:
    -m sum_i (Y0^{m-1})_ii / (x - x_i)^2."""
    P = _mpow(Y0, m - 1)
    return -m * sum(P[i, i] / (x - X0[i, i]) ** 2 for i in range(len(X0)))


def check_ba(x, z, X0, Y0, twist, tol: float = 1e-9, exact: bool = True) -> CheckResult:
    """Determinant forms equal the vector forms, the large-x limits, and the
    residue relation for m = 1, 2."""
    start = time.perf_counter()
    d = ba_functions(x, z, X0, Y0, twist)
    c0 = c0_value(z, twist)
    lim1, lim2 = ba_asymptotics(z, X0, Y0, twist)
    vals = [d.psi_reduced - d.psi_det, d.psi_star_reduced - d.psi_star_det,
            lim1 - c0, lim2 - 1 / c0]
    vals += det_identity_defects(x, z, X0, Y0)
    for m in (1, 2):
        vals.append(residue_full(x, Y0, X0, twist, m) - log_tau_mixed(x, X0, Y0, m))
        P = _mpow(Y0, m - 1)
        for i, r in enumerate(residue_pole_terms(Y0, twist, m)):
            vals.append(r + m * P[i, i])
    return _scalar_result("ba", {"x": x, "z": z}, vals, exact, tol, start)


def _scalar_result(name, params, vals, exact, tol, start) -> CheckResult:
    from .kp_verifier import _fmt
    if exact:
        res = sum(1 for v in vals if v != 0)
        ok = res == 0
    else:
        res = max((abs(complex(v)) for v in vals), default=0.0)
        ok = res <= tol
    return CheckResult(name, {k: _fmt(v) for k, v in params.items()}, res, ok, exact,
                       time.perf_counter() - start)


# ---------------------------------------------------------------- Lax spectrum

def lax_spectrum_check(X0, Y0, twist: Sequence, sector: Sequence, tol: float = 1e-9) -> CheckResult:
    """det(z - Y0) = prod_a (z - k_a)^{m_a}, exactly on rational data."""
    start = time.perf_counter()
    exact = all(isinstance(v, (int, Fraction)) for v in Y0.flat)
    J = charpoly_faddeev(Y0)
    target = [1]
    for k, m in zip(twist, sector):
        for _ in range(m):
            target = _poly_mul(target, [1, -k])
    vals = [a - b for a, b in zip(J, target)]
    return _scalar_result("lax_spectrum", {"sector": list(sector)}, vals, exact, tol, start)


def jordan_example(sites: Sequence, k, ) -> np.ndarray:
    """Y0 for the state with every site in the same basis vector: H_i = k + sum_{j != i} 1/(x_i - x_j)."""
    n = len(sites)
    H = [k + sum(1 / (sites[i] - sites[j]) for j in range(n) if j != i) for i in range(n)]
    return lax_from_spectrum(sites, H)


# ---------------------------------------------------------------- zero dynamics

def track_roots(times: Sequence, X0, Y0, guard: float = MIN_SEPARATION) -> list:
    """Roots of the tau determinant in t_2, continued by nearest-neighbor
    assignment. Starts ordered like the sites."""
    X0f = np.asarray(X0, dtype=complex)
    Y0f = np.asarray(Y0, dtype=complex)
    prev = np.diag(X0f).copy()
    rows = []
    for t2 in times:
        r = tau_roots({2: t2}, X0f, Y0f)
        if len(r) > 1 and _min_sep(r) < guard:
            raise CollisionError(f"roots within {guard} at t2={t2:.6g}", partial=rows)
        cost = np.abs(prev[:, None] - r[None, :])
        _, col = linear_sum_assignment(cost)
        prev = r[col]
        rows.append((float(t2), prev.copy()))
    return rows


@dataclass
class Dynamics:
    times: list
    roots: list
    flow_positions: list
    invariants: list
    deviation: float
    velocity_error: float
    acceleration_error: float
    drift: float


def zero_dynamics(sites: Sequence, H: Sequence, t_end: float = 0.1, steps: int = 100,
                  guard: float = MIN_SEPARATION) -> Dynamics:
    """Compare the roots of tau_det over t_2 with the integrated t_2 flow from
    x = sites, p = -H."""
    X0 = np.diag(np.array(sites, dtype=complex))
    Y0 = np.asarray(lax_from_spectrum([float(s) for s in sites], [complex(h) for h in H]), dtype=complex)
    dt = t_end / steps if steps else 0.0
    times = [dt * s for s in range(steps + 1)]
    rows = track_roots(times, X0, Y0, guard)
    n = len(sites)
    if any(abs(complex(h).imag) > 1e-12 for h in H):
        raise ValueError("flow integration needs real Hamiltonian eigenvalues")
    phase = CMPhase(tuple(float(s) for s in sites), tuple(-complex(h).real for h in H))
    if steps:
        try:
            _, traj, drift = flow(phase, 2, dt, steps, guard=guard, record=True)
        except CollisionError as e:
            # real particles meet where two tau roots turn into a complex pair
            last = e.partial[-1][0] if e.partial else -1.0
            raise CollisionError(str(e), partial=[r for r in rows if r[0] <= last + 1e-15]) from None
    else:
        traj, drift = [(0.0, np.array(phase.x), np.array(phase.p))], 0.0
    dev = max(float(np.max(np.abs(r - np.asarray(xx)))) for (_, r), (_, xx, _) in zip(rows, traj))
    # derivatives of the roots at t_2 = 0 by central differences of the tau roots
    h = 1e-3
    ordered = lambda t2: track_roots([0.0, t2], X0, Y0, guard)[-1][1]
    r2, r1, r0, rm1, rm2 = ordered(2 * h), ordered(h), np.diag(X0), ordered(-h), ordered(-2 * h)
    # fourth-order central stencils
    vel = (-r2 + 8 * r1 - 8 * rm1 + rm2) / (12 * h)
    acc = (-r2 + 16 * r1 - 30 * r0 + 16 * rm1 - rm2) / (12 * h ** 2)
    vel_err = float(np.max(np.abs(vel - (-2 * np.array([complex(v) for v in H])))))
    acc_err = float(np.max(np.abs(acc - accelerations([float(s) for s in sites])))) if n > 1 else 0.0
    invs = [(t, _invariants(xx, pp, n)) for t, xx, pp in traj]
    return Dynamics(times, [r for _, r in rows], [xx for _, xx, _ in traj], invs, dev,
                    vel_err, acc_err, drift)


def write_trajectory_csv(path, dyn: Dynamics):
    n = len(dyn.roots[0]) if dyn.roots else 0
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        header = ["t"]
        for i in range(1, n + 1):
            header += [f"root{i}_re", f"root{i}_im"]
        w.writerow(header)
        for t, r in zip(dyn.times, dyn.roots):
            row = [f"{t:.12g}"]
            for v in r:
                row += [f"{v.real + 0.0:.15g}", f"{v.imag + 0.0:.15g}"]
            w.writerow(row)


def write_invariants_csv(path, dyn: Dynamics):
    n = len(dyn.invariants[0][1]) if dyn.invariants else 0
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["t"] + [f"trY{k}" for k in range(1, n + 1)] + ["drift"])
        base = dyn.invariants[0][1] if dyn.invariants else None
        for t, inv in dyn.invariants:
            w.writerow([f"{t:.12g}"] + [f"{v:.15g}" for v in inv]
                       + [f"{float(np.max(np.abs(inv - base))) if n else 0.0:.3e}"])
