"""Gaudin spectrum two ways: simultaneous diagonalization of the Hamiltonians
in a weight sector, and the classical Calogero-Moser polynomial system for
the same eigenvalues; plus the bipartite matching between the two."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import permutations
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .calogero import lax_from_spectrum, matchings, power_traces
from .gaudin import GaudinModel, hamiltonian, weight_op
from .tensor import sector_dimension, sector_states

GAP_TOL = 1e-8
DEDUP_TOL = 1e-8
NEWTON_TOL = 1e-12
IMAG_FLAG = 1e-8


@dataclass
class SpectrumTuple:
    sector: tuple
    H: tuple
    source: str
    residual: float = 0.0

    def to_json(self) -> dict:
        vals = []
        for v in self.H:
            v = complex(v)
            vals.append([_r(v.real), _r(v.imag)] if abs(v.imag) > IMAG_FLAG else _r(v.real))
        return {"H": vals, "residual": float(f"{self.residual:.3e}")}


def _r(v: float) -> float:
    return float(f"{v:.12g}")


def check_sector(model: GaudinModel, sector: Sequence) -> tuple:
    m = tuple(int(v) for v in sector)
    if len(m) != model.N or any(v < 0 for v in m) or sum(m) != model.n:
        raise ValueError(f"sector {m} is not a weight of N={model.N}, n={model.n} (entries must sum to n)")
    return m


# ---------------------------------------------------------------- direct route

def sector_blocks(model: GaudinModel, sector: Sequence) -> list:
    """Float matrices of H_1..H_n restricted to the sector's basis states."""
    idx = sector_states(sector, model.N, model.n)
    out = []
    for i in range(1, model.n + 1):
        H = hamiltonian(model, i).to_float().mat
        out.append(np.asarray(H[np.ix_(idx, idx)], dtype=complex))
    return out


def _hermitian(mats) -> bool:
    return all(np.allclose(A, A.conj().T, atol=1e-13) for A in mats)


def joint_diagonalize(mats: Sequence, sweeps: int = 100, tol: float = 1e-14) -> np.ndarray:
    """Jacobi rotations minimizing the off-diagonal mass of a commuting
    family of real symmetric matrices; returns the orthogonal eigenbasis."""
    A = [np.real(M).astype(float).copy() for M in mats]
    d = len(A[0])
    V = np.eye(d)
    for _ in range(sweeps):
        rotated = False
        for p in range(d - 1):
            for q in range(p + 1, d):
                # closed-form angle for the 2x2 joint problem
                g = np.array([[M[p, p] - M[q, q], 2 * M[p, q]] for M in A])
                G = g.T @ g
                w, vecs = np.linalg.eigh(G)
                x, y = vecs[:, -1]
                if x < 0:
                    x, y = -x, -y
                r = np.hypot(x, y)
                if r == 0:
                    continue
                c = np.sqrt((x + r) / (2 * r))
                s = y / np.sqrt(2 * r * (x + r)) if x + r > 0 else 1.0
                if abs(s) < tol:
                    continue
                rotated = True
                R = np.eye(d)
                R[p, p], R[q, q], R[p, q], R[q, p] = c, c, -s, s
                A = [R.T @ M @ R for M in A]
                V = V @ R
        if not rotated:
            break
    return V


def direct_spectrum(model: GaudinModel, sector: Sequence, seed: int = 0,
                    max_redraws: int = 5) -> list:
    """Joint eigenvalue tuples of the Hamiltonians on one sector."""
    sector = check_sector(model, sector)
    mats = sector_blocks(model, sector)
    rng = np.random.default_rng(seed)
    d = len(mats[0])
    herm = _hermitian(mats)
    V = None
    for _ in range(max_redraws + 1):
        c = rng.normal(size=len(mats))
        C = sum(ci * M for ci, M in zip(c, mats))
        w, vecs = np.linalg.eigh(C) if herm else np.linalg.eig(C)
        ws = np.sort_complex(np.asarray(w, dtype=complex))
        if d < 2 or np.min(np.abs(np.diff(ws))) >= GAP_TOL:
            V = vecs
            break
    if V is None:
        V = joint_diagonalize(mats) if herm else vecs
    out = []
    for j in range(d):
        v = V[:, j]
        v = v / np.linalg.norm(v)
        Hs, res = [], 0.0
        for M in mats:
            Mv = M @ v
            lam = np.vdot(v, Mv) if herm else (np.vdot(v, Mv) / np.vdot(v, v))
            Hs.append(lam.real if herm else lam)
            res = max(res, float(np.linalg.norm(Mv - lam * v)))
        out.append(SpectrumTuple(sector, tuple(Hs), "direct", res))
    out.sort(key=_tuple_key)
    return out


def direct_eigenvectors(model: GaudinModel, sector: Sequence, seed: int = 0):
    """(tuples, full-space eigenvectors) for float cross-checks."""
    sector = check_sector(model, sector)
    idx = sector_states(sector, model.N, model.n)
    mats = sector_blocks(model, sector)
    rng = np.random.default_rng(seed)
    C = sum(ci * M for ci, M in zip(rng.normal(size=len(mats)), mats))
    w, V = np.linalg.eigh(C) if _hermitian(mats) else np.linalg.eig(C)
    vecs = []
    for j in range(len(idx)):
        full = np.zeros(model.dim, dtype=complex)
        full[idx] = V[:, j] / np.linalg.norm(V[:, j])
        vecs.append(full)
    tuples = [tuple(np.vdot(V[:, j], M @ V[:, j]).real for M in mats) for j in range(len(idx))]
    return tuples, vecs


def _tuple_key(t: SpectrumTuple):
    return tuple((round(complex(v).real, 9), round(complex(v).imag, 9)) for v in t.H)


# ---------------------------------------------------------------- classical route

def _target(model: GaudinModel, sector) -> np.ndarray:
    poly = np.array([1.0 + 0j])
    for k, m in zip(model.twist, sector):
        for _ in range(m):
            poly = np.convolve(poly, [1.0, -complex(k)])
    return poly


class _System:
    """F(H): z-coefficients of sum_M prod x_ij^{-2} prod_{l free} (z - H_l)
    minus those of prod (z - k_a)^{m_a}."""

    def __init__(self, n: int, terms, target):
        self.n, self.terms, self.target = n, terms, target

    @classmethod
    def for_sector(cls, model: GaudinModel, sector) -> _System:
        n = model.n
        xs = [complex(v) for v in model.sites]
        terms = []
        for M in matchings(range(n)):
            w = 1.0 + 0j
            covered = set()
            for i, j in M:
                w /= (xs[i] - xs[j]) ** 2
                covered |= {i, j}
            terms.append((w, [l for l in range(n) if l not in covered]))
        return cls(n, terms, _target(model, sector))

    @classmethod
    def start(cls, roots) -> _System:
        """prod (z - H_l) = prod (z - r_l): same leading terms, solved by permutations of r."""
        target = np.array([1.0 + 0j])
        for r in roots:
            target = np.convolve(target, [1.0, -r])
        return cls(len(roots), [(1.0 + 0j, list(range(len(roots))))], target)

    def _poly(self, H, skip=None):
        n = self.n
        total = np.zeros(n + 1, dtype=complex)
        for w, free in self.terms:
            if skip is not None and skip not in free:
                continue
            poly = np.array([w])
            for l in free:
                if l != skip:
                    poly = np.convolve(poly, [1.0, -H[l]])
            total[n + 1 - len(poly):] += poly
        return total

    def residual(self, H) -> np.ndarray:
        return (self._poly(H) - self.target)[1:]

    def jacobian(self, H) -> np.ndarray:
        cols = [-self._poly(H, skip=l)[1:] for l in range(self.n)]
        return np.array(cols).T


def _newton(system: _System, H0, max_iter: int = 100, tol: float = NEWTON_TOL):
    H = np.array(H0, dtype=complex)
    F = system.residual(H)
    f = np.max(np.abs(F))
    for _ in range(max_iter):
        if f < tol:
            return H, f, True
        J = system.jacobian(H)
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(J, -F, rcond=None)[0]
        lam = 1.0
        while lam > 1e-6:
            Hn = H + lam * step
            Fn = system.residual(Hn)
            fn = np.max(np.abs(Fn))
            if fn < f or fn < tol:
                break
            lam /= 2
        H, F, f = Hn, Fn, fn
    return H, f, f < tol


def _track(system: _System, start: _System, gamma: complex, H0, min_step: float = 1e-9):
    """Follow (1 - s) gamma G + s F = 0 from s = 0 to 1 with an Euler predictor
    and Newton corrector. Returns the endpoint or None when the path is lost."""
    def F(H, s):
        return (1 - s) * gamma * start.residual(H) + s * system.residual(H)

    def J(H, s):
        return (1 - s) * gamma * start.jacobian(H) + s * system.jacobian(H)

    H = np.array(H0, dtype=complex)
    s, ds = 0.0, 0.02
    while s < 1:
        ds = min(ds, 1 - s)
        try:
            dH = np.linalg.solve(J(H, s), -(system.residual(H) - gamma * start.residual(H)))
        except np.linalg.LinAlgError:
            return None
        Hn, sn, ok = H + ds * dH, s + ds, False
        for _ in range(6):
            try:
                step = np.linalg.solve(J(Hn, sn), -F(Hn, sn))
            except np.linalg.LinAlgError:
                break
            Hn = Hn + step
            if np.max(np.abs(step)) < 1e-10 * max(1.0, np.max(np.abs(Hn))):
                ok = True
                break
        if ok:
            H, s, ds = Hn, sn, min(ds * 1.5, 0.1)
        else:
            ds /= 2
            if ds < min_step:
                return None
    return H


def homotopy_solutions(system: _System, rng: random.Random) -> list:
    """Endpoints of all n! paths of a total-degree homotopy with a random gamma."""
    n = system.n
    roots = [complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(n)]
    gamma = complex(np.exp(2j * np.pi * rng.random()))
    start = _System.start(roots)
    out = []
    for perm in permutations(roots):
        H = _track(system, start, gamma, perm)
        if H is not None:
            out.append(H)
    return out


def _assignments(model: GaudinModel, sector) -> list:
    labels = [a for a, m in enumerate(sector) for _ in range(m)]
    return sorted(set(permutations(labels)))


def jordan_defect(model: GaudinModel, sector, H) -> float:
    """|prod_{a: m_a > 0} (Y0 - k_a) 1|: zero when 1 has no Jordan-chain
    component, which selects the genuine eigenvalue tuples."""
    Y = np.asarray(lax_from_spectrum([complex(s) for s in model.sites], list(H)), dtype=complex)
    v = np.ones(model.n, dtype=complex)
    for k, m in zip(model.twist, sector):
        if m > 0:
            v = Y @ v - complex(k) * v
    scale = max(1.0, float(np.max(np.abs(Y)))) ** sum(1 for m in sector if m > 0)
    return float(np.max(np.abs(v))) / scale


@dataclass
class ClassicalReport:
    solutions: list
    rejected: list = field(default_factory=list)
    failed_seeds: int = 0
    anomalies: list = field(default_factory=list)


def classical_solve(model: GaudinModel, sector: Sequence, seed: int = 0, random_starts: int = 24,
                    filter_tol: float = 1e-7, homotopy: bool = True) -> ClassicalReport:
    sector = check_sector(model, sector)
    system = _System.for_sector(model, sector)
    ks = [complex(k) for k in model.twist]
    seeds = [[ks[a] for a in asg] for asg in _assignments(model, sector)]
    rng = random.Random(seed)
    spread = max([abs(k) for k in ks] + [1.0]) + model.n
    for _ in range(random_starts):
        seeds.append([complex(rng.uniform(-spread, spread), rng.uniform(-spread, spread))
                      for _ in range(model.n)])
    found, failed = [], 0

    def keep(H, f):
        if all(np.max(np.abs(H - G)) > DEDUP_TOL for G, _ in found):
            found.append((H, f))

    for s in seeds:
        H, f, ok = _newton(system, s)
        if ok:
            keep(H, f)
        else:
            failed += 1
    # multistart can miss solutions from n = 4 on; every path of the
    # total-degree homotopy ends on a solution, so they complete the set
    if homotopy:
        for H in homotopy_solutions(system, rng):
            H, f, ok = _newton(system, H)
            if ok:
                keep(H, f)
            else:
                failed += 1
    report = ClassicalReport([], failed_seeds=failed)
    for H, f in found:
        t = SpectrumTuple(sector, tuple(H), "classical", float(f))
        if jordan_defect(model, sector, H) < filter_tol:
            report.solutions.append(t)
        else:
            report.rejected.append(t)
    report.solutions.sort(key=_tuple_key)
    report.rejected.sort(key=_tuple_key)
    dim = sector_dimension(sector)
    if len(report.solutions) != dim:
        report.anomalies.append(f"{len(report.solutions)} solutions for sector dimension {dim}")
    for t in report.solutions:
        if any(abs(complex(v).imag) > IMAG_FLAG for v in t.H):
            report.anomalies.append(f"complex solution {t.H}")
    return report


def classical_spectrum(model: GaudinModel, sector: Sequence, seed: int = 0) -> list:
    """Eigenvalue tuples from the classical polynomial system."""
    return classical_solve(model, sector, seed).solutions


def moment_defects(model: GaudinModel, sector: Sequence, H: Sequence, jmax: int | None = None) -> list:
    """tr Y0^j - sum_a m_a k_a^j for j = 1..jmax (default n)."""
    jmax = model.n if jmax is None else jmax
    Y = np.asarray(lax_from_spectrum([complex(s) for s in model.sites], [complex(h) for h in H]),
                   dtype=complex)
    tr = power_traces(Y, jmax)
    return [tr[j] - sum(m * complex(k) ** j for k, m in zip(model.twist, sector))
            for j in range(1, jmax + 1)]


def simultaneous_defect(model: GaudinModel, sector: Sequence, seed: int = 0) -> float:
    """Max residual of the direct eigenvectors against every H_i and M_a."""
    tuples, vecs = direct_eigenvectors(model, sector, seed)
    ops = [hamiltonian(model, i).to_float().mat.astype(complex) for i in range(1, model.n + 1)]
    ops += [weight_op(model, a).to_float().mat.astype(complex) for a in range(1, model.N + 1)]
    worst = 0.0
    for v in vecs:
        for A in ops:
            Av = A @ v
            lam = np.vdot(v, Av)
            worst = max(worst, float(np.linalg.norm(Av - lam * v)))
    return worst


# ---------------------------------------------------------------- matching

@dataclass
class MatchReport:
    pairs: list
    max_deviation: float
    unmatched_direct: list
    unmatched_classical: list
    passed: bool

    def to_json(self) -> dict:
        return {"pairs": [list(p) for p in self.pairs],
                "max_deviation": float(f"{self.max_deviation:.3e}"),
                "unmatched_direct": self.unmatched_direct,
                "unmatched_classical": self.unmatched_classical,
                "passed": self.passed}


def match_spectra(direct: Sequence, classical: Sequence, tol: float = 1e-9) -> MatchReport:
    """Bottleneck bipartite matching under the max-coordinate distance."""
    if not direct or not classical:
        raise ValueError("both spectra must be nonempty")
    D = np.array([[max(abs(complex(a) - complex(b)) for a, b in zip(u.H, v.H)) for v in classical]
                  for u in direct])
    size = min(D.shape)
    levels = np.unique(D)
    lo, hi = 0, len(levels) - 1
    # smallest threshold admitting a matching of full size
    while lo < hi:
        mid = (lo + hi) // 2
        r, c = linear_sum_assignment((D > levels[mid]).astype(float))
        if np.sum((D > levels[mid])[r, c]) == 0 and len(r) == size:
            hi = mid
        else:
            lo = mid + 1
    thr = levels[lo]
    cost = np.where(D <= thr, D, 1e300)
    r, c = linear_sum_assignment(cost)
    pairs = sorted(zip(r.tolist(), c.tolist()))
    dev = float(max(D[i, j] for i, j in pairs))
    un_d = sorted(set(range(len(direct))) - set(r.tolist()))
    un_c = sorted(set(range(len(classical))) - set(c.tolist()))
    ok = not un_d and not un_c and dev <= tol
    return MatchReport(pairs, dev, un_d, un_c, ok)
