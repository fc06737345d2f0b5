import csv
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from gaudin_lab.calogero import (CMPhase, CollisionError, accelerations, ba_functions, ba_asymptotics,
                                 c0_value, char_poly, charpoly_cofactor, charpoly_faddeev, check_ba,
                                 check_lax_operator, check_tau_operator, commutator_defect, flow,
                                 jordan_example, lax, lax_derivative_defects, lax_evolution_residual,
                                 lax_from_spectrum, lax_spectrum_check, log_tau_mixed, newton_residual,
                                 power_traces, residue_full, tau_det, tau_roots, trace_identity_defects,
                                 write_invariants_csv, write_trajectory_csv, zero_dynamics)
from gaudin_lab.gaudin import GaudinModel, TimeSpec, master_t_poly
from gaudin_lab.spectrum import direct_spectrum

F = Fraction


def rq(v):
    return sp.Rational(v.numerator, v.denominator)


def sym_det_coeffs(Y):
    z = sp.Symbol("z")
    n = len(Y)
    M = sp.Matrix(n, n, lambda i, k: rq(F(Y[i, k])))
    poly = sp.Poly((z * sp.eye(n) - M).det(), z)
    return [F(int(c.p), int(c.q)) for c in poly.all_coeffs()]


rat = st.fractions(min_value=-6, max_value=6, max_denominator=7)


def phases(n):
    return st.tuples(st.lists(rat, min_size=n, max_size=n, unique=True),
                     st.lists(rat, min_size=n, max_size=n)).map(lambda v: CMPhase(tuple(v[0]), tuple(v[1])))


def test_single_particle_lax():
    d = lax(CMPhase((F(2),), (F(3, 2),)))
    assert d.Y[0, 0] == F(-3, 2) and d.T[0, 0] == 0


@given(phases(3))
def test_commutation_and_trace_identity(ph):
    d = lax(ph)
    assert all(v == 0 for v in commutator_defect(d).flat)
    assert all(v == 0 for v in trace_identity_defects(d.Y, 5))
    assert all(all(v == 0 for v in D.flat) for D in lax_derivative_defects(ph))


def test_lax_derivative_against_sympy():
    xs = sp.symbols("x1:4")
    ps = sp.symbols("p1:4")
    Y = sp.Matrix(3, 3, lambda i, k: -ps[i] if i == k else 1 / (xs[k] - xs[i]))
    vals = {xs[0]: 0, xs[1]: 1, xs[2]: sp.Rational(5, 2), ps[0]: 1, ps[1]: -2, ps[2]: sp.Rational(1, 3)}
    d = lax(CMPhase((F(0), F(1), F(5, 2)), (F(1), F(-2), F(1, 3))))
    for i in range(3):
        dY = Y.diff(xs[i]).subs(vals)
        E = np.zeros((3, 3), dtype=object)
        E[i, i] = 1
        ref = (E @ d.T - d.T @ E) / 2
        assert all(rq(F(ref[a, b])) == dY[a, b] for a in range(3) for b in range(3))


def test_char_poly_small():
    assert char_poly(CMPhase((F(1),), (F(3),))) == [1, 3]
    x1, x2, p1, p2 = F(0), F(3, 2), F(2), F(-1, 3)
    ref = [1, p1 + p2, p1 * p2 + 1 / (x1 - x2) ** 2]
    assert char_poly(CMPhase((x1, x2), (p1, p2))) == ref


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_char_poly_routes(n):
    rng = np.random.default_rng(n)
    xs = tuple(F(int(v), 3) for v in rng.choice(np.arange(-20, 20), n, replace=False))
    ps = tuple(F(int(rng.integers(-9, 9)), int(rng.integers(1, 5))) for _ in range(n))
    ph = CMPhase(xs, ps)
    J = char_poly(ph)
    Y = lax(ph).Y
    assert J == charpoly_faddeev(Y) == charpoly_cofactor(Y)
    if n <= 4:
        assert J == sym_det_coeffs(Y)
    assert newton_residual(J, power_traces(Y, n)) == 0


def test_translation_flow():
    ph = CMPhase((0.0, 1.0, 2.5), (0.3, -1.0, 2.0))
    end = flow(ph, 1, 0.01, 50)
    assert np.allclose(end.x, np.array(ph.x) - 0.5, atol=1e-13)
    assert np.allclose(end.p, ph.p, atol=1e-13)


def test_conservation_and_isospectrality():
    ph = CMPhase((0.0, 1.0), (0.5, -1.0))
    end, traj, drift = flow(ph, 2, 1e-4, 1000, record=True)
    assert drift < 1e-10
    ev0 = np.sort(np.linalg.eigvals(lax(ph).Y.astype(float)))
    ev1 = np.sort(np.linalg.eigvals(lax(end).Y.astype(float)))
    assert np.max(np.abs(ev0 - ev1)) < 1e-8


def test_isospectral_jordan_state():
    # double eigenvalue: compare characteristic polynomials, eigenvalues are ill-conditioned
    ph = CMPhase((0.0, 1.0), (-1.0, -3.0))
    end = flow(ph, 2, 1e-4, 1000)
    J0 = np.poly(lax(ph).Y.astype(float))
    J1 = np.poly(lax(end).Y.astype(float))
    assert np.max(np.abs(J0 - J1)) < 1e-10


def test_lax_equation_along_flow():
    assert lax_evolution_residual(CMPhase((0.0, 1.0, 2.5), (0.5, -1.0, 0.2))) < 1e-7


def test_collision_guard():
    # (1,1)-sector state of the default model: the pair meets near t_2 = 0.0895
    ph = CMPhase((0.0, 1.0), (1.3027756377319948, -2.302775637731995))
    with pytest.raises(CollisionError) as e:
        flow(ph, 2, 1e-3, 100)
    assert len(e.value.partial) > 0


def test_tau_at_zero_time():
    X0 = np.diag(np.array([F(0), F(1), F(5, 2)], dtype=object))
    Y0 = lax_from_spectrum([F(0), F(1), F(5, 2)], [F(1), F(2), F(3)])
    x = F(7, 3)
    assert tau_det(x, [], X0, Y0, (2, -1), exponential=False) == x * (x - 1) * (x - F(5, 2))


def test_tau_equals_master_eigenvalue_on_highest_weight_state():
    sites = (F(0), F(1), F(5, 2))
    m = GaudinModel(2, 3, (2, -1), sites)
    H = [2 + sum(1 / (sites[i] - sites[j]) for j in range(3) if j != i) for i in range(3)]
    X0 = np.diag(np.array(sites, dtype=object))
    Y0 = lax_from_spectrum(sites, H)
    for t in ({1: F(1, 2)}, {1: F(-1, 3), 2: F(2, 5), 3: F(1, 7)}):
        x = F(4, 3)
        T = master_t_poly(m, TimeSpec.of(t))(x)
        assert T.mat[0, 0] == tau_det(x, t, X0, Y0, m.twist, exponential=False)


def test_root_velocities():
    sites = [0.0, 1.0, 2.5]
    H = [-1.4, 5 / 3, 2.7333333333333334]
    X0 = np.diag(sites).astype(complex)
    Y0 = lax_from_spectrum(sites, H).astype(complex)
    h = 1e-3
    r = [np.sort(tau_roots({2: s * h}, X0, Y0).real) for s in (-2, -1, 1, 2)]
    vel = (-r[3] + 8 * r[2] - 8 * r[1] + r[0]) / (12 * h)
    assert np.max(np.abs(vel - (-2 * np.array(H)))) < 1e-8


def test_operator_level_identities():
    for N, n in ((2, 2), (2, 3), (3, 2)):
        m = GaudinModel(N, n, (2, -1, F(1, 2))[:N], (0, 1, F(5, 2))[:n])
        assert check_tau_operator(m, F(7, 3), {1: F(1, 2), 2: F(-1, 3), 3: F(2)}).residual == 0
        assert check_lax_operator(m, F(-5, 4)).residual == 0


def test_ba_trivial_case():
    X0 = np.empty((0, 0), dtype=object)
    d = ba_functions(F(2), F(5), X0, X0, (2, -1))
    assert d.psi_reduced == c0_value(F(5), (2, -1)) == F(3, 5) * F(6, 5)


def test_ba_forms_and_residues():
    sites = (F(0), F(1), F(5, 2))
    H = [2 + sum(1 / (sites[i] - sites[j]) for j in range(3) if j != i) for i in range(3)]
    X0 = np.diag(np.array(sites, dtype=object))
    Y0 = lax_from_spectrum(sites, H)
    r = check_ba(F(-2, 3), F(7, 2), X0, Y0, (2, -1))
    assert r.passed and r.residual == 0
    lim1, lim2 = ba_asymptotics(F(7, 2), X0, Y0, (2, -1))
    assert lim1 * lim2 == 1


def test_log_tau_mixed_against_sympy():
    sites = (F(0), F(1), F(5, 2))
    H = [F(1), F(-2), F(1, 3)]
    X0 = np.diag(np.array(sites, dtype=object))
    Y0 = lax_from_spectrum(sites, H)
    x, t1, t2 = sp.symbols("x t1 t2")
    Ys = sp.Matrix(3, 3, lambda i, k: rq(F(Y0[i, k])))
    Xs = sp.diag(*[rq(s) for s in sites])
    tau = (x * sp.eye(3) - Xs + t1 * sp.eye(3) + 2 * t2 * Ys).det()
    logt = sp.log(tau)
    xv = sp.Rational(-2, 3)
    for m, var in ((1, t1), (2, t2)):
        ref = sp.diff(logt, var, t1).subs({t1: 0, t2: 0, x: xv})
        got = log_tau_mixed(F(-2, 3), X0, Y0, m)
        assert rq(got) == sp.nsimplify(ref)
        assert residue_full(F(-2, 3), Y0, X0, (2, -1), m) == got


def test_lax_spectrum_cases():
    sites = (F(0), F(1), F(5, 2))
    r = lax_spectrum_check(np.diag(np.array(sites, dtype=object)), jordan_example(sites, F(2)), (2, -1), (3, 0))
    assert r.passed and r.residual == 0
    Y = jordan_example(sites, F(2))
    assert power_traces(Y, 4)[1:] == [3 * 2 ** j for j in range(1, 5)]
    m = GaudinModel(2, 2, (2, -1), (0, 1))
    for t in direct_spectrum(m, (1, 1)):
        Y0 = lax_from_spectrum([0.0, 1.0], t.H)
        assert lax_spectrum_check(np.diag([0.0, 1.0]), Y0, (2, -1), (1, 1)).passed


def test_zero_dynamics_and_csv(tmp_path):
    sites = [0.0, 2.0, 5.0]
    m = GaudinModel(2, 3, (2, -1), (0, 2, 5))
    H = direct_spectrum(m, (2, 1))[0].H
    dyn = zero_dynamics(sites, H)
    assert np.allclose(dyn.roots[0], sites)
    assert dyn.deviation < 1e-6
    assert dyn.velocity_error < 1e-8
    assert dyn.acceleration_error < 1e-6
    write_trajectory_csv(tmp_path / "traj.csv", dyn)
    write_invariants_csv(tmp_path / "inv.csv", dyn)
    rows = list(csv.reader(open(tmp_path / "traj.csv")))
    assert rows[0] == ["t", "root1_re", "root1_im", "root2_re", "root2_im", "root3_re", "root3_im"]
    assert len(rows) == 102
    inv = list(csv.reader(open(tmp_path / "inv.csv")))
    assert inv[0] == ["t", "trY1", "trY2", "trY3", "drift"]


def test_accelerations_closed_form():
    a = accelerations([0.0, 1.0])
    assert np.allclose(a, [8.0, -8.0])
