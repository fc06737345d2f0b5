from fractions import Fraction
from itertools import product

import sympy as sp
from hypothesis import given, strategies as st

from gaudin_lab.partitions import (Partition, char_shift_coeffs, character, complete_sym, conjugate,
                                   elementary_sym, frobenius, hook, hook_expansion_as_partitions,
                                   hook_generating_function, partitions_up_to, schur)

P = Partition.of

partitions = st.lists(st.integers(1, 5), max_size=4).map(lambda v: Partition(tuple(sorted(v, reverse=True))))
rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def ssyt_schur(lam, xs):
    """Brute-force monomial expansion over semistandard tableaux."""
    cells = [(i, j) for i, row in enumerate(lam.parts) for j in range(row)]
    total = 0
    for fill in product(range(len(xs)), repeat=len(cells)):
        T = dict(zip(cells, fill))
        if all(T[(i, j)] <= T[(i, j + 1)] for (i, j) in cells if (i, j + 1) in T) and \
           all(T[(i, j)] < T[(i + 1, j)] for (i, j) in cells if (i + 1, j) in T):
            m = 1
            for v in fill:
                m *= xs[v]
            total += m
    return total


def test_conjugate_examples():
    assert conjugate(P()) == P()
    assert conjugate(P(3)) == P(1, 1, 1)
    assert conjugate(P(4, 2, 1)) == P(3, 2, 1, 1)


@given(partitions)
def test_conjugate_involution(lam):
    assert conjugate(conjugate(lam)) == lam
    assert conjugate(lam).weight == lam.weight


def test_frobenius_examples():
    f = frobenius(P(1))
    assert (f.alphas, f.betas) == ((0,), (0,))
    f = frobenius(P(2, 1))
    assert (f.alphas, f.betas) == ((1,), (1,))
    f = frobenius(P(3, 1, 1))
    assert (f.alphas, f.betas) == ((2,), (2,))


@given(partitions)
def test_frobenius_round_trip(lam):
    f = frobenius(lam)
    assert len(f.alphas) == len(f.betas)
    assert f.to_partition() == lam


def test_complete_and_elementary():
    t1, t2 = Fraction(3, 2), Fraction(-2, 3)
    assert complete_sym(0, [t1, t2]) == 1
    assert complete_sym(-1, [t1, t2]) == 0
    assert complete_sym(2, [t1, t2]) == t1 ** 2 / 2 + t2
    assert elementary_sym(0, [t1]) == 1
    assert elementary_sym(1, [t1]) == t1
    assert elementary_sym(2, [t1, t2]) == t1 ** 2 / 2 - t2


def test_complete_sym_matches_series_oracle():
    z = sp.symbols("z")
    ts = [sp.Rational(2, 3), sp.Rational(-1, 2), sp.Rational(5, 4)]
    ser = sp.series(sp.exp(sum(t * z ** (k + 1) for k, t in enumerate(ts))), z, 0, 7).removeO()
    for k in range(7):
        c = ser.coeff(z, k)
        assert complete_sym(k, [Fraction(int(t.p), int(t.q)) for t in ts]) == Fraction(int(c.p), int(c.q))


def test_schur_small():
    t = [Fraction(2, 3), Fraction(-1, 5), Fraction(3, 7)]
    assert schur(P(), t) == 1
    assert schur(P(1), t) == t[0]


def test_schur_21_against_tableaux():
    xs = [Fraction(1, 2), Fraction(-3), Fraction(5, 4)]
    y = [sum(v ** k for v in xs) / k for k in range(1, 4)]
    assert schur(P(2, 1), y) == ssyt_schur(P(2, 1), xs)


def test_jacobi_trudi_forms_agree():
    t = [Fraction(1, 3), Fraction(-2), Fraction(3, 5), Fraction(1, 7), Fraction(-4, 3), Fraction(2),
         Fraction(5, 2), Fraction(-1, 9)]
    for lam in partitions_up_to(8):
        assert schur(lam, t) == schur(lam, t, dual=True)


def test_character_examples():
    p1, p2 = Fraction(3, 2), Fraction(-2, 7)
    assert character(P(1), [p1, p2]) == p1 + p2
    assert character(P(1, 1, 1), [p1, p2]) == 0
    assert character(P(2), [2, -1]) == 3


def test_character_equals_schur_and_tableaux():
    ps = [Fraction(2), Fraction(-1, 3), Fraction(5, 2)]
    for N in (1, 2, 3):
        p = ps[:N]
        y = [sum(v ** k for v in p) / k for k in range(1, 7)]
        for lam in partitions_up_to(6):
            c = character(lam, p)
            assert c == schur(lam, y)
            if lam.weight <= 4:
                assert c == ssyt_schur(lam, p)


def test_character_degenerate_eigenvalues():
    assert character(P(2, 1), [Fraction(1), Fraction(1)]) == ssyt_schur(P(2, 1), [1, 1])


def test_char_shift_examples():
    assert char_shift_coeffs(P(1), 3) == {P(1): 1, P(): -3}
    assert char_shift_coeffs(P(1, 1), 2) == {P(): 1, P(1): -1, P(1, 1): 1}


def test_char_shift_two_row_symbolic():
    # chi_(2)(g - 1) for two eigenvalues, expanded symbolically
    a, b = sp.symbols("a b")
    h2 = lambda u, v: u ** 2 + u * v + v ** 2
    lhs = sp.expand(h2(a - 1, b - 1))
    coeffs = char_shift_coeffs(P(2), 2)
    basis = {P(): 1, P(1): a + b, P(2): h2(a, b), P(1, 1): a * b}
    rhs = sp.expand(sum(sp.Rational(c) * basis[mu] for mu, c in coeffs.items()))
    assert sp.expand(lhs - rhs) == 0
    assert coeffs == {P(2): 1, P(1): -3, P(): 3}


@given(st.lists(rationals, min_size=2, max_size=3, unique=True))
def test_char_shift_identity(p):
    for lam in partitions_up_to(4):
        if len(lam) > len(p):
            continue
        lhs = character(lam, [v - 1 for v in p])
        rhs = sum(c * character(mu, p) for mu, c in char_shift_coeffs(lam, len(p)).items())
        assert lhs == rhs


def test_hook_char_shift_matches_general():
    assert hook_expansion_as_partitions(0, 0, 2) == {P(1): 1, P(): -2}
    for a in range(4):
        for b in range(4):
            lam = hook(a, b)
            if len(lam) <= 2:
                assert hook_expansion_as_partitions(a, b, 2) == char_shift_coeffs(lam, 2)


def test_hook_generating_function():
    p = [Fraction(2), Fraction(-1, 3)]
    z, zeta = Fraction(1, 7), Fraction(-1, 5)
    total = sum(character(hook(a, b), p) * z ** a * (-zeta) ** b for a in range(40) for b in range(40))
    assert abs(float(total - hook_generating_function(z, zeta, p))) < 1e-12


def test_giambelli_characters():
    p = [Fraction(3, 2), Fraction(-1), Fraction(2, 5)]
    from gaudin_lab.series import det
    for lam in partitions_up_to(8):
        if len(lam) > 3:
            continue
        f = frobenius(lam)
        M = [[character(hook(a, b), p) for b in f.betas] for a in f.alphas]
        assert character(lam, p) == (det(M) if M else 1)
