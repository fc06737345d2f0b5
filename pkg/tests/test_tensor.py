from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gaudin_lab.tensor import (GaussianRational, TensorOperator, elem, exact, fmt_scalar, perm_op,
                               perm_product, sector_dimension, sector_labels, sector_projector,
                               transposition)


def unit(N, a, b):
    m = np.zeros((N, N))
    m[a, b] = 1
    return m


def test_elem_single_site():
    assert np.array_equal(elem(1, 1, 1, 2, 1).mat.astype(float), np.diag([1.0, 0.0]))


def test_elem_matches_kron():
    N, n = 2, 3
    op = elem(2, 1, 2, N, n).mat.astype(float)
    ref = np.kron(np.kron(np.eye(2), unit(2, 0, 1)), np.eye(2))
    assert np.array_equal(op, ref)


def test_elems_on_different_sites_commute():
    N, n = 3, 2
    for a in range(1, 4):
        for b in range(1, 4):
            A, B = elem(1, a, b, N, n), elem(2, b, a, N, n)
            assert A.commutator(B).is_zero()


def test_resolution_of_identity():
    N, n = 3, 2
    for i in (1, 2):
        total = elem(i, 1, 1, N, n) + elem(i, 2, 2, N, n) + elem(i, 3, 3, N, n)
        assert total == TensorOperator.identity(N, n)


def test_identity_permutation():
    assert perm_op((0, 1, 2), 2) == TensorOperator.identity(2, 3)


def test_swap_is_sum_of_elementary_products():
    ref = sum(np.kron(unit(2, a, b), unit(2, b, a)) for a in range(2) for b in range(2))
    assert np.array_equal(perm_op(transposition(0, 1, 2), 2).mat.astype(float), ref)


def test_permutation_action_on_product_state():
    # P_sigma (v_1 (x) v_2 (x) v_3) = v_sigma(1) (x) v_sigma(2) (x) v_sigma(3)
    rng = np.random.default_rng(0)
    vs = [rng.normal(size=2) for _ in range(3)]
    sigma = (2, 0, 1)
    lhs = perm_op(sigma, 2).mat.astype(float) @ np.kron(np.kron(vs[0], vs[1]), vs[2])
    rhs = np.kron(np.kron(vs[sigma[0]], vs[sigma[1]]), vs[sigma[2]])
    assert np.allclose(lhs, rhs)


def test_composition_law_s3():
    for s in permutations(range(3)):
        for t in permutations(range(3)):
            assert perm_op(s, 2) @ perm_op(t, 2) == perm_op(perm_product(s, t), 2)


def test_sector_projectors():
    p20 = sector_projector((2, 0), 2, 2)
    assert p20.trace() == 1 and p20.mat[0, 0] == 1
    p11 = sector_projector((1, 1), 2, 2)
    assert p11.trace() == 2 and p11 @ p11 == p11
    total = sum((sector_projector(m, 2, 3) for m in sector_labels(2, 3)[1:]),
                sector_projector(sector_labels(2, 3)[0], 2, 3))
    assert total == TensorOperator.identity(2, 3)


def test_sector_dimension():
    assert sector_dimension((2, 1)) == 3
    assert sector_dimension((1, 1, 1)) == 6
    with pytest.raises(ValueError):
        sector_projector((2, 2), 2, 3)


def test_exact_scalars():
    assert exact("3/4") == Fraction(3, 4)
    assert exact(2) == Fraction(2)
    assert fmt_scalar(Fraction(-5, 3)) == "-5/3"
    g = GaussianRational(Fraction(1), Fraction(2))
    assert g * g == GaussianRational(Fraction(-3), Fraction(4))


small = st.fractions(min_value=-4, max_value=4, max_denominator=5)


@given(st.lists(small, min_size=16, max_size=16), st.lists(small, min_size=16, max_size=16))
def test_exact_matmul_matches_float(a, b):
    A = TensorOperator(2, 2, np.array(a, dtype=object).reshape(4, 4))
    B = TensorOperator(2, 2, np.array(b, dtype=object).reshape(4, 4))
    C = (A @ B).mat.astype(float)
    assert np.allclose(C, A.mat.astype(float) @ B.mat.astype(float))
