from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

import gaudin_lab.gaudin as gaudin
from gaudin_lab.gaudin import GaudinModel, TimeSpec
from gaudin_lab.kp_verifier import (CHECK_FAMILIES, check_cbr, check_cbr_leading, check_closed_forms,
                                    check_commutativity, check_exchange, check_fay, check_fay_exchange,
                                    check_fay_general, check_giambelli, check_limit, check_masterdet,
                                    check_plucker, check_rank1, check_rank1_generating, run_suite)
from gaudin_lab.partitions import Partition

F = Fraction
P = Partition.of
M22 = GaudinModel(2, 2, (2, -1), (0, 1))
T0 = TimeSpec()
TK = TimeSpec.of({1: F(1, 3), 2: F(-1, 2)})


def ok(r):
    return r.passed and r.residual == 0


def test_giambelli_examples():
    assert ok(check_giambelli(M22, P(3), F(5, 3)))
    assert ok(check_giambelli(M22, P(2, 2), F(5, 3)))
    assert ok(check_giambelli(GaudinModel(2, 0, (2, -1), ()), P(3, 2), F(1)))


def test_plucker():
    assert ok(check_plucker(M22, 2, 1, 1, 0, F(-2, 7)))


def test_cbr_forms():
    x = F(7, 4)
    assert ok(check_cbr(M22, P(3), x))
    assert ok(check_cbr(M22, P(2, 1), x))
    assert ok(check_cbr(M22, P(2, 1), x, dual=True))
    assert ok(check_cbr(M22, P(2, 1), x, normalization="polynomial"))
    assert ok(check_cbr_leading(M22, P(2, 1)))


def test_fay_at_zero_time():
    res = check_fay(M22, F(2, 3), T0, F(3), F(-5), F(7, 2), F(-4, 3))
    assert [r.name for r in res] == ["hir20", "hir2", "hir3"]
    assert all(ok(r) for r in res)


def test_fay_flipped_and_degenerate():
    assert all(ok(r) for r in check_fay(M22, F(2, 3), TK, F(3), F(-5), F(7, 2), F(-4, 3), flip=True))
    # z2 = z3: the three-term form degenerates consistently
    r = check_fay(M22, F(2, 3), TK, F(3), F(-5), F(7, 2), F(7, 2), forms=("hir2",))[0]
    assert ok(r)


def test_fay_exchange_degeneration():
    for n in (1, 2, 3):
        assert ok(check_fay_exchange(2, n, (F(2), F(-1)), F(3), F(-5), F(7, 2), F(-4, 3)))


def test_fay_general_one_background_point():
    res = check_fay_general(M22, F(1, 3), TK, [F(6)], [F(3), F(-5), F(7, 2), F(-4, 3)])
    assert [r.name for r in res] == ["fay_gen0", "fay_gen", "diff_fay_gen"]
    assert all(ok(r) for r in res)


def test_fay_general_empty_background_matches_fay():
    res = check_fay_general(M22, F(1, 3), TK, [], [F(3), F(-5), F(7, 2), F(-4, 3)])
    assert all(ok(r) for r in res)


def test_masterdet_orders():
    for zs in ([F(3)], [F(3), F(-5)], [F(3), F(-5), F(7, 2)]):
        assert ok(check_masterdet(M22, F(-1, 2), TK, zs))


def test_rank1():
    r = check_rank1(GaudinModel(2, 1, (2, -1), (0,)), F(3, 2), range(3), range(3))
    assert ok(r) and r.params["nonzero_entries"] > 0
    assert ok(check_rank1_generating((F(2), F(-1)), [(F(1, 3), F(-1, 5)), (F(1, 7), F(2, 9))]))


def test_closed_forms_and_limit():
    assert ok(check_closed_forms(M22, F(9, 4)))
    for lam in (P(1), P(2), P(1, 1)):
        assert ok(check_limit(M22, lam, F(9, 4)))


def test_closed_forms_negative_control(monkeypatch):
    real = gaudin.gaudin_h
    monkeypatch.setattr(gaudin, "gaudin_h", lambda m, x: real(m, x) * 2)
    assert not check_closed_forms(M22, F(9, 4)).passed


rat = st.fractions(min_value=-3, max_value=3, max_denominator=6)


@given(st.lists(rat.filter(lambda v: v not in (0, F(1, 2), -1)), min_size=4, max_size=4, unique=True))
def test_exchange_property(p):
    assert ok(check_exchange(2, (F(2), F(-1)), *p))


@given(st.tuples(rat, rat).filter(lambda v: v[0] != v[1] and not set(v) & {0, 1}))
def test_commutativity_property(xs):
    assert ok(check_commutativity(M22, P(2, 1), P(1, 1), *xs))


def test_run_suite_default_model():
    res = run_suite(M22, seed=1)
    assert res and all(r.passed for r in res)
    assert {r.name.split("_flipped")[0] for r in res} >= {"giambelli", "cbr", "hir2", "rank1"}


def test_run_suite_float_mode():
    res = run_suite(M22, seed=1, float_mode=True)
    assert all(r.passed for r in res)
    assert max(r.residual for r in res if not r.exact) < 1e-12


def test_run_suite_filter_and_determinism():
    a = run_suite(M22, seed=4, checks=["giambelli"])
    b = run_suite(M22, seed=4, checks=["giambelli"])
    assert {r.name for r in a} == {"giambelli"}
    assert [r.to_json() for r in a] == [r.to_json() for r in b]
    with pytest.raises(ValueError):
        run_suite(M22, checks=["nope"])
    assert "hir1" in CHECK_FAMILIES
