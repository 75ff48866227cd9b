import math
import warnings
from fractions import Fraction

import pytest

from unipotent.coeffs import PAdicNumber, PowerSeries, TailBound
from unipotent.connection import (TruncatedEvaluationWarning, UniversalConnection,
                                  evaluate_section, expand_form, flatness_defects, form_offset,
                                  independence_test, polylog, regular_basepoint, shuffle_check,
                                  solve_horizontal, word_tail)
from unipotent.derham import PlaceSet, parse_ratfunc
from unipotent.errors import DiskError, DivergentIntegralError, DomainError, PoleError
from unipotent.ncseries import NCPoly, is_grouplike

F = Fraction
STD = UniversalConnection.standard()


@pytest.fixture(scope="module")
def std_section():
    return solve_horizontal(STD, 3, 30)


def direct_polylog(p, n, x, terms):
    return sum(F(x) ** k / F(k) ** n for k in range(1, terms))


def test_expand_form_examples():
    assert expand_form(parse_ratfunc("1/z"), 1, 5).coeffs == (1, -1, 1, -1, 1)
    assert expand_form(parse_ratfunc("1"), F(3, 7), 3).coeffs == (1, 0, 0)
    assert expand_form(parse_ratfunc("1/(1-z)"), 0, 4).coeffs == (1, 1, 1, 1)
    with pytest.raises(PoleError):
        expand_form(parse_ratfunc("1/z"), 0, 3)


def test_exponential_section():
    conn = UniversalConnection((parse_ratfunc("1"),), 0)
    sec = solve_horizontal(conn, 3, 6)
    for k in range(4):
        expected = [F(1, math.factorial(k)) if j == k else 0 for j in range(6)]
        assert list(sec[(1,) * k].coeffs) == expected


def test_standard_coordinates(std_section):
    sec = std_section
    assert sec[()].coeffs == (1,) + (0,) * 29
    assert list(sec[(2,)].coeffs) == [0] + [F(1, k) for k in range(1, 30)]
    assert list(sec[(1, 2)].coeffs) == [0] + [F(1, k * k) for k in range(1, 30)]
    assert list(sec[(1, 1, 2)].coeffs) == [0] + [F(1, k ** 3) for k in range(1, 30)]


def test_divergent_words_recorded(std_section):
    assert (1,) in std_section.divergent and (2, 1) in std_section.divergent
    assert all(w[-1] == 2 for w in std_section.words() if w)
    with pytest.raises(DivergentIntegralError) as exc:
        std_section[(1,)]
    assert exc.value.word == (1,)
    with pytest.raises(DivergentIntegralError):
        solve_horizontal(STD, 2, 5, strict=True)


def test_flatness(std_section):
    assert flatness_defects(std_section, STD) == []
    broken = std_section.replace((1, 2), std_section[(2, 2)])
    assert flatness_defects(broken, STD)


def test_shuffle_checks(std_section):
    assert shuffle_check(std_section, (2,), (1, 2))
    assert shuffle_check(std_section, (), (1, 1, 2))
    coeffs = list(std_section[(1, 2)].coeffs)
    coeffs[7] += 1
    bad = std_section.replace((1, 2), PowerSeries(coeffs))
    res = shuffle_check(bad, (2,), (1, 2))
    assert not res
    coeffs = list(std_section[(2, 2)].coeffs)
    coeffs[7] += 1
    bad = std_section.replace((2, 2), PowerSeries(coeffs))
    res = shuffle_check(bad, (2,), (2,))
    assert not res and res.deviation_order == 7
    with pytest.raises(DomainError):
        shuffle_check(std_section, (1, 2), (2, 2))


def test_shuffle_at_regular_basepoint():
    conn = UniversalConnection.from_places(PlaceSet((0, 1)), -1)
    sec = solve_horizontal(conn, 3, 12)
    assert not sec.divergent
    assert shuffle_check(sec, (1,), (2,))
    assert shuffle_check(sec, (1,), (2, 1))


def test_from_places_rejects_pole_basepoint():
    with pytest.raises(DomainError):
        UniversalConnection.from_places(PlaceSet((0, 1)), 1)


def test_evaluate_identity_at_basepoint(std_section):
    val = evaluate_section(std_section, PAdicNumber.exact(0, 5), word_tail())
    assert val.equals(NCPoly.one(2, 3))


def test_evaluate_p7_matches_partial_sum():
    sec = solve_horizontal(STD, 2, 40)
    val = evaluate_section(sec, PAdicNumber.exact(7, 7), word_tail())
    coeff = val[(2,)]
    assert coeff.agrees(PAdicNumber.exact(direct_polylog(7, 1, 7, 200), 7))
    assert coeff.absolute_precision >= 35


def test_evaluate_is_grouplike_at_regular_basepoint():
    conn = UniversalConnection.from_places(PlaceSet((0, 1)), -1)
    sec = solve_horizontal(conn, 3, 30)
    tail = word_tail(min(form_offset(a, -1, 5) for a in conn.forms))
    for x in (-1 + 5, -1 + 10, -1 + 25):
        assert is_grouplike(evaluate_section(sec, PAdicNumber.exact(x, 5), tail))


def test_evaluate_outside_disk(std_section):
    with pytest.raises(DiskError):
        evaluate_section(std_section, PAdicNumber.exact(1, 5), word_tail())


def test_rational_evaluation_warns(std_section):
    with pytest.warns(TruncatedEvaluationWarning):
        val = evaluate_section(std_section, F(1, 10))
    assert val[(2,)] == sum(F(1, 10) ** k / k for k in range(1, 30))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert evaluate_section(std_section, 0).equals(NCPoly.one(2, 3))


def test_injectivity_proxy():
    sec = solve_horizontal(STD, 2, 30)
    a = evaluate_section(sec, PAdicNumber.exact(5, 5), word_tail())
    b = evaluate_section(sec, PAdicNumber.exact(10, 5), word_tail())
    assert not a.equals(b)


@pytest.mark.parametrize("p,n,x", [(5, 1, 5), (3, 2, 3), (7, 2, 7), (5, 3, 25)])
def test_polylog_against_summation(p, n, x):
    val = polylog(p, n, x, 40)
    assert val.agrees(PAdicNumber.exact(direct_polylog(p, n, x, 300), p))
    assert val.has_digits


def test_polylog_degree_one_is_the_log_coordinate():
    conn = UniversalConnection((parse_ratfunc("1/(1-z)"),), 0)
    sec = solve_horizontal(conn, 1, 30)
    val = evaluate_section(sec, PAdicNumber.exact(5, 5), word_tail())[(1,)]
    assert polylog(5, 1, 5, 30) == val


def test_polylog_zero_and_errors():
    assert polylog(5, 2, 0, 10).is_exact_zero
    with pytest.raises(DiskError):
        polylog(5, 2, 2, 10)
    with pytest.raises(DomainError):
        polylog(5, 0, 5, 10)


def test_independence_full_rank():
    sec = solve_horizontal(STD, 2, 40)
    res = independence_test(sec, 1, 40)
    assert res.full_rank and res.rank == res.unknowns
    assert independence_test(solve_horizontal(STD, 0, 5), 1, 4).full_rank
    with pytest.raises(DomainError):
        independence_test(sec, 3, 12)


def test_independence_detects_degenerate_relation():
    one = parse_ratfunc("1")
    sec = solve_horizontal(UniversalConnection((one, one), 0), 1, 12)
    # with constant coefficients the only relation is u_A1 - u_A2 = 0
    res = independence_test(sec, 0)
    assert not res.full_rank and len(res.nullspace) == 1
    rel = res.relations()[0]
    assert set(rel) == {(1,), (2,)}
    assert rel[(1,)] == tuple(-c for c in rel[(2,)])


def test_form_offset_and_regular_basepoint():
    assert form_offset(parse_ratfunc("1/z"), -1, 5) == 0
    assert form_offset(parse_ratfunc("5/(z-1)"), -1, 5) == 1
    assert form_offset(parse_ratfunc("1/(25*z)"), -1, 5) == -2
    with pytest.raises(DiskError):
        form_offset(parse_ratfunc("1/z"), 5, 5)
    assert regular_basepoint([0, 1], 5) == -1
    assert regular_basepoint([0, -1, 2], 5) == -2
    with pytest.raises(DomainError):
        regular_basepoint([0, 1, -1], 3)


def test_tail_bound_words():
    assert word_tail()((1, 2)) == TailBound.log_growth(2, 0)
    assert word_tail(-1)((1, 2, 2)) == TailBound.log_growth(3, -3)
