from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apery.dsl import (
    NotARecurrenceError,
    ParseError,
    RecOperator,
    apply_operator,
    dominant_root,
    leading_poly_in_N,
    normalize_operator,
    parse_laurent,
    parse_operator,
    quadratic_radical,
)
from apery.exact import LaurentPoly, PolyQ, poly_eval
from apery.sequences import run_recurrence

from conftest import LN2_OPE, LN43_OPE, SQRT2_OPE, ZETA2_OPE, ZETA3_OPE

ROUND_TRIP_CORPUS = [
    ZETA3_OPE,
    ZETA2_OPE,
    LN2_OPE,
    LN43_OPE,
    SQRT2_OPE,
    "(n+2)*N^2-(10*n+15)*N+(n+1)",
    "(37*n^3+271*n^2+627*n+441)*N^3-(703*n^3+4446*n^2+9078*n+5871)*N^2"
    "+(999*n^3+5319*n^2+9208*n+5216)*N+(37*n^3+160*n^2+209*n+86)",
    "(n+1)*N-n",
    "(n^2+2*n+1)*N+n^2",
    "N-2",
    "N-1",
    "3*N^2-7*N+2",
    "(2*n+1)*N-(4*n+2)",
    "-(n+2)*N^2+(14*n+21)*N-n-1",
    "n*N^2-N+n^3",
    "(n+5)^2*N^3-N+1",
    "N^4-n",
    "(n-1)*(n-2)*N^2+(n-3)*N",
    "N*(n+1)-n*N^2",
    "(4*n^2+6*n+2)*N-(27*n^2+27*n+6)",
    "7*N^2+(n^2-n)*N-5",
    "(n+2)*N^2-(8*n+12)*N+(4*n+4)",
]


def test_parse_sqrt2_operator():
    ope = parse_operator("N^2-2*N-1")
    assert ope.order == 2
    assert [c.coeffs for c in ope.coeffs] == [(Fraction(-1),), (Fraction(-2),), (Fraction(1),)]


def test_parse_zeta3_operator():
    ope = parse_operator(ZETA3_OPE)
    n = PolyQ((0, 1))
    assert ope.order == 2
    assert ope.coeffs[2] == (n + PolyQ((2,))) ** 3


def test_parse_rejects_no_shift():
    with pytest.raises(NotARecurrenceError):
        parse_operator("n+1")


def test_parse_error_has_position():
    with pytest.raises(ParseError) as info:
        parse_operator("N^2-2*N-")
    assert info.value.position == 8
    with pytest.raises(ParseError):
        parse_operator("N^2-x")


def test_commuting_symbols_normalized():
    assert parse_operator("N*(n+1)") == parse_operator("(n+1)*N")


@pytest.mark.parametrize("text", ROUND_TRIP_CORPUS)
def test_print_parse_round_trip(text):
    ope = parse_operator(text)
    again = parse_operator(str(ope))
    assert again.coefficient_lists() == ope.coefficient_lists()


def test_corpus_size():
    assert len(ROUND_TRIP_CORPUS) >= 20


def test_leading_poly_examples():
    assert leading_poly_in_N(parse_operator(ZETA3_OPE)) == PolyQ((1, -34, 1), "N")
    assert leading_poly_in_N(parse_operator(LN2_OPE)) == PolyQ((1, -6, 1), "N")
    assert leading_poly_in_N(parse_operator(SQRT2_OPE)) == PolyQ((-1, -2, 1), "N")


@pytest.mark.parametrize(
    "coeffs,expected",
    [((1, -34, 1), (17, 12)), ((1, -6, 1), (3, 2)), ((-1, -2, 1), (1, 1))],
)
def test_dominant_root_examples(coeffs, expected):
    a, b = expected
    with mpmath.workdps(60):
        root = dominant_root(PolyQ(coeffs, "N"), 50)
        assert abs(root.value - (a + b * mpmath.sqrt(2))) < mpmath.mpf(10) ** -45


def test_dominant_root_rejects_zero():
    with pytest.raises(ValueError):
        dominant_root(PolyQ((), "N"))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-9, 9), min_size=2, max_size=6).filter(lambda c: c[-1] != 0 and c[0] != 0))
def test_dominant_root_vieta_and_residual(coeffs):
    p = PolyQ(tuple(coeffs), "N")
    res = dominant_root(p, 40)
    with mpmath.workdps(60):
        prod = mpmath.fprod(abs(r) for r in res.all_roots)
        assert abs(prod - abs(mpmath.mpf(coeffs[0]) / coeffs[-1])) < mpmath.mpf(10) ** -20 * max(1, prod)
        for r in res.all_roots:
            val = mpmath.polyval([mpmath.mpf(c) for c in reversed(coeffs)], r)
            assert abs(val) < mpmath.mpf(10) ** -20
        assert abs(res.value - max(abs(r) for r in res.all_roots)) < mpmath.mpf(10) ** -35


def test_quadratic_radical_forms():
    assert quadratic_radical(PolyQ((1, -14, 1), "N")) == "7+4*sqrt(3)"
    assert quadratic_radical(PolyQ((1, -34, 1), "N")) == "17+12*sqrt(2)"
    assert quadratic_radical(PolyQ((-1, -2, 1), "N")) == "1+sqrt(2)"


@pytest.mark.parametrize(
    "text,terms",
    [
        ("(1+x)*(1+2*x)/x", {-1: 1, 0: 3, 1: 2}),
        ("((1+x)*(1+x)*(1+x))/x^2", {-2: 1, -1: 3, 0: 3, 1: 1}),
        ("x^0", {0: 1}),
    ],
)
def test_parse_laurent(text, terms):
    assert parse_laurent(text) == LaurentPoly(terms)


def test_parse_laurent_rejects_non_monomial_division():
    with pytest.raises(ParseError):
        parse_laurent("1/(1+x)")
    with pytest.raises(ParseError):
        parse_laurent("y+1")


def test_apply_operator_examples():
    sqrt2 = parse_operator(SQRT2_OPE)
    assert apply_operator(sqrt2, [0, 1, 2, 5], 0) == 0
    assert apply_operator(sqrt2, [0, 1, 3], 0) == 1
    assert apply_operator(parse_operator(ZETA3_OPE), [1, 5, 73], 0) == 0
    with pytest.raises(IndexError):
        apply_operator(sqrt2, [0, 1], 0)


def test_normalization_makes_leading_positive_and_primitive():
    ope = normalize_operator(parse_operator("-(2*n+4)*N^2+(28*n+42)*N-(2*n+2)"))
    assert str(ope) == "(n+2)*N^2-(14*n+21)*N+(n+1)"
    half = RecOperator((PolyQ((Fraction(1, 2),)), PolyQ((Fraction(-3, 4),))))
    assert str(normalize_operator(half)) == "3*N-2"


@pytest.mark.parametrize("text", ROUND_TRIP_CORPUS[:6])
def test_apply_vanishes_on_generated_sequences(text):
    ope = parse_operator(text)
    lead = ope.coeffs[-1]
    if any(poly_eval(lead, n) == 0 for n in range(40)):
        pytest.skip("singular leading coefficient")
    seq = run_recurrence(ope, list(range(1, ope.order + 1)), 40)
    assert all(apply_operator(ope, seq, n) == 0 for n in range(0, 41 - ope.order))
