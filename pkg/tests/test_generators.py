import math
from fractions import Fraction

import mpmath
import pytest

from apery.dsl import ParseError, parse_laurent
from apery.exact import LaurentPoly
from apery.generators import (
    ONE,
    BasisConstant,
    SpanError,
    ValueInSpan,
    arctan_integral_sequence,
    binomial,
    binomial_sum_sequence,
    constant_term_sequence,
    log_integral_sequence,
    parse_summand,
    pq_from_values,
)


def _q(text, K):
    return binomial_sum_sequence(parse_summand(text), K)


def test_sum_examples():
    assert _q("binomial(n,k)*binomial(n+k,k)", 2)[2] == 13
    assert _q("binomial(n,k)^2*binomial(n+k,k)^2", 1)[1] == 5
    assert _q("binomial(n,k)*binomial(n+k,k)*3^k", 1)[1] == 7


def test_sum_against_direct_comb():
    seq = _q("C(n,k)^2*C(n+k,k)^2", 30)
    for n in range(31):
        assert seq[n] == sum(math.comb(n, k) ** 2 * math.comb(n + k, k) ** 2 for k in range(n + 1))


def test_binomial_conventions():
    assert binomial(3, -1) == 0
    assert binomial(3, 4) == 0
    assert binomial(-1, 3) == -1
    assert binomial(-2, 2) == 3


def test_summand_parse_errors():
    with pytest.raises(ParseError):
        parse_summand("binomial(n/2,k)")
    with pytest.raises(ParseError):
        parse_summand("binomial(n,k")
    with pytest.raises(ParseError):
        parse_summand("")


def test_rational_geometric_base():
    seq = _q("binomial(n,k)*(1/2)^k", 4)
    assert seq == [Fraction(3, 2) ** n for n in range(5)]


def test_ct_examples():
    assert constant_term_sequence(parse_laurent("(1+x)*(2+3*x)/x"), 1)[1] == 5
    assert constant_term_sequence(parse_laurent("(1+x)^3/x^2"), 1)[1] == 3
    assert constant_term_sequence(LaurentPoly.one(), 5) == [1] * 6


@pytest.mark.parametrize("a", [1, 2, 3])
def test_ct_equals_binomial_sum(a):
    ct = constant_term_sequence(parse_laurent(f"(1+x)*({a}+{a + 1}*x)/x"), 12)
    assert ct == _q(f"binomial(n,k)*binomial(n+k,k)*{a}^k", 12)


def test_log_integral_small_values():
    vals = log_integral_sequence(2, 1)
    assert vals[0].coords == (0, 1)
    assert vals[1].coords == (-2, 3)
    for a in (Fraction(3), Fraction(1, 2), Fraction(7, 5)):
        assert log_integral_sequence(a, 0)[0].coords == (0, 1 / (a - 1))


def test_log_integral_rejects_bad_parameter():
    for bad in (1, 0, -2):
        with pytest.raises(ValueError):
            log_integral_sequence(bad, 3)


@pytest.mark.parametrize("a", [Fraction(2), Fraction(3), Fraction(1, 2)])
def test_log_integral_matches_quadrature(a):
    vals = log_integral_sequence(a, 5)
    with mpmath.workdps(80):
        b = 1 - mpmath.mpf(a.numerator) / a.denominator
        for n, v in enumerate(vals):
            f = lambda x: (x * (1 - x) / (1 - b * x)) ** n / (1 - b * x)
            exact = v.evaluate()
            assert abs(exact - mpmath.quad(f, [0, 0.5, 1])) < mpmath.mpf(10) ** -60


def test_log_integral_decreasing():
    vals = log_integral_sequence(2, 30)
    with mpmath.workdps(60):
        mags = [abs(v.evaluate()) for v in vals]
    assert all(x > y for x, y in zip(mags, mags[1:]))


def test_arctan_small_values():
    assert arctan_integral_sequence(1, 0, 0, 0)[0].coords == (0, 1, 0)
    for m in (2, 3, 5):
        assert arctan_integral_sequence(m, 0)[0].coords == (0, Fraction(1, m), 0)
    with pytest.raises(ValueError):
        arctan_integral_sequence(0, 3)


@pytest.mark.parametrize("m,s2,sm", [(3, 3, 2), (2, 0, 0), (5, 3, 2)])
def test_arctan_matches_quadrature(m, s2, sm):
    vals = arctan_integral_sequence(m, 4, s2, sm)
    with mpmath.workdps(80):
        for n, v in enumerate(vals):
            f = lambda x: x ** (2 * n) * (1 - x) ** (2 * n) / (m * m + x * x) ** (2 * n + 1)
            scale = mpmath.mpf(2) ** (s2 * n) * mpmath.mpf(m) ** (sm * n)
            exact = v.evaluate()
            # compare relative to the size of the terms that cancel
            size = max(abs(c) for c in v.coords) + 1
            assert abs(exact - scale * mpmath.quad(f, [0, 0.5, 1])) < mpmath.mpf(10) ** -60 * size


def test_arctan_log_coordinate_vanishes_for_m3():
    vals = arctan_integral_sequence(3, 10)
    assert all(v.coords[2] == 0 for v in vals)


def test_pq_from_values_log_family():
    p, q = pq_from_values(log_integral_sequence(2, 1))
    assert p == [0, 2] and q == [1, 3]


def test_pq_error_relation():
    vals = log_integral_sequence(2, 12)
    p, q = pq_from_values(vals)
    with mpmath.workdps(80):
        ln2 = mpmath.log(2)
        for n in range(1, 13):
            lhs = ln2 - mpmath.mpf(p[n].numerator) / p[n].denominator / (mpmath.mpf(q[n].numerator) / q[n].denominator)
            rhs = vals[n].evaluate() / (mpmath.mpf(q[n].numerator) / q[n].denominator)
            assert abs(lhs - rhs) < mpmath.mpf(10) ** -70


def test_pq_span_violation():
    basis = (ONE, BasisConstant("arctan", Fraction(1, 3)), BasisConstant("ln", Fraction(10, 9)))
    bad = [ValueInSpan(basis, (Fraction(1), Fraction(1), Fraction(1)))]
    with pytest.raises(SpanError):
        pq_from_values(bad)
    with pytest.raises(ValueError):
        pq_from_values(bad, target=0)


def test_pq_zero_target_coordinate_allowed():
    basis = (ONE, BasisConstant("ln", Fraction(2)))
    p, q = pq_from_values([ValueInSpan(basis, (Fraction(1), Fraction(0)))])
    assert q == [0]
