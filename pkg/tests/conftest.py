import functools

import pytest

from apery.dsl import parse_operator
from apery.pipeline import RunConfig, run_ra_rec, run_ra_sum
from apery.sequences import make_pair

ZETA3_OPE = "(n+2)^3*N^2-(2*n+3)*(17*n^2+51*n+39)*N+(n+1)^3"
ZETA2_OPE = "(n+2)^2*N^2-(11*n^2+33*n+25)*N-(n+1)^2"
LN2_OPE = "(n+2)*N^2-(6*n+9)*N+(n+1)"
LN43_OPE = "(n+2)*N^2-(14*n+21)*N+(n+1)"
SQRT2_OPE = "N^2-2*N-1"

# operator text, p inits, q inits
FIXTURES = {
    "zeta3": (ZETA3_OPE, [0, 6], [1, 5]),
    "zeta2": (ZETA2_OPE, [0, 5], [1, 3]),
    "ln2": (LN2_OPE, [0, 2], [1, 3]),
    "ln43": (LN43_OPE, [0, 2], [1, 7]),
    "sqrt2": (SQRT2_OPE, [1, 2], [0, 1]),
}


@functools.lru_cache(maxsize=None)
def fixture_pair(name: str, K: int = 200):
    ope, ip, iq = FIXTURES[name]
    return make_pair(parse_operator(ope), ip, iq, K)


@functools.lru_cache(maxsize=None)
def fixture_report(name: str, K: int = 200):
    ope, ip, iq = FIXTURES[name]
    return run_ra_rec(ope, ip, iq, RunConfig(K=K))


@functools.lru_cache(maxsize=None)
def sum_report(summand: str, K: int = 200):
    return run_ra_sum(summand, RunConfig(K=K))


@pytest.fixture
def pair():
    return fixture_pair


@pytest.fixture
def report():
    return fixture_report
