"""From sequences to verdicts: alpha, empirical and rigorous delta,
irrationality measure, integrality pattern [G, R, P, D0], growth constants
and the minor/major/super classification."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
import numpy as np

from .dsl import RecOperator, dominant_root, leading_poly_in_N, quadratic_radical
from .exact import factor_integer, lcm_upto
from .identify import Identification
from .sequences import ApproxPair

log = logging.getLogger(__name__)


def to_mpf(x: Fraction) -> mpmath.mpf:
    return mpmath.mpf(x.numerator) / x.denominator


def working_precision(K: int, k_est: float) -> int:
    """Decimal digits needed to resolve errors of size about q(K)^-2."""
    return max(200, math.ceil(2.5 * K * math.log10(max(k_est, 1.0001))) + 50)


def estimate_alpha(pair: ApproxPair, precision: int) -> mpmath.mpf:
    """p(K)/q(K) at the last computed index, rounded to ``precision`` digits."""
    qK = pair.q[-1]
    if qK == 0:
        raise ZeroDivisionError(f"q({pair.K}) = 0; cannot estimate alpha")
    with mpmath.workdps(precision):
        return to_mpf(pair.p[-1] / qK)


@dataclass
class DeltaEstimate:
    per_index: list[tuple[int, mpmath.mpf]]
    last_value: mpmath.mpf
    extrapolated: float

    def as_dict(self) -> dict[int, float]:
        return {n: float(d) for n, d in self.per_index}


class EmptyWindowError(ValueError):
    pass


def empirical_delta(pair: ApproxPair, alpha, window: tuple[int, int], ref_index: Optional[int] = None) -> DeltaEstimate:
    """delta_n = -ln|alpha - p'(n)/q'(n)| / ln q'(n) over the window, q' the
    reduced denominator. ``last_value`` is delta at the window's upper end
    (the last usable index), ``extrapolated`` the intercept of a least-squares
    line in 1/n through the top half of the window.

    The reference alpha must come from an index at least twice the window's
    upper end, so that its own error is negligible against q'(n)^-delta.
    """
    lo, hi = window
    ref_index = pair.K if ref_index is None else ref_index
    if lo < 2:
        raise ValueError("window must start at n >= 2")
    if 2 * hi > ref_index:
        raise ValueError(f"window end {hi} exceeds half the reference index {ref_index}")
    values = []
    for n in range(lo, hi + 1):
        red = pair.reduced[n]
        if red is None or red[1] <= 1:
            continue
        err = abs(alpha - mpmath.mpf(red[0]) / red[1])
        if err == 0:
            continue
        values.append((n, -mpmath.log(err) / mpmath.log(red[1])))
    if not values:
        raise EmptyWindowError(f"no usable convergents in window {window}")
    mid = (lo + hi) / 2
    top = [(n, d) for n, d in values if n >= mid]
    if len(top) >= 2:
        x = np.array([1.0 / n for n, _ in top])
        y = np.array([float(d) for _, d in top])
        extrapolated = float(np.polyfit(x, y, 1)[1])
    else:
        extrapolated = float(values[-1][1])
    return DeltaEstimate(values, values[-1][1], extrapolated)


@dataclass(frozen=True)
class IntegralityPattern:
    """L(G n)^R P^n D0 p(n) is an integer for every n checked."""

    G: int = 1
    R: int = 0
    P: int = 1
    D0: int = 1

    def __bool__(self) -> bool:
        return True

    def as_list(self) -> list[int]:
        return [self.G, self.R, self.P, self.D0]


@dataclass(frozen=True)
class PatternNotFound:
    worst_denominator: int
    factorization: tuple[tuple[int, int], ...]
    at_n: int

    def __bool__(self) -> bool:
        return False


def _L(n: int) -> int:
    return 1 if n < 1 else lcm_upto(n)


def fit_integrality_pattern(p: Sequence[Fraction], max_G: int = 3, max_R: int = 4, max_P: int = 50, max_D0: int = 100):
    """Smallest (G, R, P, D0) with L(G n)^R P^n D0 p(n) integral for all n,
    minimizing R first, then G, then P, then D0. Returns PatternNotFound
    (falsy) when nothing within the bounds works."""
    if len(p) < 30:
        raise ValueError("need at least 30 terms to fit an integrality pattern")
    dens = [Fraction(v).denominator for v in p]
    worst = (1, 0)
    for R in range(max_R + 1):
        for G in range(1, max_G + 1):
            if R == 0 and G > 1:
                continue
            residual = [d // math.gcd(d, _L(G * n) ** R) for n, d in enumerate(dens)]
            if R == max_R and G == max_G:
                worst = max((r, n) for n, r in enumerate(residual))
            for P in range(1, max_P + 1):
                D0 = 1
                for n, r in enumerate(residual):
                    if r == 1:
                        continue
                    rest = r // math.gcd(r, P ** n)
                    D0 = math.lcm(D0, rest)
                    if D0 > max_D0:
                        break
                if D0 <= max_D0:
                    return IntegralityPattern(G, R, P, D0)
    return PatternNotFound(worst[0], tuple(factor_integer(worst[0])), worst[1])


def pattern_holds(p: Sequence[Fraction], pattern: IntegralityPattern) -> bool:
    G, R, P, D0 = pattern.as_list()
    return all((_L(G * n) ** R * P ** n * D0 * Fraction(v)).denominator == 1 for n, v in enumerate(p))


def rigorous_delta(k, beta, pattern: IntegralityPattern):
    """(2 ln|k| - ln|beta|) / (ln|k| + G R + ln P)."""
    k = mpmath.mpf(k)
    if abs(k) <= 1:
        raise ValueError("no exponential growth: |k| <= 1")
    lk = mpmath.log(abs(k))
    return (2 * lk - mpmath.log(abs(mpmath.mpf(beta)))) / (lk + pattern.G * pattern.R + mpmath.log(pattern.P))


def irrationality_measure(delta):
    """delta/(delta-1); negative when delta < 1, i.e. nothing is proved."""
    delta = mpmath.mpf(delta)
    if delta == 1:
        raise ZeroDivisionError("delta = 1 is a pole of the measure")
    return delta / (delta - 1)


def measure_proves_irrationality(delta) -> bool:
    return mpmath.mpf(delta) > 1


@dataclass
class Growth:
    k: mpmath.mpf
    k_exact: Optional[str]
    beta: mpmath.mpf
    beta_exact: Optional[str]


def growth_constants(ope: RecOperator, c_ope: Optional[RecOperator], precision: int = 50) -> Growth:
    """k from the leading-in-n polynomial of ope, beta likewise from c_ope
    (1 when no c-operator is known)."""
    lead = leading_poly_in_N(ope)
    k = dominant_root(lead, precision).value
    k_exact = quadratic_radical(lead) if lead.degree == 2 else None
    if c_ope is None:
        log.warning("no operator for c(n); taking beta = 1")
        return Growth(k, k_exact, mpmath.mpf(1), "1")
    clead = leading_poly_in_N(c_ope)
    beta = dominant_root(clead, precision).value
    if clead.degree == 1:
        r = -clead.coeffs[0] / clead.coeffs[1]
        beta_exact = str(abs(r))
    else:
        beta_exact = quadratic_radical(clead) if clead.degree == 2 else None
    return Growth(k, k_exact, beta, beta_exact)


CLASSES = ("none", "minor", "major", "super")


def classify_miracle(delta, identification: Optional[Identification]) -> str:
    """minor: identified, delta <= 1; major: identified, delta > 1 and the
    constant is already known to be irrational; super: delta > 1 and
    irrationality not known (including unidentified constants, which are
    super candidates); none: unidentified with delta <= 1, or a rational
    limit."""
    big = delta is not None and mpmath.mpf(delta) > 1
    if identification is not None and not identification.coeffs and not identification.minimal_polynomial:
        return "none"  # a rational limit admits no irrationality claim
    if identification is None:
        return "super" if big else "none"
    if not big:
        return "minor"
    return "major" if identification.irrationality_known else "super"


# closed forms quoted with the families they belong to

def binomial_log_delta(a):
    """Sum C(n,k)C(n+k,k)a^k, approximating ln((a+1)/a)."""
    s = mpmath.log(mpmath.sqrt(a) + mpmath.sqrt(a + 1))
    return 4 * s / (2 * s + 1)


def ct_log_delta(a, b):
    """CT[((1+ax)(1+bx)/x)^n], approximating ln(b/a)."""
    s = mpmath.log(mpmath.sqrt(a) + mpmath.sqrt(b))
    return 2 * (2 * s - mpmath.log(b - a)) / (2 * s + 1)


def arctan_odd_delta(k):
    """arctan(1/(2k+1)) integral family."""
    r = mpmath.sqrt(2) * mpmath.sqrt(2 * k * k + 2 * k + 1)
    X = 16 * k * k + 16 * k + 6 + 8 * k * r + 4 * r
    return 2 * (mpmath.log(X) - mpmath.log(2)) / (mpmath.log(X) + 2)


def arctan_even_delta(k):
    """arctan(1/(2k)) integral family."""
    X = 4 * k + 2 * mpmath.sqrt(4 * k * k + 1)
    return 2 * (mpmath.log(X) - mpmath.log(2)) / (mpmath.log(X) + 1)


@dataclass
class MiracleReport:
    """One analysis record; fields follow the order of the printed
    twelve-element summary (operator, c-operator, pattern, k, beta, delta,
    measure, alpha, identification, initial conditions), plus the
    empirical delta and the classification."""

    ope: RecOperator
    c_ope: Optional[RecOperator]
    pattern: Optional[IntegralityPattern]
    growth_k: mpmath.mpf
    growth_k_exact: Optional[str]
    beta: mpmath.mpf
    delta_rigorous: Optional[mpmath.mpf]
    delta_empirical: Optional[DeltaEstimate]
    measure: Optional[mpmath.mpf]
    alpha: mpmath.mpf
    identification: Optional[Identification]
    ini_p: list[Fraction]
    ini_q: list[Fraction]
    classification: str = "none"
    K: int = 0
    precision: int = 0
    source: str = ""
    notes: list[str] = field(default_factory=list)
    first_terms_p: list[Fraction] = field(default_factory=list)
    first_terms_q: list[Fraction] = field(default_factory=list)
    first_terms_c: list[Fraction] = field(default_factory=list)

    @property
    def headline_delta(self):
        if self.delta_rigorous is not None:
            return self.delta_rigorous
        if self.delta_empirical is not None:
            return self.delta_empirical.last_value
        return None
