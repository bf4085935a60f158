"""End-to-end pipelines: recurrence, binomial sum, constant term and
integral sources, each producing one MiracleReport.

K is the number of terms examined (indices 0..K-1). Sequences are run to
index 2K so that the reference alpha is far more accurate than any
convergent inside the window.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath

from . import analysis as an
from .dsl import dominant_root, leading_poly_in_N, parse_laurent, parse_operator
from .exact import as_fraction
from .generators import (
    arctan_integral_sequence,
    binomial_sum_sequence,
    constant_term_sequence,
    log_integral_sequence,
    parse_summand,
    pq_from_values,
)
from .guess import GuessConfig, guess_common_operator, guess_operator, verify_operator
from .identify import ConstantDictionary, Identification, identify_constant
from .sequences import ApproxPair, make_pair, run_recurrence

log = logging.getLogger(__name__)


class GuessFailedError(ValueError):
    pass


@dataclass
class RunConfig:
    K: int = 200
    precision: Optional[int] = None
    dictionary: ConstantDictionary = field(default_factory=ConstantDictionary.default)
    guess: GuessConfig = field(default_factory=GuessConfig)
    c_guess: GuessConfig = field(default_factory=lambda: GuessConfig(max_order=3, max_degree=12))
    identify_digits: int = 100
    ini_p: Optional[list[Fraction]] = None

    def __post_init__(self):
        if self.K < 20:
            raise ValueError("K must be at least 20")
        if self.precision is not None and self.precision < 100:
            raise ValueError("explicit precision must be at least 100 digits")


def _first(seq, count=8):
    return list(seq[:count])


def analyze_pair(
    pair: ApproxPair,
    cfg: RunConfig,
    known_alpha: Optional[tuple[str, mpmath.mpf, bool]] = None,
    source: str = "",
) -> an.MiracleReport:
    """Full analysis of a pair run to index 2K (at least)."""
    K = cfg.K
    if pair.K < 2 * K:
        raise ValueError(f"pair must be computed to index {2 * K}, got {pair.K}")
    notes = []
    degenerate = all(v == 0 for v in pair.c)
    c_ope = None
    if degenerate:
        notes.append("c(n) vanishes identically: p/q is constant and nothing is approximated")
    else:
        try:
            c_ope = guess_operator(pair.c, cfg.c_guess, offset=1)
        except ValueError as exc:
            log.warning("c(n) guessing skipped: %s", exc)
        if c_ope is None:
            notes.append("no operator for c(n) within the guess bounds; beta taken as 1")
    growth = an.growth_constants(pair.ope, c_ope, 60)
    precision = cfg.precision or an.working_precision(K, float(growth.k))
    with mpmath.workdps(precision):
        if known_alpha is not None:
            alpha = +known_alpha[1]
        else:
            alpha = an.estimate_alpha(pair, precision)
        try:
            emp = an.empirical_delta(pair, alpha, (2, K - 1), ref_index=pair.K)
        except an.EmptyWindowError:
            emp = None
            notes.append("every convergent in the window equals alpha; no empirical delta")
        pattern = an.fit_integrality_pattern(pair.p)
        delta = measure = None
        if pattern and growth.k > 1 and not degenerate:
            delta = an.rigorous_delta(growth.k, growth.beta, pattern)
            if delta != 1:
                measure = an.irrationality_measure(delta)
        elif not pattern:
            notes.append(
                f"no integrality pattern within bounds; worst denominator {pattern.worst_denominator} at n={pattern.at_n}"
            )
        if known_alpha is not None:
            ident = Identification(
                kind="dictionary", name=known_alpha[0], irrationality_known=known_alpha[2], conjectural=False
            )
        else:
            with mpmath.workdps(min(precision, cfg.identify_digits)):
                ident = identify_constant(+alpha, cfg.dictionary)
    head = delta if delta is not None else (emp.last_value if emp else None)
    return an.MiracleReport(
        ope=pair.ope,
        c_ope=c_ope,
        pattern=pattern or None,
        growth_k=growth.k,
        growth_k_exact=growth.k_exact,
        beta=growth.beta,
        delta_rigorous=delta,
        delta_empirical=emp,
        measure=measure,
        alpha=alpha,
        identification=ident,
        ini_p=pair.ini_p,
        ini_q=pair.ini_q,
        classification=an.classify_miracle(head, ident),
        K=K,
        precision=precision,
        source=source,
        notes=notes,
        first_terms_p=_first(pair.p),
        first_terms_q=_first(pair.q),
        first_terms_c=_first(pair.c),
    )


def run_ra_rec(ope, ini1: Sequence, ini2: Sequence, cfg: RunConfig = None) -> an.MiracleReport:
    cfg = cfg or RunConfig()
    if isinstance(ope, str):
        ope = parse_operator(ope)
    if len(ini1) != ope.order or len(ini2) != ope.order:
        raise ValueError(f"initial conditions must have length {ope.order}")
    pair = make_pair(ope, ini1, ini2, 2 * cfg.K)
    return analyze_pair(pair, cfg, source=f"recurrence {ope}")


def default_ini_p(order: int) -> list[Fraction]:
    return [Fraction(0)] * (order - 1) + [Fraction(1)]


def _from_denominators(q: list[Fraction], cfg: RunConfig, source: str) -> an.MiracleReport:
    needed = cfg.guess.terms_needed() + 5
    ope = guess_operator(q[: max(needed, 60)], cfg.guess)
    if ope is None or not verify_operator(ope, q, start=cfg.guess.window_start):
        raise GuessFailedError("no operator within bounds; raise the guess bounds")
    ini_p = [as_fraction(v) for v in cfg.ini_p] if cfg.ini_p else default_ini_p(ope.order)
    if len(ini_p) != ope.order:
        raise ValueError(f"p initial conditions must have length {ope.order}")
    p = run_recurrence(ope, ini_p, 2 * cfg.K)
    report = analyze_pair(ApproxPair(ope, p, q), cfg, source=source)
    ident = report.identification
    if cfg.ini_p is None and ident is not None and ident.kind != "algebraic" and ident.scale > 1:
        # rescale p so that the limit is the identified constant itself
        scale = ident.scale
        report = analyze_pair(ApproxPair(ope, [scale * v for v in p], q), cfg, source=source)
        report.notes.append(f"p(n) scaled by {scale} so that alpha is {report.identification.name if report.identification else 'the identified constant'}")
    return report


def run_ra_sum(summand, cfg: RunConfig = None) -> an.MiracleReport:
    cfg = cfg or RunConfig()
    F = parse_summand(summand) if isinstance(summand, str) else summand
    q = binomial_sum_sequence(F, 2 * cfg.K)
    return _from_denominators(q, cfg, source=f"sum_k {F}")


def run_ra_ct(laurent, cfg: RunConfig = None) -> an.MiracleReport:
    cfg = cfg or RunConfig()
    P = parse_laurent(laurent) if isinstance(laurent, str) else laurent
    q = constant_term_sequence(P, 2 * cfg.K)
    return _from_denominators(q, cfg, source=f"CT_x[({P})^n]")


def run_ra_int(family: str, cfg: RunConfig = None, a=None, k: int = None, m: int = None,
               scale_log2: int = 3, scale_m: int = 2) -> an.MiracleReport:
    """Integral families: ``log`` (parameter a), ``arctan-odd`` (k, m = 2k+1,
    normalization 2^(3n) m^(2n)) and ``arctan-custom`` (m plus scaling)."""
    cfg = cfg or RunConfig()
    top = 2 * cfg.K
    if family == "log":
        if a is None:
            raise ValueError("log family needs a")
        a = as_fraction(a)
        vals = log_integral_sequence(a, top)
        name = f"ln({a})"
        value = lambda: mpmath.log(mpmath.mpf(a.numerator) / a.denominator)
        source = f"int_0^1 (x(1-x)/(1-(1-a)x))^n dx/(1-(1-a)x), a={a}"
    elif family in ("arctan-odd", "arctan-custom"):
        if family == "arctan-odd":
            if k is None or k < 0:
                raise ValueError("arctan-odd needs k >= 0")
            m, scale_log2, scale_m = 2 * k + 1, 3, 2
        elif m is None:
            raise ValueError("arctan-custom needs m")
        vals = arctan_integral_sequence(m, top, scale_log2, scale_m)
        name = f"arctan(1/{m})"
        value = lambda: mpmath.atan(mpmath.mpf(1) / m)
        source = f"2^({scale_log2}n) {m}^({scale_m}n) int_0^1 x^2n (1-x)^2n/({m * m}+x^2)^(2n+1) dx"
    else:
        raise ValueError(f"unknown integral family {family!r}")
    p, q = pq_from_values(vals, target=1)
    ope = guess_common_operator([q[:80], p[:80]], cfg.guess)
    if ope is None or not (verify_operator(ope, q, start=1) and verify_operator(ope, p, start=1)):
        raise GuessFailedError("no common operator for the integral sequences within bounds")
    pair = ApproxPair(ope, p, q)
    k = dominant_root(leading_poly_in_N(ope), 30).value
    precision = cfg.precision or an.working_precision(cfg.K, float(k))
    with mpmath.workdps(precision):
        alpha = value()
    report = analyze_pair(pair, cfg, known_alpha=(name, alpha, True), source=source)
    report.notes.append("the limit is known a priori from the integral representation")
    return report
