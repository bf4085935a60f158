"""Scans over operator families for empirical miracles.

Candidates are pure functions of their parameters, so they are mapped over
a process pool and gathered back in parameter order; the hit list does not
depend on the number of workers. Hits stream to an append-only NDJSON file.
"""

from __future__ import annotations

import itertools
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, Optional

import mpmath

from . import analysis as an
from .dsl import RecOperator, dominant_root, leading_poly_in_N
from .exact import LaurentPoly, PolyQ
from .generators import constant_term_sequence
from .guess import GuessConfig, guess_operator, verify_operator
from .identify import ConstantDictionary, Identification, identify_constant
from .sequences import ApproxPair, SingularRecurrenceError, make_pair, run_recurrence

log = logging.getLogger(__name__)

SCAN_IDENTIFY_DIGITS = 60


@dataclass
class ScanHit:
    family_params: tuple[int, ...]
    ope: RecOperator
    delta_empirical: mpmath.mpf  # at n = K-1
    delta_extrapolated: float
    alpha: mpmath.mpf
    identification: Optional[Identification]

    def to_record(self) -> dict:
        ident = self.identification
        return {
            "params": list(self.family_params),
            "operator": str(self.ope),
            "delta_empirical": mpmath.nstr(self.delta_empirical, 12),
            "delta_extrapolated": f"{self.delta_extrapolated:.10g}",
            "alpha": mpmath.nstr(self.alpha, 30),
            "identification": None if ident is None else {"kind": ident.kind, "name": ident.name},
        }


def family_1_operator(a: int, b: int) -> RecOperator:
    """(n+2)N^2 - (a n + b)N + (n+1)."""
    return RecOperator((PolyQ((1, 1)), PolyQ((-b, -a)), PolyQ((2, 1))))


def ct_family_laurent(a: int, b: int, c: int) -> LaurentPoly:
    """(1+ax)(1+bx)(1+cx)/x^2."""
    poly = LaurentPoly.one()
    for t in (a, b, c):
        poly = poly * LaurentPoly({0: Fraction(1), 1: Fraction(t)})
    return poly * LaurentPoly.monomial(-2)


def _evaluate(pair: ApproxPair, K: int, params) -> Optional[ScanHit]:
    """Empirical delta at n=K-1 against alpha = p(2K)/q(2K); a hit when > 1."""
    k = dominant_root(leading_poly_in_N(pair.ope), 30).value
    precision = an.working_precision(K, float(k))
    with mpmath.workdps(precision):
        alpha = an.estimate_alpha(pair, precision)
        try:
            est = an.empirical_delta(pair, alpha, (2, K - 1), ref_index=2 * K)
        except an.EmptyWindowError:
            log.info("candidate %s skipped: no usable convergents", params)
            return None
        if est.per_index[-1][0] != K - 1 or est.last_value <= 1:
            return None
        with mpmath.workdps(SCAN_IDENTIFY_DIGITS):
            ident = identify_constant(+alpha, ConstantDictionary.default())
        return ScanHit(tuple(params), pair.ope, +est.last_value, est.extrapolated, +alpha, ident)


def _family_1_candidate(args) -> Optional[ScanHit]:
    a, b, K = args
    ope = family_1_operator(a, b)
    try:
        pair = make_pair(ope, [0, 1], [1, 1], 2 * K)
        return _evaluate(pair, K, (a, b))
    except (SingularRecurrenceError, ZeroDivisionError) as exc:
        log.info("candidate (%d,%d) skipped: %s", a, b, exc)
        return None


def _ct_candidate(args) -> Optional[ScanHit]:
    a, b, c, K, guess = args
    q = constant_term_sequence(ct_family_laurent(a, b, c), 2 * K)
    ope = guess_operator(q[: max(guess.terms_needed() + 5, 60)], guess)
    if ope is None or not verify_operator(ope, q, start=guess.window_start):
        log.info("candidate (%d,%d,%d) skipped: no operator within bounds", a, b, c)
        return None
    try:
        p = run_recurrence(ope, [0] * (ope.order - 1) + [1], 2 * K)
        return _evaluate(ApproxPair(ope, p, q), K, (a, b, c))
    except (SingularRecurrenceError, ZeroDivisionError) as exc:
        log.info("candidate (%d,%d,%d) skipped: %s", a, b, c, exc)
        return None


def _run(fn, tasks: list, workers: Optional[int]) -> Iterator[Optional[ScanHit]]:
    if workers == 1 or len(tasks) < 2:
        yield from map(fn, tasks)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map yields in task order, so aggregation is deterministic
        yield from pool.map(fn, tasks, chunksize=max(1, len(tasks) // 64))


class HitSink:
    """Append-only newline-delimited JSON file, one record per hit, written
    as soon as the hit is known (in parameter order)."""

    def __init__(self, path):
        self.path = Path(path)

    def records(self) -> list[dict]:
        if not self.path.exists():
            return []
        return [json.loads(line) for line in self.path.read_text().splitlines() if line.strip()]

    def last_params(self) -> Optional[tuple[int, ...]]:
        recs = self.records()
        return tuple(recs[-1]["params"]) if recs else None

    def append(self, hit: ScanHit) -> None:
        with self.path.open("a") as fh:
            fh.write(json.dumps(hit.to_record()) + "\n")


def _scan(fn, tasks: list, n_params: int, workers, sink: Optional[HitSink], resume: bool) -> list[ScanHit]:
    if resume and sink is not None:
        last = sink.last_params()
        if last is not None:
            # candidates up to the last stored hit were already evaluated
            tasks = [t for t in tasks if tuple(t[:n_params]) > last]
    hits = []
    for hit in _run(fn, tasks, workers):
        if hit is None:
            continue
        hits.append(hit)
        if sink is not None:
            sink.append(hit)
    return hits


def scan_family_1(
    A: int, B: int, K: int, workers: Optional[int] = None, sink: Optional[HitSink] = None, resume: bool = False
) -> list[ScanHit]:
    """Operators (n+2)N^2-(an+b)N+(n+1), A <= a, b <= B, with p inits [0,1]
    and q inits [1,1]; returns the candidates with empirical delta > 1 in
    (a, b) order. With ``resume``, candidates up to the last hit already in
    the sink are skipped and only new hits are returned and appended."""
    if not 1 <= A <= B:
        raise ValueError("need 1 <= A <= B")
    if K < 50:
        raise ValueError("K must be at least 50")
    tasks = [(a, b, K) for a in range(A, B + 1) for b in range(A, B + 1)]
    return _scan(_family_1_candidate, tasks, 2, workers, sink, resume)


def scan_ct_family(
    a_range: Iterable[int],
    b_range: Iterable[int],
    c_range: Iterable[int],
    K: int,
    workers: Optional[int] = None,
    sink: Optional[HitSink] = None,
    guess: GuessConfig = GuessConfig(max_order=3, max_degree=8),
    resume: bool = False,
) -> list[ScanHit]:
    """CT_x[((1+ax)(1+bx)(1+cx)/x^2)^n] with its minimal operator (order at
    most 3) and p inits [0,...,0,1]. Candidates whose minimal operator is
    first order have p/q constant and are skipped. The Laurent polynomial is symmetric in (a,b,c), so each
    multiset of parameters is run once, as its sorted triple."""
    if K < 20:
        raise ValueError("K must be at least 20")
    triples = sorted({tuple(sorted(t)) for t in itertools.product(a_range, b_range, c_range)})
    if any(v < 1 for t in triples for v in t):
        raise ValueError("CT family parameters must be positive integers")
    tasks = [(a, b, c, K, guess) for a, b, c in triples]
    return _scan(_ct_candidate, tasks, 3, workers, sink, resume)
