"""Running a recurrence forward in exact arithmetic, the coupling sequence
c(n) = p(n)q(n-1) - p(n-1)q(n), and reduced convergents."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .dsl import RecOperator, apply_operator
from .exact import as_fraction, poly_eval


class SingularRecurrenceError(ValueError):
    def __init__(self, n: int):
        self.n = n
        super().__init__(f"singular leading coefficient: a_L(n) = 0 at n = {n}")


def run_recurrence(ope: RecOperator, inits: Sequence, K: int) -> list[Fraction]:
    """Terms x(0..K) with x(0..L-1) = inits."""
    L = ope.order
    if len(inits) != L:
        raise ValueError(f"need {L} initial values for an order-{L} operator, got {len(inits)}")
    xs = [as_fraction(v) for v in inits]
    lead = ope.coeffs[-1]
    lower = ope.coeffs[:-1]
    n = 0
    while len(xs) <= K:
        a_L = poly_eval(lead, n)
        if a_L == 0:
            raise SingularRecurrenceError(n)
        acc = Fraction(0)
        for i, a in enumerate(lower):
            v = xs[n + i]
            if v:
                acc += poly_eval(a, n) * v
        xs.append(-acc / a_L)
        n += 1
    return xs[: K + 1]


def compute_c(p: Sequence[Fraction], q: Sequence[Fraction]) -> list[Fraction]:
    """c(n) for n = 1..K; element 0 of the result is c(1)."""
    if len(p) != len(q):
        raise ValueError(f"length mismatch: {len(p)} != {len(q)}")
    if len(p) < 2:
        raise ValueError("need at least two terms")
    return [p[n] * q[n - 1] - p[n - 1] * q[n] for n in range(1, len(p))]


def reduce_convergent(p_n, q_n) -> tuple[int, int]:
    p_n, q_n = as_fraction(p_n), as_fraction(q_n)
    if q_n == 0:
        raise ZeroDivisionError("convergent with zero denominator")
    r = p_n / q_n
    return r.numerator, r.denominator


@dataclass
class ApproxPair:
    ope: RecOperator
    p: list[Fraction]
    q: list[Fraction]
    c: list[Fraction] = field(default_factory=list)
    reduced: list[Optional[tuple[int, int]]] = field(default_factory=list)

    def __post_init__(self):
        if not self.c:
            self.c = compute_c(self.p, self.q)
        if not self.reduced:
            # q(n) = 0 marks the convergent absent rather than aborting
            self.reduced = [reduce_convergent(a, b) if b != 0 else None for a, b in zip(self.p, self.q)]

    @property
    def K(self) -> int:
        return len(self.q) - 1

    @property
    def ini_p(self) -> list[Fraction]:
        return self.p[: self.ope.order]

    @property
    def ini_q(self) -> list[Fraction]:
        return self.q[: self.ope.order]

    def check(self) -> bool:
        """Both sequences satisfy the operator at every index."""
        last = self.K - self.ope.order
        return all(
            apply_operator(self.ope, s, n) == 0 for s in (self.p, self.q) for n in range(last + 1)
        )


def make_pair(ope: RecOperator, ini_p: Sequence, ini_q: Sequence, K: int) -> ApproxPair:
    return ApproxPair(ope, run_recurrence(ope, ini_p, K), run_recurrence(ope, ini_q, K))


def telescoping_holds(pair: ApproxPair) -> bool:
    """p(n)/q(n) - p(n-1)/q(n-1) == c(n)/(q(n)q(n-1)) wherever defined."""
    for n in range(1, pair.K + 1):
        qq = pair.q[n] * pair.q[n - 1]
        if qq == 0:
            continue
        if pair.p[n] / pair.q[n] - pair.p[n - 1] / pair.q[n - 1] != pair.c[n - 1] / qq:
            return False
    return True

