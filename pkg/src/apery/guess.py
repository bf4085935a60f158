"""Guessing annihilating operators with polynomial coefficients by
undetermined coefficients.

For each cell (order L, degree d), in the order L = 1.., d = 0.., the
unknowns lambda[i][j] of sum_{i,j} lambda[i][j] n^j x(n+i) = 0 are solved
for. A rank computation modulo a 61-bit prime discards cells with a trivial
nullspace cheaply; surviving cells are solved exactly over Q on the rows
that were independent mod p, and the candidate is accepted only after exact
verification on every row, including held-out trailing terms.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .dsl import RecOperator, apply_operator, normalize_operator
from .exact import PolyQ, as_fraction

log = logging.getLogger(__name__)

_PRIME = (1 << 61) - 1


class InsufficientTermsError(ValueError):
    pass


@dataclass(frozen=True)
class GuessConfig:
    max_order: int = 3
    max_degree: int = 8
    verify_count: int = 10
    window_start: int = 1
    min_order: int = 1

    def __post_init__(self):
        if not 1 <= self.min_order <= self.max_order:
            raise ValueError("need 1 <= min_order <= max_order")
        if self.verify_count < 5:
            raise ValueError("verify_count must be >= 5")
        if self.max_degree < 0 or self.window_start < 0:
            raise ValueError("max_degree and window_start must be non-negative")

    def terms_needed(self) -> int:
        return (self.max_order + 1) * (self.max_degree + 1) + self.max_order + self.verify_count + self.window_start


def _mod(x: Fraction, p: int = _PRIME) -> int:
    if x.denominator % p == 0:
        raise ZeroDivisionError("denominator vanishes modulo the filter prime")
    return x.numerator * pow(x.denominator, -1, p) % p


def _rows(seqs, offset: int, L: int, start: int):
    """(sequence index, n) for every row of the linear system."""
    out = []
    for s_idx, seq in enumerate(seqs):
        first = max(start, offset)
        last = offset + len(seq) - 1 - L
        out.extend((s_idx, n) for n in range(first, last + 1))
    return out


def _modular_pivots(seqs_mod, rows, offset: int, L: int, d: int) -> list[int]:
    """Indices of rows that are linearly independent modulo the prime."""
    p = _PRIME
    U = (L + 1) * (d + 1)
    basis: list[tuple[int, list[int]]] = []  # (pivot column, reduced row)
    chosen = []
    for r_idx, (s_idx, n) in enumerate(rows):
        seq = seqs_mod[s_idx]
        pw = [pow(n, j, p) for j in range(d + 1)]
        row = [pw[j] * seq[n - offset + i] % p for i in range(L + 1) for j in range(d + 1)]
        for col, brow in basis:
            f = row[col]
            if f:
                row = [(a - f * b) % p for a, b in zip(row, brow)]
        col = next((c for c, v in enumerate(row) if v), None)
        if col is None:
            continue
        inv = pow(row[col], -1, p)
        row = [v * inv % p for v in row]
        basis.append((col, row))
        chosen.append(r_idx)
        if len(basis) == U:
            break
    return chosen


def _exact_nullspace(matrix: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    m = [list(r) for r in matrix]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        vec = [Fraction(0)] * ncols
        vec[fcol] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -m[i][fcol]
        basis.append(vec)
    return basis


def _vector_to_operator(vec: Sequence[Fraction], L: int, d: int) -> Optional[RecOperator]:
    coeffs = tuple(PolyQ(tuple(vec[i * (d + 1) : (i + 1) * (d + 1)])) for i in range(L + 1))
    if coeffs[-1].is_zero():
        return None
    return normalize_operator(RecOperator(coeffs))


def _support_key(ope: RecOperator):
    support = tuple((i, j) for i, a in enumerate(ope.coeffs) for j, c in enumerate(a.coeffs) if c != 0)
    values = tuple(c for a in ope.coeffs for c in a.coeffs)
    return support, values


def verify_operator(ope: RecOperator, seq: Sequence, offset: int = 0, start: Optional[int] = None) -> bool:
    """True iff the operator annihilates seq at every index n >= start
    (default: every index) with n..n+L inside the sequence."""
    if len(seq) <= ope.order:
        raise ValueError("sequence shorter than the operator order")
    seq = [as_fraction(v) for v in seq]
    first = offset if start is None else max(start, offset)
    last = offset + len(seq) - 1 - ope.order
    return all(apply_operator(ope, seq, n, offset) == 0 for n in range(first, last + 1))


def guess_common_operator(seqs: Sequence[Sequence], cfg: GuessConfig = GuessConfig(), offset: int = 0) -> Optional[RecOperator]:
    """Minimal (order, degree) operator annihilating every sequence in seqs."""
    seqs = [[as_fraction(v) for v in s] for s in seqs]
    shortest = min(len(s) for s in seqs)
    if shortest < cfg.terms_needed():
        raise InsufficientTermsError(
            f"need at least {cfg.terms_needed()} terms for order <= {cfg.max_order}, degree <= {cfg.max_degree}; got {shortest}"
        )
    try:
        seqs_mod = [[_mod(v) for v in s] for s in seqs]
    except ZeroDivisionError:
        seqs_mod = None
    for L in range(cfg.min_order, cfg.max_order + 1):
        for d in range(cfg.max_degree + 1):
            ope = _solve_cell(seqs, seqs_mod, offset, L, d, cfg)
            if ope is not None:
                log.debug("guessed order %d degree %d operator %s", L, d, ope)
                return ope
    return None


def guess_operator(seq: Sequence, cfg: GuessConfig = GuessConfig(), offset: int = 0) -> Optional[RecOperator]:
    """Annihilating operator of minimal order, then minimal degree, or None.

    ``offset`` is the index carried by seq[0] (1 for a c(n) list).
    """
    return guess_common_operator([seq], cfg, offset)


def _solve_cell(seqs, seqs_mod, offset, L, d, cfg) -> Optional[RecOperator]:
    U = (L + 1) * (d + 1)
    start = cfg.window_start
    all_rows = _rows(seqs, offset, L, start)
    # per sequence, the last verify_count rows are held out of the fit
    fit_rows = []
    for s_idx, seq in enumerate(seqs):
        own = [r for r in all_rows if r[0] == s_idx]
        fit_rows.extend(own[: len(own) - cfg.verify_count])
    if len(fit_rows) < U:
        return None
    if seqs_mod is not None:
        chosen = _modular_pivots(seqs_mod, fit_rows, offset, L, d)
        if len(chosen) == U:
            return None
        rows = [fit_rows[i] for i in chosen]
    else:
        rows = fit_rows
    matrix = []
    for s_idx, n in rows:
        seq = seqs[s_idx]
        pw = [Fraction(n) ** j for j in range(d + 1)]
        matrix.append([pw[j] * seq[n - offset + i] for i in range(L + 1) for j in range(d + 1)])
    null = _exact_nullspace(matrix, U)
    candidates = [ope for ope in (_vector_to_operator(v, L, d) for v in null) if ope is not None]
    candidates.sort(key=_support_key)
    for ope in candidates:
        if all(verify_operator(ope, s, offset, start) for s in seqs):
            return ope
    return None
