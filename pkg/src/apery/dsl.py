"""Text notation for recurrence operators and Laurent polynomials, plus the
structural queries the analysis needs (order, leading polynomial in N,
dominant growth root).

Operators are written the way they are printed in the literature, with n
and N treated as commuting symbols, e.g.
``(n+2)^3*N^2-(2*n+3)*(17*n^2+51*n+39)*N+(n+1)^3``; they are normalized to
the left-coefficient form sum_i a_i(n) N^i.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

from .exact import LaurentPoly, PolyQ, as_fraction, format_poly, poly_eval


class ParseError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


class NotARecurrenceError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^(),]))")


def tokenize(text: str) -> list[tuple[str, str, int]]:
    """Split into (kind, value, position) tokens; kind is num, name or op."""
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[0]!r}", pos + len(text[pos:]) - len(text[pos:].lstrip()))
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("num", m.group(1), start))
        elif m.group(2):
            tokens.append(("name", m.group(2), start))
        else:
            op = "^" if m.group(3) == "**" else m.group(3)
            tokens.append(("op", op, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


# Multivariate polynomials during parsing: {exponent tuple: Fraction}.
def _padd(a: dict, b: dict, sign: int = 1) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, Fraction(0)) + sign * v
    return {k: v for k, v in out.items() if v != 0}


def _pmul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            out[k] = out.get(k, Fraction(0)) + va * vb
    return {k: v for k, v in out.items() if v != 0}


class _PolyParser:
    """Recursive descent over the grammar

        expr   := ["-"] term { ("+"|"-") term }
        term   := factor { ("*"|"/") factor }
        factor := base [ "^" uint ]
        base   := int | symbol | "(" expr ")"

    Division is only accepted when ``allow_division`` is set and the divisor
    is a single monomial (Laurent input).
    """

    def __init__(self, text: str, symbols: Sequence[str], allow_division: bool = False):
        self.text = text
        self.symbols = tuple(symbols)
        self.allow_division = allow_division
        self.tokens = tokenize(text)
        self.i = 0

    def parse(self) -> dict:
        if self.tokens[0][0] == "end":
            raise ParseError("empty expression", 0)
        result = self.expr()
        kind, value, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {value!r}", pos)
        return result

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def const(self, c) -> dict:
        return {(0,) * len(self.symbols): Fraction(c)} if c else {}

    def expr(self) -> dict:
        sign = 1
        if self.peek()[:2] == ("op", "-"):
            self.take()
            sign = -1
        elif self.peek()[:2] == ("op", "+"):
            self.take()
        acc = _padd({}, self.term(), sign)
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            _, op, _ = self.take()
            acc = _padd(acc, self.term(), 1 if op == "+" else -1)
        return acc

    def term(self) -> dict:
        acc = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            _, op, pos = self.take()
            rhs = self.factor()
            if op == "*":
                acc = _pmul(acc, rhs)
                continue
            if not self.allow_division:
                raise ParseError("division is not allowed here", pos)
            if len(rhs) != 1:
                raise ParseError("division is only allowed by a monomial", pos)
            (exps, c), = rhs.items()
            inv = {tuple(-e for e in exps): 1 / c}
            acc = _pmul(acc, inv)
        return acc

    def factor(self) -> dict:
        base = self.base()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            kind, value, pos = self.take()
            if kind != "num":
                raise ParseError("exponent must be a non-negative integer", pos)
            e = int(value)
            out = self.const(1)
            for _ in range(e):
                out = _pmul(out, base)
            return out
        return base

    def base(self) -> dict:
        kind, value, pos = self.take()
        if kind == "num":
            return self.const(int(value))
        if kind == "name":
            if value not in self.symbols:
                raise ParseError(f"unknown symbol {value!r}", pos)
            exps = tuple(1 if s == value else 0 for s in self.symbols)
            return {exps: Fraction(1)}
        if (kind, value) == ("op", "("):
            inner = self.expr()
            k2, v2, p2 = self.take()
            if (k2, v2) != ("op", ")"):
                raise ParseError("expected ')'", p2)
            return inner
        if kind == "end":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected token {value!r}", pos)


@dataclass(frozen=True)
class RecOperator:
    """sum_{i=0}^{L} a_i(n) N^i with a_L not the zero polynomial."""

    coeffs: tuple[PolyQ, ...]

    def __post_init__(self):
        cs = [c if isinstance(c, PolyQ) else PolyQ(tuple(c)) for c in self.coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        if len(cs) < 2:
            raise NotARecurrenceError("operator has no positive power of N; not a recurrence")
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def degree(self) -> int:
        return max(c.degree for c in self.coeffs)

    def coefficient_lists(self) -> list[list[Fraction]]:
        return [list(c.coeffs) for c in self.coeffs]

    def normalized(self) -> "RecOperator":
        return normalize_operator(self)

    def __str__(self) -> str:
        return format_operator(self)


def parse_operator(text: str) -> RecOperator:
    poly = _PolyParser(text, ("n", "N")).parse()
    if not poly:
        raise NotARecurrenceError("zero operator")
    order = max(k[1] for k in poly)
    if order == 0:
        raise NotARecurrenceError("expression has no N; not a recurrence")
    coeffs = []
    for i in range(order + 1):
        deg = max((k[0] for k in poly if k[1] == i), default=-1)
        coeffs.append(PolyQ(tuple(poly.get((j, i), Fraction(0)) for j in range(deg + 1))))
    return RecOperator(tuple(coeffs))


def parse_laurent(text: str, var: str = "x") -> LaurentPoly:
    poly = _PolyParser(text, (var,), allow_division=True).parse()
    return LaurentPoly({k[0]: v for k, v in poly.items()})


def normalize_operator(ope: RecOperator) -> RecOperator:
    """Clear denominators, divide out integer content, make a_L's leading
    coefficient positive."""
    all_coeffs = [c for p in ope.coeffs for c in p.coeffs]
    den = 1
    for c in all_coeffs:
        den = math.lcm(den, c.denominator)
    ints = [int(c * den) for c in all_coeffs]
    content = 0
    for v in ints:
        content = math.gcd(content, v)
    scale = Fraction(den, content or 1)
    if ope.coeffs[-1].leading < 0:
        scale = -scale
    return RecOperator(tuple(p.scale(scale) for p in ope.coeffs))


def _paren(poly: PolyQ) -> tuple[str, str]:
    """Sign and body for a coefficient; the body is parenthesized when it
    has more than one term."""
    if poly.leading < 0:
        poly = -poly
        sign = "-"
    else:
        sign = "+"
    body = format_poly(poly)
    if sum(1 for c in poly.coeffs if c != 0) > 1:
        body = f"({body})"
    return sign, body


def format_operator(ope: RecOperator) -> str:
    """Render as e.g. ``(n+2)*N^2-(14*n+21)*N+(n+1)``; parseable back."""
    parts = []
    for i in range(ope.order, -1, -1):
        a = ope.coeffs[i]
        if a.is_zero():
            continue
        sign, body = _paren(a)
        if i == 0:
            term = body
        else:
            mono = "N" if i == 1 else f"N^{i}"
            term = mono if body == "1" else f"{body}*{mono}"
        parts.append((sign, term))
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    return text + "".join(s + t for s, t in parts[1:])


def leading_poly_in_N(ope: RecOperator) -> PolyQ:
    """Collect the coefficients of n^d, d = max deg a_i, as a polynomial in N."""
    d = ope.degree
    return PolyQ(tuple(a.coeff(d) for a in ope.coeffs), var="N")


@dataclass(frozen=True)
class GrowthRoot:
    value: mpmath.mpf
    all_roots: tuple


def dominant_root(p: PolyQ, precision: int = 50) -> GrowthRoot:
    """All complex roots (Durand-Kerner via mpmath.polyroots) and the largest
    modulus among them."""
    if p.is_zero():
        raise ValueError("zero polynomial has no roots")
    if p.degree < 1:
        raise ValueError("constant polynomial has no roots")
    with mpmath.workdps(precision + 20):
        coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(p.coeffs)]
        if p.degree == 1:
            roots = [-coeffs[1] / coeffs[0]]
        else:
            roots = mpmath.polyroots(coeffs, maxsteps=500, extraprec=4 * precision + 40)
        roots = tuple(mpmath.mpc(r) for r in roots)
        value = max(abs(r) for r in roots)
    with mpmath.workdps(precision):
        return GrowthRoot(+value, tuple(mpmath.mpc(+r.real, +r.imag) for r in roots))


def apply_operator(ope: RecOperator, seq: Sequence, n: int, offset: int = 0) -> Fraction:
    """sum_i a_i(n) seq(n+i); ``offset`` is the index carried by seq[0]."""
    lo = n - offset
    hi = lo + ope.order
    if lo < 0 or hi >= len(seq):
        raise IndexError(f"sequence not defined on {n}..{n + ope.order}")
    total = Fraction(0)
    for i, a in enumerate(ope.coeffs):
        v = seq[lo + i]
        if v:
            total += poly_eval(a, n) * v
    return total


def quadratic_radical(p: PolyQ) -> str | None:
    """Exact form of the largest-modulus real root of a quadratic, e.g.
    ``7+4*sqrt(3)``; None when the roots are not real."""
    if p.degree != 2:
        return None
    c0, c1, c2 = (as_fraction(c) for c in p.coeffs)
    disc = c1 * c1 - 4 * c2 * c0
    if disc < 0:
        return None
    centre = -c1 / (2 * c2)
    # sqrt(disc)/(2|c2|) = s*sqrt(f) with f a squarefree integer
    rad = disc / (4 * c2 * c2)
    square, free = _split_square(rad.numerator * rad.denominator)
    s = Fraction(square, rad.denominator)
    sign = 1 if centre >= 0 else -1
    if free == 1:
        return _fmt_q(centre + sign * s)
    if centre == 0:
        head = ""
    else:
        head = _fmt_q(centre)
    term = f"sqrt({free})" if s == 1 else f"{_fmt_q(s)}*sqrt({free})"
    if sign < 0:
        return f"{head}-{term}"
    return f"{head}+{term}" if head else term


def _fmt_q(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _split_square(m: int) -> tuple[int, int]:
    """m = square^2 * free with free squarefree."""
    from .exact import factor_integer

    square, free = 1, 1
    for p, e in factor_integer(m):
        square *= p ** (e // 2)
        free *= p ** (e % 2)
    return square, free
