"""Exact denominator/numerator sequences from binomial sums, constant terms
of Laurent powers, and two closed integral families."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

from .dsl import ParseError, _PolyParser, tokenize
from .exact import LaurentPoly, PolyQ, as_fraction, laurent_mul


# ---------------------------------------------------------------------------
# binomial sums

@dataclass(frozen=True)
class LinearForm:
    """alpha*n + beta*k + gamma with integer coefficients."""

    n: int = 0
    k: int = 0
    const: int = 0

    def __call__(self, n: int, k: int) -> int:
        return self.n * n + self.k * k + self.const

    def __str__(self) -> str:
        parts = []
        for coef, sym in ((self.n, "n"), (self.k, "k")):
            if coef:
                mag = "" if abs(coef) == 1 else f"{abs(coef)}*"
                parts.append(("-" if coef < 0 else "+", f"{mag}{sym}"))
        if self.const or not parts:
            parts.append(("-" if self.const < 0 else "+", str(abs(self.const))))
        head = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        return head + "".join(s + b for s, b in parts[1:])


@dataclass(frozen=True)
class BinomialFactor:
    top: LinearForm
    bottom: LinearForm
    exponent: int = 1


@dataclass(frozen=True)
class HyperSummand:
    """scalar * geometric_base^k * prod binomial(top, bottom)^exponent."""

    binomials: tuple[BinomialFactor, ...]
    geometric_base: Fraction = Fraction(1)
    scalar: Fraction = Fraction(1)

    def __call__(self, n: int, k: int) -> Fraction:
        value = self.scalar * self.geometric_base ** k
        for b in self.binomials:
            if value == 0:
                break
            value *= binomial(b.top(n, k), b.bottom(n, k)) ** b.exponent
        return Fraction(value)

    def __str__(self) -> str:
        parts = []
        if self.scalar != 1:
            parts.append(str(self.scalar))
        for b in self.binomials:
            text = f"binomial({b.top},{b.bottom})"
            parts.append(text if b.exponent == 1 else f"{text}^{b.exponent}")
        if self.geometric_base != 1:
            g = self.geometric_base
            base = str(g) if g.denominator == 1 and g > 0 else f"({g})"
            parts.append(f"{base}^k")
        return "*".join(parts) or "1"


def binomial(a: int, b: int) -> int:
    if b < 0:
        return 0
    if a >= 0:
        return math.comb(a, b) if b <= a else 0
    # negative upper index: a(a-1)...(a-b+1)/b!
    return (-1) ** b * math.comb(b - a - 1, b)


def _linear_form(text: str, pos: int) -> LinearForm:
    try:
        poly = _PolyParser(text, ("n", "k")).parse()
    except ParseError as exc:
        raise ParseError(str(exc).split(" at position")[0], pos + (exc.position or 0)) from None
    for (en, ek), c in poly.items():
        if en + ek > 1 or c.denominator != 1:
            raise ParseError(f"binomial arguments must be integer linear forms in n,k: {text!r}", pos)
    return LinearForm(int(poly.get((1, 0), 0)), int(poly.get((0, 1), 0)), int(poly.get((0, 0), 0)))


def parse_summand(text: str) -> HyperSummand:
    """Parse e.g. ``binomial(n,k)^2*binomial(n+k,k)*2^k``.

    Factors: ``binomial(u,v)`` (alias ``C``) with optional integer power,
    ``b^k`` for an integer or parenthesized rational b, and integer scalars.
    Python-style ``**`` is accepted.
    """
    tokens = tokenize(text)
    i = 0
    binomials: list[BinomialFactor] = []
    geometric = Fraction(1)
    scalar = Fraction(1)

    def expect(kind, value=None):
        nonlocal i
        tok = tokens[i]
        if tok[0] != kind or (value is not None and tok[1] != value):
            raise ParseError(f"expected {value or kind}", tok[2])
        i += 1
        return tok

    def power() -> str | None:
        nonlocal i
        if tokens[i][:2] == ("op", "^"):
            i += 1
            tok = tokens[i]
            i += 1
            return tok[1]
        return None

    def until_delim() -> tuple[str, int]:
        """Raw text up to the next ',' or ')' at nesting depth 0."""
        nonlocal i
        depth = 0
        start = tokens[i][2]
        while True:
            kind, value, pos = tokens[i]
            if kind == "end":
                raise ParseError("unterminated binomial", pos)
            if value == "(":
                depth += 1
            elif value == ")":
                if depth == 0:
                    return text[start:pos], start
                depth -= 1
            elif value == "," and depth == 0:
                return text[start:pos], start
            i += 1

    if tokens[0][0] == "end":
        raise ParseError("empty summand", 0)
    while True:
        kind, value, pos = tokens[i]
        if kind == "name" and value in ("binomial", "C"):
            i += 1
            expect("op", "(")
            top_text, top_pos = until_delim()
            expect("op", ",")
            bot_text, bot_pos = until_delim()
            expect("op", ")")
            e = power()
            if e is not None and not e.isdigit():
                raise ParseError("binomial power must be a positive integer", pos)
            exponent = int(e) if e else 1
            if exponent < 1:
                raise ParseError("binomial power must be a positive integer", pos)
            binomials.append(BinomialFactor(_linear_form(top_text, top_pos), _linear_form(bot_text, bot_pos), exponent))
        elif kind == "num" or (kind, value) == ("op", "("):
            if kind == "num":
                i += 1
                base = Fraction(int(value))
            else:
                i += 1
                inner, inner_pos = until_delim()
                expect("op", ")")
                poly = _PolyParser(inner, (), allow_division=True).parse()
                base = poly.get((), Fraction(0))
            e = power()
            if e == "k":
                geometric *= base
            elif e is None:
                scalar *= base
            elif e.isdigit():
                scalar *= base ** int(e)
            else:
                raise ParseError(f"unsupported exponent {e!r}", pos)
        else:
            raise ParseError(f"unexpected token {value!r}", pos)
        kind, value, pos = tokens[i]
        if kind == "end":
            break
        if (kind, value) != ("op", "*"):
            raise ParseError(f"expected '*' between factors, got {value!r}", pos)
        i += 1
    return HyperSummand(tuple(binomials), geometric, scalar)


def binomial_sum_sequence(F: HyperSummand, K: int) -> list[Fraction]:
    """q(n) = sum_{k=0}^{n} F(n, k) for n = 0..K."""
    if K < 0:
        raise ValueError("K must be non-negative")
    return [sum((F(n, k) for k in range(n + 1)), Fraction(0)) for n in range(K + 1)]


def constant_term_sequence(P: LaurentPoly, K: int) -> list[Fraction]:
    """CT_x[P(x)^n] for n = 0..K by incremental powering."""
    if K < 0:
        raise ValueError("K must be non-negative")
    out = []
    power = LaurentPoly.one()
    for n in range(K + 1):
        out.append(power.constant_term())
        if n < K:
            power = laurent_mul(power, P)
    return out


# ---------------------------------------------------------------------------
# integrals, valued in Q + Q*theta_1 + Q*theta_2

@dataclass(frozen=True)
class BasisConstant:
    """1, ln(arg) or arctan(arg) for a rational arg."""

    kind: str
    arg: Fraction = Fraction(1)

    @property
    def name(self) -> str:
        if self.kind == "one":
            return "1"
        return f"{self.kind}({self.arg})"

    def value(self):
        a = mpmath.mpf(self.arg.numerator) / self.arg.denominator
        if self.kind == "one":
            return mpmath.mpf(1)
        if self.kind == "ln":
            return mpmath.log(a)
        if self.kind == "arctan":
            return mpmath.atan(a)
        raise ValueError(f"unknown basis kind {self.kind!r}")


ONE = BasisConstant("one")


@dataclass(frozen=True)
class ValueInSpan:
    basis: tuple[BasisConstant, ...]
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.basis) != len(self.coords):
            raise ValueError("basis and coordinates differ in length")
        if self.basis[0] != ONE:
            raise ValueError("the first basis element must be the constant 1")

    def evaluate(self):
        """Numeric value at the ambient mpmath precision."""
        return mpmath.fsum(
            mpmath.mpf(c.numerator) / c.denominator * b.value() for b, c in zip(self.basis, self.coords) if c
        )

    def __str__(self) -> str:
        terms = [f"({c})*{b.name}" if b != ONE else f"({c})" for b, c in zip(self.basis, self.coords)]
        return " + ".join(terms)


def log_integral_sequence(a, K: int) -> list[ValueInSpan]:
    """I(n) = int_0^1 (x(1-x)/(1-(1-a)x))^n dx/(1-(1-a)x) as u + v*ln(a).

    Substituting t = 1-(1-a)x gives
    I(n) = (1-a)^-(2n+1) int_a^1 ((1-t)(t-a))^n t^-(n+1) dt,
    a Laurent polynomial in t integrated term by term.
    """
    a = as_fraction(a)
    if a <= 0 or a == 1:
        raise ValueError(f"log family needs a > 0 and a != 1, got {a}")
    basis = (ONE, BasisConstant("ln", a))
    base = LaurentPoly({0: -a, 1: 1 + a, 2: -1})  # (1-t)(t-a)
    power = LaurentPoly.one()
    out = []
    for n in range(K + 1):
        u = Fraction(0)
        v = Fraction(0)
        for e, c in power.terms.items():
            j = e - n - 1
            if j == -1:
                v -= c  # int_a^1 dt/t = -ln a
            else:
                u += c * (1 - a ** (j + 1)) / (j + 1)
        scale = 1 / (1 - a) ** (2 * n + 1)
        out.append(ValueInSpan(basis, (u * scale, v * scale)))
        power = laurent_mul(power, base)
    return out


def _s_adic(poly: PolyQ, s: PolyQ) -> list[tuple[Fraction, Fraction]]:
    """Digits (A_j, B_j) with poly = sum_j (A_j + B_j x) s^j, s = x^2 + m2."""
    coeffs = poly.coeffs
    m2 = s.coeff(0)
    # integer inputs stay in int arithmetic, which is far cheaper than Fraction
    integral = m2.denominator == 1 and all(Fraction(c).denominator == 1 for c in coeffs)
    if integral:
        m2 = int(m2)
        rest = [int(c) for c in coeffs]
    else:
        rest = [Fraction(c) for c in coeffs]
    digits = []
    while rest:
        r = list(rest)
        quot = [0] * max(len(r) - 2, 0)
        for d in range(len(r) - 1, 1, -1):
            c = r[d]
            if c:
                quot[d - 2] = c
                r[d - 2] -= c * m2
        digits.append((Fraction(r[0]), Fraction(r[1]) if len(r) > 1 else Fraction(0)))
        while quot and quot[-1] == 0:
            quot.pop()
        rest = quot
    return digits


def _poly_integral_01(p: PolyQ) -> Fraction:
    return sum((c / (i + 1) for i, c in enumerate(p.coeffs)), Fraction(0))


def arctan_integral_sequence(m: int, K: int, scale_log2: int = 3, scale_m: int = 2) -> list[ValueInSpan]:
    """2^(scale_log2*n) m^(scale_m*n) int_0^1 x^2n (1-x)^2n / (m^2+x^2)^(2n+1) dx
    over the basis [1, arctan(1/m), ln(1+1/m^2)].

    The numerator is expanded in powers of s = m^2 + x^2, which reduces
    everything to J_e = int dx/s^e and H_e = int x dx/s^e.
    """
    if m < 1:
        raise ValueError(f"arctan family needs m >= 1, got {m}")
    m2 = Fraction(m * m)
    basis = (ONE, BasisConstant("arctan", Fraction(1, m)), BasisConstant("ln", 1 + 1 / m2))
    top = 2 * K + 1
    # J_e as (rational, arctan coord); J_1 = arctan(1/m)/m
    J = [None, (Fraction(0), Fraction(1, m))]
    for e in range(1, top):
        r, t = J[e]
        f = 1 / (2 * e * m2)
        J.append((f * (1 / (m2 + 1) ** e + (2 * e - 1) * r), f * (2 * e - 1) * t))

    def H(e: int) -> tuple[Fraction, Fraction]:
        """(rational, ln coord); H_1 = ln(1+1/m^2)/2."""
        if e == 1:
            return Fraction(0), Fraction(1, 2)
        return ((m2 + 1) ** (1 - e) - m2 ** (1 - e)) / (2 * (1 - e)), Fraction(0)

    # put each coordinate table over one common denominator so the inner
    # sums run in integer arithmetic
    tables = [[J[e][0] for e in range(1, top + 1)], [J[e][1] for e in range(1, top + 1)],
              [H(e)[0] for e in range(1, top + 1)], [H(e)[1] for e in range(1, top + 1)]]
    dens, nums = [], []
    for tab in tables:
        den = 1
        for v in tab:
            den = math.lcm(den, v.denominator)
        dens.append(den)
        nums.append([None] + [v.numerator * (den // v.denominator) for v in tab])

    s = PolyQ((m2, 0, 1), "x")
    x_1mx = PolyQ((0, 1, -1), "x")  # x(1-x)
    numerator = PolyQ.constant(1, "x")
    step = x_1mx * x_1mx
    out = []
    for n in range(K + 1):
        E = 2 * n + 1
        poly_part = Fraction(0)
        acc = [0, 0, 0, 0]  # J rational, J arctan, H rational, H ln
        for j, (A, B) in enumerate(_s_adic(numerator, s)):
            e = E - j
            if e <= 0:
                poly_part += _poly_integral_01((PolyQ((A, B), "x")) * s ** (-e))
                continue
            a, b = int(A), int(B)
            if a:
                acc[0] += a * nums[0][e]
                acc[1] += a * nums[1][e]
            if b:
                acc[2] += b * nums[2][e]
                acc[3] += b * nums[3][e]
        coord = [
            poly_part + Fraction(acc[0], dens[0]) + Fraction(acc[2], dens[2]),
            Fraction(acc[1], dens[1]),
            Fraction(acc[3], dens[3]),
        ]
        scale = Fraction(2) ** (scale_log2 * n) * Fraction(m) ** (scale_m * n)
        out.append(ValueInSpan(basis, tuple(scale * c for c in coord)))
        numerator = numerator * step
    return out


class SpanError(ValueError):
    pass


def pq_from_values(vals: Sequence[ValueInSpan], target: int = 1) -> tuple[list[Fraction], list[Fraction]]:
    """Read off q(n) = coordinate of the target constant and p(n) = -(coordinate
    of 1), so theta - p/q = I(n)/q(n). q(n) = 0 marks an absent convergent."""
    if target == 0:
        raise ValueError("target must not be the constant-1 slot")
    if not vals:
        return [], []
    basis = vals[0].basis
    p, q = [], []
    for n, v in enumerate(vals):
        if v.basis != basis:
            raise SpanError("values do not share one basis")
        for idx, c in enumerate(v.coords):
            if idx not in (0, target) and c != 0:
                raise SpanError(f"value not in the two-dimensional span at n={n}: {basis[idx].name} coordinate {c}")
        p.append(-v.coords[0])
        q.append(v.coords[target])
    return p, q
