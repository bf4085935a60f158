"""Exact arithmetic kernel: rationals, lcm(1..n), small factorizations,
dense univariate polynomials over Q and sparse Laurent polynomials.

Integers are Python ints and rationals are :class:`fractions.Fraction`,
which is already canonical (reduced, positive denominator) on construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Union

RationalLike = Union[int, Fraction]


def make_rational(num: int, den: int = 1) -> Fraction:
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    return Fraction(num, den)


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions and strings like '131/3' to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


_LCM_CACHE = [1, 1]


def lcm_upto(n: int) -> int:
    """L(n) = lcm(1, 2, ..., n)."""
    if n < 1:
        raise ValueError(f"lcm_upto needs n >= 1, got {n}")
    while len(_LCM_CACHE) <= n:
        m = len(_LCM_CACHE)
        _LCM_CACHE.append(math.lcm(_LCM_CACHE[-1], m))
    return _LCM_CACHE[n]


_SMALL_PRIMES: list[int] = []


def _small_primes(limit: int = 1000) -> list[int]:
    if not _SMALL_PRIMES:
        sieve = bytearray([1]) * (limit + 1)
        sieve[0:2] = b"\x00\x00"
        for i in range(2, int(limit ** 0.5) + 1):
            if sieve[i]:
                sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
        _SMALL_PRIMES.extend(i for i, flag in enumerate(sieve) if flag)
    return _SMALL_PRIMES


def factor_integer(m: int) -> list[tuple[int, int]]:
    """Trial-division factorization, primes ascending.

    Meant for the smooth denominators that show up in approximation
    sequences; a large cofactor is returned as a single "prime".
    """
    if m <= 0:
        raise ValueError(f"factor_integer needs m >= 1, got {m}")
    out = []
    for p in _small_primes():
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
    if m > 1:
        d = _small_primes()[-1] + 2
        while d * d <= m and d < 10 ** 6:
            if m % d == 0:
                e = 0
                while m % d == 0:
                    m //= d
                    e += 1
                out.append((d, e))
            d += 2
        if m > 1:
            out.append((m, 1))
    return out


@dataclass(frozen=True)
class PolyQ:
    """Dense polynomial with rational coefficients, lowest degree first."""

    coeffs: tuple[Fraction, ...] = ()
    var: str = "n"

    def __post_init__(self):
        cs = [as_fraction(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def constant(cls, c: RationalLike, var: str = "n") -> "PolyQ":
        return cls((as_fraction(c),), var)

    @classmethod
    def monomial(cls, degree: int, c: RationalLike = 1, var: str = "n") -> "PolyQ":
        return cls((Fraction(0),) * degree + (as_fraction(c),), var)

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __call__(self, at: RationalLike) -> Fraction:
        return poly_eval(self, at)

    def __add__(self, other: "PolyQ") -> "PolyQ":
        other = _lift(other, self.var)
        size = max(len(self.coeffs), len(other.coeffs))
        return PolyQ(tuple(self.coeff(i) + other.coeff(i) for i in range(size)), self.var)

    __radd__ = __add__

    def __neg__(self) -> "PolyQ":
        return PolyQ(tuple(-c for c in self.coeffs), self.var)

    def __sub__(self, other: "PolyQ") -> "PolyQ":
        return self + (-_lift(other, self.var))

    def __rsub__(self, other) -> "PolyQ":
        return _lift(other, self.var) - self

    def __mul__(self, other: "PolyQ") -> "PolyQ":
        other = _lift(other, self.var)
        if self.is_zero() or other.is_zero():
            return PolyQ((), self.var)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return PolyQ(tuple(out), self.var)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "PolyQ":
        if e < 0:
            raise ValueError("negative power of a polynomial")
        result = PolyQ.constant(1, self.var)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def scale(self, c: RationalLike) -> "PolyQ":
        c = as_fraction(c)
        return PolyQ(tuple(c * a for a in self.coeffs), self.var)

    def __str__(self) -> str:
        return format_poly(self)


def _lift(x, var: str) -> PolyQ:
    if isinstance(x, PolyQ):
        return x
    return PolyQ.constant(as_fraction(x), var)


def poly_eval(p: PolyQ, at: RationalLike) -> Fraction:
    """Horner evaluation, exact."""
    acc = Fraction(0)
    for c in reversed(p.coeffs):
        acc = acc * at + c
    return Fraction(acc)


def _format_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(p: PolyQ) -> str:
    """Render highest degree first, e.g. ``n^3+6*n^2-12*n+8``."""
    if p.is_zero():
        return "0"
    parts = []
    for i in range(p.degree, -1, -1):
        c = p.coeffs[i]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if i == 0:
            body = _format_rational(mag)
        else:
            mono = p.var if i == 1 else f"{p.var}^{i}"
            body = mono if mag == 1 else f"{_format_rational(mag)}*{mono}"
        parts.append((sign, body))
    head_sign, head = parts[0]
    text = ("-" if head_sign == "-" else "") + head
    for sign, body in parts[1:]:
        text += sign + body
    return text


@dataclass(frozen=True)
class LaurentPoly:
    """Sparse Laurent polynomial: exponent -> nonzero rational coefficient."""

    terms: Mapping[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {int(e): as_fraction(c) for e, c in dict(self.terms).items() if c != 0}
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    @classmethod
    def one(cls) -> "LaurentPoly":
        return cls({0: Fraction(1)})

    @classmethod
    def monomial(cls, e: int, c: RationalLike = 1) -> "LaurentPoly":
        return cls({e: as_fraction(c)})

    def coeff(self, e: int) -> Fraction:
        return self.terms.get(e, Fraction(0))

    def constant_term(self) -> Fraction:
        return self.coeff(0)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPoly):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(self.terms.items()))

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return LaurentPoly(out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        return laurent_mul(self, other)

    def __pow__(self, e: int) -> "LaurentPoly":
        if e < 0:
            raise ValueError("negative power of a Laurent polynomial")
        result = LaurentPoly.one()
        for _ in range(e):
            result = laurent_mul(result, self)
        return result

    def scale(self, c: RationalLike) -> "LaurentPoly":
        c = as_fraction(c)
        return LaurentPoly({e: c * v for e, v in self.terms.items()})

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mag = abs(c)
            if e == 0:
                body = _format_rational(mag)
            elif e > 0:
                mono = "x" if e == 1 else f"x^{e}"
                body = mono if mag == 1 else f"{_format_rational(mag)}*{mono}"
            else:
                mono = "x" if e == -1 else f"x^{-e}"
                body = f"{_format_rational(mag)}/{mono}"
            parts.append(("-" if c < 0 else "+", body))
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        return text + "".join(s + b for s, b in parts[1:])


def laurent_mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    out: dict[int, Fraction] = {}
    for ea, ca in a.terms.items():
        for eb, cb in b.terms.items():
            e = ea + eb
            out[e] = out.get(e, Fraction(0)) + ca * cb
    return LaurentPoly(out)
