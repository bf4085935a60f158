"""Recognizing high-precision floats: continued fractions, integer relations
(PSLQ) and a small dictionary of named constants."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Sequence

import mpmath


class InsufficientPrecisionError(ValueError):
    pass


@dataclass(frozen=True)
class ConstantEntry:
    name: str
    description: str
    irrationality_known: bool
    compute: Optional[Callable[[], mpmath.mpf]] = None
    literal: Optional[str] = None
    # set for ln(m), so combinations of logs can be rendered as ln(rational)
    log_of: Optional[int] = None

    def value(self) -> mpmath.mpf:
        """Value at the ambient mpmath precision."""
        if self.compute is not None:
            return +self.compute()
        return mpmath.mpf(self.literal)

    @property
    def digits_available(self) -> float:
        if self.compute is not None:
            return math.inf
        return len(self.literal.replace("-", "").replace(".", "").lstrip("0"))


def _builtin_entries() -> list[ConstantEntry]:
    return [
        ConstantEntry("1", "the unit", False, lambda: mpmath.mpf(1)),
        ConstantEntry("pi", "circle constant", True, lambda: mpmath.pi),
        ConstantEntry("pi^2", "square of pi", True, lambda: mpmath.pi ** 2),
        ConstantEntry("ln(2)", "natural log of 2", True, lambda: mpmath.log(2), log_of=2),
        ConstantEntry("ln(3)", "natural log of 3", True, lambda: mpmath.log(3), log_of=3),
        ConstantEntry("ln(5)", "natural log of 5", True, lambda: mpmath.log(5), log_of=5),
        ConstantEntry("zeta(3)", "Apery's constant", True, lambda: mpmath.zeta(3)),
        ConstantEntry("Catalan", "Catalan's constant", False, lambda: mpmath.catalan),
        ConstantEntry("gamma", "Euler's constant", False, lambda: mpmath.euler),
        ConstantEntry("e", "base of the natural log", True, lambda: mpmath.e),
    ]


@dataclass
class ConstantDictionary:
    entries: list[ConstantEntry] = field(default_factory=_builtin_entries)

    @classmethod
    def default(cls) -> "ConstantDictionary":
        return cls()

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, name: str) -> ConstantEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def names(self) -> list[str]:
        return [e.name for e in self.entries]

    def extend_from_file(self, path) -> "ConstantDictionary":
        """Add records ``name <value digits> <true|false>``, one per line;
        ``#`` starts a comment."""
        added = list(self.entries)
        for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3 or parts[2].lower() not in ("true", "false"):
                raise ValueError(f"{path}:{lineno}: expected 'name value true|false'")
            name, value, known = parts
            mpmath.mpf(value)  # validate
            added.append(ConstantEntry(name, "user supplied", known.lower() == "true", literal=value))
        out = ConstantDictionary(added)
        out.check_distinct()
        return out

    def check_distinct(self, digits: int = 30) -> None:
        with mpmath.workdps(digits + 10):
            vals = [(e.name, e.value()) for e in self.entries]
        for (n1, v1), (n2, v2) in itertools.combinations(vals, 2):
            if abs(v1 - v2) < mpmath.mpf(10) ** (-digits):
                raise ValueError(f"dictionary constants {n1} and {n2} coincide")


def continued_fraction(x, depth: int) -> list[int]:
    """Partial quotients of x; exact for Fractions, otherwise stops once the
    remainder is indistinguishable from precision noise."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        out = []
        while len(out) < depth:
            a = math.floor(x)
            out.append(a)
            frac = x - a
            if frac == 0:
                break
            x = 1 / frac
        return out
    x = mpmath.mpf(x)
    noise = mpmath.mpf(2) ** (-mpmath.mp.prec + 20)
    out = []
    err = noise * max(1, abs(x))
    while len(out) < depth:
        a = int(mpmath.floor(x))
        out.append(a)
        frac = x - a
        if frac <= err:
            break
        # relative error grows like 1/frac^2 through the inversion
        err = err / (frac * frac)
        if err > 0.1:
            break
        x = 1 / frac
    return out


def integer_relation(xs: Sequence, coeff_bound: int = 10 ** 4, maxsteps: int = 10 ** 5) -> Optional[list[int]]:
    """Nonzero integer vector r, max|r_i| <= coeff_bound, with sum r_i x_i ~ 0.

    Uses mpmath.pslq at the ambient precision; the relation is accepted only
    if the residual is below 10^-(dps - 20)."""
    if len(xs) < 2:
        raise ValueError("need at least two values")
    dps = mpmath.mp.dps
    needed = len(xs) * math.log10(max(coeff_bound, 2)) + 30
    if dps < needed:
        raise InsufficientPrecisionError(f"{dps} digits < {needed:.0f} needed for {len(xs)} values at bound {coeff_bound}")
    xs = [mpmath.mpf(x) for x in xs]
    tol = mpmath.mpf(10) ** (-(dps - 20))
    rel = mpmath.pslq(xs, tol=tol, maxcoeff=coeff_bound, maxsteps=maxsteps)
    if rel is None or max(abs(r) for r in rel) > coeff_bound:
        return None
    if abs(mpmath.fsum(r * x for r, x in zip(rel, xs))) >= tol:
        return None
    return [int(r) for r in rel]


@dataclass(frozen=True)
class Identification:
    """x = constant + sum coeffs[name] * dictionary[name], or a root of
    ``minimal_polynomial`` (integer coefficients, lowest degree first)."""

    kind: str  # dictionary | rational-multiple | linear-combination | algebraic
    name: str
    coeffs: tuple[tuple[str, Fraction], ...] = ()
    constant: Fraction = Fraction(0)
    minimal_polynomial: tuple[int, ...] = ()
    residual: float = 0.0
    irrationality_known: bool = False
    conjectural: bool = True

    @property
    def scale(self) -> int:
        """Smallest positive integer m with m*x an integer combination of
        the constants involved."""
        den = self.constant.denominator
        for _, c in self.coeffs:
            den = math.lcm(den, c.denominator)
        return den


def _fmt_coeff_name(c: Fraction, name: str) -> str:
    if name == "1":
        return str(c) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    num, den = c.numerator, c.denominator
    head = name if abs(num) == 1 else f"{abs(num)}*{name}"
    if num < 0:
        head = "-" + head
    return head if den == 1 else f"{head}/{den}"


def _render(coeffs: dict[str, Fraction], constant: Fraction, dictionary: ConstantDictionary) -> str:
    logs = {n: c for n, c in coeffs.items() if dictionary[n].log_of}
    if constant == 0 and logs and len(logs) == len(coeffs) and len(logs) > 1:
        den = 1
        for c in logs.values():
            den = math.lcm(den, c.denominator)
        num_arg, den_arg = 1, 1
        for n, c in logs.items():
            e = int(c * den)
            base = dictionary[n].log_of
            if e > 0:
                num_arg *= base ** e
            else:
                den_arg *= base ** (-e)
        arg = str(Fraction(num_arg, den_arg))
        return f"ln({arg})" if den == 1 else f"ln({arg})/{den}"
    parts = [_fmt_coeff_name(c, n) for n, c in coeffs.items()]
    if constant:
        parts.append(_fmt_coeff_name(constant, "1"))
    text = parts[0]
    for p in parts[1:]:
        text += p if p.startswith("-") else "+" + p
    return text


def _poly_text(coeffs: Sequence[int]) -> str:
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if c == 0:
            continue
        mono = "" if i == 0 else "x" if i == 1 else f"x^{i}"
        mag = abs(c)
        body = str(mag) if i == 0 else (mono if mag == 1 else f"{mag}*{mono}")
        terms.append(("-" if c < 0 else "+", body))
    text = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    return text + "".join(s + b for s, b in terms[1:])


def _from_relation(rel, names, dictionary, x, kind) -> Optional[Identification]:
    """rel[0]*x + sum rel[i]*theta_i = 0 with rel[0] != 0."""
    if rel is None or rel[0] == 0:
        return None
    coeffs, constant = {}, Fraction(0)
    for r, n in zip(rel[1:], names):
        if r == 0:
            continue
        c = Fraction(-r, rel[0])
        if n == "1":
            constant += c
        else:
            coeffs[n] = c
    if kind != "rational-multiple" and (not coeffs or any(n != "1" and n not in coeffs for n in names)):
        # a relation that ignores one of the requested constants belongs to an earlier stage
        return None
    if kind == "rational-multiple" and not coeffs and constant == 0:
        return None
    if kind == "rational-multiple" and len(coeffs) == 1 and next(iter(coeffs.values())) == 1:
        kind = "dictionary"
    if kind == "rational-multiple" and not coeffs:
        known = False  # plain rational
    elif len(coeffs) == 1:
        known = dictionary[next(iter(coeffs))].irrationality_known
    else:
        known = all(dictionary[n].log_of for n in coeffs) and constant == 0
    with mpmath.workdps(mpmath.mp.dps):
        resid = x - constant.numerator / mpmath.mpf(constant.denominator) - mpmath.fsum(
            c.numerator / mpmath.mpf(c.denominator) * dictionary[n].value() for n, c in coeffs.items()
        )
    return Identification(
        kind=kind,
        name=_render(coeffs, constant, dictionary),
        coeffs=tuple(coeffs.items()),
        constant=constant,
        residual=float(abs(resid)),
        irrationality_known=known,
    )


def identify_constant(
    x,
    dictionary: Optional[ConstantDictionary] = None,
    coeff_bound: int = 10 ** 4,
    max_degree: int = 3,
) -> Optional[Identification]:
    """Try, in order: rational multiple of one constant, rational combination
    of 1 and one constant, combination of two constants, algebraic number of
    degree <= max_degree. Stages whose precision requirement is not met by
    the ambient precision are skipped."""
    dictionary = dictionary or ConstantDictionary.default()
    x = mpmath.mpf(x)
    entries = list(dictionary)

    def attempt(values, names, kind):
        try:
            rel = integer_relation([x] + values, coeff_bound)
        except InsufficientPrecisionError:
            return None
        return _from_relation(rel, names, dictionary, x, kind)

    usable = [e for e in entries if e.digits_available >= mpmath.mp.dps - 5]
    vals = {e.name: e.value() for e in usable}
    for e in usable:
        hit = attempt([vals[e.name]], [e.name], "rational-multiple")
        if hit:
            return hit
    non_unit = [e for e in usable if e.name != "1"]
    for e in non_unit:
        hit = attempt([mpmath.mpf(1), vals[e.name]], ["1", e.name], "linear-combination")
        if hit:
            return hit
    for e1, e2 in itertools.combinations(non_unit, 2):
        hit = attempt([mpmath.mpf(1), vals[e1.name], vals[e2.name]], ["1", e1.name, e2.name], "linear-combination")
        if hit:
            return hit
    for deg in range(2, max_degree + 1):
        try:
            rel = integer_relation([x ** i for i in range(deg + 1)], coeff_bound)
        except InsufficientPrecisionError:
            break
        if rel is None or rel[-1] == 0:
            continue
        g = 0
        for r in rel:
            g = math.gcd(g, r)
        poly = [r // g for r in rel]
        if poly[-1] < 0:
            poly = [-r for r in poly]
        resid = abs(mpmath.polyval(list(reversed(poly)), x))
        return Identification(
            kind="algebraic",
            name=_poly_text(poly),
            minimal_polynomial=tuple(poly),
            residual=float(resid),
            irrationality_known=True,
        )
    return None
