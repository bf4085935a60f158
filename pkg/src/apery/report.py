"""JSON persistence and human-readable rendering of MiracleReport."""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Optional

import mpmath

from .analysis import DeltaEstimate, IntegralityPattern, MiracleReport
from .dsl import parse_operator
from .identify import Identification

DEFAULT_DIGITS = 10
ALPHA_DIGITS = 40

SCHEMA_KEYS = (
    "operator",
    "c_operator",
    "pattern",
    "growth",
    "beta",
    "delta",
    "measure",
    "alpha",
    "identification",
    "ini_p",
    "ini_q",
    "classification",
)


def _num(x, full: bool, digits: int = DEFAULT_DIGITS):
    """JSON number at ``digits`` significant digits, or a full-precision
    decimal string."""
    if x is None:
        return None
    if full:
        return mpmath.nstr(mpmath.mpf(x), mpmath.mp.dps, min_fixed=-mpmath.inf, max_fixed=mpmath.inf)
    return float(mpmath.nstr(mpmath.mpf(x), digits))


def _rational(x: Fraction):
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _parse_rational(v) -> Fraction:
    return Fraction(v) if isinstance(v, int) else Fraction(str(v))


def _mpf(v) -> Optional[mpmath.mpf]:
    return None if v is None else mpmath.mpf(str(v))


def report_to_dict(report: MiracleReport, full_precision: bool = False) -> dict[str, Any]:
    with mpmath.workdps(max(report.precision, 50)):
        emp = report.delta_empirical
        ident = report.identification
        pattern = report.pattern
        alpha_digits = report.precision if full_precision else ALPHA_DIGITS
        return {
            "operator": str(report.ope),
            "c_operator": None if report.c_ope is None else str(report.c_ope),
            "pattern": None if pattern is None else {"G": pattern.G, "R": pattern.R, "P": pattern.P, "D0": pattern.D0},
            "growth": {"k_float": _num(report.growth_k, full_precision), "k_exact": report.growth_k_exact},
            "beta": _num(report.beta, full_precision),
            "delta": {
                "rigorous": _num(report.delta_rigorous, full_precision),
                "empirical_last": None if emp is None else _num(emp.last_value, full_precision),
                "empirical_extrapolated": None if emp is None else _num(emp.extrapolated, False),
            },
            "measure": _num(report.measure, full_precision),
            "alpha": mpmath.nstr(report.alpha, alpha_digits, min_fixed=-mpmath.inf, max_fixed=mpmath.inf),
            "identification": None
            if ident is None
            else {"kind": ident.kind, "name": ident.name, "conjectural": ident.conjectural},
            "ini_p": [_rational(v) for v in report.ini_p],
            "ini_q": [_rational(v) for v in report.ini_q],
            "classification": report.classification,
        }


def to_json(report: MiracleReport, full_precision: bool = False, indent: Optional[int] = 2) -> str:
    return json.dumps(report_to_dict(report, full_precision), indent=indent)


def report_from_dict(d: dict[str, Any]) -> MiracleReport:
    """Inverse of report_to_dict, up to the precision that was written out.
    Fields outside the schema (sequence terms, notes) come back empty."""
    missing = [k for k in SCHEMA_KEYS if k not in d]
    if missing:
        raise ValueError(f"report is missing fields {missing}")
    alpha_text = str(d["alpha"]).lstrip("-0.").replace(".", "")
    digits = max(len(alpha_text.split("e")[0]), 50)
    with mpmath.workdps(digits):
        pat = d["pattern"]
        delta = d["delta"]
        emp = None
        if delta["empirical_last"] is not None:
            last = _mpf(delta["empirical_last"])
            extra = delta["empirical_extrapolated"]
            emp = DeltaEstimate([], last, None if extra is None else float(extra))
        ident = d["identification"]
        return MiracleReport(
            ope=parse_operator(d["operator"]),
            c_ope=None if d["c_operator"] is None else parse_operator(d["c_operator"]),
            pattern=None if pat is None else IntegralityPattern(pat["G"], pat["R"], pat["P"], pat["D0"]),
            growth_k=_mpf(d["growth"]["k_float"]),
            growth_k_exact=d["growth"]["k_exact"],
            beta=_mpf(d["beta"]),
            delta_rigorous=_mpf(delta["rigorous"]),
            delta_empirical=emp,
            measure=_mpf(d["measure"]),
            alpha=_mpf(d["alpha"]),
            identification=None
            if ident is None
            else Identification(kind=ident["kind"], name=ident["name"], conjectural=ident["conjectural"]),
            ini_p=[_parse_rational(v) for v in d["ini_p"]],
            ini_q=[_parse_rational(v) for v in d["ini_q"]],
            classification=d["classification"],
            precision=digits,
        )


def from_json(text: str) -> MiracleReport:
    return report_from_dict(json.loads(text))


def _short(x, digits: int = DEFAULT_DIGITS) -> str:
    if x is None:
        return "n/a"
    x = mpmath.mpf(x)
    if x == mpmath.nint(x) and abs(x) < 10 ** digits:
        return str(int(x))
    return mpmath.nstr(x, digits)


def render_text(report: MiracleReport) -> str:
    """Compact summary, one field per line, in schema order."""
    d = report_to_dict(report)
    lines = []
    for key in SCHEMA_KEYS:
        v = d[key]
        if isinstance(v, dict):
            v = ", ".join(f"{k}={v[k]}" for k in v)
        lines.append(f"{key:15s} {v}")
    return "\n".join(lines)


def _fmt_terms(terms) -> str:
    return ", ".join(str(t) for t in terms)


def render_verbose(report: MiracleReport) -> str:
    """Step-by-step account of the analysis with the delta formula written
    out for the actual numbers."""
    r = report
    out = []
    out.append("APPROXIMATION SCHEME")
    if r.source:
        out.append(f"Source: {r.source}")
    out.append(f"Recurrence operator (N the forward shift in n): {r.ope}")
    out.append(f"p(n) starts {_fmt_terms(r.ini_p)}; q(n) starts {_fmt_terms(r.ini_q)}.")
    if r.first_terms_p:
        out.append(f"First terms of p: {_fmt_terms(r.first_terms_p)}")
        out.append(f"First terms of q: {_fmt_terms(r.first_terms_q)}")
    out.append("")
    out.append("COUPLING SEQUENCE c(n) = p(n)q(n-1) - p(n-1)q(n)")
    if r.first_terms_c:
        out.append(f"First terms (from n=1): {_fmt_terms(r.first_terms_c)}")
    if r.c_ope is not None:
        out.append(f"Guessed operator for c(n): {r.c_ope}")
        out.append("It was checked exactly on every computed term, which is evidence, not proof.")
    else:
        out.append("No operator for c(n) was found within the guess bounds; beta is taken as 1.")
    out.append("")
    out.append("GROWTH")
    k_text = _short(r.growth_k)
    if r.growth_k_exact:
        out.append(f"q(n) grows like k^n with k = {r.growth_k_exact} = {k_text}.")
    else:
        out.append(f"q(n) grows like k^n with k = {k_text}.")
    out.append(f"c(n) grows like beta^n with beta = {_short(r.beta)}.")
    out.append("")
    out.append("INTEGRALITY")
    if r.pattern is not None:
        G, R, P, D0 = r.pattern.as_list()
        out.append(
            f"Pattern [G, R, P, D0] = [{G}, {R}, {P}, {D0}]: L({G}n)^{R} * {P}^n * {D0} * p(n) is an integer, "
            "with L(m) = lcm(1..m)."
        )
        out.append(
            "This was observed for the computed terms only; it is an empirical claim, and the rigorous delta "
            "below is conditional on it holding for all n."
        )
    else:
        out.append("No integrality pattern within the search bounds, so no rigorous delta is available.")
    out.append("")
    out.append("EXPONENT DELTA")
    if r.delta_rigorous is not None and r.pattern is not None:
        G, R, P, _ = r.pattern.as_list()
        beta = _short(r.beta)
        out.append("delta = (2 ln k - ln beta) / (ln k + G*R + ln P)")
        out.append(f"      = (2·ln({k_text}) − ln {beta})/(ln({k_text}) + {G * R} + ln {P})")
        out.append(f"      = {_short(r.delta_rigorous)}")
        if r.measure is not None and mpmath.mpf(r.delta_rigorous) > 1:
            out.append(f"Irrationality measure delta/(delta-1) = {_short(r.measure)}")
        else:
            out.append("No irrationality measure follows from delta <= 1.")
    else:
        out.append("Rigorous delta: not available.")
    if r.delta_empirical is not None:
        out.append(
            f"Empirical delta from the convergents: {_short(r.delta_empirical.last_value)} at the last index, "
            f"{_short(r.delta_empirical.extrapolated)} extrapolated in 1/n."
        )
    out.append("")
    out.append("LIMIT")
    out.append(f"alpha = {mpmath.nstr(r.alpha, ALPHA_DIGITS)}")
    ident = r.identification
    if ident is None:
        out.append("alpha is an unidentified constant: no relation with the dictionary constants was found.")
    else:
        text = f"alpha = {ident.name} ({ident.kind})"
        if ident.conjectural:
            text += "; this identification is conjectural, found numerically by an integer-relation search"
        out.append(text + ".")
    out.append("")
    out.append(f"CLASSIFICATION: {r.classification}")
    head = r.headline_delta
    if head is not None and mpmath.mpf(head) <= 1:
        out.append(
            "delta does not exceed 1, so no irrationality proof follows; the scheme still converges at a "
            "geometric rate and may be useful for numerical evaluation."
        )
    for note in r.notes:
        out.append(f"Note: {note}")
    return "\n".join(out)
