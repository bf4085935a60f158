"""Command-line entry point: ``apery <command> [options]``.

Exit status is 0 when a report (or hit file) was produced. Failures print a
one-line JSON object {"error": code, "message": ...} to stderr and exit with
the code's number from EXIT_CODES.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

import mpmath

from . import pipeline, report, search
from .dsl import NotARecurrenceError, ParseError
from .generators import SpanError
from .guess import GuessConfig, InsufficientTermsError
from .identify import ConstantDictionary, InsufficientPrecisionError, identify_constant
from .sequences import SingularRecurrenceError

EXIT_CODES = {
    "usage": 2,
    "parse": 3,
    "singular": 4,
    "guess-failed": 5,
    "precision": 6,
    "span": 7,
    "precondition": 8,
    "io": 9,
}

CONFIG_KEYS = {"K", "precision", "dictionary", "max_order", "max_degree", "verify_count", "window_start"}


class CliError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def read_config(path) -> dict[str, str]:
    """key=value lines; blank lines and ``#`` comments ignored."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError("usage", f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise CliError("usage", f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def _int_list(text: str) -> list[Fraction]:
    try:
        return [Fraction(v.strip()) for v in text.strip("[] ").split(",") if v.strip()]
    except ValueError as exc:
        raise CliError("parse", f"bad number list {text!r}: {exc}") from exc


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("-K", type=int, default=None, help="number of terms examined (default 200)")
    p.add_argument("--precision", type=int, default=None, help="working precision in digits (default: automatic)")
    p.add_argument("--dictionary", default=None, help="extra constants, lines of 'name value true|false'")
    p.add_argument("--max-order", type=int, default=None)
    p.add_argument("--max-degree", type=int, default=None)
    p.add_argument("--config", default=None, help="key=value file for K, precision, dictionary, guess bounds")
    p.add_argument("--format", choices=("json", "text", "both"), default="json")
    p.add_argument("--json", dest="json_out", default=None, help="also write the JSON report to this file")
    p.add_argument("--verbose", action="store_true", help="print the step-by-step report")
    p.add_argument("--full-precision", action="store_true", help="write floats at full working precision")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="apery", description="Find and grade rational approximation schemes.")
    parser.add_argument("--log-level", default="WARNING")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ra-rec", help="analyze a recurrence with two sets of initial values")
    p.add_argument("--ope", required=True)
    p.add_argument("--ini1", required=True, help="p initial values, comma separated")
    p.add_argument("--ini2", required=True, help="q initial values, comma separated")
    _common(p)

    p = sub.add_parser("ra-sum", help="q(n) = sum over k of a hypergeometric summand")
    p.add_argument("--summand", required=True)
    p.add_argument("--ini-p", default=None, help="override the p initial values")
    _common(p)

    p = sub.add_parser("ra-ct", help="q(n) = constant term of P(x)^n")
    p.add_argument("--laurent", required=True)
    p.add_argument("--ini-p", default=None)
    p.add_argument("--min-order", type=int, default=1, help="smallest operator order to accept")
    _common(p)

    p = sub.add_parser("ra-int", help="integral families with a known limit")
    p.add_argument("--family", required=True, choices=("log", "arctan-odd", "arctan-custom"))
    p.add_argument("--a", default=None, help="log family parameter (rational, > 0, != 1)")
    p.add_argument("--k", type=int, default=None, help="arctan-odd parameter, m = 2k+1")
    p.add_argument("--m", type=int, default=None, help="arctan-custom parameter")
    p.add_argument("--scale-log2", type=int, default=3)
    p.add_argument("--scale-m", type=int, default=2)
    _common(p)

    p = sub.add_parser("scan", help="scan an operator family, writing hits as NDJSON")
    p.add_argument("--family", required=True, choices=("f1", "ct"))
    p.add_argument("--A", type=int, required=True)
    p.add_argument("--B", type=int, required=True)
    p.add_argument("-K", type=int, default=100)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--resume", action="store_true")

    p = sub.add_parser("identify", help="recognize a decimal number")
    p.add_argument("--value", required=True)
    p.add_argument("--bound", type=int, default=10 ** 4)
    p.add_argument("--dictionary", default=None)
    return parser


def _run_config(args) -> pipeline.RunConfig:
    conf = read_config(args.config) if args.config else {}

    def pick(name, cast):
        v = getattr(args, name, None)
        if v is None and name in conf:
            v = cast(conf[name])
        return v

    K = pick("K", int)
    precision = pick("precision", int)
    dict_path = args.dictionary or conf.get("dictionary")
    guess = GuessConfig()
    bounds = {}
    for key in ("max_order", "max_degree", "verify_count", "window_start"):
        v = getattr(args, key, None)
        if v is None and key in conf:
            v = int(conf[key])
        if v is not None:
            bounds[key] = v
    if getattr(args, "min_order", 1) != 1:
        bounds["min_order"] = args.min_order
        bounds.setdefault("max_order", max(args.min_order, guess.max_order))
    guess = replace(guess, **bounds)
    dictionary = ConstantDictionary.default()
    if dict_path:
        dictionary = dictionary.extend_from_file(dict_path)
    ini_p = _int_list(args.ini_p) if getattr(args, "ini_p", None) else None
    kwargs = dict(precision=precision, dictionary=dictionary, guess=guess, ini_p=ini_p)
    if K is not None:
        kwargs["K"] = K
    return pipeline.RunConfig(**kwargs)


def _emit(rep, args) -> None:
    text = report.to_json(rep, full_precision=args.full_precision)
    if args.json_out:
        Path(args.json_out).write_text(text + "\n")
    if args.verbose:
        print(report.render_verbose(rep))
        if args.format in ("json", "both"):
            print()
    if args.format in ("json", "both"):
        print(text)
    if args.format in ("text", "both") and not args.verbose:
        print(report.render_text(rep))


def _dispatch(args) -> int:
    cmd = args.command
    if cmd == "identify":
        digits = len(args.value.lstrip("-+0.").replace(".", "").split("e")[0].split("E")[0])
        dictionary = ConstantDictionary.default()
        if args.dictionary:
            dictionary = dictionary.extend_from_file(args.dictionary)
        with mpmath.workdps(max(digits, 15)):
            x = mpmath.mpf(args.value)
            if digits < 60:
                raise CliError("precision", f"need at least 60 significant digits, got {digits}")
            ident = identify_constant(x, dictionary, coeff_bound=args.bound)
        out = None if ident is None else {
            "kind": ident.kind,
            "name": ident.name,
            "residual": ident.residual,
            "conjectural": ident.conjectural,
        }
        print(json.dumps({"identification": out}))
        return 0
    if cmd == "scan":
        sink = search.HitSink(args.out)
        if args.family == "f1":
            hits = search.scan_family_1(args.A, args.B, args.K, workers=args.workers, sink=sink, resume=args.resume)
        else:
            r = range(args.A, args.B + 1)
            hits = search.scan_ct_family(r, r, r, args.K, workers=args.workers, sink=sink, resume=args.resume)
        print(json.dumps({"hits": len(hits), "out": str(args.out)}))
        return 0
    cfg = _run_config(args)
    if cmd == "ra-rec":
        rep = pipeline.run_ra_rec(args.ope, _int_list(args.ini1), _int_list(args.ini2), cfg)
    elif cmd == "ra-sum":
        rep = pipeline.run_ra_sum(args.summand, cfg)
    elif cmd == "ra-ct":
        rep = pipeline.run_ra_ct(args.laurent, cfg)
    else:
        a = Fraction(args.a) if args.a is not None else None
        rep = pipeline.run_ra_int(
            args.family, cfg, a=a, k=args.k, m=args.m, scale_log2=args.scale_log2, scale_m=args.scale_m
        )
    _emit(rep, args)
    return 0


def _classify(exc: BaseException) -> str:
    if isinstance(exc, CliError):
        return exc.code
    if isinstance(exc, (ParseError, NotARecurrenceError)):
        return "parse"
    if isinstance(exc, SingularRecurrenceError):
        return "singular"
    if isinstance(exc, (pipeline.GuessFailedError, InsufficientTermsError)):
        return "guess-failed"
    if isinstance(exc, InsufficientPrecisionError):
        return "precision"
    if isinstance(exc, SpanError):
        return "span"
    if isinstance(exc, OSError):
        return "io"
    return "precondition"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING), stream=sys.stderr)
    try:
        return _dispatch(args)
    except (CliError, ValueError, ArithmeticError, OSError) as exc:
        code = _classify(exc)
        print(json.dumps({"error": code, "message": str(exc)}), file=sys.stderr)
        return EXIT_CODES[code]


if __name__ == "__main__":
    sys.exit(main())
