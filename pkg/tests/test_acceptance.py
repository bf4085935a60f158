"""Acceptance checks, one per criterion. Each prints a PASS/FAIL line and
then asserts, so the file works under pytest and as a script."""

import contextlib
import io
import json
import math
import sys
import time
from fractions import Fraction

import mpmath
import pytest

from apery import analysis as an
from apery.cli import main
from apery.dsl import normalize_operator, parse_laurent, parse_operator
from apery.exact import lcm_upto
from apery.generators import (
    binomial_sum_sequence,
    constant_term_sequence,
    log_integral_sequence,
    parse_summand,
)
from apery.guess import GuessConfig, guess_operator, verify_operator
from apery.identify import ConstantDictionary, identify_constant, integer_relation
from apery.pipeline import RunConfig, run_ra_ct, run_ra_sum
from apery.search import HitSink, scan_family_1
from apery.sequences import make_pair, telescoping_holds

ZETA3 = "(n+2)^3*N^2-(2*n+3)*(17*n^2+51*n+39)*N+(n+1)^3"
ZETA2 = "(n+2)^2*N^2-(11*n^2+33*n+25)*N-(n+1)^2"
LN2 = "(n+2)*N^2-(6*n+9)*N+(n+1)"
FIXTURES = {
    "zeta3": (ZETA3, [0, 6], [1, 5]),
    "zeta2": (ZETA2, [0, 5], [1, 3]),
    "ln2": (LN2, [0, 2], [1, 3]),
    "ln43": ("(n+2)*N^2-(14*n+21)*N+(n+1)", [0, 2], [1, 7]),
    "sqrt2": ("N^2-2*N-1", [1, 2], [0, 1]),
}


_capture = None


@pytest.fixture(autouse=True)
def _show_verdicts(capsys):
    global _capture
    _capture = capsys
    yield
    _capture = None


def _verdict(number: int, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
    if _capture is None:
        print(line, flush=True)
    else:
        with _capture.disabled():
            print("\n" + line, flush=True)
    assert ok, line


def _cli(argv) -> dict:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(argv)
    assert code == 0, f"exit code {code} for {argv}"
    return json.loads(buf.getvalue())


def _near(x, target, tol) -> bool:
    return x is not None and abs(float(x) - target) <= tol


def _ra_rec(name, K=200):
    ope, ip, iq = FIXTURES[name]
    return _cli(["ra-rec", "--ope", ope, "--ini1", ",".join(map(str, ip)), "--ini2", ",".join(map(str, iq)), "-K", str(K)])


def test_criterion_01_zeta3():
    t = time.perf_counter()
    d = _ra_rec("zeta3")
    ope, ip, iq = FIXTURES["zeta3"]
    pair = make_pair(parse_operator(ope), ip, iq, 50)
    pattern_ok = an.pattern_holds(pair.p, an.IntegralityPattern(1, 3, 1, 1))
    ext = d["delta"]["empirical_extrapolated"]
    dt = time.perf_counter() - t
    ok = (
        d["identification"]["name"] == "zeta(3)"
        and _near(d["delta"]["rigorous"], 1.080529431, 1e-6)
        and 1.07 <= ext <= 1.09
        and d["pattern"] == {"G": 1, "R": 3, "P": 1, "D0": 1}
        and pattern_ok
        and dt < 60
    )
    _verdict(1, ok, f"zeta(3): rigorous {d['delta']['rigorous']}, extrapolated {ext}, "
             f"pattern {list(d['pattern'].values())}, {dt:.1f}s")


def test_criterion_02_zeta2():
    t = time.perf_counter()
    d = _ra_rec("zeta2")
    dt = time.perf_counter() - t
    ok = _near(d["delta"]["rigorous"], 1.092159255, 1e-6) and d["identification"]["name"] == "pi^2/6" and dt < 60
    _verdict(2, ok, f"zeta(2): rigorous {d['delta']['rigorous']}, alpha = {d['identification']['name']}, {dt:.1f}s")


def test_criterion_03_ln2():
    t = time.perf_counter()
    d = _ra_rec("ln2")
    dt = time.perf_counter() - t
    ok = _near(d["delta"]["rigorous"], 1.276082872, 1e-6) and d["identification"]["name"] == "ln(2)" and dt < 60
    _verdict(3, ok, f"ln 2: rigorous {d['delta']['rigorous']}, alpha = {d['identification']['name']}, {dt:.1f}s")


def test_criterion_04_ln43_tuple():
    t = time.perf_counter()
    d = _cli(["ra-sum", "--summand", "binomial(n,k)*binomial(n+k,k)*3^k"])
    dt = time.perf_counter() - t
    expected_ope = normalize_operator(parse_operator("(-n-2)*N^2+(14*n+21)*N-n-1"))
    checks = {
        "operator": normalize_operator(parse_operator(d["operator"])).coefficient_lists() == expected_ope.coefficient_lists(),
        "c_operator": normalize_operator(parse_operator(d["c_operator"])).coefficient_lists()
        == normalize_operator(parse_operator("(n+1)*N-n")).coefficient_lists(),
        "pattern": d["pattern"] == {"G": 1, "R": 1, "P": 1, "D0": 1},
        "k": _near(d["growth"]["k_float"], 13.92820323, 1e-6) and d["growth"]["k_exact"] == "7+4*sqrt(3)",
        "delta": _near(d["delta"]["rigorous"], 1.449629514, 1e-6),
        "measure": _near(d["measure"], 3.224053290, 1e-6),
        "alpha": d["alpha"] == "0.2876820724517809274392190059938274315035",
        "name": d["identification"]["name"] == "ln(4/3)",
        "ini": d["ini_p"] == [0, 2] and d["ini_q"] == [1, 7],
        "time": dt < 60,
    }
    bad = [k for k, v in checks.items() if not v]
    _verdict(4, not bad, f"ln(4/3) tuple, mismatched fields: {bad or 'none'}, {dt:.1f}s")


def test_criterion_05_disappointing():
    t = time.perf_counter()
    d = _cli(["ra-sum", "--summand", "binomial(n,k)^2*binomial(n+k,k)*2^k"])
    dt = time.perf_counter() - t
    order = parse_operator(d["operator"]).order
    last = d["delta"]["empirical_last"]
    ok = (
        order == 3
        and d["alpha"].startswith("0.02266573727755793921")
        and _near(last, 0.4934, 0.01)
        and d["identification"] is None
        and d["classification"] == "none"
        and dt < 90
    )
    _verdict(5, ok, f"order {order}, alpha {d['alpha'][:24]}, empirical {last}, rigorous {d['delta']['rigorous']}, "
             f"identification {d['identification']}, class {d['classification']}, {dt:.1f}s")


def test_criterion_06_scan():
    t = time.perf_counter()
    hits = scan_family_1(1, 20, 100)
    dt = time.perf_counter() - t
    champion = max(hits, key=lambda h: h.delta_empirical)
    ok = (
        abs(len(hits) - 121) <= 5
        and champion.family_params == (10, 15)
        and abs(float(champion.delta_empirical) - 1.440802982) <= 0.05
        and dt < 600
    )
    _verdict(6, ok, f"{len(hits)} hits, champion {champion.family_params} "
             f"delta {mpmath.nstr(champion.delta_empirical, 10)}, {dt:.1f}s")


def test_criterion_07_arctan_forms():
    t = time.perf_counter()
    d0 = an.arctan_odd_delta(0)
    odd = [an.arctan_odd_delta(k) for k in range(1, 6)]
    even = [an.arctan_even_delta(k) for k in range(1, 6)]
    dt = time.perf_counter() - t
    ok = abs(d0 - mpmath.mpf("0.79119792")) <= 1e-7 and all(v > 1 for v in odd) and all(v > 1 for v in even[1:]) and dt < 1
    _verdict(7, ok, f"odd k=0 {mpmath.nstr(d0, 10)}, odd k=1..5 min {mpmath.nstr(min(odd), 6)}, "
             f"even k=2..5 min {mpmath.nstr(min(even[1:]), 6)}, even k=1 {mpmath.nstr(even[0], 6)}")


def test_criterion_08_log_integral():
    t = time.perf_counter()
    vals = log_integral_sequence(2, 5)
    exact_ok = vals[0].coords == (0, 1) and vals[1].coords == (-2, 3)
    with mpmath.workdps(80):
        quad_err = max(
            abs(v.evaluate() - mpmath.quad(lambda x: (x * (1 - x) / (1 + x)) ** n / (1 + x), [0, 0.5, 1]))
            for n, v in enumerate(vals)
        )
    d = _cli(["ra-int", "--family", "log", "--a", "2", "-K", "150"])
    dt = time.perf_counter() - t
    last = d["delta"]["empirical_last"]
    ok = exact_ok and quad_err < mpmath.mpf(10) ** -60 and last > 1 and d["identification"]["name"] == "ln(2)" and dt < 120
    _verdict(8, ok, f"I(0),I(1) exact {exact_ok}, quadrature error {mpmath.nstr(quad_err, 3)}, "
             f"empirical delta {last}, {dt:.1f}s")


def test_criterion_09_ct_equals_sum():
    t = time.perf_counter()
    same = all(
        constant_term_sequence(parse_laurent(f"(1+x)*({a}+{a + 1}*x)/x"), 12)
        == binomial_sum_sequence(parse_summand(f"binomial(n,k)*binomial(n+k,k)*{a}^k"), 12)
        for a in (1, 2, 3)
    )
    dt = time.perf_counter() - t
    _verdict(9, same and dt < 5, f"CT and binomial sums agree for a=1,2,3, n<=12: {same}, {dt:.2f}s")


def test_criterion_10_guesser():
    t = time.perf_counter()
    cases = [
        ("binomial(n,k)^2*binomial(n+k,k)^2", ZETA3),
        ("binomial(n,k)^2*binomial(n+k,k)", ZETA2),
        ("binomial(n,k)*binomial(n+k,k)", LN2),
    ]
    results = []
    for summand, expected in cases:
        seq = binomial_sum_sequence(parse_summand(summand), 49)
        ope = guess_operator(seq[:30], GuessConfig(max_order=2, max_degree=3))
        match = ope is not None and (
            normalize_operator(ope).coefficient_lists() == normalize_operator(parse_operator(expected)).coefficient_lists()
        )
        held_out = ope is not None and verify_operator(ope, seq, start=28)
        results.append(match and held_out)
    dt = time.perf_counter() - t
    _verdict(10, all(results) and dt < 30, f"recovered and held-out verified {results}, {dt:.1f}s")


def test_criterion_11_sqrt2():
    t = time.perf_counter()
    d = _ra_rec("sqrt2")
    ope, ip, iq = FIXTURES["sqrt2"]
    pair = make_pair(parse_operator(ope), ip, iq, 50)
    c_ok = pair.c == [Fraction((-1) ** n) for n in range(1, 51)]
    dt = time.perf_counter() - t
    ident = d["identification"]
    ext = d["delta"]["empirical_extrapolated"]
    ok = ident["kind"] == "algebraic" and ident["name"] == "x^2-2*x-1" and _near(ext, 2.0, 0.02) and c_ok and dt < 10
    _verdict(11, ok, f"alpha root of {ident['name']}, empirical {ext} (last {d['delta']['empirical_last']}), "
             f"c(n)=(-1)^n {c_ok}, {dt:.1f}s")


def test_criterion_12_identification():
    import random

    t = time.perf_counter()
    rng = random.Random(12)
    dictionary = ConstantDictionary.default()
    recovered = 0
    for _ in range(30):
        name = rng.choice(dictionary.names())
        r = Fraction(rng.randint(1, 10 ** 4) * rng.choice((-1, 1)), rng.randint(1, 10 ** 4))
        with mpmath.workdps(80):
            ident = identify_constant(r.numerator * dictionary[name].value() / r.denominator, dictionary)
        if ident is None:
            continue
        if name == "1":
            recovered += ident.constant == r and not ident.coeffs
        else:
            recovered += dict(ident.coeffs) == {name: r} and ident.constant == 0
    with mpmath.workdps(100):
        no_rel = integer_relation([mpmath.mpf(1), mpmath.pi, mpmath.pi ** 2], 10 ** 4) is None
    ar_err = max(
        abs(run_ra_sum(f"binomial(n,k)*binomial(n+k,k)*{a}^k", RunConfig(K=60)).delta_rigorous - an.binomial_log_delta(a))
        for a in (1, 2, 3)
    )
    ct_err = max(
        abs(run_ra_ct(f"(1+{a}*x)*(1+{b}*x)/x", RunConfig(K=60)).delta_rigorous - an.ct_log_delta(a, b))
        for a, b in ((1, 2), (1, 3), (2, 3))
    )
    dt = time.perf_counter() - t
    ok = recovered == 30 and no_rel and ar_err < 1e-6 and ct_err < 1e-6 and dt < 60
    _verdict(12, ok, f"planted {recovered}/30, [1,pi,pi^2] no relation {no_rel}, "
             f"closed-form errors {mpmath.nstr(ar_err, 3)} / {mpmath.nstr(ct_err, 3)}, {dt:.1f}s")


def test_criterion_13_properties():
    import tempfile
    from pathlib import Path

    t = time.perf_counter()
    tele = all(
        telescoping_holds(make_pair(parse_operator(ope), ip, iq, 200)) for ope, ip, iq in FIXTURES.values()
    )
    divis = all(lcm_upto(n) % k == 0 for n in range(1, 301) for k in range(1, n + 1))
    ratio = math.log(lcm_upto(1000)) / 1000
    with tempfile.TemporaryDirectory() as tmp:
        a, b = Path(tmp) / "a.ndjson", Path(tmp) / "b.ndjson"
        scan_family_1(6, 11, 100, workers=1, sink=HitSink(a))
        scan_family_1(6, 11, 100, workers=2, sink=HitSink(b))
        same = a.read_bytes() == b.read_bytes() and len(a.read_bytes()) > 0
    dt = time.perf_counter() - t
    ok = tele and divis and 0.90 <= ratio <= 1.05 and same and dt < 60
    _verdict(13, ok, f"telescoping {tele}, L(n) divisibility {divis}, ln L(1000)/1000 = {ratio:.4f}, "
             f"scan byte-identical {same}, {dt:.1f}s")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
