"""The seven acceptance criteria, each at its stated tolerance and time limit.

Every test prints one ``PASS``/``FAIL`` line.  Run directly with
``python tests/test_acceptance.py`` for just the summary lines.
"""

from __future__ import annotations

import sys
import time

import pytest

from stellat.algebra.checks import invariant_problems
from stellat.algebra.element import FuncElement, UnitalElement
from stellat.harness import SuiteConfig, run_one
from stellat.states import State, apply_state, factor_two_comparison, quotient_restriction_report
from stellat.randgen import random_element, rng_for

CFG = SuiteConfig()


def _emit(number: int, name: str, ok: bool, detail: str, request=None) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number} {name}: {detail}"
    capman = request.config.pluginmanager.getplugin("capturemanager") if request else None
    if capman:
        with capman.global_and_fixture_disabled():
            print("\n" + line)
    else:
        print(line)


def check_counterexample():
    rep = run_one("counterexample5", CFG)
    m = rep.metrics
    rows = m["table"]["rows"]
    pos = m["positivity"]
    ok = (
        rep.passed
        and pos["trials"] == 200
        and pos["exact"]
        and pos["min_value"] == 0
        and not pos["violations"]
        and [r["n"] for r in rows] == [10**k for k in range(7)]
        and all(r["norm"] == 1 and r["omega"] == r["n"] == r["ratio"] for r in rows)
        and rep.wall_time < 1.0
    )
    return ok, f"200 exact zeros, ratio up to {rows[-1]['ratio']}, {rep.wall_time:.2f} s (< 1 s)"


def check_lemma7():
    rep = run_one("lemma7", CFG.with_(tol=1e-9))
    m = rep.metrics
    ok = (
        rep.passed
        and m["elements"] == 50
        and m["max_pointwise_residual"] <= 1e-8
        and m["chain_rule_pass"] == 50
        and m["max_identity_residual"] <= 1e-12
        and rep.wall_time < 30
    )
    detail = (
        f"50 elements, residual {m['max_pointwise_residual']:.2e} (<= 1e-8), chain rule "
        f"{m['chain_rule_pass']}/50, identity {m['max_identity_residual']:.1e} (<= 1e-12), "
        f"{rep.wall_time:.1f} s (< 30 s)"
    )
    return ok, detail


def check_prop8():
    rep = run_one("prop8", CFG)
    states = rep.metrics["states"]
    ok = (
        rep.passed
        and len(states) == 5
        and all(s["trials"] == 1000 and s["violation_count"] == 0 for s in states)
        and all(s["replays"] > 0 for s in states)
        and all(s["saturation"] >= 0.95 for s in states)
        and rep.wall_time < 120
    )
    worst = min(s["saturation"] for s in states)
    return ok, (
        f"5 states x 1000 elements, {sum(s['violation_count'] for s in states)} violations, "
        f"min saturation {worst:.4f} (>= 0.95), {rep.wall_time:.1f} s (< 120 s)"
    )


def check_flaw4():
    rep = run_one("flaw4", CFG)
    rows = rep.metrics["rows"]
    ok = (
        rep.passed
        and len(rows) == 20
        and all(r.get("unit_coeff") == 1 for r in rows)
        and all(0.99 <= v <= 1.01 for r in rows for v in r.get("far_abs", [0]))
        and all(not r.get("problems", [1]) for r in rows)
    )
    return ok, "20 decaying elements: unit coefficient exactly 1, |psi(+-1e4)| in [0.99, 1.01], psi - 1 decays"


def check_quotient():
    rep = quotient_restriction_report(100, CFG.seed)
    omega = State.quotient()
    values = []
    for t in range(100):
        a = random_element(rng_for(CFG.seed, "acceptance/quotient", t), "c0", n_c0=2)
        assert not invariant_problems(a, require_c0=True)
        values.append(apply_state(omega, a))
    unit = apply_state(omega, UnitalElement(FuncElement.zero(), 1.0))
    ok = rep["verdict"] == "PASS" and all(v == 0 for v in values) and unit == 1
    return ok, "omega vanishes exactly on 200 decaying elements, omega(1) = 1"


def check_norms():
    rep = run_one("norms", CFG)
    m = rep.metrics
    ok = rep.passed and m["elements"] == 500 and m["max_width"] <= 1e-6 and not m["failures"] and rep.wall_time < 60
    return ok, f"500 elements, max width {m['max_width']:.2e} (<= 1e-6), {rep.wall_time:.1f} s (< 60 s)"


def check_factor_two():
    unit = UnitalElement(FuncElement.zero(), 1.0)
    rep = factor_two_comparison(State.point_eval(0.0), unit)
    exact = rep.value == rep.unit_value * rep.norm.upper == 1.0
    bump = UnitalElement(FuncElement.rational([1e-3], [1, 0, 1]), 2.0)
    peak = factor_two_comparison(State.point_eval(0.0), bump)
    spread = factor_two_comparison(State.finite_measure([(0.5, 0.0), (0.5, 1.5)]), bump)
    ok = (
        rep.holds and rep.saturated and exact and rep.ratio_old == 0.5
        and peak.holds and peak.saturated
        and spread.holds and not spread.saturated
    )
    return ok, f"unit at a point: |omega(1)| = omega(1)*||1|| = 1 exactly, ratio to doubled bound {rep.ratio_old}"


CRITERIA = [
    (1, "counterexample", check_counterexample),
    (2, "composition", check_lemma7),
    (3, "continuity", check_prop8),
    (4, "unit leak", check_flaw4),
    (5, "quotient state", check_quotient),
    (6, "norm enclosures", check_norms),
    (7, "factor two", check_factor_two),
]


@pytest.mark.parametrize("number,name,check", CRITERIA, ids=[f"{n}-{name.replace(' ', '_')}" for n, name, _ in CRITERIA])
def test_criterion(number, name, check, request):
    start = time.perf_counter()
    try:
        ok, detail = check()
    except Exception as exc:  # noqa: BLE001 - report, then fail
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    _emit(number, name, ok, f"{detail} [{time.perf_counter() - start:.1f} s total]", request)
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for number, name, check in CRITERIA:
        ok, detail = check()
        _emit(number, name, ok, detail)
        failed += not ok
    sys.exit(1 if failed else 0)
