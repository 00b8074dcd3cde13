from __future__ import annotations

import numpy as np
import pytest
import sympy
from hypothesis import given, settings

from stellat.algebra.checks import is_valid
from stellat.algebra.element import FuncElement
from stellat.differential import demonstrate_unit_leak, derivative_witnesses, in_differential_algebra

from strategies import elements

COS = FuncElement.trig({1: 0.5, -1: 0.5})


def test_cosine_derivatives_cycle():
    ok, ws = in_differential_algebra(COS, 5)
    assert ok and len(ws) == 5
    xs = np.linspace(-3, 3, 7)
    expected = [-np.sin(xs), -np.cos(xs), np.sin(xs), np.cos(xs), -np.sin(xs)]
    for w, e in zip(ws, expected):
        np.testing.assert_allclose(w.eval(xs), e, atol=1e-14)


def test_modulated_lorentzian_against_sympy():
    a = FuncElement.rational([1], [1, 0, 1], freq=2)
    ok, ws = in_differential_algebra(a, 3)
    assert ok and len(ws) == 3
    x = sympy.symbols("x", real=True)
    expr = sympy.exp(2 * sympy.I * x) / (1 + x**2)
    xs = [-2.5, 0.0, 0.7, 4.0]
    for k, w in enumerate(ws, start=1):
        assert is_valid(w, require_c0=True)
        dk = sympy.lambdify(x, sympy.diff(expr, x, k), "numpy")
        np.testing.assert_allclose(w.eval(np.array(xs)), dk(np.array(xs)), rtol=1e-12, atol=1e-14)


def test_zero_element():
    ok, ws = in_differential_algebra(FuncElement.zero(), 4)
    assert ok and all(not w for w in ws)


def test_mixed_partials_for_two_variables():
    a = FuncElement.trig({(1, 2): 1.0}, d=2)
    ws = derivative_witnesses(a, 2)
    assert set(ws) == {(0,), (1,), (0, 0), (0, 1), (1, 1)}
    assert ws[(0, 1)].ap.coefficient((1, 2)) == pytest.approx(-2)


def test_order_must_be_positive():
    with pytest.raises(ValueError):
        in_differential_algebra(COS, 0)


@settings(max_examples=25)
@given(elements())
def test_derivative_closure(a):
    ok, ws = in_differential_algebra(a, 6)
    assert ok and all(is_valid(w) for w in ws)


def test_unit_leak_on_lorentzian():
    phi = FuncElement.rational([0.5], [1, 0, 1])
    rep = demonstrate_unit_leak(phi, 1.0)
    assert rep.verdict == "PASS"
    assert rep.psi.unit_coeff == 1
    assert is_valid(rep.psi.base, require_c0=True)
    assert abs(complex(rep.psi.eval(1e3))) == pytest.approx(1, abs=1e-6)
    assert set(rep.to_dict()) == {"claim", "witnesses", "evaluations", "verdict"}
    assert "unit" in rep.account


def test_unit_leak_negative_bump():
    rep = demonstrate_unit_leak(FuncElement.rational([-0.5], [1, 0, 1]), 1.0)
    assert rep.psi.unit_coeff == 1
    assert complex(rep.psi.eval(0.0)) == pytest.approx(np.sqrt(0.5), abs=1e-9)


def test_unit_leak_of_zero_is_root_r():
    rep = demonstrate_unit_leak(FuncElement.zero(), 4.0)
    assert rep.psi.unit_coeff == 2
    assert not rep.psi.base


def test_unit_leak_preconditions():
    with pytest.raises(ValueError):
        demonstrate_unit_leak(COS.scale(0.5))
    with pytest.raises(ValueError):
        demonstrate_unit_leak(FuncElement.rational([1j], [1, 0, 1]).scale(0.5))
    with pytest.raises(ValueError):
        demonstrate_unit_leak(FuncElement.rational([2], [1, 0, 1]))
