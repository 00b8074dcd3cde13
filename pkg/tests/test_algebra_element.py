from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given

from stellat.algebra.checks import check_invariants, is_valid
from stellat.algebra.element import FuncElement, UnitalElement, add, derivative, evaluate, mul, star
from stellat.errors import DimensionMismatch

from conftest import sample_points
from strategies import elements

LORENTZ = FuncElement.rational([1], [1, 0, 1])
COS = FuncElement.trig({1: 0.5, -1: 0.5})


def values_close(a: FuncElement, b: FuncElement, tol: float = 1e-10):
    xs = sample_points()
    np.testing.assert_allclose(a.eval(xs), b.eval(xs), rtol=tol, atol=tol)


def test_add_examples():
    assert not add(FuncElement.trig({1: 1}), FuncElement.trig({1: -1}))
    two = add(FuncElement.unit(), FuncElement.unit())
    assert two.ap.coefficient(0) == 2
    mixed = add(LORENTZ, FuncElement.unit())
    assert mixed.ap and mixed.c0


def test_mul_examples():
    assert mul(FuncElement.trig({1: 1}), FuncElement.trig({-1: 1})).ap.terms == {(Fraction(0),): 1}
    sq = mul(COS, COS)
    assert [sq.ap.coefficient(k) for k in (2, 0, -2)] == pytest.approx([0.25, 0.5, 0.25])
    values_close(sq, FuncElement.trig({2: 0.25, 0: 0.5, -2: 0.25}))
    prod = mul(LORENTZ, FuncElement.trig({3: 2}))
    assert not prod.ap
    (r, f), = prod.c0.rational_terms()
    assert f == 3
    xs = sample_points()
    np.testing.assert_allclose(r(xs), 2 / (1 + xs**2))


def test_star_examples():
    assert star(FuncElement.trig({1: 1j})).ap.terms == {(Fraction(-1),): -1j}
    assert star(COS).ap.terms == COS.ap.terms


def test_derivative_examples():
    assert derivative(FuncElement.trig({1: 1})).ap.coefficient(1) == 1j
    xs = sample_points()
    np.testing.assert_allclose(derivative(LORENTZ).eval(xs), -2 * xs / (1 + xs**2) ** 2, atol=1e-15)


def test_eval_examples():
    assert evaluate(FuncElement.unit(), 3.7) == 1
    assert complex(evaluate(FuncElement.trig({1: 1}), np.pi)) == pytest.approx(-1, abs=1e-15)
    assert complex(evaluate(LORENTZ, 0.0)) == 1


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        FuncElement.unit(1) + FuncElement.unit(2)
    with pytest.raises(DimensionMismatch):
        FuncElement(FuncElement.unit(2).ap, LORENTZ.c0, 2)


@given(elements(), elements(), elements())
def test_ring_axioms(a, b, c):
    values_close((a * b) * c, a * (b * c), 1e-9)
    values_close(a * (b + c), a * b + a * c, 1e-9)
    values_close(a * b, b * a, 1e-9)


@given(elements(), elements())
def test_multiplication_is_pointwise(a, b):
    xs = sample_points()
    np.testing.assert_allclose((a * b).eval(xs), a.eval(xs) * b.eval(xs), rtol=1e-10, atol=1e-10)


@given(elements(), elements())
def test_derivative_is_a_derivation(a, b):
    values_close((a * b).derivative(), a.derivative() * b + a * b.derivative(), 1e-9)


@given(elements())
def test_star_is_an_involution_and_conjugates(a):
    assert (a.star().star() - a).n_terms == 0
    xs = sample_points()
    np.testing.assert_allclose(a.star().eval(xs), np.conj(a.eval(xs)), rtol=1e-14, atol=1e-15)
    values_close(a.star().derivative(), a.derivative().star(), 1e-12)


@given(elements(), elements())
def test_operations_stay_in_class(a, b):
    for out in (a + b, a * b, a.star(), a.derivative(), a.real_part()):
        check_invariants(out)


@given(elements())
def test_central_difference_matches_derivative(a):
    xs = sample_points(50, 10.0)
    h = 1e-4
    fd = (a.eval(xs + h) - a.eval(xs - h)) / (2 * h)
    scale = 1 + np.max(np.abs(a.eval(xs)))
    assert np.max(np.abs(fd - a.derivative().eval(xs))) <= 1e-5 * scale * 100


@given(elements(d=2))
def test_multivariate_partials(a):
    x = np.array([0.4, -0.9])
    h = 1e-5
    for j in range(2):
        e = np.zeros(2)
        e[j] = h
        fd = (complex(a.eval(x + e)) - complex(a.eval(x - e))) / (2 * h)
        assert abs(fd - complex(a.derivative(j).eval(x))) <= 1e-5 * (1 + a.ap.coefficient_l1()) * 100


@given(elements())
def test_json_round_trip_is_exact(a):
    b = FuncElement.from_json(a.to_json())
    assert b.to_json() == a.to_json()
    assert b.ap.terms == a.ap.terms


def test_json_layout():
    data = (LORENTZ + FuncElement.trig({Fraction(1, 3): 2.0})).to_dict()
    assert data["d"] == 1
    assert data["ap"] == [{"freq": "1/3", "re": 2.0, "im": 0.0}]
    assert data["c0"][0]["freq"] == "0"
    assert data["c0"][0]["den"] == ["1", "0", "1"]


def test_unital_element_round_trip():
    u = UnitalElement(LORENTZ, 2.0)
    assert complex(u.eval(0.0)) == 3
    f = u.as_function()
    back = UnitalElement.from_function(f)
    assert back.unit_coeff == 2
    assert is_valid(back.base, require_c0=True)
