from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from stellat.algebra.poly import count_real_roots, qpoly
from stellat.algebra.rational import ModRatSum, RationalFn
from stellat.algebra.trig import TrigPoly
from stellat.errors import InvariantViolation

from conftest import sample_points

X = sympy.symbols("x")

small_rationals = st.fractions(min_value=-6, max_value=6, max_denominator=5)


@given(st.lists(small_rationals, min_size=1, max_size=7))
def test_real_root_count_matches_sympy(coeffs):
    if all(c == 0 for c in coeffs):
        return
    p = qpoly(coeffs)
    expr = sympy.Poly(list(reversed([sympy.Rational(c.numerator, c.denominator) for c in p])), X)
    if expr.degree() < 1:
        assert count_real_roots(p) == 0
        return
    distinct = len(sympy.Poly(sympy.sqf_part(expr.as_expr()), X).real_roots())
    assert count_real_roots(p) == distinct


def test_denominators_with_real_roots_are_rejected():
    with pytest.raises(InvariantViolation):
        RationalFn([1], [-1, 0, 1])
    with pytest.raises(InvariantViolation):
        RationalFn([1], [0, 1, 0, 1])


def test_improper_fraction_rejected():
    with pytest.raises(InvariantViolation):
        RationalFn([0, 0, 1], [1, 0, 1])


def test_lorentzian_values_and_derivative():
    r = RationalFn([1], [1, 0, 1])
    xs = sample_points()
    np.testing.assert_allclose(r(xs), 1 / (1 + xs**2), rtol=1e-14)
    np.testing.assert_allclose(r.derivative()(xs), -2 * xs / (1 + xs**2) ** 2, rtol=1e-12, atol=1e-15)


def test_sum_over_common_denominator():
    a = RationalFn([1], [1, 0, 1])
    b = RationalFn([0, 1], [4, 0, 1])
    xs = sample_points()
    np.testing.assert_allclose((a + b)(xs), 1 / (1 + xs**2) + xs / (4 + xs**2), rtol=1e-12)


def test_evaluation_far_out_does_not_overflow():
    r = RationalFn([1, 2], [Fraction(9, 4), 0, 1]) * RationalFn([3], [2, 2, 1])
    big = np.array([1e150, -1e200, 1e300])
    vals = r(big)
    assert np.all(np.isfinite(vals))
    assert np.all(np.abs(vals) < 1e-100)


def test_modulated_product_with_trig_term():
    s = ModRatSum.from_terms([(RationalFn([1], [1, 0, 1]), 0)])
    out = s.mul_trig(TrigPoly({3: 2}))
    (r, f), = out.rational_terms()
    assert f == 3
    xs = sample_points()
    np.testing.assert_allclose(r(xs), 2 / (1 + xs**2), rtol=1e-14)


def test_modulated_derivative_includes_frequency_term():
    s = ModRatSum.from_terms([(RationalFn([1], [1, 0, 1]), Fraction(1, 2))])
    xs = sample_points()
    expected = (-2 * xs / (1 + xs**2) ** 2 + 0.5j / (1 + xs**2)) * np.exp(0.5j * xs)
    np.testing.assert_allclose(s.derivative().eval(xs), expected, rtol=1e-12, atol=1e-15)


def test_star_conjugates_pointwise():
    s = ModRatSum.from_terms([(RationalFn([1j, 2], [2, 2, 1]), 2)])
    xs = sample_points()
    np.testing.assert_allclose(s.star().eval(xs), np.conj(s.eval(xs)), rtol=1e-14)


def test_equal_frequencies_merge():
    a = ModRatSum.from_terms([(RationalFn([1], [1, 0, 1]), 1)])
    b = ModRatSum.from_terms([(RationalFn([1], [4, 0, 1]), 1)])
    assert len(a + b) == 1
    assert not (a - a)
