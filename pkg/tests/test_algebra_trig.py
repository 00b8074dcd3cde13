from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from stellat.algebra.trig import TrigPoly, trig_from_pairs


def test_inverse_frequencies_multiply_to_unit():
    p = TrigPoly({1: 1}) * TrigPoly({-1: 1})
    assert p.terms == {(Fraction(0),): 1 + 0j}


def test_cos_squared_by_hand():
    cos = TrigPoly({1: 0.5, -1: 0.5})
    sq = cos * cos
    assert sq.coefficient(2) == pytest.approx(0.25)
    assert sq.coefficient(0) == pytest.approx(0.5)
    assert sq.coefficient(-2) == pytest.approx(0.25)
    assert len(sq) == 3


def test_additive_inverse_cancels_exactly():
    p = TrigPoly({1: 1}) + TrigPoly({1: -1})
    assert not p


def test_rational_frequencies_merge_exactly():
    p = trig_from_pairs([(Fraction(1, 3), 1.0), ("2/6", 2.0)])
    assert len(p) == 1
    assert p.coefficient(Fraction(1, 3)) == 3.0


def test_star_negates_and_conjugates():
    p = TrigPoly({1: 1j})
    assert p.star().terms == {(Fraction(-1),): -1j}


def test_self_adjoint_detection():
    assert TrigPoly({1: 0.5, -1: 0.5}).is_self_adjoint()
    assert not TrigPoly({1: 1.0}).is_self_adjoint()


def test_eval_matches_complex_exponential():
    p = TrigPoly({1: 1})
    assert complex(p.eval(np.pi)) == pytest.approx(-1 + 0j, abs=1e-15)


def test_derivative_of_exponential():
    assert TrigPoly({1: 1}).derivative().coefficient(1) == 1j


def test_multivariate_frequencies():
    p = TrigPoly({(1, 0): 1.0, (0, Fraction(1, 2)): 2.0}, d=2)
    x = np.array([0.3, -1.1])
    expected = np.exp(1j * 0.3) + 2 * np.exp(1j * 0.5 * -1.1)
    assert complex(p.eval(x)) == pytest.approx(expected)
    assert p.derivative(1).coefficient((0, Fraction(1, 2))) == pytest.approx(2 * 0.5j)


def test_non_finite_coefficients_rejected():
    with pytest.raises(ValueError):
        TrigPoly({1: float("nan")})


def test_periods_and_torus_reduction_preserve_values():
    p = TrigPoly({(Fraction(-5, 2), 1): 1.0, (3, -2): 0.5j}, d=2)
    g, B = p.torus_reduction()
    assert g.d <= 2
    assert all(all(c.denominator == 1 for c in k) for k in g.terms)
    assert sorted(abs(c) for c in g.terms.values()) == sorted(abs(c) for c in p.terms.values())
    assert TrigPoly({Fraction(1, 2): 1, Fraction(1, 3): 1}).periods() == [Fraction(6)]


def test_float_frequencies_are_not_exact():
    assert not TrigPoly({0.1: 1.0}).is_exact
    assert TrigPoly({Fraction(1, 10): 1.0}).is_exact
