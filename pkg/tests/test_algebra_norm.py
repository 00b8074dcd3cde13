from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from stellat.algebra.element import FuncElement
from stellat.algebra.norm import crude_upper, norm_enclosure
from stellat.errors import ToleranceUnreachable

from strategies import elements


def sampled_max(a: FuncElement, n: int = 10_000, span: float = 60.0) -> float:
    xs = np.random.default_rng(3).uniform(-span, span, (n, a.d) if a.d > 1 else n)
    return float(np.max(np.abs(a.eval(xs))))


def test_zero_element():
    enc = norm_enclosure(FuncElement.zero(), 1e-9)
    assert (enc.lower, enc.upper, enc.certified) == (0.0, 0.0, True)


def test_cosine():
    enc = norm_enclosure(FuncElement.trig({1: 0.5, -1: 0.5}), 1e-9)
    assert enc.certified
    assert enc.lower <= 1 <= enc.upper
    assert enc.width <= 1e-9


def test_scaled_cosine():
    enc = norm_enclosure(FuncElement.trig({2: 0.2, -2: 0.2}), 1e-9)
    assert enc.contains(0.4)


def test_lorentzian_peak():
    enc = norm_enclosure(FuncElement.rational([1], [1, 0, 1]), 1e-9)
    assert enc.lower <= 1 <= enc.upper <= 1 + 1e-9


def test_mixed_element_attains_far_out_sup():
    # sup is approached only as x -> infinity along the periodic maxima
    a = FuncElement.trig({0: 0.5, 1: 0.25, -1: 0.25}) - FuncElement.rational([0.1], [1, 0, 1])
    enc = norm_enclosure(a, 1e-6)
    assert enc.lower <= 1 <= enc.upper
    assert enc.width <= 1e-6


def test_tilted_trig_poly_against_dense_grid():
    a = FuncElement.trig({1: 1.0, Fraction(3, 2): 0.7j, -2: 0.3 - 0.2j})
    enc = norm_enclosure(a, 1e-9)
    xs = np.linspace(0, 4 * np.pi, 2_000_001)
    dense = float(np.max(np.abs(a.eval(xs))))
    assert enc.lower - 1e-6 <= dense <= enc.upper


def test_phase_aligned_multivariate_sum():
    a = FuncElement.trig({(1, 0): 1.0, (0, 1): 2j, (1, 1): -0.5}, d=2)
    enc = norm_enclosure(a, 1e-9)
    assert enc.lower <= 3.5 <= enc.upper
    assert abs(complex(a.eval(np.array(enc.witness)))) >= enc.lower - 1e-12


def test_multivariate_with_dependent_frequencies():
    a = FuncElement.trig({(1, 0): 1.0, (0, 1): 1.0, (1, 1): 1.0, (-1, 1): 0.5j}, d=2)
    enc = norm_enclosure(a, 1e-6)
    assert enc.certified and enc.width <= 1e-6
    assert sampled_max(a) <= enc.upper
    assert abs(complex(a.eval(np.array(enc.witness)))) >= enc.lower - 1e-12


def test_float_frequencies_give_uncertified_bounds():
    a = FuncElement.trig({np.sqrt(2): 1.0, 1: 1.0})
    enc = norm_enclosure(a, 1e-6)
    assert not enc.certified
    assert enc.upper >= 2 - 1e-12


def test_budget_exhaustion_raises():
    a = FuncElement.trig({1: 1.0, Fraction(7, 5): 0.9, -3: 0.4j})
    with pytest.raises(ToleranceUnreachable):
        norm_enclosure(a, 1e-12, budget=10)


def test_rejects_non_positive_tolerance():
    with pytest.raises(ValueError):
        norm_enclosure(FuncElement.unit(), 0)


@settings(max_examples=20)
@given(elements())
def test_enclosure_is_sound(a):
    enc = norm_enclosure(a, 1e-6)
    assert enc.certified
    assert enc.width <= 1e-6
    assert sampled_max(a) <= enc.upper
    w = enc.witness if a.d > 1 else enc.witness[0]
    assert abs(complex(a.eval(w))) >= enc.lower - 1e-12


@given(elements())
def test_star_enclosure_is_identical(a):
    e1 = norm_enclosure(a, 1e-6)
    e2 = norm_enclosure(a.star(), 1e-6)
    assert (e1.lower, e1.upper) == (e2.lower, e2.upper)


@settings(max_examples=20)
@given(elements())
def test_crude_bound_dominates(a):
    assert crude_upper(a) >= norm_enclosure(a, 1e-6).lower
