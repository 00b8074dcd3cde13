from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stellat.states import CubeAlgebraElement, Monomial, State, apply_state, check_positivity, demonstrate_noncontinuity
from stellat.states.state import decade_sizes
from stellat.errors import DomainMismatch
from stellat.randgen import rng_for
from stellat.states.cube import random_cube_element

OMEGA = State.counterexample()
x = CubeAlgebraElement.generator


def test_monomials_are_sorted_and_non_empty():
    assert Monomial([5, 2, 2]).gens == (2, 2, 5)
    assert Monomial([5, 2, 2]).degree == 3
    with pytest.raises(ValueError):
        Monomial([])
    with pytest.raises(ValueError):
        Monomial([0])


def test_state_on_generators_and_higher_monomials():
    assert apply_state(OMEGA, x(7)) == 7
    assert apply_state(OMEGA, x(1) * x(1)) == 0
    assert apply_state(OMEGA, x(3, 2j) + x(2) * x(9)) == 6j


def test_example_square_vanishes_exactly():
    f = x(1, 3) + CubeAlgebraElement({(2, 3): 1j})
    value = apply_state(OMEGA, f.star() * f)
    assert value == 0 and type(value) is int


@given(st.integers(0, 10_000))
def test_positivity_is_exact(seed):
    f = random_cube_element(rng_for(seed, "cube", 0))
    sq = f.star() * f
    assert sq.min_degree >= 2
    assert apply_state(OMEGA, sq) == 0


@given(st.integers(0, 10_000))
def test_star_linearity(seed):
    f = random_cube_element(rng_for(seed, "cube", 1))
    assert apply_state(OMEGA, f.star()) == pytest.approx(complex(apply_state(OMEGA, f)).conjugate())


def test_generator_norm_is_one():
    assert x(10**6).sup_norm() == 1
    assert x(4).eval({4: 1.0}) == 1


def test_positivity_report():
    rep = check_positivity(OMEGA, 200, seed=0)
    assert rep.verdict == "PASS"
    assert rep.exact and rep.min_value == 0


def test_noncontinuity_table():
    table = demonstrate_noncontinuity(10**6)
    assert table.verdict == "PASS"
    assert table.rows[0] == (1, 1, 1, 1)
    assert table.rows[-1] == (10**6, 1, 10**6, 10**6)
    assert [r[0] for r in table.rows] == [10**k for k in range(7)]
    assert table.to_csv().splitlines()[0] == "n,norm,omega,ratio"


def test_decades_include_the_endpoint():
    assert decade_sizes(250) == [1, 10, 100, 250]
    assert demonstrate_noncontinuity(1).verdict == "PASS"


def test_counterexample_rejects_functions():
    from stellat.algebra.element import FuncElement

    with pytest.raises(DomainMismatch):
        apply_state(OMEGA, FuncElement.unit())
    with pytest.raises(DomainMismatch):
        OMEGA.unit_value()
