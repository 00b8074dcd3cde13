from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings

from stellat.algebra.element import FuncElement, UnitalElement
from stellat.algebra.norm import crude_upper, norm_enclosure
from stellat.calculus import (
    compose_series,
    compose_series_unital,
    exp_series,
    identity_series,
    sqrt_shift,
    verify_chain_rule,
)
from stellat.calculus.series import without_constant
from stellat.errors import NonzeroConstantTerm, SeriesRadiusExceeded
from stellat.randgen import DEN_EVEN, random_element, rng_for, scaled

from conftest import sample_points
from strategies import elements

COS = FuncElement.trig({1: 0.5, -1: 0.5})
SQRT_M1 = without_constant(sqrt_shift(1.0, 1))


def test_identity_composition_is_exact():
    phi = FuncElement.trig({1: 0.3, -2: 0.1j})
    out, cert = compose_series(identity_series(), phi)
    assert (out - phi).n_terms == 0
    assert cert.tail_bound == 0


def test_zero_argument_gives_zero():
    out, cert = compose_series(SQRT_M1, FuncElement.zero())
    assert not out
    assert cert.tail_bound == 0


def test_sqrt_of_shifted_cosine():
    phi = COS.scale(0.4)
    out, cert = compose_series(SQRT_M1, phi, 1e-9)
    assert cert.tail_bound <= 1e-9
    assert cert.rho == norm_enclosure(phi).upper
    xs = np.linspace(-10, 10, 1000)
    np.testing.assert_allclose(out.eval(xs) + 1, np.sqrt(1 + 0.4 * np.cos(xs)), atol=1e-8)
    sq = (out + 1) * (out + 1) - (phi + 1)
    assert np.max(np.abs(sq.eval(xs))) <= 1e-8


def test_constant_term_is_refused():
    with pytest.raises(NonzeroConstantTerm):
        compose_series(sqrt_shift(1.0, 1), COS)


def test_radius_is_enforced():
    with pytest.raises(SeriesRadiusExceeded):
        compose_series(SQRT_M1, COS.scale(1.5))


def test_unital_sqrt_of_zero_is_unit():
    psi, cert = compose_series_unital(sqrt_shift(1.0, 1), UnitalElement(FuncElement.zero(), 0))
    assert psi.unit_coeff == 1
    assert not psi.base


def test_unital_sqrt_squares_back():
    phi = COS.scale(0.4)
    psi, cert = compose_series_unital(sqrt_shift(1.0, 1), UnitalElement(phi, 0), 1e-9)
    f = psi.as_function()
    xs = sample_points(1000)
    np.testing.assert_allclose((f * f).eval(xs), 1 + 0.4 * np.cos(xs), atol=1e-8)


def test_unital_exp_of_small_exponential():
    phi = FuncElement.trig({1: 0.1})
    psi, cert = compose_series_unital(exp_series(), UnitalElement(phi, 0), 1e-12)
    xs = sample_points()
    np.testing.assert_allclose(psi.eval(xs), np.exp(0.1 * np.exp(1j * xs)), atol=1e-10)


def test_unital_recentering_at_nonzero_unit():
    base = FuncElement.rational([0.3], [1, 0, 1])
    psi, _ = compose_series_unital(sqrt_shift(1.0, 1), UnitalElement(base, 0.5), 1e-10)
    assert psi.unit_coeff == pytest.approx(np.sqrt(1.5))
    xs = sample_points()
    np.testing.assert_allclose(psi.eval(xs), np.sqrt(1.5 + 0.3 / (1 + xs**2)), atol=1e-9)


def test_generic_series_recentering():
    poly = exp_series()
    poly.shift = None  # force the summed Taylor shift
    psi, cert = compose_series_unital(poly, UnitalElement(FuncElement.trig({1: 0.1}), 0.2), 1e-10)
    xs = sample_points()
    np.testing.assert_allclose(psi.eval(xs), np.exp(0.2 + 0.1 * np.exp(1j * xs)), atol=1e-9)


@settings(max_examples=15)
@given(elements(self_adjoint=True, max_abs=3, max_den=2, n_trig=4, n_c0=1, palette=DEN_EVEN))
def test_composition_agrees_pointwise(phi):
    phi = scaled(phi, 0.5)
    out, cert = compose_series(SQRT_M1, phi, 1e-10)
    xs = sample_points()
    ref = np.sqrt(1 + phi.eval(xs).real) - 1
    # the certificate covers truncation; 1e-9 covers floating-point expansion of powers
    assert np.max(np.abs(out.eval(xs) - ref)) <= cert.tail_bound + 1e-9


@settings(max_examples=15)
@given(elements(self_adjoint=True, max_abs=3, max_den=2, n_trig=4, n_c0=1))
def test_real_series_preserve_self_adjointness(phi):
    phi = scaled(phi, 0.5)
    for sign in (1, -1):
        psi, _ = compose_series_unital(sqrt_shift(1.0, sign), phi, 1e-8)
        assert psi.as_function().is_self_adjoint(0.0)


def test_square_root_identity_bound():
    phi = COS.scale(0.3) + FuncElement.rational([0.1], [1, 0, 1])
    r = norm_enclosure(phi).upper * 1.5
    for sign in (1, -1):
        g, cert = compose_series_unital(sqrt_shift(r, sign), phi, 1e-8)
        gf = g.as_function()
        defect = gf * gf - (phi.scale(sign) + r)
        bound = 2 * crude_upper(gf) * cert.tail_bound + cert.tail_bound**2
        xs = sample_points(1000)
        assert np.max(np.abs(defect.eval(xs))) <= bound + 1e-12


def test_chain_rule_identity_series_has_zero_difference():
    rep = verify_chain_rule(identity_series(), COS.scale(0.3))
    assert rep.passed
    assert rep.difference.upper == 0


def test_chain_rule_on_cosine():
    rep = verify_chain_rule(SQRT_M1, COS.scale(0.3), 1e-7)
    assert rep.passed
    assert rep.identity_residual <= 1e-12
    assert set(rep.to_dict()) >= {"verdict", "difference", "threshold", "tails", "identity_residual"}


def test_chain_rule_polynomial_identity_on_random_elements():
    for t in range(5):
        rng = rng_for(3, "chain", t)
        phi = scaled(random_element(rng, "ap", n_trig=4, self_adjoint=True, max_abs=3, max_den=2), 0.5)
        rep = verify_chain_rule(SQRT_M1, phi, 1e-7)
        assert rep.identity_residual <= 1e-12
        assert rep.passed


def test_certificate_serialization():
    _, cert = compose_series(SQRT_M1, COS.scale(0.4), 1e-9)
    d = cert.to_dict()
    assert set(d) == {"n_terms", "rho", "tail_bound", "method"}
    assert d["method"] in ("explicit_sum", "geometric_ratio")
