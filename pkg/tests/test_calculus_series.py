from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stellat.calculus.series import (
    PRESET_NAMES,
    exp_series,
    identity_series,
    preset,
    series_derivative,
    sqrt_shift,
    without_constant,
)


def test_sqrt_shift_coefficients():
    g = sqrt_shift(4.0, 1)
    assert g.coeff(0) == pytest.approx(2.0)
    assert g.coeff(1) == pytest.approx(2 * 0.5 / 4)
    assert g.coeff(2) == pytest.approx(2 * -0.125 / 16)
    assert g.radius == 4.0
    h = sqrt_shift(4.0, -1)
    assert h.coeff(1) == pytest.approx(-g.coeff(1))
    assert h.coeff(2) == pytest.approx(g.coeff(2))


def test_sqrt_series_sums_to_closed_form():
    g = sqrt_shift(2.0, -1)
    z = 0.7
    total = sum(g.coeff(k) * z**k for k in range(200))
    assert total == pytest.approx(math.sqrt(2.0 - z), rel=1e-14)


def test_sqrt_shift_rejects_bad_arguments():
    for r, s in ((0, 1), (-1.0, 1), (1.0, 2)):
        with pytest.raises(ValueError):
            sqrt_shift(r, s)


def test_derivative_of_identity_is_constant_one():
    d = series_derivative(identity_series())
    assert [d.coeff(k) for k in range(4)] == [1, 0, 0, 0]


def test_derivative_of_sqrt_at_zero():
    d = series_derivative(sqrt_shift(1.0, 1))
    h = 1e-6
    fd = (math.sqrt(1 + h) - math.sqrt(1 - h)) / (2 * h)
    assert d.coeff(0) == pytest.approx(0.5)
    assert d.coeff(0) == pytest.approx(fd, rel=1e-9)


def test_derivative_keeps_radius():
    assert series_derivative(sqrt_shift(2.0, 1)).radius == 2.0


def test_exp_coefficients_and_shift():
    e = exp_series()
    assert [e.coeff(k) for k in range(4)] == pytest.approx([1, 1, 0.5, 1 / 6])
    s = e.shift(0.3)
    assert s.coeff(0) == pytest.approx(math.exp(0.3))


def test_presets():
    assert preset("identity").coeff(1) == 1
    assert preset("exp").coeff(2) == pytest.approx(0.5)
    assert preset("sqrt_shift(2,-)").coeff(1) == pytest.approx(-math.sqrt(2) / 4)
    assert len(PRESET_NAMES) == 4
    with pytest.raises(KeyError):
        preset("log")
    with pytest.raises(KeyError):
        preset("sqrt_shift(-1,+)")


@given(
    st.sampled_from(["sqrt+", "sqrt-", "exp"]),
    st.floats(0.05, 0.95),
    st.integers(0, 60),
)
def test_tail_bound_dominates_brute_force(kind, frac, n):
    f = {"sqrt+": sqrt_shift(1.5, 1), "sqrt-": sqrt_shift(1.5, -1), "exp": exp_series()}[kind]
    rho = frac * min(f.radius, 3.0)
    brute = math.fsum(f.abs_coeff(k) * rho**k for k in range(n + 1, n + 201))
    assert brute <= f.tail_bound(n, rho) * (1 + 1e-12)


@given(st.floats(0.05, 0.9), st.floats(1e-12, 1e-3), st.floats(1e-12, 1e-3))
def test_smaller_tolerance_never_loosens_tail(rho, t1, t2):
    f = sqrt_shift(1.0, 1)
    lo, hi = sorted((t1, t2))
    _, tail_lo, _ = f.truncation_order(lo, rho)
    _, tail_hi, _ = f.truncation_order(hi, rho)
    assert tail_lo <= lo
    assert tail_hi <= hi
    assert tail_lo <= tail_hi


def test_without_constant():
    g = without_constant(sqrt_shift(1.0, 1))
    assert g.coeff(0) == 0
    assert g.coeff(1) == pytest.approx(0.5)
    assert g.closed_form(np.array(0.44)) == pytest.approx(0.2)
