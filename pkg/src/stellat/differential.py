"""Derivative closure of the represented classes and the unit-leak example."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .algebra.checks import check_invariants, invariant_problems
from .algebra.element import FuncElement, UnitalElement
from .algebra.norm import norm_enclosure
from .calculus.compose import compose_series_unital
from .calculus.series import sqrt_shift

__all__ = [
    "UnitalElement",
    "UnitLeakReport",
    "demonstrate_unit_leak",
    "derivative_witnesses",
    "in_differential_algebra",
]


def _multi_indices(d: int, order: int):
    """Sorted direction tuples of length ``order`` (mixed partials commute)."""
    return itertools.combinations_with_replacement(range(d), order)


def derivative_witnesses(a, max_order: int = 6) -> dict[tuple, FuncElement]:
    """Every partial derivative of ``a`` up to ``max_order``, keyed by direction tuple."""
    if max_order < 1:
        raise ValueError("max_order must be at least 1")
    base = a.base if isinstance(a, UnitalElement) else a
    out: dict[tuple, FuncElement] = {(): base}
    for order in range(1, max_order + 1):
        for idx in _multi_indices(base.d, order):
            out[idx] = out[idx[:-1]].derivative(idx[-1])
    del out[()]
    return out


def in_differential_algebra(a, max_order: int = 6) -> tuple[bool, list[FuncElement]]:
    """Differentiate up to ``max_order`` times and run the invariant checker on each result.

    Returns ``(True, witnesses)`` in order of increasing derivative order; for
    ``d > 1`` all mixed partials of each order are listed.  A checker failure
    would return ``False`` with the witnesses computed so far.
    """
    witnesses = []
    for w in derivative_witnesses(a, max_order).values():
        if invariant_problems(w):
            return False, witnesses
        witnesses.append(w)
    return True, witnesses


_ACCOUNT = (
    "The element phi decays at infinity and has no almost-periodic part. "
    "Its square root shift psi = sqrt({r} + phi) is formed through the power series "
    "of sqrt({r} + z) around 0, whose constant coefficient is sqrt({r}) = {root}. "
    "That constant cannot be absorbed into the decaying part: psi tends to {root} "
    "as |x| grows, so psi lies outside C_0 and only psi - {root}*1 decays. "
    "A continuity argument that needs psi*psi to sit inside the non-unital algebra "
    "therefore breaks down. Working in the unitalization D(C) + C*1 and letting the "
    "state act on the adjoined unit supplies the missing term, and the resulting "
    "bound uses the value of the state on that unit."
)


@dataclass
class UnitLeakReport:
    claim: str
    witnesses: dict
    evaluations: list
    verdict: str
    account: str
    psi: UnitalElement = field(repr=False, default=None)

    def to_dict(self) -> dict:
        return {
            "claim": self.claim,
            "witnesses": self.witnesses,
            "evaluations": self.evaluations,
            "verdict": self.verdict,
        }


def demonstrate_unit_leak(
    phi: FuncElement,
    r: float = 1.0,
    *,
    tol: float = 1e-12,
    far_points=(1e3, -1e3, 1e4, -1e4),
) -> UnitLeakReport:
    """Compose ``sqrt(r + z)`` with a decaying self-adjoint ``phi`` and show the unit appear."""
    if phi.ap:
        raise ValueError("phi must have an empty almost-periodic part")
    if not phi.is_self_adjoint():
        raise ValueError("phi must be self-adjoint")
    check_invariants(phi, require_c0=True)
    enc = norm_enclosure(phi, 1e-6)
    if not enc.upper < r:
        raise ValueError(f"norm bound {enc.upper} is not below r = {r}")
    g = sqrt_shift(r, 1)
    psi, cert = compose_series_unital(g, phi, tol, rho=enc.upper)
    root = math.sqrt(r)
    unit_ok = psi.unit_coeff == g.coeff(0) and psi.unit_coeff != 0
    base_problems = invariant_problems(psi.base, require_c0=True)
    evaluations = []
    for x in (0.0, *far_points):
        got = complex(psi.eval(x))
        want = complex(np.sqrt(r + complex(phi.eval(x))))
        evaluations.append(
            {"x": x, "psi": [got.real, got.imag], "sqrt_oracle": [want.real, want.imag], "error": abs(got - want)}
        )
    err_ok = all(e["error"] <= cert.tail_bound + 1e-9 for e in evaluations)
    verdict = "PASS" if unit_ok and not base_problems and err_ok else "FAIL"
    return UnitLeakReport(
        claim="sqrt(r + phi) tends to sqrt(r), not 0, at infinity; psi - sqrt(r)*1 decays",
        witnesses={
            "unit_coeff": [complex(psi.unit_coeff).real, complex(psi.unit_coeff).imag],
            "expected_unit_coeff": root,
            "base_invariant_problems": base_problems,
            "norm_upper": enc.upper,
            "truncation": cert.to_dict(),
        },
        evaluations=evaluations,
        verdict=verdict,
        account=_ACCOUNT.format(r=f"{r:g}", root=f"{root:g}"),
        psi=psi,
    )
