"""Weakly positive linear functionals on the represented algebras."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from ..algebra.checks import invariant_problems
from ..algebra.element import FuncElement, UnitalElement
from ..errors import DomainMismatch, InvalidState, InvariantViolation
from ..randgen import random_element, rng_for
from .cube import CubeAlgebraElement, Monomial, random_cube_element

KINDS = ("point_eval", "finite_measure", "counterexample", "quotient")
DOMAINS = {
    "point_eval": "functions",
    "finite_measure": "functions",
    "counterexample": "cube",
    "quotient": "unital_c0",
}


@dataclass(frozen=True)
class State:
    """One of four concrete states.

    * ``point_eval``: ``a -> a(x0)``
    * ``finite_measure``: ``a -> sum_i w_i a(x_i)`` with ``w_i >= 0``
    * ``counterexample``: on the cube algebra, ``x_n -> n`` and higher monomials to 0
    * ``quotient``: on decaying elements plus multiples of the unit, ``c + lam*1 -> lam``
    """

    kind: str
    points: tuple = ()
    weights: tuple = ()
    label: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidState(f"unknown state kind {self.kind!r}")
        if len(self.points) != len(self.weights):
            raise InvalidState("points and weights differ in length")
        for w in self.weights:
            if not (math.isfinite(w) and w >= 0):
                raise InvalidState(f"weight {w} is not a finite non-negative number")
        if self.kind == "point_eval" and len(self.points) != 1:
            raise InvalidState("point evaluation needs exactly one point")

    @classmethod
    def point_eval(cls, x0) -> "State":
        return cls("point_eval", (x0,), (1.0,), f"point_eval({x0})")

    @classmethod
    def finite_measure(cls, pairs, label: str = "") -> "State":
        """``pairs`` is an iterable of ``(weight, point)``."""
        pairs = list(pairs)
        if not pairs:
            raise InvalidState("a finite measure needs at least one atom")
        ws = tuple(float(w) for w, _ in pairs)
        pts = tuple(p for _, p in pairs)
        return cls("finite_measure", pts, ws, label or f"finite_measure({len(pairs)} atoms)")

    @classmethod
    def counterexample(cls) -> "State":
        return cls("counterexample", label="counterexample")

    @classmethod
    def quotient(cls) -> "State":
        return cls("quotient", label="quotient")

    @property
    def domain(self) -> str:
        return DOMAINS[self.kind]

    @property
    def is_unital(self) -> bool:
        return self.kind != "counterexample"

    def unit_value(self) -> float:
        """The value on the unit, ``omega(1)``."""
        if not self.is_unital:
            raise DomainMismatch("the cube algebra has no unit")
        if self.kind == "quotient":
            return 1.0
        return float(math.fsum(self.weights))

    def __call__(self, a):
        return apply_state(self, a)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "label": self.label,
            "points": [list(p) if isinstance(p, tuple) else p for p in self.points],
            "weights": list(self.weights),
        }


def _as_function(a) -> FuncElement:
    if isinstance(a, UnitalElement):
        return a.as_function()
    if isinstance(a, FuncElement):
        return a
    raise DomainMismatch(f"{type(a).__name__} is not a function element")


def _unital_c0(a) -> UnitalElement:
    if isinstance(a, FuncElement):
        try:
            a = UnitalElement.from_function(a)
        except InvariantViolation as exc:
            raise DomainMismatch(str(exc)) from None
    if not isinstance(a, UnitalElement):
        raise DomainMismatch(f"{type(a).__name__} is not in the unitalized decaying class")
    if a.base.ap:
        # constant almost-periodic parts belong to the unit coefficient
        try:
            split = UnitalElement.from_function(a.base)
        except InvariantViolation as exc:
            raise DomainMismatch(str(exc)) from None
        a = UnitalElement(split.base, a.unit_coeff + split.unit_coeff)
    return a


def apply_state(omega: State, a) -> complex:
    kind = omega.kind
    if kind == "counterexample":
        if not isinstance(a, CubeAlgebraElement):
            raise DomainMismatch("the counterexample state acts on the cube algebra")
        total = 0
        for m, c in a.terms.items():
            if m.degree == 1:
                total += c * m.gens[0]
        return total
    if kind == "quotient":
        return complex(_unital_c0(a).unit_coeff)
    f = _as_function(a)
    vals = [complex(f.eval(p)) for p in omega.points]
    if kind == "point_eval":
        return vals[0]
    return complex(sum(w * v for w, v in zip(omega.weights, vals)))


# -- positivity -------------------------------------------------------------------


def random_domain_element(omega: State, rng):
    if omega.kind == "counterexample":
        return random_cube_element(rng)
    if omega.kind == "quotient":
        base = random_element(rng, "c0", n_c0=2)
        return UnitalElement(base, complex(rng.normal(), rng.normal()))
    d = len(omega.points[0]) if isinstance(omega.points[0], tuple) else 1
    kind = ("ap", "c0", "mixed")[int(rng.integers(3))] if d == 1 else "ap"
    base = random_element(rng, kind, n_trig=4, n_c0=2, d=d)
    return UnitalElement(base, complex(rng.normal(), rng.normal()))


@dataclass
class PositivityReport:
    state: str
    trials: int
    min_value: float
    violations: list = field(default_factory=list)
    exact: bool = False

    @property
    def verdict(self) -> str:
        return "PASS" if not self.violations else "FAIL"

    def to_dict(self) -> dict:
        return {
            "state": self.state,
            "trials": self.trials,
            "min_value": self.min_value,
            "exact": self.exact,
            "violations": self.violations,
            "verdict": self.verdict,
        }


def check_positivity(omega: State, trials: int = 100, seed: int = 0, tol: float = 1e-12) -> PositivityReport:
    """Evaluate ``omega(f* f)`` on random ``f``.

    For the counterexample state the value must be literally zero; otherwise it
    must have real part at least ``-tol`` relative to ``omega(|f|^2)`` scale and
    negligible imaginary part.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    exact = omega.kind == "counterexample"
    violations = []
    lowest = math.inf
    for t in range(trials):
        rng = rng_for(seed, f"positivity/{omega.kind}", t)
        f = random_domain_element(omega, rng)
        v = apply_state(omega, f.star() * f)
        if exact:
            ok = v == 0 and (f.star() * f).min_degree >= 2
            lowest = min(lowest, abs(v))
        else:
            v = complex(v)
            scale = max(1.0, abs(v))
            ok = v.real >= -tol * scale and abs(v.imag) <= tol * scale
            lowest = min(lowest, v.real)
        if not ok:
            violations.append({"trial": t, "value": [complex(v).real, complex(v).imag]})
    return PositivityReport(omega.label or omega.kind, trials, float(lowest), violations, exact)


# -- the unbounded ratio ----------------------------------------------------------


@dataclass
class NoncontinuityTable:
    rows: list  # (n, norm, omega, ratio)
    verdict: str

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "norm", "omega", "ratio"])
        w.writerows(self.rows)
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"rows": [dict(zip(("n", "norm", "omega", "ratio"), r)) for r in self.rows], "verdict": self.verdict}


def decade_sizes(n_max: int) -> list[int]:
    out, n = [], 1
    while n <= n_max:
        out.append(n)
        n *= 10
    if out[-1] != n_max:
        out.append(n_max)
    return out


def demonstrate_noncontinuity(n_max: int = 10**6) -> NoncontinuityTable:
    """``||x_n|| = 1`` while ``omega(x_n) = n`` for the counterexample state.

    The verdict is PASS when the ratios increase strictly and the last one
    equals ``n_max``, i.e. no single constant bounds the state by the norm.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    omega = State.counterexample()
    rows = []
    for n in decade_sizes(n_max):
        x = CubeAlgebraElement.generator(n)
        norm = x.sup_norm()
        val = apply_state(omega, x)
        rows.append((n, int(norm), int(val.real if isinstance(val, complex) else val), int(val / norm)))
    ratios = [r[3] for r in rows]
    increasing = all(b > a for a, b in zip(ratios, ratios[1:]))
    exact = all(r[1] == 1 and r[2] == r[0] == r[3] for r in rows)
    verdict = "PASS" if exact and increasing and ratios[-1] == n_max else "FAIL"
    if n_max == 1:
        verdict = "PASS" if exact else "FAIL"
    return NoncontinuityTable(rows, verdict)


def quotient_restriction_report(trials: int = 100, seed: int = 0) -> dict:
    """The quotient state vanishes on decaying elements yet equals 1 on the unit."""
    omega = State.quotient()
    values = []
    for t in range(trials):
        rng = rng_for(seed, "quotient_restriction", t)
        a = random_element(rng, "c0", n_c0=3)
        if invariant_problems(a, require_c0=True):
            raise InvariantViolation("generator produced an element outside the decaying class")
        values.append(apply_state(omega, a))
    unit = apply_state(omega, UnitalElement(FuncElement.zero(), 1.0))
    all_zero = all(v == 0 for v in values)
    return {
        "trials": trials,
        "max_abs_on_c0": float(max(abs(v) for v in values)),
        "unit_value": float(np.real(unit)),
        "verdict": "PASS" if all_zero and unit == 1 else "FAIL",
    }


__all__ = [
    "Monomial",
    "NoncontinuityTable",
    "PositivityReport",
    "State",
    "apply_state",
    "check_positivity",
    "decade_sizes",
    "demonstrate_noncontinuity",
    "quotient_restriction_report",
    "random_domain_element",
]
