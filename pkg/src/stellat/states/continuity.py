"""Checking  |omega(phi)| <= omega(1) ||phi||  on unitalized function algebras."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..algebra.element import FuncElement, UnitalElement
from ..algebra.norm import NormEnclosure, norm_enclosure
from ..calculus.compose import compose_series_unital
from ..calculus.series import sqrt_shift
from ..errors import DomainMismatch, StellatError
from ..randgen import DEN_EVEN, random_element, rng_for
from .state import State, apply_state

REPLAY_EPS = 1e-3
REPLAY_TERMS = 16
NORM_TOL = 1e-3
# sqrt(1 + z) and sqrt(1 - z); shared so their coefficients are computed once
_UNIT_SQRT = {1: sqrt_shift(1.0, 1), -1: sqrt_shift(1.0, -1)}


def _square_value(omega: State, psi: UnitalElement) -> complex:
    """``omega(psi* psi)``.

    Point and atomic states are multiplicative on functions, so the value is
    ``sum w |psi(x)|^2``; the quotient state keeps only the unit coefficient.
    """
    if omega.kind == "quotient":
        return complex(abs(apply_state(omega, psi)) ** 2)
    f = psi.as_function()
    return complex(math.fsum(w * abs(complex(f.eval(p))) ** 2 for w, p in zip(omega.weights, omega.points)))


def _dimension(omega: State) -> int:
    if omega.kind in ("point_eval", "finite_measure") and isinstance(omega.points[0], tuple):
        return len(omega.points[0])
    return 1


def random_test_element(domain: str, rng, self_adjoint: bool, near_constant: bool = False, d: int = 1) -> UnitalElement:
    """A small element of ``domain`` ("functions" or "unital_c0") plus a multiple of the unit."""
    if domain == "unital_c0":
        kind = "c0"
    elif d > 1:
        kind = "ap"
    else:
        kind = ("ap", "c0", "mixed")[int(rng.integers(3))]
    base = random_element(
        rng, kind, n_trig=3, n_c0=1, self_adjoint=self_adjoint, d=d, max_abs=4, max_den=2, palette=DEN_EVEN
    )
    mu = complex(rng.normal()) if self_adjoint else complex(rng.normal(), rng.normal())
    if near_constant:
        if mu == 0:
            mu = 1.0
        base = base.scale(1e-3 * abs(mu))
    return UnitalElement(base, mu)


def _real_part(u: UnitalElement) -> UnitalElement:
    return (u + u.star()) * 0.5


@dataclass
class ContinuityReport:
    suite: str
    trials: int
    violations: list = field(default_factory=list)
    max_ratio: float = 0.0
    unit_value: float = 0.0
    replays: int = 0
    max_replay_slack: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "PASS" if not self.violations else "FAIL"

    @property
    def saturation(self) -> float:
        """``max_ratio`` relative to the unit value (1 means the bound is attained)."""
        return self.max_ratio / self.unit_value if self.unit_value else 0.0

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "trials": self.trials,
            "violations": self.violations,
            "max_ratio": self.max_ratio,
            "unit_value": self.unit_value,
            "saturation": self.saturation,
            "replays": self.replays,
            "max_replay_slack": self.max_replay_slack,
            "verdict": self.verdict,
        }


@dataclass
class _Trial:
    element: UnitalElement
    self_adjoint: bool
    enclosure: NormEnclosure | None = None
    # (r, [(sign, psi, tail)]) for the square-root replay
    roots: tuple | None = None
    error: str | None = None


class ElementFamily:
    """Seeded test elements for one state domain, with their state-independent work cached.

    States sharing a domain can share a family: norm enclosures and the
    square-root compositions are computed once per element.
    """

    def __init__(self, domain: str, seed: int = 0, d: int = 1, norm_tol: float = NORM_TOL):
        self.domain = domain
        self.seed = seed
        self.d = d
        self.norm_tol = norm_tol
        self._trials: dict[int, _Trial] = {}

    @classmethod
    def for_state(cls, omega: State, seed: int = 0, norm_tol: float = NORM_TOL) -> "ElementFamily":
        return cls(omega.domain, seed, _dimension(omega), norm_tol)

    def accepts(self, omega: State) -> bool:
        return omega.domain == self.domain and _dimension(omega) == self.d

    def __getitem__(self, t: int) -> _Trial:
        if t not in self._trials:
            self._trials[t] = self._build(t)
        return self._trials[t]

    def _build(self, t: int) -> _Trial:
        rng = rng_for(self.seed, f"continuity/{self.domain}/d{self.d}", t)
        self_adjoint = t % 2 == 0
        u = random_test_element(self.domain, rng, self_adjoint, near_constant=t % 10 == 0, d=self.d)
        trial = _Trial(u, self_adjoint)
        try:
            trial.enclosure = norm_enclosure(u, self.norm_tol)
            if self_adjoint and trial.enclosure.upper > 0:
                trial.roots = _square_roots(u, trial.enclosure)
        except StellatError as exc:
            trial.error = f"{type(exc).__name__}: {exc}"
        return trial


def _square_roots(u: UnitalElement, enc: NormEnclosure):
    """``sqrt(r +- phi)`` truncated, with ``r`` just above the norm bound."""
    r = enc.upper * (1 + REPLAY_EPS)
    phi = u.as_function()
    out = []
    for sign in (1, -1):
        # sqrt(r +- phi) = sqrt(r) sqrt(1 +- phi/r); unit radius keeps coefficients in range
        psi, cert = compose_series_unital(
            _UNIT_SQRT[sign], phi.scale(1 / r), n_terms=REPLAY_TERMS, rho=enc.upper / r
        )
        out.append((sign, psi * math.sqrt(r), cert.tail_bound * math.sqrt(r)))
    return r, out


def _replay(omega: State, trial: _Trial, value: float, unit: float, tol: float) -> tuple[list, float]:
    """Test both consequences of writing ``r +- phi`` as a square."""
    problems = []
    worst_slack = 0.0
    r, roots = trial.roots
    for sign, psi, tau in roots:
        # psi = sqrt(r +- phi) + E with ||E|| <= tau and ||sqrt(r +- phi)|| <= sqrt(2r)
        slack = unit * (2 * math.sqrt(2 * r) + tau) * tau + tol
        worst_slack = max(worst_slack, slack)
        sq = _square_value(omega, psi)
        target = r * unit + sign * value
        if sq.real < -slack:
            problems.append({"check": f"omega(psi*psi) >= 0 (sign {sign:+d})", "value": sq.real, "slack": slack})
        if abs(sq.real - target) > slack:
            problems.append(
                {"check": f"omega(psi*psi) = r*omega(1) {sign:+d} omega(phi)", "value": sq.real, "target": target, "slack": slack}
            )
        if target < -tol:
            problems.append({"check": f"r*omega(1) {sign:+d} omega(phi) >= 0", "value": target})
    return problems, worst_slack


def verify_continuity_bound(
    omega: State,
    trials: int = 1000,
    seed: int = 0,
    tol: float = 1e-9,
    *,
    suite: str | None = None,
    replay: bool = True,
    family: ElementFamily | None = None,
    norm_tol: float = NORM_TOL,
) -> ContinuityReport:
    """Random trials of  |omega(phi)| <= omega(1) * ||phi||_upper + tol.

    Trials alternate between self-adjoint and general elements; every tenth
    trial is a near-constant element so the family can come close to the
    bound.  Self-adjoint trials replay the square-root argument, general
    trials first rotate by a unimodular ``lam`` making ``lam*omega(phi)`` real.
    Pass a shared ``family`` to reuse elements and enclosures across states.
    """
    if not omega.is_unital:
        raise DomainMismatch("the continuity bound needs a state on a unital domain")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if family is None:
        family = ElementFamily.for_state(omega, seed, norm_tol)
    elif not family.accepts(omega):
        raise DomainMismatch(f"family for {family.domain!r} does not fit a {omega.kind} state")
    name = suite or f"continuity/{omega.label or omega.kind}"
    unit = omega.unit_value()
    report = ContinuityReport(name, trials, unit_value=unit)
    for t in range(trials):
        trial = family[t]
        u = trial.element
        try:
            if trial.error:
                raise StellatError(trial.error)
            enc = trial.enclosure
            value = complex(apply_state(omega, u))
            bound = unit * enc.upper
            if enc.upper > 0:
                report.max_ratio = max(report.max_ratio, abs(value) / enc.upper)
            if abs(value) > bound + tol:
                report.violations.append({"trial": t, "check": "bound", "value": abs(value), "bound": bound})
            if trial.self_adjoint and replay and trial.roots is not None:
                problems, slack = _replay(omega, trial, value.real, unit, tol)
                report.replays += 1
                report.max_replay_slack = max(report.max_replay_slack, slack)
                report.violations.extend({"trial": t, **p} for p in problems)
            elif not trial.self_adjoint:
                lam = value.conjugate() / abs(value) if value != 0 else 1.0
                w = _real_part(u * lam)
                rotated = complex(apply_state(omega, w))
                w_upper = norm_enclosure(w, family.norm_tol).upper
                scale = max(1.0, abs(value))
                if abs(value) > unit * w_upper + tol:
                    report.violations.append(
                        {"trial": t, "check": "rotated bound", "value": abs(value), "bound": unit * w_upper}
                    )
                if abs(rotated.real - abs(value)) > 1e-9 * scale or abs(rotated.imag) > 1e-9 * scale:
                    report.violations.append(
                        {"trial": t, "check": "rotation makes omega(phi) real", "value": [rotated.real, rotated.imag]}
                    )
        except StellatError as exc:
            report.violations.append({"trial": t, "check": "error", "error": f"{type(exc).__name__}: {exc}"})
    return report


@dataclass
class FactorTwoReport:
    value: float
    unit_value: float
    norm: NormEnclosure
    new_bound: float
    old_bound: float
    holds: bool
    saturated: bool

    @property
    def ratio_new(self) -> float:
        return self.value / self.new_bound if self.new_bound else 0.0

    @property
    def ratio_old(self) -> float:
        return self.value / self.old_bound if self.old_bound else 0.0

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "unit_value": self.unit_value,
            "norm": self.norm.to_dict(),
            "new_bound": self.new_bound,
            "old_bound": self.old_bound,
            "ratio_new": self.ratio_new,
            "ratio_old": self.ratio_old,
            "holds": self.holds,
            "improvement_active": self.saturated,
        }


def factor_two_comparison(omega: State, phi, tol: float = 1e-9, norm_tol: float = 1e-9) -> FactorTwoReport:
    """Compare ``|omega(phi)|`` with ``omega(1)||phi||`` and with twice that.

    ``saturated`` marks elements where ``|omega(phi)|`` reaches the certified
    lower norm bound times ``omega(1)``: there the smaller bound is attained and
    the doubled one is off by a factor of two.
    """
    if isinstance(phi, FuncElement):
        phi = UnitalElement(phi, 0j)
    unit = omega.unit_value()
    value = abs(complex(apply_state(omega, phi)))
    enc = norm_enclosure(phi, norm_tol)
    new = unit * enc.upper
    holds = value <= new + tol
    saturated = value > 0 and value >= unit * enc.lower - tol
    return FactorTwoReport(value, unit, enc, new, 2 * new, holds, saturated)


def default_states() -> list[State]:
    """Point evaluation, three atomic measures and the quotient state."""
    return [
        State.point_eval(0.0),
        State.finite_measure([(0.5, 0.0), (0.5, np.pi / 2)], "measure_two_atoms"),
        State.finite_measure([(1.0, -1.0), (2.0, 0.25), (0.5, 3.0)], "measure_three_atoms"),
        State.finite_measure([(0.1 * k, 0.7 * k) for k in range(1, 6)], "measure_five_atoms"),
        State.quotient(),
    ]
