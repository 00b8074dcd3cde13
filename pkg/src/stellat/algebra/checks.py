"""Full structural invariant checker for the representable classes."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..errors import InvariantViolation
from .element import FuncElement, UnitalElement
from .poly import count_real_roots, degree
from .rational import ModRatSum
from .trig import TrigPoly


def trig_problems(p: TrigPoly) -> list[str]:
    out = []
    for k, c in p.terms.items():
        if len(k) != p.d:
            out.append(f"frequency {k} has wrong dimension for d={p.d}")
        if c == 0:
            out.append(f"zero coefficient stored at {k}")
        if not np.isfinite(c.real) or not np.isfinite(c.imag):
            out.append(f"non-finite coefficient at {k}")
    if len(set(p.terms)) != len(p.terms):
        out.append("repeated frequency")
    return out


def c0_problems(s: ModRatSum) -> list[str]:
    out = []
    den = s.den
    for base, e in den.factors:
        if e < 1:
            out.append(f"non-positive exponent {e}")
        if degree(base) < 1 or base[-1] != 1:
            out.append(f"denominator factor {base} is not monic of positive degree")
        elif count_real_roots(base) != 0:
            out.append(f"denominator factor {base} has a real root")
    for f, n in s.terms.items():
        if not len(n):
            out.append(f"empty numerator stored at frequency {f}")
        elif n[-1] == 0:
            out.append(f"numerator at frequency {f} has a zero leading coefficient")
        if not np.all(np.isfinite(n)):
            out.append(f"non-finite numerator at frequency {f}")
        if len(n) - 1 >= den.degree:
            out.append(f"term at frequency {f} is not strictly proper")
    return out


def invariant_problems(a, require_c0: bool = False) -> list[str]:
    """Every violated class invariant of ``a``, as readable messages.

    ``require_c0`` additionally demands that the element decays, i.e. has no
    almost-periodic part (and, for unital elements, no unit coefficient).
    """
    if isinstance(a, UnitalElement):
        out = invariant_problems(a.base, require_c0)
        if require_c0 and a.unit_coeff != 0:
            out.append(f"unit coefficient {a.unit_coeff} is nonzero")
        return out
    if not isinstance(a, FuncElement):
        raise TypeError(f"cannot check {type(a).__name__}")
    out = trig_problems(a.ap) + c0_problems(a.c0)
    if a.d > 1 and a.c0:
        out.append("decaying part present for d > 1")
    if a.ap.d != a.d:
        out.append("ap dimension differs from element dimension")
    if require_c0 and a.ap:
        out.append("almost-periodic part present in a C_0-class element")
    for f in a.c0.terms:
        if not isinstance(f, (Fraction, float)):
            out.append(f"frequency {f!r} has unsupported type")
    return out


def check_invariants(a, require_c0: bool = False) -> None:
    problems = invariant_problems(a, require_c0)
    if problems:
        raise InvariantViolation("; ".join(problems))


def is_valid(a, require_c0: bool = False) -> bool:
    return not invariant_problems(a, require_c0)
