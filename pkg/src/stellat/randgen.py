"""Seeded random elements for property tests and verification suites.

Each trial gets its own counter-based generator keyed by (seed, suite, trial),
so results do not depend on the order in which trials run.
"""

from __future__ import annotations

import hashlib
from fractions import Fraction

import numpy as np

from .algebra.element import FuncElement, UnitalElement
from .algebra.norm import crude_upper, norm_enclosure
from .algebra.rational import ModRatSum, RationalFn
from .algebra.trig import TrigPoly

# real polynomials without real roots, coefficients low to high
DEN_PALETTE = (
    (1, 0, 1),  # 1 + x^2
    (4, 0, 1),  # 4 + x^2
    (2, 2, 1),  # (x + 1)^2 + 1
    (5, -2, 1),  # (x - 1)^2 + 4
    (Fraction(9, 4), 0, 1),
)
# even denominators b + x^2: their powers expand without cancellation on R,
# which keeps high powers accurate in the monomial basis
DEN_EVEN = ((1, 0, 1), (4, 0, 1), (Fraction(9, 4), 0, 1))


def rng_for(seed: int, suite: str = "", trial: int = 0) -> np.random.Generator:
    digest = hashlib.sha256(f"{seed}:{suite}:{trial}".encode()).digest()
    key = np.frombuffer(digest[:16], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _cgauss(rng, size=None):
    return rng.normal(size=size) + 1j * rng.normal(size=size)


def random_frequency(rng, max_abs: int = 8, max_den: int = 4) -> Fraction:
    q = int(rng.integers(1, max_den + 1))
    p = int(rng.integers(-max_abs * q, max_abs * q + 1))
    return Fraction(p, q)


def random_trig(rng, n_terms: int = 8, d: int = 1, max_abs: int = 8, max_den: int = 4) -> TrigPoly:
    k = int(rng.integers(1, n_terms + 1))
    terms = {}
    for _ in range(k):
        f = tuple(random_frequency(rng, max_abs, max_den) for _ in range(d))
        terms[f] = complex(_cgauss(rng))
    return TrigPoly(terms, d)


def random_c0(rng, n_terms: int = 3, max_abs: int = 2, max_den: int = 2, palette=DEN_PALETTE) -> ModRatSum:
    k = int(rng.integers(1, n_terms + 1))
    out = ModRatSum()
    for _ in range(k):
        den = palette[int(rng.integers(len(palette)))]
        other = palette[int(rng.integers(len(palette)))] if rng.random() < 0.25 else None
        deg = len(den) - 1 + (len(other) - 1 if other else 0)
        num = _cgauss(rng, int(rng.integers(1, deg + 1)))
        if other:
            # keep the denominator factored; expanded products make high powers overflow
            k = len(den) - 1
            tail = num[k : k + len(other) - 1] if len(num) > k else [1.0]
            r = RationalFn(num[:k], den) * RationalFn(tail, other)
        else:
            r = RationalFn(num, den)
        out = out + ModRatSum({random_frequency(rng, max_abs, max_den): r.num}, r.den)
    return out


def random_element(
    rng,
    kind: str = "mixed",
    n_trig: int = 8,
    n_c0: int = 3,
    self_adjoint: bool = False,
    d: int = 1,
    max_abs: int = 8,
    max_den: int = 4,
    palette=DEN_PALETTE,
) -> FuncElement:
    """Random element; ``kind`` is one of "ap", "c0", "mixed"."""
    ap = random_trig(rng, n_trig, d, max_abs, max_den) if kind in ("ap", "mixed") else None
    c0 = random_c0(rng, n_c0, palette=palette) if kind in ("c0", "mixed") and d == 1 else None
    a = FuncElement(ap, c0, d)
    if self_adjoint:
        a = a.real_part()
    if not a:
        return random_element(rng, kind, n_trig, n_c0, self_adjoint, d, max_abs, max_den, palette)
    return a


def scaled(a: FuncElement, bound: float) -> FuncElement:
    """Rescale so that a cheap rigorous upper bound of the norm equals ``bound``."""
    return a.scale(bound / crude_upper(a))


def scaled_to_norm(a: FuncElement, bound: float, tol: float = 1e-6) -> FuncElement:
    """Rescale so that the certified upper norm bound is just below ``bound``."""
    target = bound * (1 - 1e-3)
    b = a.scale(target / norm_enclosure(a, tol).upper)
    while norm_enclosure(b, tol).upper >= bound:
        b = b.scale(0.99)
    return b


def random_unital(rng, self_adjoint: bool = False, n_c0: int = 3) -> UnitalElement:
    base = random_element(rng, "c0", n_c0=n_c0, self_adjoint=self_adjoint)
    mu = complex(rng.normal()) if self_adjoint else complex(_cgauss(rng))
    return UnitalElement(base, mu)
