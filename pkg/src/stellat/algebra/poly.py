"""Exact univariate polynomials over Q and factored pole-free denominators.

Polynomials are tuples of :class:`fractions.Fraction`, lowest degree first,
with no trailing zeros.  The empty tuple is the zero polynomial.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from ..errors import InvariantViolation

QPoly = tuple  # tuple[Fraction, ...]


def qpoly(coeffs: Iterable) -> QPoly:
    """Build a trimmed exact polynomial.  Floats are converted exactly."""
    out = [c if isinstance(c, Fraction) else Fraction(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def degree(p: QPoly) -> int:
    return len(p) - 1


def qadd(p: QPoly, q: QPoly) -> QPoly:
    n = max(len(p), len(q))
    return qpoly(
        (p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)
    )


def qscale(p: QPoly, c) -> QPoly:
    return qpoly(c * a for a in p)


def qmul(p: QPoly, q: QPoly) -> QPoly:
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return qpoly(out)


def qpow(p: QPoly, e: int) -> QPoly:
    out: QPoly = (Fraction(1),)
    for _ in range(e):
        out = qmul(out, p)
    return out


def qderiv(p: QPoly) -> QPoly:
    return qpoly(k * p[k] for k in range(1, len(p)))


def qrem(p: QPoly, q: QPoly) -> QPoly:
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(p)
    dq, lq = len(q) - 1, q[-1]
    while len(r) - 1 >= dq and r:
        c = r[-1] / lq
        shift = len(r) - 1 - dq
        for i, b in enumerate(q):
            r[shift + i] -= c * b
        r.pop()
        while r and r[-1] == 0:
            r.pop()
    return tuple(r)


def sturm_sequence(p: QPoly) -> list[QPoly]:
    seq = [p, qderiv(p)]
    while seq[-1]:
        r = qrem(seq[-2], seq[-1])
        if not r:
            break
        seq.append(qscale(r, -1))
    return seq


def _sign_changes(signs: Sequence[int]) -> int:
    s = [x for x in signs if x != 0]
    return sum(1 for a, b in zip(s, s[1:]) if a != b)


def count_real_roots(p: QPoly) -> int:
    """Number of distinct real roots of ``p`` (Sturm's theorem, exact)."""
    p = qpoly(p)
    if not p:
        raise ValueError("zero polynomial has infinitely many roots")
    if len(p) == 1:
        return 0
    seq = sturm_sequence(p)

    def sgn(c):
        return (c > 0) - (c < 0)

    at_pos = [sgn(s[-1]) for s in seq]
    at_neg = [sgn(s[-1]) * (-1) ** (len(s) - 1) for s in seq]
    return _sign_changes(at_neg) - _sign_changes(at_pos)


def to_float_array(p: QPoly) -> np.ndarray:
    return np.array([float(c) for c in p], dtype=float)


@lru_cache(maxsize=4096)
def _checked_base(base: QPoly) -> QPoly:
    if len(base) < 2:
        raise InvariantViolation("denominator factor must have degree >= 1")
    if base[-1] != 1:
        raise InvariantViolation("denominator factor must be monic")
    if count_real_roots(base):
        raise InvariantViolation(f"denominator factor {base} has a real root")
    return base


def make_monic(p: QPoly) -> tuple[QPoly, Fraction]:
    """Return (monic polynomial, leading coefficient)."""
    p = qpoly(p)
    lead = p[-1]
    return tuple(c / lead for c in p), lead


class Denominator:
    """Product of powers of monic, real-root-free polynomials over Q.

    Keeping the factorization makes lcm and exact comparison cheap, and
    lets evaluation multiply small factors instead of expanding.
    """

    __slots__ = ("factors", "_hash")

    def __init__(self, factors: Iterable[tuple[QPoly, int]] = ()):
        acc: dict = {}
        for base, e in factors:
            if e < 0:
                raise ValueError("negative exponent")
            if e == 0:
                continue
            base = _checked_base(tuple(base))
            acc[base] = acc.get(base, 0) + e
        self.factors = tuple(sorted(acc.items()))
        self._hash = hash(self.factors)

    @classmethod
    def one(cls) -> "Denominator":
        return cls()

    @classmethod
    def from_poly(cls, p: Iterable) -> tuple["Denominator", Fraction]:
        """Wrap an arbitrary polynomial; returns the denominator and the scalar
        that was divided out to make it monic."""
        monic, lead = make_monic(qpoly(p))
        if len(monic) == 1:
            return cls(), lead
        return cls([(monic, 1)]), lead

    def __eq__(self, other) -> bool:
        return isinstance(other, Denominator) and self.factors == other.factors

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        parts = []
        for base, e in self.factors:
            s = "(" + " + ".join(f"{c}*x^{i}" for i, c in enumerate(base) if c) + ")"
            parts.append(s if e == 1 else f"{s}^{e}")
        return "Denominator(" + (" * ".join(parts) or "1") + ")"

    @property
    def degree(self) -> int:
        return sum((len(b) - 1) * e for b, e in self.factors)

    @property
    def bases(self) -> tuple:
        return tuple(b for b, _ in self.factors)

    def exponent(self, base: QPoly) -> int:
        return dict(self.factors).get(base, 0)

    def __mul__(self, other: "Denominator") -> "Denominator":
        return Denominator(self.factors + other.factors)

    def lcm(self, other: "Denominator") -> "Denominator":
        acc = dict(self.factors)
        for b, e in other.factors:
            acc[b] = max(acc.get(b, 0), e)
        return Denominator(acc.items())

    def cofactor(self, multiple: "Denominator") -> QPoly:
        """Exact polynomial ``multiple / self`` (``self`` must divide it)."""
        mine = dict(self.factors)
        out: QPoly = (Fraction(1),)
        for b, e in multiple.factors:
            k = e - mine.get(b, 0)
            if k < 0:
                raise ValueError("denominator does not divide the multiple")
            out = qmul(out, qpow(b, k))
        return out

    def expanded(self) -> QPoly:
        return _expand(self.factors)

    def radical(self) -> "Denominator":
        return Denominator((b, 1) for b, _ in self.factors)

    def eval(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.ones_like(x)
        for b, e in self.factors:
            out = out * np.polynomial.polynomial.polyval(x, to_float_array(b)) ** e
        return out

    def eval_reversed(self, t: np.ndarray) -> np.ndarray:
        """``t**deg * D(1/t)``, well defined near t = 0."""
        t = np.asarray(t, dtype=float)
        out = np.ones_like(t)
        for b, e in self.factors:
            out = out * np.polynomial.polynomial.polyval(t, to_float_array(b)[::-1]) ** e
        return out


@lru_cache(maxsize=1024)
def _expand(factors: tuple) -> QPoly:
    out: QPoly = (Fraction(1),)
    for b, e in factors:
        out = qmul(out, qpow(b, e))
    return out


@lru_cache(maxsize=4096)
def float_poly(p: QPoly) -> np.ndarray:
    arr = to_float_array(p)
    arr.setflags(write=False)
    return arr
