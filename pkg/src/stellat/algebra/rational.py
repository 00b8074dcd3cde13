"""Strictly proper, pole-free rational functions and their modulated sums.

A :class:`ModRatSum` is  sum_lambda N_lambda(x) exp(i lambda x) / D(x)  with one
common :class:`~stellat.algebra.poly.Denominator` ``D`` (exact, factored,
no real roots) and complex floating-point numerators of degree < deg D.
Every such term decays like 1/|x|, so the class sits inside C_0(R), and it is
closed under +, *, conjugation, d/dx and multiplication by trigonometric
polynomials.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from ..config import settings
from ..errors import InvariantViolation
from .poly import Denominator, float_poly, qderiv, qmul, qpoly
from .trig import TrigPoly, as_frequency

P = np.polynomial.polynomial


def _trim(num: np.ndarray) -> np.ndarray:
    thr = settings.drop_threshold
    num = np.where(np.abs(num) >= thr, num, 0)
    nz = np.flatnonzero(num)
    out = num[: nz[-1] + 1] if nz.size else num[:0]
    out = np.array(out, dtype=complex)
    out.setflags(write=False)
    return out


def _padd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if len(a) < len(b):
        a, b = b, a
    out = np.array(a, dtype=complex)
    out[: len(b)] += b
    return out


def _conv(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if not len(a) or not len(b):
        return np.zeros(0, dtype=complex)
    return np.convolve(a, b)


def eval_ratio(num: np.ndarray, den: Denominator, x: np.ndarray) -> np.ndarray:
    """num(x)/den(x), evaluated in 1/x for |x| > 1 to avoid overflow."""
    x = np.asarray(x, dtype=float)
    m = den.degree
    out = np.empty(x.shape, dtype=complex)
    inner = np.abs(x) <= 1
    if inner.any():
        xi = x[inner]
        out[inner] = P.polyval(xi, num) / den.eval(xi)
    outer = ~inner
    if outer.any():
        t = 1.0 / x[outer]
        padded = np.zeros(m, dtype=complex)
        padded[: len(num)] = num
        out[outer] = t * P.polyval(t, padded[::-1]) / den.eval_reversed(t)
    return out


class RationalFn:
    """num/den with complex numerator, exact real denominator.

    Invariants: den has no real roots and deg den >= deg num + 1.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Iterable, den):
        if isinstance(den, Denominator):
            scale = 1.0
        else:
            den, lead = Denominator.from_poly(den)
            scale = 1.0 / float(lead)
        self.den = den
        self.num = _trim(np.asarray(list(num), dtype=complex) * scale)
        if len(self.num) and len(self.num) - 1 >= den.degree:
            raise InvariantViolation(
                f"not strictly proper: deg num {len(self.num) - 1} >= deg den {den.degree}"
            )

    def __repr__(self) -> str:
        return f"RationalFn(num={self.num.tolist()}, den={self.den!r})"

    def __call__(self, x):
        return eval_ratio(self.num, self.den, x)

    def __bool__(self) -> bool:
        return bool(len(self.num))

    def __add__(self, other: "RationalFn") -> "RationalFn":
        L = self.den.lcm(other.den)
        a = _conv(self.num, float_poly(self.den.cofactor(L)))
        b = _conv(other.num, float_poly(other.den.cofactor(L)))
        return RationalFn(_padd(a, b), L)

    def __mul__(self, other):
        if isinstance(other, RationalFn):
            return RationalFn(_conv(self.num, other.num), self.den * other.den)
        return RationalFn(self.num * complex(other), self.den)

    __rmul__ = __mul__

    def conj(self) -> "RationalFn":
        return RationalFn(self.num.conj(), self.den)

    def derivative(self) -> "RationalFn":
        return RationalFn(*_quotient_rule(self.num, self.den, 0.0))


def _quotient_rule(num: np.ndarray, den: Denominator, freq: float):
    """Numerator and denominator of d/dx [num e^{i freq x} / den] / e^{i freq x}.

    With D = prod q_j^{e_j} and Q = prod q_j:
        (N e^{ifx}/D)' = [(N' + i f N) Q - N sum_j e_j q_j' Q/q_j] e^{ifx} / (D Q)
    """
    rad = den.radical()
    Q = float_poly(rad.expanded())
    dn = P.polyder(num) if len(num) > 1 else np.zeros(0, dtype=complex)
    first = _conv(_padd(dn, 1j * freq * num), Q)
    second = np.zeros(0, dtype=complex)
    for base, e in den.factors:
        others = qpoly([1])
        for b2, _ in den.factors:
            if b2 != base:
                others = qmul(others, b2)
        w = qmul(qderiv(base), others)
        second = _padd(second, e * _conv(num, float_poly(w)))
    return _padd(first, -second), den * rad


class ModRatSum:
    """Finite sum of rational functions modulated by exp(i lambda x).

    ``terms`` maps an exact frequency to a numerator coefficient array
    (lowest degree first) over the shared denominator ``den``.
    """

    __slots__ = ("den", "terms")

    def __init__(self, terms: Mapping | None = None, den: Denominator | None = None):
        self.den = den if den is not None else Denominator.one()
        cleaned = {}
        for f, num in sorted((terms or {}).items()):
            f = as_frequency(f)
            num = _trim(np.asarray(num, dtype=complex))
            if not len(num):
                continue
            if not np.all(np.isfinite(num)):
                raise ValueError("numerator coefficients must be finite")
            if len(num) - 1 >= self.den.degree:
                raise InvariantViolation("modulated term is not strictly proper")
            cleaned[f] = num
        self.terms = cleaned
        if not cleaned:
            self.den = Denominator.one()

    @classmethod
    def zero(cls) -> "ModRatSum":
        return cls()

    @classmethod
    def from_terms(cls, pairs: Iterable[tuple[RationalFn, object]]) -> "ModRatSum":
        """Build from (RationalFn, frequency) pairs, merging equal frequencies."""
        out = cls()
        for rat, f in pairs:
            out = out + cls({as_frequency(f): rat.num}, rat.den)
        return out

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        body = ", ".join(f"{f}: {n.tolist()}" for f, n in self.terms.items())
        return f"ModRatSum({{{body}}}, den={self.den!r})"

    def rational_terms(self) -> list[tuple[RationalFn, object]]:
        """The (RationalFn, frequency) view of the sum."""
        return [(RationalFn(n, self.den), f) for f, n in self.terms.items()]

    @property
    def is_exact(self) -> bool:
        return all(isinstance(f, Fraction) for f in self.terms)

    def lifted(self, den: Denominator) -> dict:
        """Numerators rewritten over a multiple ``den`` of ``self.den``."""
        if den == self.den:
            return dict(self.terms)
        cof = float_poly(self.den.cofactor(den))
        return {f: _conv(n, cof) for f, n in self.terms.items()}

    # -- *-algebra ----------------------------------------------------------------

    def __add__(self, other: "ModRatSum") -> "ModRatSum":
        if not other:
            return self
        if not self:
            return other
        L = self.den.lcm(other.den)
        acc = self.lifted(L)
        for f, n in other.lifted(L).items():
            acc[f] = _padd(acc[f], n) if f in acc else n
        return ModRatSum(acc, L)

    def __neg__(self) -> "ModRatSum":
        return self.scale(-1)

    def __sub__(self, other: "ModRatSum") -> "ModRatSum":
        return self + (-other)

    def scale(self, s: complex) -> "ModRatSum":
        return ModRatSum({f: s * n for f, n in self.terms.items()}, self.den)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self.scale(complex(other))
        if isinstance(other, TrigPoly):
            return self.mul_trig(other)
        if not self or not other:
            return ModRatSum()
        acc: dict = {}
        for f1, n1 in self.terms.items():
            for f2, n2 in other.terms.items():
                f = f1 + f2
                prod = _conv(n1, n2)
                acc[f] = _padd(acc[f], prod) if f in acc else prod
        return ModRatSum(acc, self.den * other.den)

    __rmul__ = __mul__

    def mul_trig(self, p: TrigPoly) -> "ModRatSum":
        if p.d != 1:
            raise ValueError("modulated rationals live on R (d = 1)")
        acc: dict = {}
        for f1, n in self.terms.items():
            for (f2,), c in p.terms.items():
                f = f1 + f2
                acc[f] = _padd(acc[f], c * n) if f in acc else c * n
        return ModRatSum(acc, self.den)

    def star(self) -> "ModRatSum":
        return ModRatSum({-f: n.conj() for f, n in self.terms.items()}, self.den)

    def derivative(self) -> "ModRatSum":
        if not self:
            return self
        acc = {}
        new_den = None
        for f, n in self.terms.items():
            num, new_den = _quotient_rule(n, self.den, float(f))
            acc[f] = num
        return ModRatSum(acc, new_den)

    # -- numerics -----------------------------------------------------------------

    def eval(self, x) -> np.ndarray | complex:
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xs = x.reshape(-1)
        out = np.zeros(xs.shape, dtype=complex)
        if self.terms:
            m = self.den.degree
            freqs = np.array([float(f) for f in self.terms])
            nums = np.zeros((len(freqs), m), dtype=complex)
            for i, n in enumerate(self.terms.values()):
                nums[i, : len(n)] = n
            inner = np.abs(xs) <= 1
            # numerators as a matrix against powers of x (or of 1/x far out)
            if inner.any():
                xi = xs[inner]
                vals = nums @ np.power.outer(xi, np.arange(m)).T
                out[inner] = np.sum(vals * np.exp(1j * np.outer(freqs, xi)), axis=0) / self.den.eval(xi)
            outer = ~inner
            if outer.any():
                xo = xs[outer]
                t = 1.0 / xo
                vals = nums[:, ::-1] @ np.power.outer(t, np.arange(m)).T
                phase = np.exp(1j * np.outer(freqs, xo))
                out[outer] = t * np.sum(vals * phase, axis=0) / self.den.eval_reversed(t)
        return complex(out[0]) if scalar else out.reshape(x.shape)

    def magnitude_poly(self) -> np.ndarray:
        """Coefficientwise sum of |numerator coefficients| over all frequencies."""
        out = np.zeros(max((len(n) for n in self.terms.values()), default=0))
        for n in self.terms.values():
            out[: len(n)] += np.abs(n)
        return out
