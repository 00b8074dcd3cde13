"""Elements of C_0(R) (+) C_AP(R) as bounded functions, with their *-structure."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np

from ..errors import DimensionMismatch, InvariantViolation
from .poly import Denominator, qpoly
from .rational import ModRatSum, RationalFn
from .trig import TrigPoly, as_frequency, frequency_key

Scalar = (int, float, complex, np.number)


class FuncElement:
    """Graded element ``c0 + ap`` with ``c0`` decaying and ``ap`` almost periodic.

    The unit is ``ap = {0: 1}``.  For ``d > 1`` only the almost-periodic part
    is supported.  Values are immutable; all operations return new elements.
    """

    __slots__ = ("ap", "c0", "d")

    def __init__(self, ap: TrigPoly | None = None, c0: ModRatSum | None = None, d: int | None = None):
        if d is None:
            d = ap.d if ap is not None else 1
        self.d = d
        self.ap = ap if ap is not None else TrigPoly({}, d)
        self.c0 = c0 if c0 is not None else ModRatSum()
        if self.ap.d != d:
            raise DimensionMismatch(f"ap part has d={self.ap.d}, element has d={d}")
        if d > 1 and self.c0:
            raise DimensionMismatch("decaying part is only supported on R (d = 1)")

    # -- constructors --------------------------------------------------------------

    @classmethod
    def zero(cls, d: int = 1) -> "FuncElement":
        return cls(TrigPoly({}, d), d=d)

    @classmethod
    def unit(cls, d: int = 1) -> "FuncElement":
        return cls(TrigPoly.constant(1.0, d), d=d)

    @classmethod
    def constant(cls, c: complex, d: int = 1) -> "FuncElement":
        return cls(TrigPoly.constant(c, d), d=d)

    @classmethod
    def trig(cls, terms: dict, d: int = 1) -> "FuncElement":
        """``FuncElement.trig({1: 0.5, -1: 0.5})`` is cos(x)."""
        return cls(TrigPoly(terms, d), d=d)

    @classmethod
    def rational(cls, num, den, freq=0) -> "FuncElement":
        """``num(x)/den(x) * exp(i*freq*x)``; den is any real polynomial
        (coefficients low to high) without real roots."""
        r = RationalFn(num, den)
        return cls(c0=ModRatSum({as_frequency(freq): r.num}, r.den))

    # -- structure -----------------------------------------------------------------

    def __repr__(self) -> str:
        return f"FuncElement(ap={self.ap!r}, c0={self.c0!r}, d={self.d})"

    def __bool__(self) -> bool:
        return bool(self.ap) or bool(self.c0)

    @property
    def is_exact(self) -> bool:
        return self.ap.is_exact and self.c0.is_exact

    @property
    def n_terms(self) -> int:
        return len(self.ap) + len(self.c0)

    def is_self_adjoint(self, atol: float = 1e-12) -> bool:
        diff = self - self.star()
        return diff.ap.coefficient_l1() <= atol and all(
            np.max(np.abs(n)) <= atol for n in diff.c0.terms.values()
        )

    def _check(self, other: "FuncElement"):
        if self.d != other.d:
            raise DimensionMismatch(f"dimensions {self.d} and {other.d} differ")

    # -- *-algebra ----------------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Scalar):
            return self + FuncElement.constant(other, self.d)
        self._check(other)
        return FuncElement(self.ap + other.ap, self.c0 + other.c0, self.d)

    __radd__ = __add__

    def __neg__(self) -> "FuncElement":
        return FuncElement(-self.ap, -self.c0, self.d)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s: complex) -> "FuncElement":
        return FuncElement(self.ap.scale(s), self.c0.scale(s), self.d)

    def __mul__(self, other):
        if isinstance(other, Scalar):
            return self.scale(complex(other))
        self._check(other)
        ap = self.ap * other.ap
        if self.d > 1:
            return FuncElement(ap, d=self.d)
        c0 = self.c0 * other.c0 + self.c0.mul_trig(other.ap) + other.c0.mul_trig(self.ap)
        return FuncElement(ap, c0, self.d)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "FuncElement":
        if k < 0:
            raise ValueError("negative powers are not in the algebra")
        out = FuncElement.unit(self.d)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def star(self) -> "FuncElement":
        return FuncElement(self.ap.star(), self.c0.star(), self.d)

    def derivative(self, direction: int = 0) -> "FuncElement":
        if not 0 <= direction < self.d:
            raise DimensionMismatch(f"direction {direction} invalid for d={self.d}")
        return FuncElement(self.ap.derivative(direction), self.c0.derivative(), self.d)

    def real_part(self) -> "FuncElement":
        return (self + self.star()).scale(0.5)

    def imag_part(self) -> "FuncElement":
        return (self - self.star()).scale(-0.5j)

    # -- numerics -----------------------------------------------------------------

    def eval(self, x):
        out = self.ap.eval(x)
        if self.c0:
            out = out + self.c0.eval(x)
        return out

    __call__ = eval

    # -- serialization ------------------------------------------------------------

    def to_dict(self) -> dict:
        def fkey(k):
            enc = [_enc_freq(c) for c in k]
            return enc[0] if self.d == 1 else enc

        ap = [
            {"freq": fkey(k), "re": c.real, "im": c.imag} for k, c in self.ap.terms.items()
        ]
        den = self.c0.den
        den_coeffs = [str(c) for c in den.expanded()]
        factors = [{"base": [str(c) for c in b], "exp": e} for b, e in den.factors]
        c0 = []
        for f, n in self.c0.terms.items():
            entry: dict[str, Any] = {"num": n.real.tolist(), "den": den_coeffs, "freq": _enc_freq(f)}
            if np.any(n.imag):
                entry["num_im"] = n.imag.tolist()
            entry["den_factors"] = factors
            c0.append(entry)
        return {"d": self.d, "ap": ap, "c0": c0}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "FuncElement":
        d = int(data["d"])
        ap = TrigPoly(
            {frequency_key(_dec_freq(t["freq"]), d): complex(t["re"], t["im"]) for t in data.get("ap", [])},
            d,
        )
        c0 = ModRatSum()
        for t in data.get("c0", []):
            num = np.asarray(t["num"], dtype=float) + 1j * np.asarray(t.get("num_im", [0.0] * len(t["num"])), dtype=float)
            if "den_factors" in t:
                den = Denominator((qpoly(Fraction(c) for c in fct["base"]), int(fct["exp"])) for fct in t["den_factors"])
            else:
                den, lead = Denominator.from_poly(Fraction(c) for c in t["den"])
                num = num / float(lead)
            c0 = c0 + ModRatSum({_dec_freq(t["freq"]): num}, den)
        return cls(ap, c0, d)

    @classmethod
    def from_json(cls, text: str) -> "FuncElement":
        return cls.from_dict(json.loads(text))


def _enc_freq(f):
    return str(f) if isinstance(f, Fraction) else float(f)


def _dec_freq(f):
    if isinstance(f, list):
        return tuple(_dec_freq(c) for c in f)
    return Fraction(f) if isinstance(f, str) else as_frequency(f)


@dataclass(frozen=True)
class UnitalElement:
    """``base + unit_coeff * 1`` -- an element of D(C) + C*1.

    When ``base`` has no almost-periodic part it lies in C_0, and a nonzero
    ``unit_coeff`` marks the element as lying outside C_0.
    """

    base: FuncElement
    unit_coeff: complex = 0j

    @classmethod
    def from_function(cls, f: FuncElement) -> "UnitalElement":
        """Split off a constant almost-periodic part as the unit coefficient."""
        if f.ap and set(f.ap.terms) != {(Fraction(0),) * f.d}:
            raise InvariantViolation("almost-periodic part is not a constant")
        mu = f.ap.coefficient((Fraction(0),) * f.d if f.d > 1 else 0)
        return cls(FuncElement(c0=f.c0, d=f.d), mu)

    @property
    def d(self) -> int:
        return self.base.d

    def as_function(self) -> FuncElement:
        return self.base + FuncElement.constant(self.unit_coeff, self.d) if self.unit_coeff else self.base

    def __add__(self, other):
        if isinstance(other, Scalar):
            return UnitalElement(self.base, self.unit_coeff + complex(other))
        return UnitalElement(self.base + other.base, self.unit_coeff + other.unit_coeff)

    def __neg__(self):
        return UnitalElement(-self.base, -self.unit_coeff)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Scalar):
            return UnitalElement(self.base.scale(complex(other)), self.unit_coeff * complex(other))
        base = self.base * other.base + other.base.scale(self.unit_coeff) + self.base.scale(other.unit_coeff)
        return UnitalElement(base, self.unit_coeff * other.unit_coeff)

    __rmul__ = __mul__

    def star(self) -> "UnitalElement":
        return UnitalElement(self.base.star(), complex(self.unit_coeff).conjugate())

    def derivative(self, direction: int = 0) -> FuncElement:
        return self.base.derivative(direction)

    def eval(self, x):
        return self.base.eval(x) + self.unit_coeff

    __call__ = eval


# module-level spellings of the element operations


def add(a: FuncElement, b: FuncElement) -> FuncElement:
    return a + b


def mul(a: FuncElement, b: FuncElement) -> FuncElement:
    return a * b


def star(a):
    return a.star()


def derivative(a: FuncElement, direction: int = 0) -> FuncElement:
    return a.derivative(direction)


def evaluate(a, x):
    return a.eval(x)
