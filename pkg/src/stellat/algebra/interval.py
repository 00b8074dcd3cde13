"""Vectorized interval arithmetic with outward rounding.

Every elementary operation rounds its result one ulp outward with
``np.nextafter``; IEEE round-to-nearest then guarantees containment.
Transcendental enclosures are widened by an absolute margin that covers the
libm error of ``np.cos``/``np.sin`` on [-1, 1]-valued results.
"""

from __future__ import annotations

import numpy as np

_TWO_PI = 2 * np.pi
# covers a few ulps of cos/sin error near magnitude 1
TRIG_MARGIN = 2e-15
_U = 2.0**-53


def down(x):
    return np.nextafter(x, -np.inf)


def up(x):
    return np.nextafter(x, np.inf)


class Interval:
    """Array of closed intervals ``[lo, hi]`` (broadcasting like numpy)."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = self.lo if hi is None else np.asarray(hi, dtype=float)

    @classmethod
    def enclosing(cls, values) -> "Interval":
        """Enclosure of exact reals given as Fractions (or floats)."""
        f = np.array([float(v) for v in values], dtype=float)
        exact = np.array([float(v) == v for v in values], dtype=bool)
        return cls(np.where(exact, f, down(f)), np.where(exact, f, up(f)))

    def __repr__(self) -> str:
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __getitem__(self, idx) -> "Interval":
        return Interval(self.lo[idx], self.hi[idx])

    @property
    def mag(self) -> np.ndarray:
        return np.maximum(np.abs(self.lo), np.abs(self.hi))

    @property
    def mig(self) -> np.ndarray:
        """Smallest absolute value in the interval."""
        return np.where((self.lo <= 0) & (self.hi >= 0), 0.0, np.minimum(np.abs(self.lo), np.abs(self.hi)))

    def contains_zero(self) -> np.ndarray:
        return (self.lo <= 0) & (self.hi >= 0)

    def __add__(self, other):
        if not isinstance(other, Interval):
            other = Interval(other)
        return Interval(down(self.lo + other.lo), up(self.hi + other.hi))

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        if not isinstance(other, Interval):
            other = Interval(other)
        return Interval(down(self.lo - other.hi), up(self.hi - other.lo))

    def __mul__(self, other):
        if not isinstance(other, Interval):
            return self.scale(other)
        with np.errstate(invalid="ignore"):
            p1 = self.lo * other.lo
            p2 = self.lo * other.hi
            p3 = self.hi * other.lo
            p4 = self.hi * other.hi
        lo = np.minimum(np.minimum(p1, p2), np.minimum(p3, p4))
        hi = np.maximum(np.maximum(p1, p2), np.maximum(p3, p4))
        # 0 * inf from unbounded factors: fall back to the whole line
        return Interval(np.where(np.isnan(lo), -np.inf, down(lo)), np.where(np.isnan(hi), np.inf, up(hi)))

    __rmul__ = __mul__

    def scale(self, s) -> "Interval":
        """Multiply by exact floats ``s``."""
        s = np.asarray(s, dtype=float)
        a = self.lo * s
        b = self.hi * s
        return Interval(down(np.minimum(a, b)), up(np.maximum(a, b)))

    def sqr(self) -> "Interval":
        a = self.lo * self.lo
        b = self.hi * self.hi
        lo = np.where(self.contains_zero(), 0.0, down(np.minimum(a, b)))
        return Interval(np.maximum(lo, 0.0), up(np.maximum(a, b)))

    def recip(self) -> "Interval":
        """1/X for intervals not containing zero (otherwise [-inf, inf])."""
        bad = self.contains_zero()
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            lo = down(1.0 / self.hi)
            hi = up(1.0 / self.lo)
        return Interval(np.where(bad, -np.inf, lo), np.where(bad, np.inf, hi))

    def __pow__(self, e: int) -> "Interval":
        if e == 0:
            return Interval(np.ones_like(self.lo))
        if e == 1:
            return self
        half = self ** (e // 2)
        sq = half.sqr()
        return sq * self if e % 2 else sq

    def intersect(self, other: "Interval") -> "Interval":
        return Interval(np.maximum(self.lo, other.lo), np.minimum(self.hi, other.hi))


def isum(x: Interval, axis: int = -1) -> Interval:
    """Rigorous sum along an axis.

    Recursive summation of n terms errs by at most (n-1) u sum|x_i|; the bound
    is applied outward together with one ulp for the bound itself.
    """
    n = x.lo.shape[axis]
    slo = np.sum(x.lo, axis=axis)
    shi = np.sum(x.hi, axis=axis)
    g = 1.01 * n * _U
    elo = g * np.sum(np.abs(x.lo), axis=axis) + 1e-300
    ehi = g * np.sum(np.abs(x.hi), axis=axis) + 1e-300
    return Interval(down(slo - elo), up(shi + ehi))


def _maybe_contains_integer(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # conservative: false positives only widen the enclosure slightly
    slack = 1e-12 + 8 * _U * np.maximum(np.abs(a), np.abs(b))
    return np.floor(b + slack) >= np.ceil(a - slack)


def _trig(x: Interval, fn, max_shift: float, min_shift: float) -> Interval:
    lo, hi = x.lo, x.hi
    with np.errstate(invalid="ignore"):
        vlo = fn(lo)
        vhi = fn(hi)
    rlo = np.minimum(vlo, vhi) - TRIG_MARGIN
    rhi = np.maximum(vlo, vhi) + TRIG_MARGIN
    a = lo / _TWO_PI
    b = hi / _TWO_PI
    rhi = np.where(_maybe_contains_integer(a - max_shift, b - max_shift), 1.0, rhi)
    rlo = np.where(_maybe_contains_integer(a - min_shift, b - min_shift), -1.0, rlo)
    wide = ~np.isfinite(lo) | ~np.isfinite(hi) | (hi - lo >= _TWO_PI)
    rlo = np.where(wide, -1.0, rlo)
    rhi = np.where(wide, 1.0, rhi)
    return Interval(np.maximum(rlo, -1.0), np.minimum(rhi, 1.0))


def cos(x: Interval) -> Interval:
    # maxima at 2k*pi, minima at (2k+1)*pi
    return _trig(x, np.cos, 0.0, 0.5)


def sin(x: Interval) -> Interval:
    # maxima at pi/2 + 2k*pi, minima at -pi/2 + 2k*pi
    return _trig(x, np.sin, 0.25, -0.25)


def horner(coeffs: np.ndarray, x: Interval, coeff_hi: np.ndarray | None = None) -> Interval:
    """Evaluate polynomials with coefficient rows ``coeffs`` (..., deg+1, low to
    high) at intervals ``x``; broadcasting x (n, 1) against rows (m,) gives (n, m).

    ``coeff_hi`` turns the coefficients into intervals [coeffs, coeff_hi].
    """
    clo = np.asarray(coeffs, dtype=float)
    chi = clo if coeff_hi is None else np.asarray(coeff_hi, dtype=float)
    k = clo.shape[-1]
    if k == 0:
        return Interval(np.zeros(np.broadcast_shapes(x.lo.shape, clo.shape[:-1])))
    acc = Interval(clo[..., k - 1], chi[..., k - 1])
    for j in range(k - 2, -1, -1):
        acc = acc * x + Interval(clo[..., j], chi[..., j])
    if acc.lo.shape != np.broadcast_shapes(x.lo.shape, clo.shape[:-1]):
        shape = np.broadcast_shapes(x.lo.shape, clo.shape[:-1])
        acc = Interval(np.broadcast_to(acc.lo, shape), np.broadcast_to(acc.hi, shape))
    return acc


def sqrt_down(v: float) -> float:
    return float(down(np.sqrt(max(v, 0.0)))) if v > 0 else 0.0


def sqrt_up(v: float) -> float:
    return float(up(np.sqrt(v))) if v > 0 else 0.0
