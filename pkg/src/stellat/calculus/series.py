"""Power series with rigorous tail bounds.

A series carries its coefficients ``c_k``, an overestimate ``abs_coeff(k)`` of
``|c_k|`` and, for infinite series, a ratio bound ``q(k) >= sup_{j>=k}
|c_{j+1}|/|c_j|``.  Tails  sum_{k>n} |c_k| rho^k  are bounded by an explicit
sum up to at least ``n + WINDOW`` followed by a geometric remainder.
"""

from __future__ import annotations

import cmath
import math
import re
import threading
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..config import settings
from ..errors import ToleranceUnreachable

WINDOW = 200
_U = 2.0**-53


@dataclass(eq=False)
class PowerSeries:
    """``f(z) = sum_k coeff(k) z^k``, convergent for ``|z| < radius``.

    ``ratio_hint`` is either a constant ``q`` or a callable ``k -> q(k)``
    bounding ``abs_coeff(j+1)/abs_coeff(j)`` for every ``j >= k``.  ``degree``
    marks a polynomial (all coefficients past it vanish).  ``closed_form``
    evaluates ``f`` independently of the coefficients, and ``shift`` maps
    ``mu`` to the series of ``w -> f(mu + w)`` when that is known in closed form.
    """

    coeff_fn: Callable[[int], complex]
    radius: float
    abs_fn: Callable[[int], float] | None = None
    ratio_hint: Callable[[int], float] | float | None = None
    name: str = "series"
    degree: int | None = None
    closed_form: Callable | None = None
    shift: Callable[[complex], "PowerSeries"] | None = None
    _c: list = field(default_factory=list, repr=False)
    _a: list = field(default_factory=list, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __repr__(self) -> str:
        return f"PowerSeries({self.name}, radius={self.radius})"

    # -- coefficients -----------------------------------------------------------

    def _extend(self, n: int) -> None:
        with self._lock:
            for k in range(len(self._c), n + 1):
                if self.degree is not None and k > self.degree:
                    c, a = 0j, 0.0
                else:
                    c = complex(self.coeff_fn(k))
                    a = abs(c) if self.abs_fn is None else float(self.abs_fn(k))
                self._c.append(c)
                self._a.append(a)

    def coeff(self, k: int) -> complex:
        self._extend(k)
        return self._c[k]

    def abs_coeff(self, k: int) -> float:
        self._extend(k)
        return self._a[k]

    def coeffs(self, n: int) -> np.ndarray:
        """``c_0 .. c_n`` as an array."""
        self._extend(n)
        return np.array(self._c[: n + 1], dtype=complex)

    def abs_coeffs(self, n: int) -> np.ndarray:
        self._extend(n)
        return np.array(self._a[: n + 1], dtype=float)

    def ratio_bound(self, k: int) -> float:
        if self.ratio_hint is None:
            return math.inf
        if callable(self.ratio_hint):
            return float(self.ratio_hint(k))
        return float(self.ratio_hint)

    def __call__(self, z):
        if self.closed_form is not None:
            return self.closed_form(z)
        raise NotImplementedError(f"{self.name} has no closed form")

    # -- tails ------------------------------------------------------------------

    def tail_bounds(self, n_max: int, rho: float) -> tuple[np.ndarray, str]:
        """Upper bounds of sum_{k>n} |c_k| rho^k for n = 0..n_max, and the method."""
        if rho < 0:
            raise ValueError("rho must be non-negative")
        if self.degree is not None:
            K = max(self.degree, n_max + 1)
        else:
            K = n_max + WINDOW
        a = self.abs_coeffs(K)
        k = np.arange(K + 1)
        with np.errstate(over="ignore"):
            t = a * np.power(float(rho), k) * (1 + 4 * _U)
        t[0] = 0.0
        # suffix sums, smallest terms first
        suffix = np.cumsum(t[::-1])[::-1] * (1 + 2 * (K + 2) * _U)
        if self.degree is not None:
            rem = 0.0
            method = "explicit_sum"
        else:
            q = self.ratio_bound(K) * rho
            rem = t[K] * q / (1 - q) * (1 + 8 * _U) if q < 1 else math.inf
            method = "geometric_ratio"
        tails = np.empty(n_max + 1)
        idx = np.arange(n_max + 1) + 1
        tails[:] = np.where(idx <= K, suffix[np.minimum(idx, K)], 0.0) + rem
        if self.degree is not None:
            tails[idx > self.degree] = 0.0
        return tails, method

    def tail_bound(self, n: int, rho: float) -> float:
        tails, _ = self.tail_bounds(n, rho)
        return float(tails[n])

    def truncation_order(self, tol: float, rho: float, n_min: int = 0) -> tuple[int, float, str]:
        """Smallest ``n >= n_min`` whose certified tail is at most ``tol``."""
        if self.degree is not None:
            tails, method = self.tail_bounds(max(self.degree, n_min), rho)
            ok = np.flatnonzero(tails[n_min:] <= tol)
            n = n_min + int(ok[0])
            return n, float(tails[n]), method
        n_max = max(32, 2 * n_min)
        while n_max <= settings.max_terms:
            tails, method = self.tail_bounds(n_max, rho)
            ok = np.flatnonzero(tails[n_min:] <= tol)
            if ok.size:
                n = n_min + int(ok[0])
                return n, float(tails[n]), method
            n_max *= 2
        raise ToleranceUnreachable(
            f"{self.name}: tail at rho={rho} stays above {tol} within {settings.max_terms} terms"
        )


# -- constructors ---------------------------------------------------------------


def _rounding_margin(k: int) -> float:
    return 1 + (4 * k + 4) * _U


def identity_series() -> PowerSeries:
    return PowerSeries(
        lambda k: 1.0 if k == 1 else 0.0,
        math.inf,
        name="identity",
        degree=1,
        closed_form=lambda z: z,
        shift=lambda mu: polynomial_series([mu, 1.0], name=f"identity+({mu})"),
    )


def polynomial_series(coeffs, name: str = "polynomial") -> PowerSeries:
    cs = [complex(c) for c in coeffs]

    def closed(z):
        return np.polynomial.polynomial.polyval(z, cs)

    return PowerSeries(lambda k: cs[k], math.inf, name=name, degree=len(cs) - 1, closed_form=closed)


def _exp_coeff(k: int) -> float:
    return 1.0 / math.factorial(k) if k < 171 else 0.0


def exp_series(scale: complex = 1.0) -> PowerSeries:
    """``scale * exp(z)``."""
    s = complex(scale)
    mag = abs(s)

    def abs_fn(k):
        if k < 171:
            return mag / math.factorial(k) * _rounding_margin(k)
        # 1/k! < 1e-300 here; a power of ten is a safe overestimate
        return mag * 1e-300

    name = "exp" if s == 1 else f"{s}*exp"
    return PowerSeries(
        lambda k: s * _exp_coeff(k),
        math.inf,
        abs_fn,
        ratio_hint=lambda k: 1.0 / (k + 1),
        name=name,
        closed_form=lambda z: s * np.exp(z),
        shift=lambda mu: exp_series(s * cmath.exp(mu)),
    )


def sqrt_shift(r: complex, sign: int = 1) -> PowerSeries:
    """``g(z) = sqrt(r + sign*z)`` on the principal branch.

    Coefficients ``sqrt(r) binom(1/2, k) (sign/r)^k``; the binomial factors
    are built by the recursion  b_{k+1} = b_k (1/2 - k)/(k+1).
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    R = complex(r)
    if R == 0:
        raise ValueError("sqrt_shift needs r != 0")
    if R.imag == 0 and R.real < 0:
        raise ValueError("sqrt_shift needs r off the negative real axis")
    root = cmath.sqrt(R)
    step = sign / R
    binoms = [1.0]

    def binom(k):
        while len(binoms) <= k:
            j = len(binoms) - 1
            binoms.append(binoms[j] * (0.5 - j) / (j + 1))
        return binoms[k]

    def coeff(k):
        c = root * binom(k) * step**k
        return c.real if R.imag == 0 else c

    def abs_fn(k):
        return abs(root) * abs(binom(k)) * abs(R) ** -k * _rounding_margin(k)

    def closed(z):
        return np.sqrt(np.asarray(R + sign * np.asarray(z), dtype=complex))

    def shifted(mu):
        new = R + sign * complex(mu)
        g = sqrt_shift(new, sign)
        if complex(mu).imag != 0 or R.imag != 0:
            # only the disc where the principal branch is known to agree
            g.radius = abs(R) - abs(mu)
        return g

    r_text = f"{R.real:g}" if R.imag == 0 else f"{R:g}"
    return PowerSeries(
        coeff,
        abs(R),
        abs_fn,
        ratio_hint=1.0 / abs(R),
        name=f"sqrt_shift({r_text},{'+' if sign > 0 else '-'})",
        closed_form=closed,
        shift=shifted,
    )


def series_derivative(f: PowerSeries) -> PowerSeries:
    """``f'``: coefficients ``(k+1) c_{k+1}``, same radius."""
    if callable(f.ratio_hint):
        hint = lambda k: (k + 2) / (k + 1) * f.ratio_bound(k + 1)  # noqa: E731
    elif f.ratio_hint is not None:
        hint = lambda k: (k + 2) / (k + 1) * float(f.ratio_hint)  # noqa: E731
    else:
        hint = None
    closed = None
    if f.closed_form is not None and f.degree is not None:
        closed = polynomial_series([(k + 1) * f.coeff(k + 1) for k in range(max(f.degree, 1))]).closed_form
    elif f.name == "exp" or f.name.endswith("*exp"):
        closed = f.closed_form
    elif f.name.startswith("sqrt_shift") and f.closed_form is not None:
        sign = 1 if f.name.endswith("+)") else -1
        g = f.closed_form
        closed = lambda z: sign * 0.5 / g(z)  # noqa: E731
    return PowerSeries(
        lambda k: (k + 1) * f.coeff(k + 1),
        f.radius,
        lambda k: (k + 1) * f.abs_coeff(k + 1),
        ratio_hint=hint,
        name=f"d/dz {f.name}",
        degree=None if f.degree is None else max(f.degree - 1, 0),
        closed_form=closed,
    )


def without_constant(f: PowerSeries) -> PowerSeries:
    """``f - f(0)``."""
    c0 = f.coeff(0)
    closed = None if f.closed_form is None else (lambda z: f.closed_form(z) - c0)
    return PowerSeries(
        lambda k: 0.0 if k == 0 else f.coeff(k),
        f.radius,
        lambda k: 0.0 if k == 0 else f.abs_coeff(k),
        ratio_hint=f.ratio_hint,
        name=f"{f.name} - f(0)" if c0 else f.name,
        degree=f.degree,
        closed_form=closed,
    )


_PRESET = re.compile(r"^\s*sqrt_shift\(\s*([^,]+?)\s*,\s*([+-])\s*\)\s*$")


def preset(name: str) -> PowerSeries:
    """Look up ``"identity"``, ``"exp"`` or ``"sqrt_shift(r,+)"`` / ``"sqrt_shift(r,-)"``."""
    key = name.strip()
    if key == "identity":
        return identity_series()
    if key == "exp":
        return exp_series()
    m = _PRESET.match(key)
    if m:
        try:
            r = float(m.group(1))
        except ValueError:
            raise KeyError(f"bad radius in preset {name!r}") from None
        if not r > 0:
            raise KeyError(f"preset {name!r} needs r > 0")
        return sqrt_shift(r, 1 if m.group(2) == "+" else -1)
    raise KeyError(f"unknown series preset {name!r}")


PRESET_NAMES = ("identity", "exp", "sqrt_shift(r,+)", "sqrt_shift(r,-)")
