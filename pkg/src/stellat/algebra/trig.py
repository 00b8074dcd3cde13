"""Trigonometric polynomials  p(x) = sum_k c_k exp(i <lambda_k, x>)  on R^d.

Frequencies are exact rationals (``Fraction``) so that merging equal
frequencies and detecting the period are exact.  A float frequency switches
the polynomial into *irrational mode*: arithmetic still works, but norms can
no longer be certified.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from numbers import Rational
from typing import Iterable, Mapping

import numpy as np

from ..config import settings
from ..errors import DimensionMismatch


def as_frequency(f):
    """Normalize one frequency component: exact unless given as a float."""
    if isinstance(f, Fraction):
        return f
    if isinstance(f, bool):
        raise TypeError("bool is not a frequency")
    if isinstance(f, (int, Rational)):
        return Fraction(f)
    if isinstance(f, str):
        return Fraction(f)
    if isinstance(f, (float, np.floating)):
        f = float(f)
        if not np.isfinite(f):
            raise ValueError("frequency must be finite")
        return f
    raise TypeError(f"cannot interpret {f!r} as a frequency")


def frequency_key(f, d: int) -> tuple:
    if d == 1 and not isinstance(f, (tuple, list, np.ndarray)):
        return (as_frequency(f),)
    key = tuple(as_frequency(c) for c in f)
    if len(key) != d:
        raise DimensionMismatch(f"frequency {f!r} is not a {d}-vector")
    return key


def _lattice_scale(*polys: "TrigPoly") -> int | None:
    """Common denominator of all frequencies, or None if any is a float."""
    den = 1
    for p in polys:
        for k in p.terms:
            for x in k:
                if not isinstance(x, Fraction):
                    return None
                den = lcm(den, x.denominator)
    return den


def _integer_keys(p: "TrigPoly", scale: int) -> np.ndarray:
    return np.array(
        [[x.numerator * (scale // x.denominator) for x in k] for k in p.terms], dtype=np.int64
    ).reshape(len(p.terms), p.d)


def _order(item):
    # float conversion is monotone, so this is the exact order with cheap comparisons
    k = item[0]
    return tuple(float(x) for x in k), k


def _clean(terms: Mapping[tuple, complex]) -> dict:
    thr = settings.drop_threshold
    return {k: complex(v) for k, v in sorted(terms.items(), key=_order) if abs(v) >= thr}


class TrigPoly:
    """Finite trigonometric polynomial with distinct frequencies.

    ``terms`` maps frequency tuples (length ``d``) to complex coefficients.
    For ``d == 1`` plain scalars are accepted as keys.

    >>> p = TrigPoly({1: 0.5, -1: 0.5})   # cos(x)
    >>> (p * p).coefficient(0)
    (0.5+0j)
    """

    __slots__ = ("d", "terms")

    def __init__(self, terms: Mapping | None = None, d: int = 1):
        if d < 1:
            raise ValueError("dimension must be >= 1")
        self.d = d
        acc: dict = {}
        for f, c in (terms or {}).items():
            c = complex(c)
            if not (np.isfinite(c.real) and np.isfinite(c.imag)):
                raise ValueError("coefficients must be finite")
            k = frequency_key(f, d)
            acc[k] = acc.get(k, 0j) + c
        self.terms = _clean(acc)

    @classmethod
    def _raw(cls, terms: dict, d: int) -> "TrigPoly":
        out = object.__new__(cls)
        out.d = d
        out.terms = _clean(terms)
        return out

    @classmethod
    def _presorted(cls, keys, coeffs, d: int) -> "TrigPoly":
        """Trusted constructor: distinct exact keys already in ascending order."""
        thr = settings.drop_threshold
        out = object.__new__(cls)
        out.d = d
        out.terms = {k: complex(c) for k, c in zip(keys, coeffs) if abs(c) >= thr}
        return out

    @classmethod
    def constant(cls, c: complex, d: int = 1) -> "TrigPoly":
        return cls._raw({(Fraction(0),) * d: complex(c)}, d)

    # -- structure -----------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def __repr__(self) -> str:
        def fmt(k):
            return str(k[0]) if self.d == 1 else "(" + ", ".join(map(str, k)) + ")"

        body = ", ".join(f"{fmt(k)}: {c:.6g}" for k, c in self.terms.items())
        return f"TrigPoly({{{body}}}, d={self.d})"

    def coefficient(self, f) -> complex:
        return self.terms.get(frequency_key(f, self.d), 0j)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, Fraction) for k in self.terms for c in k)

    def is_self_adjoint(self, atol: float = 0.0) -> bool:
        for k, c in self.terms.items():
            other = self.terms.get(tuple(-x for x in k), 0j)
            if abs(other - c.conjugate()) > atol:
                return False
        return True

    def _check(self, other: "TrigPoly"):
        if self.d != other.d:
            raise DimensionMismatch(f"dimensions {self.d} and {other.d} differ")

    # -- *-algebra ----------------------------------------------------------------

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        self._check(other)
        if len(self.terms) + len(other.terms) > 64:
            fast = self._lattice_combine(other)
            if fast is not None:
                return fast
        acc = dict(self.terms)
        for k, c in other.terms.items():
            acc[k] = acc.get(k, 0j) + c
        return TrigPoly._raw(acc, self.d)

    def __neg__(self) -> "TrigPoly":
        return TrigPoly._raw({k: -c for k, c in self.terms.items()}, self.d)

    def __sub__(self, other: "TrigPoly") -> "TrigPoly":
        return self + (-other)

    def scale(self, s: complex) -> "TrigPoly":
        return TrigPoly._raw({k: s * c for k, c in self.terms.items()}, self.d)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self.scale(complex(other))
        self._check(other)
        fast = self._lattice_product(other)
        if fast is not None:
            return fast
        acc: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                acc[k] = acc.get(k, 0j) + c1 * c2
        return TrigPoly._raw(acc, self.d)

    __rmul__ = __mul__

    def _lattice_combine(self, other: "TrigPoly") -> "TrigPoly | None":
        scale = _lattice_scale(self, other)
        if scale is None or not self.terms or not other.terms:
            return None
        try:
            keys = np.concatenate([_integer_keys(self, scale), _integer_keys(other, scale)])
        except OverflowError:
            return None
        vals = np.concatenate([self.coefficient_array(), other.coefficient_array()])
        uniq, inv = np.unique(keys, axis=0, return_inverse=True)
        inv = inv.ravel()
        coef = np.bincount(inv, vals.real, len(uniq)) + 1j * np.bincount(inv, vals.imag, len(uniq))
        out = (tuple(Fraction(n, scale) for n in row) for row in uniq.tolist())
        return TrigPoly._presorted(out, coef.tolist(), self.d)

    def _lattice_product(self, other: "TrigPoly") -> "TrigPoly | None":
        # exact frequencies live on a common integer lattice; convolve there
        if not self.terms or not other.terms:
            return TrigPoly._raw({}, self.d)
        scale = _lattice_scale(self, other)
        if scale is None:
            return None
        try:
            k1, k2 = _integer_keys(self, scale), _integer_keys(other, scale)
        except OverflowError:
            return None
        bound = int(np.abs(k1).max()) + int(np.abs(k2).max())
        if bound >= 2**62:
            return None
        keys = (k1[:, None, :] + k2[None, :, :]).reshape(-1, self.d)
        prods = np.outer(self.coefficient_array(), other.coefficient_array()).ravel()
        uniq, inv = np.unique(keys, axis=0, return_inverse=True)
        inv = inv.ravel()
        coef = np.bincount(inv, prods.real, len(uniq)) + 1j * np.bincount(inv, prods.imag, len(uniq))
        # np.unique sorts rows lexicographically, matching the Fraction order
        keys = (tuple(Fraction(n, scale) for n in row) for row in uniq.tolist())
        return TrigPoly._presorted(keys, coef.tolist(), self.d)

    def star(self) -> "TrigPoly":
        return TrigPoly._raw(
            {tuple(-x for x in k): c.conjugate() for k, c in self.terms.items()}, self.d
        )

    def derivative(self, direction: int = 0) -> "TrigPoly":
        if not 0 <= direction < self.d:
            raise DimensionMismatch(f"direction {direction} invalid for d={self.d}")
        return TrigPoly._raw(
            {k: 1j * float(k[direction]) * c for k, c in self.terms.items()}, self.d
        )

    # -- numerics -----------------------------------------------------------------

    def frequency_array(self) -> np.ndarray:
        return np.array([[float(x) for x in k] for k in self.terms], dtype=float).reshape(
            len(self.terms), self.d
        )

    def coefficient_array(self) -> np.ndarray:
        return np.array(list(self.terms.values()), dtype=complex)

    def eval(self, x) -> np.ndarray | complex:
        """Evaluate at one point or at an array of points (shape (..., d))."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0 or (self.d > 1 and x.ndim == 1)
        pts = x.reshape(-1, self.d)
        if not self.terms:
            out = np.zeros(len(pts), dtype=complex)
        else:
            phase = pts @ self.frequency_array().T
            out = np.exp(1j * phase) @ self.coefficient_array()
        return complex(out[0]) if scalar else out.reshape(x.shape[: x.ndim - (self.d > 1)])

    def coefficient_l1(self) -> float:
        return float(sum(abs(c) for c in self.terms.values()))

    def periods(self) -> list[Fraction] | None:
        """Per-coordinate period divided by 2*pi, or None in irrational mode.

        Frequencies in coordinate a lie on the lattice (g/Q)Z, so the
        polynomial is periodic with period 2*pi*Q/g in that coordinate.
        """
        if not self.is_exact:
            return None
        out = []
        for a in range(self.d):
            comps = [k[a] for k in self.terms if k[a] != 0]
            if not comps:
                out.append(Fraction(1))
                continue
            q = lcm(*(c.denominator for c in comps))
            g = 0
            for c in comps:
                g = gcd(g, abs(c.numerator) * (q // c.denominator))
            out.append(Fraction(q, g))
        return out

    def torus_reduction(self) -> tuple["TrigPoly", list[tuple[Fraction, ...]]]:
        """Rewrite ``p(x) = g(B x)`` with ``g`` 2*pi-periodic in every variable.

        The rows of ``B`` (returned as Fraction tuples) form a basis of the
        lattice spanned by the frequencies, chosen so that its dual basis is
        LLL-reduced; the torus frequencies of ``g`` are then small integers.
        The rows are linearly independent, so ``x -> B x mod 2*pi`` is onto
        T^r and ``sup p = sup g``.
        """
        if not self.is_exact:
            raise ValueError("torus reduction needs exact frequencies")
        keys = list(self.terms)
        q = lcm(*(f.denominator for k in keys for f in k)) if keys else 1
        basis = _echelon_basis([[int(f * q) for f in k] for k in keys], self.d)
        r = len(basis)
        if r == 0:
            g = TrigPoly._raw({(Fraction(0),): c for c in self.terms.values()}, 1)
            return g, []
        B = [[Fraction(v, q) for v in row] for row in basis]
        dual = _dual_basis(B)
        dual, V = _lll(dual)
        # B' = V^{-T} B keeps B' (dual')^T = I
        B = _matmul(_transpose(_inverse(V)), B)
        coords = []
        for k in keys:
            n = [sum(a * b for a, b in zip(k, row)) for row in dual]
            if any(x.denominator != 1 for x in n):
                raise ArithmeticError("frequency outside the computed lattice")
            coords.append(tuple(n))
        g = TrigPoly._raw(dict(zip(coords, self.terms.values())), r)
        return g, [tuple(row) for row in B]


def _echelon_basis(vectors: list[list[int]], d: int) -> list[list[int]]:
    """Integer echelon basis of the Z-span of ``vectors`` (Euclid on columns)."""
    rows = [list(v) for v in vectors if any(v)]
    basis = []
    for col in range(d):
        active = [r for r in rows if r[col]]
        rest = [r for r in rows if not r[col]]
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[col]))
            piv = active[0]
            nxt = [piv]
            for r in active[1:]:
                m = r[col] // piv[col]
                r = [a - m * b for a, b in zip(r, piv)]
                if r[col]:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            active = nxt
        if active:
            basis.append(active[0])
        rows = rest
    return basis


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def _transpose(M):
    return [list(col) for col in zip(*M)]


def _matmul(A, B):
    Bt = _transpose(B)
    return [[_dot(row, col) for col in Bt] for row in A]


def _inverse(M):
    """Exact Gauss-Jordan inverse of a small square Fraction matrix."""
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        p = next(r for r in range(c, n) if A[r][c] != 0)
        A[c], A[p] = A[p], A[c]
        piv = A[c][c]
        A[c] = [x / piv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    return [row[n:] for row in A]


def _dual_basis(B):
    """Rows b*_j in span(B) with <b_i, b*_j> = delta_ij."""
    gram_inv = _inverse([[_dot(u, v) for v in B] for u in B])
    return _matmul(gram_inv, B)


def _lll(rows, delta=Fraction(3, 4)):
    """Exact LLL reduction; returns the reduced rows and the unimodular V
    with reduced = V @ rows."""
    b = [list(r) for r in rows]
    n = len(b)
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def gso():
        bs, mu = [], [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            v = list(b[i])
            for j in range(i):
                mu[i][j] = _dot(b[i], bs[j]) / _dot(bs[j], bs[j])
                v = [x - mu[i][j] * y for x, y in zip(v, bs[j])]
            bs.append(v)
        return bs, mu

    k = 1
    bs, mu = gso()
    while k < n:
        for j in range(k - 1, -1, -1):
            m = round(mu[k][j])
            if m:
                b[k] = [x - m * y for x, y in zip(b[k], b[j])]
                V[k] = [x - m * y for x, y in zip(V[k], V[j])]
                bs, mu = gso()
        if _dot(bs[k], bs[k]) >= (delta - mu[k][k - 1] ** 2) * _dot(bs[k - 1], bs[k - 1]):
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            V[k], V[k - 1] = V[k - 1], V[k]
            bs, mu = gso()
            k = max(k - 1, 1)
    return b, V


def trig_from_pairs(pairs: Iterable[tuple], d: int = 1) -> TrigPoly:
    acc: dict = {}
    for f, c in pairs:
        k = frequency_key(f, d)
        acc[k] = acc.get(k, 0j) + complex(c)
    return TrigPoly._raw(acc, d)
