"""Polynomials in an element, evaluated on a dense frequency lattice.

Exact rational frequencies of ``phi`` all lie on a lattice (1/Q) Z^d, so
powers of ``phi`` can be held as dense coefficient arrays and multiplied by
direct convolution.  The decaying part of a power ``phi^m`` is stored as a
two-dimensional array (frequency x numerator degree) over ``D^m`` where ``D``
is the denominator of ``phi``.  Direct convolution keeps every coefficient
accurate to rounding relative to its own magnitude; no FFTs are used.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

import numpy as np
from scipy import signal

from ..errors import ToleranceUnreachable
from ..algebra.element import FuncElement
from ..algebra.poly import Denominator, float_poly, qmul
from ..algebra.rational import ModRatSum
from ..algebra.trig import TrigPoly


def _lattice_scale(a: FuncElement) -> list[int]:
    scales = [1] * a.d
    for k in a.ap.terms:
        for j, f in enumerate(k):
            scales[j] = lcm(scales[j], f.denominator)
    for f in a.c0.terms:
        scales[0] = lcm(scales[0], f.denominator)
    return scales


_POWERS: dict[tuple, list] = {}


def _exact_power(p: tuple, m: int) -> tuple:
    """``p**m`` in exact arithmetic, built incrementally and kept across calls."""
    chain = _POWERS.setdefault(p, [(Fraction(1),)])
    while len(chain) <= m:
        chain.append(qmul(chain[-1], p))
    return chain[m]


def _conv(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Direct convolution; a sparse ``b`` is applied as a sum of shifted copies of ``a``."""
    nz = np.argwhere(b)
    if a.ndim == 1 and 2 * len(nz) > b.size:
        return np.convolve(a, b)
    out = np.zeros(tuple(x + y - 1 for x, y in zip(a.shape, b.shape)), dtype=np.result_type(a, b))
    for idx in nz:
        sl = tuple(slice(i, i + n) for i, n in zip(idx, a.shape))
        out[sl] += b[tuple(idx)] * a
    return out


def _place(arrays: list[tuple[np.ndarray, tuple]]) -> tuple[np.ndarray, tuple]:
    """Sum arrays given with integer offsets into one array."""
    arrays = [(x, o) for x, o in arrays if x.size]
    if not arrays:
        return np.zeros((0,) * 2, dtype=complex), (0,)
    nd = arrays[0][0].ndim
    lo = tuple(min(o[i] for _, o in arrays) for i in range(nd))
    hi = tuple(max(o[i] + x.shape[i] for x, o in arrays) for i in range(nd))
    out = np.zeros(tuple(h - l for l, h in zip(lo, hi)), dtype=complex)
    for x, o in arrays:
        sl = tuple(slice(o[i] - lo[i], o[i] - lo[i] + x.shape[i]) for i in range(nd))
        out[sl] += x
    return out, lo


class LatticePowers:
    """Horner evaluation of  sum_k c_k phi^k  for an exact element ``phi``."""

    def __init__(self, phi: FuncElement):
        if not phi.is_exact:
            raise ValueError("lattice evaluation needs exact frequencies")
        self.phi = phi
        self.d = phi.d
        self.Q = _lattice_scale(phi)
        P, self.p_off = self._ap_array(phi.ap)
        self.P = P
        self.has_c0 = bool(phi.c0)
        if self.has_c0:
            self.D = phi.c0.den
            self.delta = self.D.degree
            self.Dpoly = float_poly(self.D.expanded())
            rows = sorted(phi.c0.terms)
            idx = [int(f * self.Q[0]) for f in rows]
            self.pc_off = min(idx)
            Pc = np.zeros((max(idx) - min(idx) + 1, self.delta), dtype=complex)
            for f, i in zip(rows, idx):
                n = phi.c0.terms[f]
                Pc[i - self.pc_off, : len(n)] = n
            self.Pc = Pc
            self._dpow = {0: np.ones(1)}

    def _ap_array(self, p: TrigPoly):
        if not p.terms:
            return np.zeros((0,) * self.d, dtype=complex), (0,) * self.d
        keys = [tuple(int(f * q) for f, q in zip(k, self.Q)) for k in p.terms]
        lo = tuple(min(k[i] for k in keys) for i in range(self.d))
        hi = tuple(max(k[i] for k in keys) for i in range(self.d))
        arr = np.zeros(tuple(h - l + 1 for l, h in zip(lo, hi)), dtype=complex)
        for k, c in zip(keys, p.terms.values()):
            arr[tuple(k[i] - lo[i] for i in range(self.d))] = c
        return arr, lo

    def _den_power(self, m: int) -> np.ndarray:
        if m not in self._dpow:
            self._dpow[m] = float_poly(_exact_power(self.D.expanded(), m))
        return self._dpow[m]

    def horner(self, coeffs) -> FuncElement:
        """``sum_k coeffs[k] * phi^k`` (``phi^0`` is the unit)."""
        coeffs = [complex(c) for c in coeffs]
        n = len(coeffs) - 1
        while n > 0 and coeffs[n] == 0:
            n -= 1
        d = self.d
        A = np.full((1,) * d, coeffs[n], dtype=complex)
        a_off = (0,) * d
        C = np.zeros((0, 0), dtype=complex)
        c_off = 0
        for step, k in enumerate(range(n - 1, -1, -1)):
            m = step  # acc currently has its decaying part over D^m
            parts_c = []
            if self.has_c0:
                if C.size:
                    parts_c.append((signal.convolve2d(C, self.Pc), (c_off + self.pc_off, 0)))
                    if self.P.size:
                        kern = np.outer(self.P, self.Dpoly)
                        parts_c.append((signal.convolve2d(C, kern), (c_off + self.p_off[0], 0)))
                if A.size:
                    kern = np.outer(A, self._den_power(m))
                    parts_c.append((signal.convolve2d(kern, self.Pc), (a_off[0] + self.pc_off, 0)))
            if self.P.size and A.size:
                A = _conv(A, self.P)
                a_off = tuple(x + y for x, y in zip(a_off, self.p_off))
            else:
                A = np.zeros((0,) * d, dtype=complex)
            const = np.full((1,) * d, coeffs[k], dtype=complex)
            A, a_off = _place([(A, a_off), (const, (0,) * d)])
            if parts_c:
                C, off = _place(parts_c)
                c_off = off[0]
            if not (np.all(np.isfinite(A)) and np.all(np.isfinite(C))):
                raise ToleranceUnreachable("coefficient overflow while forming powers")
        m = n
        return self._to_element(A, a_off, C, c_off, m)

    def _to_element(self, A, a_off, C, c_off, m) -> FuncElement:
        d = self.d
        nz = np.nonzero(A)
        # nonzero() walks the array in index order, which is frequency order
        keys = (
            tuple(Fraction(i + o, q) for i, o, q in zip(idx, a_off, self.Q))
            for idx in zip(*(x.tolist() for x in nz))
        )
        ap = TrigPoly._presorted(keys, A[nz].tolist(), d)
        c0 = None
        if self.has_c0 and C.size:
            den = Denominator((b, e * m) for b, e in self.D.factors)
            rows = {
                Fraction(i + c_off, self.Q[0]): C[i]
                for i in range(C.shape[0])
                if np.any(C[i])
            }
            c0 = ModRatSum(rows, den)
        return FuncElement(ap, c0, d)


def horner_generic(coeffs, phi: FuncElement) -> FuncElement:
    """Same as :meth:`LatticePowers.horner` through element arithmetic."""
    coeffs = [complex(c) for c in coeffs]
    acc = FuncElement.constant(coeffs[-1], phi.d)
    for c in reversed(coeffs[:-1]):
        acc = acc * phi + c
    return acc


def polynomial_in(coeffs, phi: FuncElement) -> FuncElement:
    if len(coeffs) == 0:
        return FuncElement.zero(phi.d)
    if phi.is_exact and phi:
        return LatticePowers(phi).horner(coeffs)
    return horner_generic(coeffs, phi)
