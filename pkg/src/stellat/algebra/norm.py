"""Certified sup-norm enclosures for :class:`FuncElement`.

Strategy for an element ``a = c0 + ap`` on R:

1. ``ap`` is periodic (rational frequencies), so its sup is found by
   branch-and-bound over one period box.
2. ``|c0(x)| <= C |x|^-s`` beyond an explicit radius; pick ``R`` so that this
   tail is below a fraction of the tolerance.
3. ``sup |a| = max(sup_{|x|<=R} |a|, sup_{|x|>R} |a|)`` and the second term is
   within the tail bound of ``sup |ap|`` because a periodic function attains
   its sup on every half-line.
4. Branch-and-bound works on ``|a|^2`` with interval arithmetic and a
   mean-value (centered) form; the square root is taken once at the end with
   directed rounding.
"""

from __future__ import annotations

import cmath
import math
import threading
from collections import OrderedDict
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..config import settings
from ..errors import ToleranceUnreachable
from . import interval as iv
from .element import FuncElement, UnitalElement
from .interval import Interval, down, up

_U = 2.0**-53


@dataclass(frozen=True)
class NormEnclosure:
    lower: float
    upper: float
    certified: bool
    width_target: float
    # a point where |a| >= lower (up to rounding of a plain float evaluation)
    witness: tuple | None = None

    def __post_init__(self):
        if not (0 <= self.lower <= self.upper):
            raise ValueError(f"invalid enclosure [{self.lower}, {self.upper}]")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    def to_dict(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "certified": self.certified,
            "width_target": self.width_target,
            "witness": None if self.witness is None else list(self.witness),
        }


class _Compiled:
    """Flat arrays for interval evaluation of one element on boxes."""

    def __init__(self, a: FuncElement):
        self.d = a.d
        ap = a.ap
        self.n_ap = len(ap)
        if self.n_ap:
            keys = list(ap.terms)
            self.ap_freq = [Interval.enclosing([k[j] for k in keys])[None, :] for j in range(a.d)]
            coeffs = np.array(list(ap.terms.values()), dtype=complex)
            self.ap_re = coeffs.real[None, :]
            self.ap_im = coeffs.imag[None, :]
        c0 = a.c0
        self.n_c0 = len(c0)
        if self.n_c0:
            m = c0.den.degree
            nums = np.zeros((self.n_c0, m), dtype=complex)
            for i, n in enumerate(c0.terms.values()):
                nums[i, : len(n)] = n
            self.num_re = nums.real
            self.num_im = nums.imag
            self.rnum_re = nums.real[:, ::-1]
            self.rnum_im = nums.imag[:, ::-1]
            self.c0_freq = Interval.enclosing(list(c0.terms))[None, :]
            self.bases = []
            for base, e in c0.den.factors:
                enc = Interval.enclosing(base)
                self.bases.append((enc.lo, enc.hi, enc.lo[::-1].copy(), enc.hi[::-1].copy(), e))

    def enclose(self, lo: np.ndarray, hi: np.ndarray):
        """Enclosures (Re a, Im a) on boxes and an upper bound of |c0| there."""
        n = lo.shape[0]
        re = Interval(np.zeros(n))
        im = Interval(np.zeros(n))
        c0mag = np.zeros(n)
        if self.n_ap:
            arg = Interval(lo[:, :1], hi[:, :1]) * self.ap_freq[0]
            for j in range(1, self.d):
                arg = arg + Interval(lo[:, j : j + 1], hi[:, j : j + 1]) * self.ap_freq[j]
            C = iv.cos(arg)
            S = iv.sin(arg)
            re = re + iv.isum(C.scale(self.ap_re) - S.scale(self.ap_im), axis=1)
            im = im + iv.isum(S.scale(self.ap_re) + C.scale(self.ap_im), axis=1)
        if self.n_c0:
            X = Interval(lo[:, 0], hi[:, 0])
            c_re, c_im, c0mag = self._enclose_c0(X)
            re = re + c_re
            im = im + c_im
        return re, im, c0mag

    def _enclose_c0(self, X: Interval):
        n = X.lo.shape[0]
        m = self.num_re.shape[1]
        Nre_lo = np.empty((n, self.n_c0))
        Nre_hi = np.empty((n, self.n_c0))
        Nim_lo = np.empty((n, self.n_c0))
        Nim_hi = np.empty((n, self.n_c0))
        inv_lo = np.empty(n)
        inv_hi = np.empty(n)
        outer = (X.lo >= 1) | (X.hi <= -1)
        inner = ~outer
        if inner.any():
            Xi = X[inner]
            col = Interval(Xi.lo[:, None], Xi.hi[:, None])
            a = iv.horner(self.num_re, col)
            b = iv.horner(self.num_im, col)
            D = Interval(np.ones(Xi.lo.shape))
            for blo, bhi, _, _, e in self.bases:
                D = D * iv.horner(blo, Xi, bhi) ** e
            inv = D.recip()
            Nre_lo[inner], Nre_hi[inner] = a.lo, a.hi
            Nim_lo[inner], Nim_hi[inner] = b.lo, b.hi
            inv_lo[inner], inv_hi[inner] = inv.lo, inv.hi
        if outer.any():
            T = X[outer].recip()
            col = Interval(T.lo[:, None], T.hi[:, None])
            a = col * iv.horner(self.rnum_re, col)
            b = col * iv.horner(self.rnum_im, col)
            D = Interval(np.ones(T.lo.shape))
            for _, _, rlo, rhi, e in self.bases:
                D = D * iv.horner(rlo, T, rhi) ** e
            inv = D.recip()
            Nre_lo[outer], Nre_hi[outer] = a.lo, a.hi
            Nim_lo[outer], Nim_hi[outer] = b.lo, b.hi
            inv_lo[outer], inv_hi[outer] = inv.lo, inv.hi
        Nre = Interval(Nre_lo, Nre_hi)
        Nim = Interval(Nim_lo, Nim_hi)
        inv = Interval(inv_lo[:, None], inv_hi[:, None])
        arg = Interval(X.lo[:, None], X.hi[:, None]) * self.c0_freq
        C = iv.cos(arg)
        S = iv.sin(arg)
        t_re = (Nre * C - Nim * S) * inv
        t_im = (Nre * S + Nim * C) * inv
        absN = up(np.sqrt(up(Nre.mag**2 + Nim.mag**2)))
        mag = up(np.sum(absN * np.abs(inv.mag), axis=1) * (1 + 4 * m * _U + 4 * self.n_c0 * _U))
        return iv.isum(t_re, axis=1), iv.isum(t_im, axis=1), mag


def _f_sq(re: Interval, im: Interval) -> Interval:
    return re.sqr() + im.sqr()


class _BranchAndBound:
    def __init__(self, a: FuncElement, budget: int):
        self.ev = _Compiled(a)
        da = [a.derivative(j) for j in range(a.d)]
        self.dev = [_Compiled(x) for x in da]
        self.hev = {(i, j): _Compiled(da[i].derivative(j)) for i in range(a.d) for j in range(i, a.d)}
        self.budget = budget
        self.evaluations = 0
        # work per box grows with the number of terms and numerator degrees
        self.cost = 1 + (len(a.ap) + len(a.c0) * a.c0.den.degree) // 8

    def run(self, lo, hi, target, lower0=0.0, floor=None, ap_sup=None):
        """Enclose sup |a|^2 over the union of boxes.

        Returns (L, U) with L <= sup <= max(U, floor).  ``ap_sup`` enables the
        triangle bound |a| <= ap_sup + |c0|.
        """
        L = lower0
        U = -np.inf
        self.best = None
        while len(lo):
            self.evaluations += len(lo) * self.cost
            if self.evaluations > self.budget:
                raise ToleranceUnreachable(
                    f"branch-and-bound budget of {self.budget} box evaluations exhausted"
                )
            order = np.lexsort(((lo + hi)[:, ::-1] / 2).T)
            lo, hi = lo[order], hi[order]
            re, im, c0mag = self.ev.enclose(lo, hi)
            F = _f_sq(re, im)
            c = (lo + hi) / 2
            cre, cim, _ = self.ev.enclose(c, c)
            Fc = _f_sq(cre, cim)
            # first-order (mean value) and second-order (Taylor) forms of |a|^2
            centered = Fc
            taylor = Fc
            dbox, deltas = [], []
            for j, dv in enumerate(self.dev):
                dre, dim, _ = dv.enclose(lo, hi)
                gre, gim, _ = dv.enclose(c, c)
                delta = Interval(down(lo[:, j] - c[:, j]), up(hi[:, j] - c[:, j]))
                centered = centered + (re * dre + im * dim).scale(2.0) * delta
                taylor = taylor + (cre * gre + cim * gim).scale(2.0) * delta
                dbox.append((dre, dim))
                deltas.append(delta)
            for (i, j), hv in self.hev.items():
                hre, him, _ = hv.enclose(lo, hi)
                H = dbox[i][0] * dbox[j][0] + dbox[i][1] * dbox[j][1] + re * hre + im * him
                if i == j:
                    taylor = taylor + H * deltas[i].sqr()
                else:
                    taylor = taylor + (H * deltas[i] * deltas[j]).scale(2.0)
            Fhi = np.fmin(np.fmin(F.hi, centered.hi), taylor.hi)
            Fhi = np.where(np.isnan(Fhi), np.inf, Fhi)
            if ap_sup is not None:
                Fhi = np.minimum(Fhi, up(up(ap_sup + c0mag) ** 2))
            i = int(np.argmax(Fc.lo))
            if Fc.lo[i] > L or self.best is None:
                self.best = tuple(float(v) for v in c[i])
            L = max(L, float(Fc.lo[i]))
            thr = (math.sqrt(L) + target) ** 2
            floored = np.zeros(len(lo), dtype=bool) if floor is None else Fhi <= floor
            settled = (Fhi <= thr) & ~floored
            if settled.any():
                U = max(U, float(np.max(Fhi[settled])))
            keep = ~settled & ~floored & (Fhi >= L)
            lo, hi = lo[keep], hi[keep]
            if len(lo):
                # multisection while the worklist is small saves iterations
                k = int(min(16, max(2, _WORK_CAP // len(lo))))
                lo, hi = _split(lo, hi, k)
        return L, max(L, U)


_WORK_CAP = 2048


def _split(lo, hi, k: int):
    """Cut every box into ``k`` equal parts along its widest side."""
    if k == 2:
        return _bisect(lo, hi)
    w = hi - lo
    j = np.argmax(w, axis=1)
    rows = np.arange(len(lo))
    a, b = lo[rows, j], hi[rows, j]
    cuts = a[:, None] + (b - a)[:, None] * (np.arange(k + 1) / k)[None, :]
    cuts[:, 0], cuts[:, -1] = a, b
    new_lo = np.repeat(lo, k, axis=0)
    new_hi = np.repeat(hi, k, axis=0)
    rr = np.repeat(rows, k) * k + np.tile(np.arange(k), len(lo))
    jj = np.repeat(j, k)
    new_lo[rr, jj] = cuts[:, :-1].ravel()
    new_hi[rr, jj] = cuts[:, 1:].ravel()
    return new_lo, new_hi


def _bisect(lo, hi):
    w = hi - lo
    j = np.argmax(w, axis=1)
    rows = np.arange(len(lo))
    mid = (lo[rows, j] + hi[rows, j]) / 2
    lo2 = lo.copy()
    hi1 = hi.copy()
    hi1[rows, j] = mid
    lo2[rows, j] = mid
    return np.concatenate([lo, lo2]), np.concatenate([hi1, hi])


def _period_box(a: FuncElement, per_axis: int):
    periods = a.ap.periods()
    axes = []
    for p in periods:
        P = float(up(up(2 * np.pi) * float(up(float(p)))))
        axes.append(np.linspace(0.0, P, per_axis + 1))
    grids = np.meshgrid(*[ax[:-1] for ax in axes], indexing="ij")
    grids_hi = np.meshgrid(*[ax[1:] for ax in axes], indexing="ij")
    lo = np.stack([g.ravel() for g in grids], axis=1)
    hi = np.stack([g.ravel() for g in grids_hi], axis=1)
    return lo, hi


def _line_boxes(R: float, n_inner: int = 32):
    inner = np.linspace(-1.0, 1.0, n_inner + 1)
    k = max(8, 2 * int(math.ceil(math.log2(max(R, 2.0)))))
    geo = np.geomspace(1.0, R, k + 1) if R > 1 else np.array([1.0])
    geo[0], geo[-1] = 1.0, R
    pos_lo, pos_hi = geo[:-1], geo[1:]
    lo = np.concatenate([-pos_hi[::-1], inner[:-1], pos_lo])
    hi = np.concatenate([-pos_lo[::-1], inner[1:], pos_hi])
    return lo[:, None], hi[:, None]


def tail_envelope(a: FuncElement, R0: float = 1.0):
    """Constants (R0, C, s) with |c0(x)| <= C |x|^-s for |x| >= R0."""
    c0 = a.c0
    M = c0.magnitude_poly()
    m = c0.den.degree
    dM = len(M) - 1
    s = m - dM
    R0 = max(R0, 1.0)
    while True:
        beta = 1.0
        ok = True
        for base, e in c0.den.factors:
            k = len(base) - 1
            lower_coeff = 1.0 - sum(abs(float(base[i])) * R0 ** (i - k) for i in range(k)) * (1 + 1e-12)
            if lower_coeff < 0.5:
                ok = False
                break
            beta *= lower_coeff**e
        if ok:
            break
        R0 *= 2.0
    alpha = sum(M[i] * R0 ** (i - dM) for i in range(dM + 1))
    C = alpha / beta * (1 + 1e-10)
    return R0, C, s


def _tail_radius(a: FuncElement, tau: float):
    R0, C, s = tail_envelope(a)
    R = max(R0, (C / tau) ** (1.0 / s) * (1 + 1e-12))
    return R, C * R ** (-s) * (1 + 1e-12)


_SMALL_C0 = 400


def _c0_majorant(c0, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Upper bounds of |c0| on 1-D boxes from  M(|x|) / D(x),  M = sum of |numerator coeffs|.

    On |x| >= 1 the same ratio is written in t = 1/|x| so nothing overflows.
    """
    M = c0.magnitude_poly()
    m = c0.den.degree
    grow = 1 + (2 * m + 4) * _U
    lo, hi = lo[:, 0], hi[:, 0]
    out = np.empty(len(lo))
    outer = (lo >= 1) | (hi <= -1)
    inner = ~outer
    if inner.any():
        X = Interval(lo[inner], hi[inner])
        xmax = X.mag
        num = up(np.polynomial.polynomial.polyval(xmax, M) * grow)
        D = Interval(np.ones(xmax.shape))
        for base, e in c0.den.factors:
            enc = Interval.enclosing(base)
            D = D * iv.horner(enc.lo, X, enc.hi) ** e
        with np.errstate(divide="ignore"):
            out[inner] = np.where(D.lo > 0, up(num / D.lo), np.inf)
    if outer.any():
        # signed t = 1/x for the denominator (its degree is even), |t| for the majorant
        T = Interval(lo[outer], hi[outer]).recip()
        rev = np.zeros(m + 1)
        rev[m - np.arange(len(M))] = M
        num = up(np.polynomial.polynomial.polyval(T.mag, rev) * grow)
        D = Interval(np.ones(T.lo.shape))
        for base, e in c0.den.factors:
            enc = Interval.enclosing(base)
            D = D * iv.horner(enc.lo[::-1].copy(), T, enc.hi[::-1].copy()) ** e
        with np.errstate(divide="ignore"):
            out[outer] = np.where(D.lo > 0, up(num / D.lo), np.inf)
    return out


def crude_upper(a: FuncElement) -> float:
    """Cheap rigorous bound: sum |ap coeffs| + peak of a majorant of |c0|."""
    out = up(a.ap.coefficient_l1() * (1 + 2 * len(a.ap) * _U)) if a.ap else 0.0
    if a.c0:
        R0, C, s = tail_envelope(a)
        lo, hi = _line_boxes(R0, 64)
        if R0 > 1:
            # refine the geometric part
            lo, hi = _bisect(*_bisect(lo, hi))
        bounds = _c0_majorant(a.c0, lo, hi)
        if len(a.c0) * a.c0.den.degree <= _SMALL_C0:
            # small enough for per-row interval Horner, which sees cancellation
            _, _, mag = _Compiled(FuncElement(c0=a.c0)).enclose(lo, hi)
            bounds = np.minimum(bounds, mag)
        peak = max(float(np.max(bounds)), C * R0 ** (-s))
        out = float(up(out + peak))
    return float(out)


def _sample_lower(a: FuncElement, n: int = 10_000) -> float:
    if a.d == 1:
        x = np.linspace(-50.0, 50.0, n)
    else:
        rng = np.random.default_rng(0)
        x = rng.uniform(0, 100.0, size=(n, a.d))
    return float(np.max(np.abs(a.eval(x))))


def _element_key(e: FuncElement) -> tuple:
    return (
        tuple((k, c.real, c.imag) for k, c in e.ap.terms.items()),
        tuple((f, n.tobytes()) for f, n in e.c0.terms.items()),
        e.c0.den.factors,
    )


def _canonical(a: FuncElement) -> FuncElement:
    """Pick a fixed representative of {a, a*}; |a| and |a*| agree pointwise."""
    b = a.star()
    try:
        return a if _element_key(a) <= _element_key(b) else b
    except TypeError:
        return a


def _exact_rank(rows: list) -> int:
    m = [list(r) for r in rows]
    rank = 0
    for col in range(len(m[0]) if m else 0):
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col] / m[rank][col]
                m[i] = [u - f * v for u, v in zip(m[i], m[rank])]
        rank += 1
    return rank


def _aligned_sup(a: FuncElement, tol: float) -> NormEnclosure | None:
    """Exact sup of a trigonometric polynomial whose terms can all be put in phase.

    If the differences of the frequencies are linearly independent, the phase
    equations <lam_j - lam_0, x> = arg c_0 - arg c_j have a real solution, and
    there |a| equals the coefficient l1 norm, which is also an upper bound.
    Degenerate maxima of this kind are hard on branch-and-bound.
    """
    keys = list(a.ap.terms)
    if len(keys) == 1:
        c = a.ap.terms[keys[0]]
        if c.imag == 0 or c.real == 0:
            # |c e^{i<lam, x>}| = |c| everywhere, with no rounding
            m = abs(c.real) + abs(c.imag)
            return NormEnclosure(m, m, True, tol, (0.0,) * a.d)
        return None
    diffs = [[u - v for u, v in zip(k, keys[0])] for k in keys[1:]]
    if _exact_rank(diffs) < len(diffs):
        return None
    coeffs = [a.ap.terms[k] for k in keys]
    A = np.array([[float(v) for v in row] for row in diffs])
    rhs = np.array([cmath.phase(coeffs[0]) - cmath.phase(c) for c in coeffs[1:]])
    x, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    total = math.fsum(abs(c) for c in coeffs)
    pad = 4 * len(coeffs) * _U
    return NormEnclosure(
        float(down(total * (1 - pad))), float(up(total * (1 + pad))), True, tol, tuple(float(v) for v in x)
    )


def _torus_enclosure(a: FuncElement, tol: float, budget: int) -> NormEnclosure:
    """Multivariate trigonometric case: search the reduced torus."""
    g, B = a.ap.torus_reduction()
    reduced = FuncElement(g, d=g.d)
    bb = _BranchAndBound(reduced, budget)
    lo, hi = _period_box(reduced, 16 if g.d == 2 else 6)
    L, U = bb.run(lo, hi, tol)
    witness = None
    if B:
        Bf = np.array([[float(v) for v in row] for row in B])
        x, *_ = np.linalg.lstsq(Bf, np.array(bb.best), rcond=None)
        witness = tuple(float(v) for v in x)
    return NormEnclosure(iv.sqrt_down(L), iv.sqrt_up(U), True, tol, witness)


def norm_enclosure(a, tol: float = 1e-9, budget: int | None = None) -> NormEnclosure:
    """Enclosure of ``sup |a|``; certified when all frequencies are exact.

    ``upper - lower <= tol`` for certified results.  Raises
    ToleranceUnreachable when the subdivision budget runs out.
    """
    if isinstance(a, UnitalElement):
        a = a.as_function()
    if not tol > 0:
        raise ValueError("tol must be positive")
    budget = settings.bb_budget if budget is None else budget
    if not a:
        return NormEnclosure(0.0, 0.0, True, tol)
    if not a.is_exact:
        return NormEnclosure(min(_sample_lower(a), crude_upper(a)), crude_upper(a), False, tol)
    a = _canonical(a)
    key = (_element_key(a), a.d, float(tol), int(budget))
    with _CACHE_LOCK:
        hit = _CACHE.get(key)
        if hit is not None:
            _CACHE.move_to_end(key)
            return hit
    enc = _certified_enclosure(a, tol, budget)
    with _CACHE_LOCK:
        _CACHE[key] = enc
        if len(_CACHE) > _CACHE_SIZE:
            _CACHE.popitem(last=False)
    return enc


# enclosures are pure functions of (element, tol, budget); recent ones are kept
_CACHE: OrderedDict = OrderedDict()
_CACHE_SIZE = 256
_CACHE_LOCK = threading.Lock()


def _certified_enclosure(a: FuncElement, tol: float, budget: int) -> NormEnclosure:
    crude = crude_upper(a)
    if crude <= tol:
        return NormEnclosure(0.0, crude, True, tol)
    if not a.c0:
        aligned = _aligned_sup(a, tol)
        if aligned is not None:
            return aligned
    bb = _BranchAndBound(a, budget)
    if not a.c0 and a.d == 1:
        lo, hi = _period_box(a, 64)
        L, U = bb.run(lo, hi, tol)
        return NormEnclosure(iv.sqrt_down(L), iv.sqrt_up(U), True, tol, bb.best)
    if not a.c0:
        return _torus_enclosure(a, tol, budget)
    if not a.ap:
        R, tau = _tail_radius(a, tol / 4)
        lo, hi = _line_boxes(R)
        L, U = bb.run(lo, hi, tol / 2)
        upper = max(iv.sqrt_up(U), tau)
        return NormEnclosure(iv.sqrt_down(L), float(up(upper)), True, tol, bb.best)
    # mixed: almost periodic sup first, then the bounded region
    ap_only = FuncElement(a.ap, d=a.d)
    bb_ap = _BranchAndBound(ap_only, budget)
    lo, hi = _period_box(ap_only, 64)
    La, Ua = bb_ap.run(lo, hi, tol / 8)
    lap, uap = iv.sqrt_down(La), iv.sqrt_up(Ua)
    bb.evaluations = bb_ap.evaluations
    R, tau = _tail_radius(a, tol / 16)
    far_lower = max(0.0, float(down(lap - tau)))
    far_upper = float(up(uap + tau))
    lo, hi = _line_boxes(R)
    L, U = bb.run(lo, hi, tol / 2, lower0=far_lower**2, floor=far_upper**2, ap_sup=uap)
    near_lower = iv.sqrt_down(L)
    upper = max(iv.sqrt_up(U), far_upper)
    if near_lower >= far_lower:
        return NormEnclosure(near_lower, upper, True, tol, bb.best)
    # the periodic part's maximizer, translated by whole periods past R
    period = 2 * math.pi * float(a.ap.periods()[0])
    x = bb_ap.best[0] + math.ceil((2 * R - bb_ap.best[0]) / period) * period
    return NormEnclosure(far_lower, upper, True, tol, (x,))
