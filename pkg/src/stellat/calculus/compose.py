"""Truncated holomorphic functional calculus with certified tails."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from math import comb

import numpy as np

from ..algebra.element import FuncElement, UnitalElement
from ..algebra.norm import NormEnclosure, crude_upper, norm_enclosure
from ..errors import NonzeroConstantTerm, SeriesRadiusExceeded, ToleranceUnreachable
from .lattice import polynomial_in
from .series import PowerSeries, series_derivative, without_constant

NORM_TOL = 1e-6


@dataclass(frozen=True)
class TruncationCertificate:
    n_terms: int
    rho: float
    tail_bound: float
    method: str

    def __post_init__(self):
        if self.method not in ("explicit_sum", "geometric_ratio"):
            raise ValueError(f"unknown method {self.method!r}")

    def to_dict(self) -> dict:
        return asdict(self)


def _rho(phi, rho: float | None, norm_tol: float) -> float:
    if rho is not None:
        return float(rho)
    return norm_enclosure(phi, norm_tol).upper


def compose_series(
    f: PowerSeries,
    phi: FuncElement,
    tol: float = 1e-9,
    *,
    n_terms: int | None = None,
    rho: float | None = None,
    norm_tol: float = NORM_TOL,
) -> tuple[FuncElement, TruncationCertificate]:
    """``sum_{k=1}^n c_k phi^k`` with the least ``n`` whose tail is within ``tol``.

    ``rho`` defaults to the certified upper norm bound of ``phi``; pass it to
    reuse an enclosure.  ``n_terms`` forces the truncation order (the tail is
    still certified but may exceed ``tol``).
    """
    if f.coeff(0) != 0:
        raise NonzeroConstantTerm(
            f"{f.name} has f(0) = {f.coeff(0)}; use compose_series_unital for unital algebras"
        )
    r = _rho(phi, rho, norm_tol)
    if not r < f.radius:
        raise SeriesRadiusExceeded(f"norm bound {r} is not below the radius {f.radius} of {f.name}")
    if n_terms is None:
        n, tail, method = f.truncation_order(tol, r)
    else:
        n = int(n_terms)
        tails, method = f.tail_bounds(n, r)
        tail = float(tails[n])
    if not phi:
        n, tail = 0, 0.0
    coeffs = f.coeffs(n)
    value = polynomial_in(coeffs, phi) if n else FuncElement.zero(phi.d)
    if n and not np.any(coeffs.imag) and phi.is_self_adjoint(0.0):
        # the exact result is real-valued; drop the rounding that breaks the symmetry
        value = value.real_part()
    return value, TruncationCertificate(n, r, tail, method)


def compose_series_unital(
    f: PowerSeries,
    u,
    tol: float = 1e-9,
    *,
    n_terms: int | None = None,
    rho: float | None = None,
    norm_tol: float = NORM_TOL,
) -> tuple[UnitalElement, TruncationCertificate]:
    """``f(u)`` for ``u = phi + mu*1`` by re-centring at ``mu``.

    With ``f_mu(w) = f(mu + w)`` the result is ``(f_mu - f_mu(0))(phi) +
    f_mu(0)*1``.  Presets shift in closed form; otherwise the shifted
    coefficients are summed from the original series and the certificate
    charges both truncations against ``f`` at radius ``|mu| + rho``.
    """
    if isinstance(u, FuncElement):
        u = UnitalElement(u, 0j)
    phi, mu = u.base, complex(u.unit_coeff)
    r = _rho(phi, rho, norm_tol)
    if mu == 0:
        g = f
    elif f.shift is not None:
        g = f.shift(mu)
    else:
        return _compose_shift_generic(f, phi, mu, r, tol, n_terms)
    if not r < g.radius:
        raise SeriesRadiusExceeded(
            f"|mu| + rho = {abs(mu) + r} is not inside the radius of {f.name}"
        )
    base, cert = compose_series(without_constant(g), phi, tol, n_terms=n_terms, rho=r)
    return UnitalElement(base, g.coeff(0)), cert


def _compose_shift_generic(f, phi, mu, r, tol, n_terms):
    reach = abs(mu) + r
    if not reach < f.radius:
        raise SeriesRadiusExceeded(f"|mu| + rho = {reach} is not below the radius {f.radius}")
    # sum_{j>n} |c_mu(j)| r^j  <=  sum_{k>n} |c_k| (|mu| + r)^k
    if n_terms is None:
        n, tail_n, method = f.truncation_order(tol / 2, reach)
    else:
        n = int(n_terms)
        tail_n = f.tail_bound(n, reach)
        method = "geometric_ratio" if f.degree is None else "explicit_sum"
    # inner truncation of the shifted coefficients costs at most the tail past K
    K, tail_k, _ = f.truncation_order(min(tol, tail_n if tail_n > 0 else tol) / 4, reach, n_min=n)
    c = f.coeffs(K)
    shifted = np.zeros(n + 1, dtype=complex)
    for j in range(n + 1):
        ks = np.arange(j, K + 1)
        binoms = np.array([comb(int(k), j) for k in ks], dtype=float)
        shifted[j] = np.sum(c[j:] * binoms * mu ** (ks - j))
    base = polynomial_in(np.concatenate([[0], shifted[1:]]), phi) if n else FuncElement.zero(phi.d)
    cert = TruncationCertificate(n, r, tail_n + tail_k, method)
    return UnitalElement(base, shifted[0]), cert


@dataclass
class ChainRuleReport:
    verdict: str
    difference: NormEnclosure
    threshold: float
    tails: dict
    identity_residual: float
    n_terms: int
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "difference": self.difference.to_dict(),
            "threshold": self.threshold,
            "tails": self.tails,
            "identity_residual": self.identity_residual,
            "n_terms": self.n_terms,
            **self.details,
        }


def coefficient_residual(a: FuncElement, b: FuncElement) -> float:
    """Largest coefficient of ``a - b``, relative to the coefficient scale."""
    diff = a - b
    scale = 1.0
    worst = 0.0
    if diff.ap:
        worst = max(abs(c) for c in diff.ap.terms.values())
    for e in (a, b):
        if e.ap:
            scale = max(scale, max(abs(c) for c in e.ap.terms.values()))
    if diff.c0:
        # numerators over a shared denominator; compare like with like
        lifted_a = a.c0.lifted(diff.c0.den) if a.c0 else {}
        lifted_b = b.c0.lifted(diff.c0.den) if b.c0 else {}
        for part in (lifted_a, lifted_b):
            for n in part.values():
                scale = max(scale, float(np.max(np.abs(n))))
        for n in diff.c0.terms.values():
            worst = max(worst, float(np.max(np.abs(n))))
    return worst / scale


def _structural_bound(f, phi, left, rhs, right, dc, n, m, rho, dphi, dphi_norm) -> float:
    """Bound on ||left - right|| through the truncation orders.

    left - right = (left - rhs) + R(phi) dphi  with  R = P_n' - f'(0) - h_m, whose only
    nonzero coefficients lie between the two orders, so ||R(phi)|| <= sum |r_k| rho^k.
    Rounding in ``right`` is measured against R(phi) dphi as computed.
    """
    c = f.coeffs(max(n, m + 1))
    r = np.zeros(max(n, m + 1), dtype=complex)
    r[:n] += dc
    r[: m + 1] -= np.array([(k + 1) * c[k + 1] for k in range(m + 1)], dtype=complex)
    r_part = polynomial_in(r, phi) * dphi if np.any(r) else FuncElement.zero(phi.d)
    noise = crude_upper(left - rhs) + crude_upper(rhs - right - r_part)
    powers = rho ** np.arange(len(r))
    return (noise + float(np.sum(np.abs(r) * powers)) * dphi_norm) * (1 + 1e-12)


def verify_chain_rule(
    f: PowerSeries,
    phi: FuncElement,
    tol: float = 1e-7,
    *,
    direction: int = 0,
    compose_tol: float | None = None,
    norm_tol: float | None = None,
) -> ChainRuleReport:
    """Compare  d(f o phi)  with  ((h o phi) + f'(0)) d phi,  h = f' - f'(0).

    PASS iff the certified sup of the difference is at most ``tol`` plus the
    truncation allowances, and the truncated polynomial identity holds to
    1e-12 relative to the coefficient scale.
    """
    compose_tol = tol / 10 if compose_tol is None else compose_tol
    rho = norm_enclosure(phi, NORM_TOL).upper
    df = series_derivative(f)
    h = without_constant(df)
    F, cert_f = compose_series(f, phi, compose_tol, rho=rho)
    H, cert_h = compose_series(h, phi, compose_tol, rho=rho)
    dphi = phi.derivative(direction)
    left = F.derivative(direction)
    right = (H + df.coeff(0)) * dphi
    # any certified upper bound of |d phi| is admissible in the allowance
    dphi_norm = crude_upper(dphi)
    n = cert_f.n_terms
    # d/dx of the discarded part of f o phi, and the discarded part of h o phi
    deriv_tail = df.tail_bound(n - 1, rho) if n >= 1 else df.tail_bound(0, rho) + abs(df.coeff(0))
    allowance = dphi_norm * (deriv_tail + cert_h.tail_bound)
    threshold = tol + allowance
    # only the upper end is compared, so the enclosure need not be tighter than that
    norm_tol = threshold / 2 if norm_tol is None else norm_tol
    difference = left - right
    notes = {}
    # exact identity for the truncated polynomial
    c = f.coeffs(n)
    dc = np.array([(k + 1) * c[k + 1] for k in range(n)], dtype=complex)
    rhs = polynomial_in(dc, phi) * dphi if n else FuncElement.zero(phi.d)
    residual = coefficient_residual(left, rhs)
    crude = crude_upper(difference)
    notes["difference_bound"] = "coefficient"
    if crude > threshold:
        crude = min(crude, _structural_bound(f, phi, left, rhs, right, dc, n, cert_h.n_terms, rho, dphi, dphi_norm))
        notes["difference_bound"] = "structural"
    if crude <= threshold:
        diff = NormEnclosure(0.0, crude, True, crude)
    else:
        notes["difference_bound"] = "branch_and_bound"
        try:
            diff = norm_enclosure(difference, norm_tol)
        except ToleranceUnreachable as exc:
            diff = NormEnclosure(0.0, crude, False, norm_tol)
            notes["enclosure"] = str(exc)
    ok = diff.certified and diff.upper <= threshold and residual <= 1e-12
    return ChainRuleReport(
        "PASS" if ok else "FAIL",
        diff,
        threshold,
        {
            "f": cert_f.to_dict(),
            "h": cert_h.to_dict(),
            "derivative_tail": deriv_tail,
            "dphi_norm_upper": dphi_norm,
        },
        residual,
        n,
        {"series": f.name, "direction": direction, **notes},
    )
