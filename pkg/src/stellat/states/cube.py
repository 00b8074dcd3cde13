"""Polynomials in the coordinate projections x_1, x_2, ... on the unit cube.

Generators are real-valued and commute, so a monomial is a sorted tuple of
generator indices and the involution conjugates coefficients.  There is no
empty monomial: the algebra has no unit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping


@dataclass(frozen=True, order=True)
class Monomial:
    gens: tuple[int, ...]

    def __init__(self, gens):
        gens = tuple(sorted(int(g) for g in gens))
        if not gens:
            raise ValueError("a monomial needs at least one generator")
        if gens[0] < 1:
            raise ValueError("generator indices start at 1")
        object.__setattr__(self, "gens", gens)

    @property
    def degree(self) -> int:
        return len(self.gens)

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(self.gens + other.gens)

    def __str__(self) -> str:
        return "*".join(f"x_{g}" for g in self.gens)


class CubeAlgebraElement:
    """Finite linear combination of monomials with complex coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | None = None):
        clean: dict[Monomial, complex] = {}
        for m, c in (terms or {}).items():
            m = m if isinstance(m, Monomial) else Monomial(m)
            clean[m] = clean.get(m, 0) + c
        self.terms = {m: c for m, c in sorted(clean.items()) if c != 0}

    @classmethod
    def generator(cls, n: int, coeff: complex = 1) -> "CubeAlgebraElement":
        return cls({Monomial((n,)): coeff})

    def __repr__(self) -> str:
        body = " + ".join(f"({c})*{m}" for m, c in self.terms.items()) or "0"
        return f"CubeAlgebraElement({body})"

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, CubeAlgebraElement) and self.terms == other.terms

    def __add__(self, other: "CubeAlgebraElement") -> "CubeAlgebraElement":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return CubeAlgebraElement(out)

    def __neg__(self) -> "CubeAlgebraElement":
        return CubeAlgebraElement({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, CubeAlgebraElement):
            out: dict[Monomial, complex] = {}
            for m1, c1 in self.terms.items():
                for m2, c2 in other.terms.items():
                    m = m1 * m2
                    out[m] = out.get(m, 0) + c1 * c2
            return CubeAlgebraElement(out)
        return CubeAlgebraElement({m: c * other for m, c in self.terms.items()})

    __rmul__ = __mul__

    def star(self) -> "CubeAlgebraElement":
        return CubeAlgebraElement({m: complex(c).conjugate() for m, c in self.terms.items()})

    @property
    def degree(self) -> int:
        return max((m.degree for m in self.terms), default=0)

    @property
    def min_degree(self) -> int:
        return min((m.degree for m in self.terms), default=0)

    def eval(self, point: Mapping[int, float]) -> complex:
        """Value at a point of the cube given as {generator index: coordinate}."""
        total = 0j
        for m, c in self.terms.items():
            v = complex(c)
            for g in m.gens:
                v *= point.get(g, 0.0)
            total += v
        return total

    def sup_norm(self) -> float:
        """Exact sup over the unit cube for a single term; otherwise an upper bound.

        A monomial takes values in [0, 1] and reaches 1 where every coordinate is 1.
        """
        return float(sum(abs(c) for c in self.terms.values()))


def random_cube_element(rng, max_degree: int = 4, max_gens: int = 6, n_terms: int = 6) -> CubeAlgebraElement:
    """Random element with Gaussian complex coefficients over generators 1..max_gens."""
    k = int(rng.integers(1, n_terms + 1))
    terms = {}
    for _ in range(k):
        deg = int(rng.integers(1, max_degree + 1))
        gens = rng.integers(1, max_gens + 1, size=deg)
        terms[Monomial(gens)] = complex(rng.normal(), rng.normal())
    return CubeAlgebraElement(terms)
