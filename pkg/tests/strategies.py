"""Hypothesis strategies that draw seeded random elements."""

from __future__ import annotations

from hypothesis import strategies as st

from stellat.randgen import random_element, rng_for


def elements(kind: str | None = None, self_adjoint: bool = False, d: int = 1, **kw):
    kinds = [kind] if kind else (["ap", "c0", "mixed"] if d == 1 else ["ap"])

    @st.composite
    def draw(draw_fn):
        seed = draw_fn(st.integers(0, 2**32 - 1))
        k = draw_fn(st.sampled_from(kinds))
        rng = rng_for(seed, "hypothesis", 0)
        return random_element(rng, k, self_adjoint=self_adjoint, d=d, **kw)

    return draw()
