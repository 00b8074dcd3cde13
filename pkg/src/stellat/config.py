"""Process-wide numeric settings.

Only knobs that affect canonical forms live here; per-call tolerances are
passed explicitly.
"""

from dataclasses import dataclass


@dataclass
class Settings:
    # coefficients with smaller magnitude are dropped after arithmetic
    drop_threshold: float = 1e-15
    # subdivision cap for branch-and-bound norm enclosures
    bb_budget: int = 4_000_000
    # hard cap on truncation order in series composition
    max_terms: int = 4000


settings = Settings()
