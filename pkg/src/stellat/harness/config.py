"""Run configuration with environment overrides."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, fields, replace

from ..config import settings
from ..errors import ConfigError

ENV_PREFIX = "STELLAT_"


@dataclass(frozen=True)
class SuiteConfig:
    tol: float = 1e-9
    trials: int = 1000
    seed: int = 0
    max_order: int = 6
    n_max: int = 10**6
    bb_budget: int = settings.bb_budget
    out: str | None = None

    def __post_init__(self):
        if not (isinstance(self.tol, (int, float)) and self.tol > 0):
            raise ConfigError(f"tol must be positive, got {self.tol!r}")
        for name in ("trials", "max_order", "n_max", "bb_budget"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")

    @classmethod
    def from_env(cls, environ=None, **overrides) -> "SuiteConfig":
        """Defaults, then ``STELLAT_*`` variables, then explicit ``overrides`` (None is ignored)."""
        environ = os.environ if environ is None else environ
        values = {}
        for f in fields(cls):
            raw = environ.get(ENV_PREFIX + f.name.upper())
            if raw is not None:
                values[f.name] = _parse(f.name, raw)
        values.update({k: v for k, v in overrides.items() if v is not None})
        unknown = set(values) - {f.name for f in fields(cls)}
        if unknown:
            raise ConfigError(f"unknown settings: {sorted(unknown)}")
        return cls(**values)

    def with_(self, **changes) -> "SuiteConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self, suite: str) -> str:
        """Hash of everything that determines a suite's results."""
        data = {k: v for k, v in self.to_dict().items() if k != "out"}
        data["suite"] = suite
        return hashlib.sha256(json.dumps(data, sort_keys=True).encode()).hexdigest()


def _parse(name: str, raw: str):
    try:
        if name == "tol":
            return float(raw)
        if name == "out":
            return raw
        return int(float(raw)) if "e" in raw.lower() else int(raw, 0)
    except ValueError:
        raise ConfigError(f"cannot parse {ENV_PREFIX}{name.upper()}={raw!r}") from None
