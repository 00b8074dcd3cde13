"""Power series with certified tails and their composition with elements."""

from .compose import (
    ChainRuleReport,
    TruncationCertificate,
    compose_series,
    compose_series_unital,
    verify_chain_rule,
)
from .series import PowerSeries, exp_series, identity_series, preset, series_derivative, sqrt_shift

__all__ = [
    "ChainRuleReport",
    "PowerSeries",
    "TruncationCertificate",
    "compose_series",
    "compose_series_unital",
    "exp_series",
    "identity_series",
    "preset",
    "series_derivative",
    "sqrt_shift",
    "verify_chain_rule",
]
