"""Suite orchestration and the command-line entry point."""

from .config import SuiteConfig
from .suites import SUITE_NAMES, SUITES, EvidenceReport, describe, run_one, run_suite

__all__ = ["SUITES", "SUITE_NAMES", "EvidenceReport", "SuiteConfig", "describe", "run_one", "run_suite"]
