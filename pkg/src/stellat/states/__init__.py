"""States: point and atomic functionals, the cube counterexample, the quotient state."""

from .continuity import (
    ContinuityReport,
    ElementFamily,
    FactorTwoReport,
    default_states,
    factor_two_comparison,
    random_test_element,
    verify_continuity_bound,
)
from .cube import CubeAlgebraElement, Monomial, random_cube_element
from .state import (
    NoncontinuityTable,
    PositivityReport,
    State,
    apply_state,
    check_positivity,
    demonstrate_noncontinuity,
    quotient_restriction_report,
)

__all__ = [
    "ContinuityReport",
    "ElementFamily",
    "CubeAlgebraElement",
    "FactorTwoReport",
    "Monomial",
    "NoncontinuityTable",
    "PositivityReport",
    "State",
    "apply_state",
    "check_positivity",
    "default_states",
    "demonstrate_noncontinuity",
    "factor_two_comparison",
    "quotient_restriction_report",
    "random_cube_element",
    "random_test_element",
    "verify_continuity_bound",
]
