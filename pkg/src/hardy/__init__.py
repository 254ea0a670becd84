"""Sharp norm bounds for Hardy-type integral operators in normal form.

The central object is a parameter: a non-increasing, right-continuous
function b on (0, inf) encoding the operator f -> integral of f over
(0, b(x)).  The package computes two-sided bounds (sometimes exact values)
for its L^p -> L^q norm, decides compactness, reduces discrete, half-line
and measure-space Hardy inequalities to this normal form, and ships an
independent numeric oracle plus a command line front end.
"""

from .bounds import (
    BoundsReport,
    CriterionResult,
    best_bounds,
    bliss_constant,
    criterion_A0,
    criterion_A1,
    criterion_A2,
    criterion_C0,
    cross_index_bound,
    endpoint_norm,
)
from .compactness import CompactnessReport, finite_rank_approx, is_compact
from .oracle import (
    NormEstimate,
    TestFunction,
    apply_Hb,
    estimate_norm,
    rayleigh,
)
from .errors import (
    HardyError,
    InconsistencyError,
    NotRepresentableError,
    ValidationError,
)
from .params import (
    PIECE_CAP,
    TRUNCATION_KINDS,
    Exponents,
    Parameter,
    conjugate,
    dilate,
    generalized_inverse,
    parameter_from_json,
    parameter_to_json,
    rearranged_difference,
    truncated_power,
)
from .transitions import NormalForm, from_discrete, from_halfline, from_measures

__version__ = "0.1.0"

__all__ = [
    "HardyError",
    "ValidationError",
    "InconsistencyError",
    "NotRepresentableError",
    "PIECE_CAP",
    "TRUNCATION_KINDS",
    "Exponents",
    "Parameter",
    "conjugate",
    "dilate",
    "generalized_inverse",
    "parameter_from_json",
    "parameter_to_json",
    "rearranged_difference",
    "truncated_power",
    "NormalForm",
    "from_discrete",
    "from_halfline",
    "from_measures",
    "CriterionResult",
    "BoundsReport",
    "bliss_constant",
    "endpoint_norm",
    "criterion_A0",
    "criterion_A1",
    "criterion_A2",
    "criterion_C0",
    "cross_index_bound",
    "best_bounds",
    "CompactnessReport",
    "is_compact",
    "finite_rank_approx",
    "TestFunction",
    "NormEstimate",
    "apply_Hb",
    "rayleigh",
    "estimate_norm",
    "__version__",
]
