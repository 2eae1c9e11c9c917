"""Truncated time power series solutions of linear vector PDE systems
mass * u_tt = L u + f, computed two independent ways (direct recursion
and perturbation corrections) and mechanically cross-verified."""

from .errors import (
    DimensionMismatch,
    DomainError,
    ExpansionSingular,
    FormatError,
    NonIntegerExponent,
    ParseError,
    PdeSeriesError,
    SamplingExhausted,
    SingularRho,
    TimeNotAllowed,
    UnknownIdentifier,
)
from .expr import (
    Const,
    Expr,
    Func,
    Pow,
    Prod,
    SamplePlan,
    Sum,
    TIME_INDEX,
    Var,
    const,
    cos,
    cosh,
    differentiate,
    equal_sampled,
    evaluate,
    exp,
    ln,
    normalize,
    sampled_deviation,
    sin,
    sinh,
    substitute,
    tanh,
    var,
)
from .hpm import HpmExpansion, partial_sum, solve_hpm
from .parser import load_problem, parse_expr, parse_problem, print_expr
from .series import (
    OperatorTerm,
    ProblemSpec,
    RationalMatrix,
    SpatialOperator,
    TimeSeriesVec,
    apply_operator,
    expand_in_time,
    forcing_coefficients,
    invert,
    series_scale_matrix,
)
from .taylor import TaylorSolution, detect_exact, solve_taylor, taylor_coefficients
from .verify import (
    DegreeCheck,
    EquivalenceReport,
    ResidualReport,
    equivalence_check,
    residual_check,
)

__version__ = "0.1.0"

__all__ = [
    "Const",
    "DegreeCheck",
    "DimensionMismatch",
    "DomainError",
    "EquivalenceReport",
    "ExpansionSingular",
    "Expr",
    "FormatError",
    "Func",
    "HpmExpansion",
    "NonIntegerExponent",
    "OperatorTerm",
    "ParseError",
    "PdeSeriesError",
    "Pow",
    "ProblemSpec",
    "Prod",
    "RationalMatrix",
    "ResidualReport",
    "SamplePlan",
    "SamplingExhausted",
    "SingularRho",
    "SpatialOperator",
    "Sum",
    "TIME_INDEX",
    "TaylorSolution",
    "TimeNotAllowed",
    "TimeSeriesVec",
    "UnknownIdentifier",
    "Var",
    "apply_operator",
    "const",
    "cos",
    "cosh",
    "detect_exact",
    "differentiate",
    "equal_sampled",
    "equivalence_check",
    "evaluate",
    "exp",
    "expand_in_time",
    "forcing_coefficients",
    "invert",
    "ln",
    "load_problem",
    "normalize",
    "parse_expr",
    "parse_problem",
    "partial_sum",
    "print_expr",
    "residual_check",
    "sampled_deviation",
    "series_scale_matrix",
    "sin",
    "sinh",
    "solve_hpm",
    "solve_taylor",
    "substitute",
    "tanh",
    "taylor_coefficients",
    "var",
]
