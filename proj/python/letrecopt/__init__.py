"""Binding analysis and optimization of letrec terms."""

from ._core import (
    DataError,
    NotApplicable,
    ParseError,
    Term,
    UntypableError,
    analyze,
    approximate,
    check_equiv,
    count_steps,
    evaluate,
    experiments,
    infer_type,
    is_typable,
    optimize,
    parse,
    run,
    strong_dominators,
    to_dot,
)

__all__ = [
    "DataError",
    "NotApplicable",
    "ParseError",
    "Term",
    "UntypableError",
    "analyze",
    "approximate",
    "check_equiv",
    "count_steps",
    "evaluate",
    "experiments",
    "infer_type",
    "is_typable",
    "optimize",
    "parse",
    "run",
    "strong_dominators",
    "to_dot",
]
