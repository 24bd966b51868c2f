"""Constraint specification language: statements of the form
``A<4 at time=1 confidence 0.98 tolerance 0.5``."""

from ..observations import ReducedBinding, reduce_over_trajectory
from .ast import (
    ConstraintStatement,
    Enforcement,
    Likelihood,
    LikelihoodAsym,
    Span,
    Weight,
    format_statement,
)
from .lexer import Token, tokenize
from .normalize import as_penalty, binding_for, discrepancy_rates, load_constraints, normalize
from .parser import parse_constraints, parse_constraints_collect, parse_statement
from .validate import Diagnostic, validate_category_family

__all__ = [
    "ConstraintStatement",
    "Diagnostic",
    "Enforcement",
    "Likelihood",
    "LikelihoodAsym",
    "ReducedBinding",
    "Span",
    "Token",
    "Weight",
    "as_penalty",
    "binding_for",
    "discrepancy_rates",
    "format_statement",
    "load_constraints",
    "normalize",
    "parse_constraints",
    "parse_constraints_collect",
    "parse_statement",
    "reduce_over_trajectory",
    "tokenize",
    "validate_category_family",
]
