"""Conversion of parsed statements into canonical observations."""

from ..errors import DataError
from ..observations import QualitativeObservation, ReducedBinding, StaticPenaltyTerm
from .ast import ConstraintStatement, Likelihood, LikelihoodAsym, Weight, format_statement
from .parser import parse_constraints

_REDUCTION = {"at": "at", "always": "max", "once": "min"}


def binding_for(stmt):
    """Reduced binding reading ``< 0`` exactly when the statement holds.

    ``lhs < rhs`` reduces ``lhs - rhs``; ``lhs > rhs`` reduces ``rhs - lhs``.
    ``always`` takes the maximum over its window, ``once`` the minimum.
    """
    sign = 1.0 if stmt.op in ("<", "<=") else -1.0
    enf = stmt.enforcement
    label = stmt.source.strip() if stmt.source else format_statement(stmt)
    if stmt.line is not None:
        label = f"line {stmt.line}: {label}"
    return ReducedBinding(
        lhs=stmt.lhs,
        rhs=stmt.rhs,
        sign=sign,
        reduction=_REDUCTION[enf.mode],
        time=enf.time,
        window=enf.window,
        label=label,
    )


def discrepancy_rates(qualifier):
    """``(eps_plus, eps_minus)`` for a likelihood qualifier.

    ``confidence k`` splits ``1 - k`` evenly. ``pmin``/``pmax`` are the floor
    and ceiling of the report probability, so ``eps_plus = pmin`` and
    ``eps_minus = 1 - pmax``.
    """
    if isinstance(qualifier, Likelihood):
        eps = (1.0 - qualifier.confidence) / 2.0
        return eps, eps
    if isinstance(qualifier, LikelihoodAsym):
        if not qualifier.pmin < qualifier.pmax:
            raise DataError(f"pmin {qualifier.pmin} must be below pmax {qualifier.pmax}")
        return qualifier.pmin, 1.0 - qualifier.pmax
    raise DataError(f"{type(qualifier).__name__} qualifier has no discrepancy rates")


def normalize(stmt):
    """Statement -> :class:`QualitativeObservation` or :class:`StaticPenaltyTerm`.

    Already-normalized inputs are returned unchanged.
    """
    if isinstance(stmt, (QualitativeObservation, StaticPenaltyTerm)):
        return stmt
    if not isinstance(stmt, ConstraintStatement):
        raise TypeError(f"cannot normalize {type(stmt).__name__}")
    binding = binding_for(stmt)
    q = stmt.qualifier
    if isinstance(q, Weight):
        return StaticPenaltyTerm(binding, q.weight)
    eps_plus, eps_minus = discrepancy_rates(q)
    return QualitativeObservation(binding, 0.0, q.tolerance, eps_plus, eps_minus)


def as_penalty(item, weight=1.0):
    """Static-penalty view of a normalized item (likelihood statements get ``weight``)."""
    if isinstance(item, StaticPenaltyTerm):
        return item
    return StaticPenaltyTerm(item.binding, weight)


def load_constraints(text):
    """Parse and normalize constraint text.

    Returns ``(observations, penalties, statements)``.
    """
    statements = parse_constraints(text)
    observations, penalties = [], []
    for stmt in statements:
        item = normalize(stmt)
        (penalties if isinstance(item, StaticPenaltyTerm) else observations).append(item)
    return observations, penalties, statements
