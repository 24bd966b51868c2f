"""Syntax tree for constraint statements."""

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Span:
    line: int
    column: int
    end_column: int


@dataclass(frozen=True)
class Enforcement:
    mode: str  # "at", "always" or "once"
    time: float = None
    window: tuple = None

    def __post_init__(self):
        if self.mode not in ("at", "always", "once"):
            raise ValueError(f"unknown enforcement mode {self.mode!r}")
        if self.mode == "at" and (self.time is None or self.time < 0):
            raise ValueError("'at' enforcement needs a non-negative time")


@dataclass(frozen=True)
class Weight:
    weight: float


@dataclass(frozen=True)
class Likelihood:
    confidence: float
    tolerance: float


@dataclass(frozen=True)
class LikelihoodAsym:
    pmin: float
    pmax: float
    tolerance: float


@dataclass(frozen=True)
class ConstraintStatement:
    lhs: object  # observable name (str) or numeric literal (float)
    op: str
    rhs: object
    enforcement: Enforcement
    qualifier: object
    group: str = None
    category: str = None
    span: Span = field(default=None, compare=False, repr=False)
    source: str = field(default=None, compare=False, repr=False)

    @property
    def observables(self):
        return tuple(x for x in (self.lhs, self.rhs) if isinstance(x, str))

    @property
    def line(self):
        return self.span.line if self.span else None


def _num(x):
    return repr(float(x))


def _operand(x):
    return x if isinstance(x, str) else _num(x)


def format_statement(stmt):
    """Canonical text for a statement; reparses to an equal AST."""
    parts = [f"{_operand(stmt.lhs)}{stmt.op}{_operand(stmt.rhs)}"]
    enf = stmt.enforcement
    if enf.mode == "at":
        parts.append(f"at time={_num(enf.time)}")
    else:
        parts.append(enf.mode)
        if enf.window is not None:
            parts.append(f"between time={_num(enf.window[0])},time={_num(enf.window[1])}")
    q = stmt.qualifier
    if isinstance(q, Weight):
        parts.append(f"weight {_num(q.weight)}")
    elif isinstance(q, Likelihood):
        parts.append(f"confidence {_num(q.confidence)} tolerance {_num(q.tolerance)}")
    else:
        parts.append(f"pmin {_num(q.pmin)} pmax {_num(q.pmax)} tolerance {_num(q.tolerance)}")
    if stmt.group is not None:
        parts.append(f"group {stmt.group}")
        if stmt.category is not None:
            parts.append(stmt.category)
    return " ".join(parts)
