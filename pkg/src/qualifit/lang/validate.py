"""Diagnostics for families of statements describing one categorical observation.

Statements opt in with a trailing ``group NAME [CATEGORY]`` clause. Statements
sharing a group describe the possible outcomes of one observation; statements
sharing a category label are conjoined into one outcome (e.g. the middle
category of a three-way observation). Unlabelled statements are outcomes of
their own.
"""

from collections import defaultdict
from dataclasses import dataclass

from .ast import Weight
from .normalize import binding_for, discrepancy_rates

SEPARATION_SIGMAS = 6.0
_TOL = 1e-9


@dataclass(frozen=True)
class Diagnostic:
    level: str  # "warning" or "info"
    group: str
    message: str
    line: int = None

    def __str__(self):
        where = f"line {self.line}: " if self.line else ""
        return f"{self.level}: {where}group {self.group}: {self.message}"


def _categories(stmts):
    cats = defaultdict(list)
    for i, s in enumerate(stmts):
        cats[s.category if s.category is not None else f"#{i}"].append(s)
    return cats


def _bound(stmt):
    """``("lower"|"upper", observable, value)`` for an observable-vs-literal statement."""
    b = binding_for(stmt)
    if isinstance(b.lhs, str) and not isinstance(b.rhs, str):
        name, value, upper = b.lhs, b.rhs, b.sign > 0
    elif isinstance(b.rhs, str) and not isinstance(b.lhs, str):
        name, value, upper = b.rhs, b.lhs, b.sign < 0
    else:
        return None
    return ("upper" if upper else "lower", name, float(value))


def _check_sums(name, cats):
    out = []
    floors = {}
    for key, stmts in cats.items():
        eps = [discrepancy_rates(s.qualifier)[0] for s in stmts]
        if max(eps) - min(eps) > _TOL:
            out.append(Diagnostic("warning", name,
                                  f"category {key} mixes floor probabilities {sorted(set(eps))}",
                                  stmts[0].line))
        floors[key] = min(eps)
    total_floor = sum(floors.values())
    if total_floor >= 1.0:
        out.append(Diagnostic("warning", name,
                              f"discrepancy floors sum to {total_floor:g} >= 1"))
        return out
    for key, stmts in cats.items():
        others = total_floor - floors[key]
        for s in stmts:
            _, eps_minus = discrepancy_rates(s.qualifier)
            implied = 1.0 - eps_minus + others
            if abs(implied - 1.0) > _TOL:
                out.append(Diagnostic(
                    "warning", name,
                    f"implied sampling-model probabilities sum to {implied:.6g}, not 1 "
                    f"(expected pmax {1.0 - others:.6g})",
                    s.line,
                ))
    return out


def _check_separation(name, cats):
    out = []
    for key, stmts in cats.items():
        if len(stmts) < 2:
            continue
        bounds = defaultdict(dict)
        sigma = defaultdict(float)
        for s in stmts:
            bd = _bound(s)
            if bd is None:
                continue
            side, obs, value = bd
            bounds[obs][side] = value
            sigma[obs] = max(sigma[obs], s.qualifier.tolerance)
        for obs, sides in bounds.items():
            if "lower" in sides and "upper" in sides:
                gap = sides["upper"] - sides["lower"]
                if gap < SEPARATION_SIGMAS * sigma[obs] - _TOL:
                    out.append(Diagnostic(
                        "warning", name,
                        f"category {key}: thresholds on {obs} are {gap:g} apart, less than "
                        f"{SEPARATION_SIGMAS:g} x tolerance {sigma[obs]:g}",
                        stmts[0].line,
                    ))
    return out


def _check_complements(name, stmts):
    out = []
    for i, a in enumerate(stmts):
        for b in stmts[i + 1:]:
            if a.category is not None and a.category == b.category:
                continue
            ea, eb = a.enforcement, b.enforcement
            if ea.mode == "at" or eb.mode == "at" or ea.window != eb.window:
                continue
            ba, bb = binding_for(a), binding_for(b)
            same = (ba.lhs, ba.rhs) == (bb.lhs, bb.rhs)
            swapped = (ba.lhs, ba.rhs) == (bb.rhs, bb.lhs)
            opposite = (same and ba.sign != bb.sign) or (swapped and ba.sign == bb.sign)
            if opposite and ea.mode == eb.mode:
                want = "once" if ea.mode == "always" else "always"
                out.append(Diagnostic(
                    "warning", name,
                    f"outcomes '{ea.mode}' and '{eb.mode}' overlap; the complement of "
                    f"'{ea.mode}' is '{want}'",
                    b.line,
                ))
    return out


def validate_category_family(statements):
    """Diagnostics for every ``group`` in ``statements``; never raises."""
    groups = defaultdict(list)
    for s in statements:
        if s.group is not None:
            groups[s.group].append(s)
    diags = []
    for name, stmts in groups.items():
        likelihood = [s for s in stmts if not isinstance(s.qualifier, Weight)]
        if len(likelihood) != len(stmts):
            diags.append(Diagnostic("info", name, "weight statements ignored in family checks"))
        if not likelihood:
            continue
        cats = _categories(likelihood)
        if len(cats) < 2:
            diags.append(Diagnostic("warning", name, "family declares a single outcome"))
        diags.extend(_check_sums(name, cats))
        diags.extend(_check_separation(name, cats))
        diags.extend(_check_complements(name, likelihood))
    return diags
