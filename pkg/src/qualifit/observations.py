"""Observation records shared by the likelihood, the constraint language, and the sampler."""

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

# Slack used when matching requested times against the simulation grid.
_TIME_TOL = 1e-9

REDUCTIONS = ("at", "max", "min")


@dataclass(frozen=True)
class ReducedBinding:
    """Scalar reduction of ``sign * (lhs - rhs)`` over a trajectory.

    ``lhs``/``rhs`` are observable names or numeric constants. ``reduction``
    is ``"at"`` (linear interpolation at ``time``), ``"max"`` or ``"min"``
    (over the grid points inside ``window``, or the whole grid when
    ``window`` is None).
    """

    lhs: object
    rhs: object
    sign: float = 1.0
    reduction: str = "at"
    time: float = None
    window: tuple = None
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.reduction not in REDUCTIONS:
            raise ValueError(f"unknown reduction {self.reduction!r}")
        if self.reduction == "at" and self.time is None:
            raise ValueError("point reduction needs a time")
        if self.window is not None and not self.window[0] < self.window[1]:
            raise ValueError(f"empty window {self.window}")

    @property
    def observables(self):
        return tuple(x for x in (self.lhs, self.rhs) if isinstance(x, str))

    def describe(self):
        return self.label or f"{self.sign:+g}*({self.lhs} - {self.rhs}) [{self.reduction}]"


def _series(traj, operand):
    if isinstance(operand, str):
        if operand not in traj:
            raise DataError(f"observable {operand!r} is not produced by the model")
        return traj[operand]
    return np.full(traj.times.size, float(operand))


def window_slice(times, window, what=""):
    """Index range ``[lo, hi)`` of grid points inside ``window`` (whole grid if None)."""
    if window is None:
        return 0, len(times)
    t0, t1 = window
    scale = _TIME_TOL * max(1.0, abs(times[-1]))
    if t0 < times[0] - scale or t1 > times[-1] + scale:
        raise DataError(
            f"{what}: window [{t0}, {t1}] outside simulated range "
            f"[{times[0]}, {times[-1]}]"
        )
    lo = int(np.searchsorted(times, t0 - scale, side="left"))
    hi = int(np.searchsorted(times, t1 + scale, side="right"))
    if hi <= lo:
        raise DataError(f"{what}: no simulation grid points inside window [{t0}, {t1}]")
    return lo, hi


def locate(times, t, what=""):
    """Left grid index and fractional weight for linear interpolation at ``t``."""
    n = len(times)
    scale = _TIME_TOL * max(1.0, abs(times[-1]))
    if t < times[0] - scale or t > times[-1] + scale:
        raise DataError(
            f"{what}: time {t} outside simulated range [{times[0]}, {times[-1]}]"
        )
    j = int(np.searchsorted(times, t, side="right")) - 1
    j = min(max(j, 0), n - 1)
    if j == n - 1 or abs(t - times[j]) <= scale:
        return j, 0.0
    return j, float((t - times[j]) / (times[j + 1] - times[j]))


def reduce_over_trajectory(binding, traj):
    """Evaluate a :class:`ReducedBinding` on a trajectory.

    Raises :class:`DataError` naming the binding when the requested time or
    window is not covered by the simulation.
    """
    what = binding.describe()
    if binding.reduction == "at":
        t = binding.time
        scale = _TIME_TOL * max(1.0, abs(traj.t_end))
        if t < traj.t_start - scale or t > traj.t_end + scale:
            raise DataError(
                f"{what}: time {t} outside simulated range [{traj.t_start}, {traj.t_end}]"
            )
        t = min(max(t, traj.t_start), traj.t_end)
        a = np.interp(t, traj.times, _series(traj, binding.lhs))
        b = np.interp(t, traj.times, _series(traj, binding.rhs))
        return float(binding.sign * (a - b))
    lo, hi = window_slice(traj.times, binding.window, what)
    e = binding.sign * (_series(traj, binding.lhs)[lo:hi] - _series(traj, binding.rhs)[lo:hi])
    return float(e.max() if binding.reduction == "max" else e.min())


@dataclass(frozen=True)
class QuantitativePoint:
    observable: str
    time: float
    value: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise DataError(f"sigma must be positive for {self.observable} at {self.time}")

    def binding(self):
        return ReducedBinding(self.observable, 0.0, 1.0, "at", self.time,
                              label=f"{self.observable}@{self.time:g}")


@dataclass(frozen=True)
class QualitativeObservation:
    """One-sided qualitative observation in canonical form ``reduced < threshold``."""

    binding: ReducedBinding
    threshold: float = 0.0
    sigma: float = 0.0
    eps_plus: float = 0.0
    eps_minus: float = 0.0

    def __post_init__(self):
        if self.sigma < 0:
            raise DataError("tolerance must be non-negative")
        for name in ("eps_plus", "eps_minus"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise DataError(f"{name}={v} must lie in [0, 1)")
        if not self.eps_plus + self.eps_minus < 1.0:
            raise DataError("eps_plus + eps_minus must be below 1")

    @property
    def label(self):
        return self.binding.describe()


@dataclass(frozen=True)
class StaticPenaltyTerm:
    """Weighted penalty ``weight * max(0, g)`` with ``g`` the reduced binding value."""

    binding: ReducedBinding
    weight: float = 1.0

    def __post_init__(self):
        if self.weight < 0:
            raise DataError("penalty weight must be non-negative")
