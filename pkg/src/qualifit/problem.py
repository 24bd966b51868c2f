"""A model, a protocol, data and priors bundled into an objective for the sampler."""

import logging
import math

import numpy as np

from . import _kernels
from .errors import ConfigError, DataError
from .lang.normalize import as_penalty
from .observations import locate, window_slice
from .sampler import Target

log = logging.getLogger(__name__)

_MODE = {"at": _kernels.MODE_AT, "max": _kernels.MODE_MAX, "min": _kernels.MODE_MIN}


class _Plan:
    """Gather indices for evaluating many bindings on one trajectory layout."""

    def __init__(self, bindings, traj):
        self.names = traj.names
        self.n_times = traj.times.size
        n = len(bindings)
        self.lhs_row = np.full(n, -1, dtype=np.int64)
        self.rhs_row = np.full(n, -1, dtype=np.int64)
        self.lhs_const = np.zeros(n)
        self.rhs_const = np.zeros(n)
        self.sign = np.ones(n)
        self.mode = np.zeros(n, dtype=np.int64)
        self.i0 = np.zeros(n, dtype=np.int64)
        self.w = np.zeros(n)
        self.lo = np.zeros(n, dtype=np.int64)
        self.hi = np.zeros(n, dtype=np.int64)
        for k, b in enumerate(bindings):
            for operand, rows, consts in ((b.lhs, self.lhs_row, self.lhs_const),
                                          (b.rhs, self.rhs_row, self.rhs_const)):
                if isinstance(operand, str):
                    if operand not in traj:
                        raise DataError(
                            f"{b.describe()}: observable {operand!r} is not produced by the model"
                        )
                    rows[k] = traj.row(operand)
                else:
                    consts[k] = float(operand)
            self.sign[k] = b.sign
            self.mode[k] = _MODE[b.reduction]
            if b.reduction == "at":
                self.i0[k], self.w[k] = locate(traj.times, b.time, b.describe())
            else:
                self.lo[k], self.hi[k] = window_slice(traj.times, b.window, b.describe())

    def reduce(self, values):
        return _kernels.reduce_bindings(values, self.lhs_row, self.lhs_const, self.rhs_row,
                                        self.rhs_const, self.sign, self.mode, self.i0, self.w,
                                        self.lo, self.hi)


class Problem:
    """Objective over the free (prior-bearing) parameters of a model.

    ``objective`` is ``"likelihood"`` (chi-squared plus qualitative terms;
    static-penalty statements are ignored) or ``"penalty"`` (chi-squared plus
    static penalties, with likelihood statements converted to unit-weight
    penalties).
    """

    def __init__(self, model, protocol, priors, quantitative=(), qualitative=(),
                 penalties=(), fixed=None, objective="likelihood"):
        if objective not in ("likelihood", "penalty"):
            raise ConfigError(f"unknown objective {objective!r}")
        self.model = model
        self.protocol = protocol
        self.priors = list(priors)
        self.quantitative = list(quantitative)
        self.qualitative = list(qualitative)
        self.penalties = list(penalties)
        self.objective = objective
        names = [p.name for p in self.priors]
        unknown = sorted(set(names) - set(model.param_names))
        if unknown:
            raise ConfigError(f"priors given for unknown parameters {unknown}")
        if len(set(names)) != len(names):
            raise ConfigError("duplicate priors")
        order = {n: i for i, n in enumerate(model.param_names)}
        self.priors.sort(key=lambda p: order[p.name])
        self.free_index = np.array([order[p.name] for p in self.priors], dtype=np.int64)
        base = dict(model.defaults)
        base.update(fixed or {})
        self.base_theta = model.theta_array({k: base[k] for k in model.param_names})
        if objective == "likelihood" and self.penalties:
            log.warning("ignoring %d weight statements in likelihood mode", len(self.penalties))
        if objective == "likelihood":
            self._penalty_items = []
        else:
            self._penalty_items = self.penalties + [as_penalty(o) for o in self.qualitative]
        self._plan = None
        qual = [] if objective == "penalty" else self.qualitative
        self._bindings = ([p.binding() for p in self.quantitative]
                          + [o.binding for o in qual]
                          + [t.binding for t in self._penalty_items])
        self._nq = len(self.quantitative)
        self._nl = len(qual)
        self._y = np.array([p.value for p in self.quantitative], dtype=float)
        self._ys = np.array([p.sigma for p in self.quantitative], dtype=float)
        self._sig = np.array([o.sigma for o in qual], dtype=float)
        self._thr = np.array([o.threshold for o in qual], dtype=float)
        self._ep = np.array([o.eps_plus for o in qual], dtype=float)
        self._em = np.array([o.eps_minus for o in qual], dtype=float)
        self._pw = np.array([t.weight for t in self._penalty_items], dtype=float)
        self.failures = 0

    @property
    def param_names(self):
        return tuple(p.name for p in self.priors)

    def full_theta(self, free):
        theta = self.base_theta.copy()
        theta[self.free_index] = free
        return theta

    def check(self):
        """Simulate at the base point and resolve every binding (raises on mismatch)."""
        traj = self.model.simulate(self.base_theta, self.protocol)
        self._plan = _Plan(self._bindings, traj)
        return self

    def evaluate_theta(self, theta):
        """Objective value for a full natural-unit parameter vector."""
        traj = self.model.simulate(theta, self.protocol)
        if traj.failed:
            self.failures += 1
            log.debug("simulation failed at %s", theta)
            return math.inf
        plan = self._plan
        if (plan is None or plan.n_times != traj.times.size
                or (plan.names is not traj.names and plan.names != traj.names)):
            plan = self._plan = _Plan(self._bindings, traj)
        if not self._bindings:
            return 0.0
        vals = plan.reduce(traj.values)
        nq, nl = self._nq, self._nl
        total = 0.0
        if nq:
            total += _kernels.chi2_nll(self._y, vals[:nq], self._ys)
        if nl:
            total += _kernels.qual_nll(vals[nq:nq + nl], self._sig, self._thr, self._ep, self._em)
        if self._pw.size:
            g = vals[nq + nl:]
            if np.isnan(g).any():
                return math.inf
            total += float(np.dot(self._pw, np.maximum(g, 0.0)))
        if math.isnan(total):
            self.failures += 1
            return math.inf
        return total

    def __call__(self, free_theta):
        return self.evaluate_theta(self.full_theta(free_theta))

    def target(self):
        if not self.priors:
            raise ConfigError("no free parameters: declare at least one prior")
        return Target(self.priors, self)
