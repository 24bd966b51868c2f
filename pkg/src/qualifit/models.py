"""Deterministic models and the fixed-step integrator."""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConfigError, DataError
from .trajectory import Trajectory


@dataclass(frozen=True)
class SimProtocol:
    """Simulation protocol.

    ``times`` (or ``t_end``/``dt``) sets the output grid of time-course
    models; ``step`` is the RK4 step. ``delays`` and ``threshold`` are read by
    the biphasic model.
    """

    times: tuple = None
    t_end: float = 10.0
    dt: float = 0.1
    step: float = 0.01
    delays: tuple = ()
    threshold: float = 0.15

    def grid(self):
        if self.times is not None:
            return np.asarray(self.times, dtype=float)
        n = int(round(self.t_end / self.dt))
        return np.linspace(0.0, n * self.dt, n + 1)


def rk4_integrate(rhs, x0, t_grid, step, params=()):
    """Classical fixed-step RK4 reporting the state at every grid time.

    Each grid interval is split into ``ceil(interval / step)`` equal
    substeps so the integrator lands exactly on the grid. ``rhs(t, x, params)``
    returns dx/dt as an array. Returns ``(states, ok)``; ``ok`` is False and
    the remaining rows are NaN once the state stops being finite.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise ValueError("t_grid must be a non-empty 1-D array")
    if np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    if step <= 0:
        raise ValueError("step must be positive")
    n_sub = np.maximum(1, np.ceil(np.diff(t_grid) / step - 1e-9)).astype(np.int64)
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    params = np.asarray(params, dtype=float)
    if hasattr(rhs, "py_func") and _kernels.BACKEND == "numba":
        return _kernels.rk4_fixed(rhs, x0, t_grid, n_sub, params)
    from ._kernels import _numpy

    return _numpy.rk4_fixed(rhs, x0, t_grid, n_sub, params)


class Model:
    """Base class: named positive parameters, named outputs, ``simulate``."""

    name = ""
    param_names = ()
    defaults = {}

    def theta_array(self, theta):
        if isinstance(theta, dict):
            missing = [p for p in self.param_names if p not in theta]
            if missing:
                raise ConfigError(f"{self.name}: missing parameters {missing}")
            unknown = sorted(set(theta) - set(self.param_names))
            if unknown:
                raise ConfigError(f"{self.name}: unknown parameters {unknown}")
            return np.array([float(theta[p]) for p in self.param_names])
        arr = np.asarray(theta, dtype=float)
        if arr.shape != (len(self.param_names),):
            raise ConfigError(
                f"{self.name}: expected {len(self.param_names)} parameters, got {arr.shape}"
            )
        return arr

    def default_theta(self):
        return np.array([self.defaults[p] for p in self.param_names], dtype=float)

    def observables(self, protocol):
        raise NotImplementedError

    def simulate(self, theta, protocol=None):
        raise NotImplementedError


def delay_tag(t):
    """Identifier-safe rendering of a delay, e.g. 0.5 -> '0p5', 64 -> '64'."""
    return ("%.6g" % t).replace(".", "p").replace("+", "").replace("-", "m")


def secondary_name(t):
    return f"p3_{delay_tag(t)}"


class BiphasicToyModel(Model):
    """Primary response ``p1 = A`` and delay-dependent secondary response

        p3(t) = max(0, A * (1 + b*exp(-t/tau_b) - d*exp(-t/tau_d)))

    The trajectory's time axis is the delay grid. Outputs: ``p1``, ``p3``,
    ``degrHigh = p1 + h`` and ``degrLow = p1 - h`` (``h`` is the protocol
    threshold), and one constant series ``p3_<t>`` per delay.
    """

    name = "biphasic"
    param_names = ("A", "b", "tau_b", "d", "tau_d")
    defaults = {"A": 1.0, "b": 0.6, "tau_b": 30.0, "d": 1.1, "tau_d": 8.0}

    def __init__(self):
        self._layout = {}

    def _grid(self, protocol):
        key = (tuple(protocol.delays), protocol.threshold)
        layout = self._layout.get(key)
        if layout is None:
            delays = np.asarray(protocol.delays, dtype=float)
            if delays.size == 0:
                raise ConfigError("biphasic model needs at least one delay")
            if np.any(np.diff(delays) <= 0) or delays[0] <= 0:
                raise ConfigError("delays must be positive and strictly increasing")
            per_delay = [secondary_name(t) for t in delays]
            if len(set(per_delay)) != len(per_delay):
                raise ConfigError("delays too close to give distinct output names")
            names = ("p1", "p3", "degrHigh", "degrLow", *per_delay)
            layout = (delays, names)
            self._layout[key] = layout
        return layout

    def observables(self, protocol):
        return self._grid(protocol)[1]

    def simulate(self, theta, protocol=None):
        if protocol is None:
            raise ConfigError("biphasic model needs a protocol with delays")
        delays, names = self._grid(protocol)
        amp, b, tau_b, d, tau_d = self.theta_array(theta)
        p3 = _kernels.biphasic_secondary(amp, b, tau_b, d, tau_d, delays)
        n = delays.size
        values = np.empty((4 + n, n))
        values[0] = amp
        values[1] = p3
        values[2] = amp + protocol.threshold
        values[3] = amp - protocol.threshold
        values[4:] = p3[:, None]
        failed = not (np.isfinite(amp) and np.all(np.isfinite(p3)))
        return Trajectory(delays, names, values, failed=failed, check=False)


def _decay_rhs(t, x, params):
    return -params[0] * x


class DecayODEModel(Model):
    """``dx/dt = -k x`` with ``x(0) = x0``, integrated by fixed-step RK4."""

    name = "decay"
    param_names = ("k", "x0")
    defaults = {"k": 1.0, "x0": 1.0}
    _rhs = staticmethod(_kernels.maybe_jit(_decay_rhs))

    def observables(self, protocol):
        return ("x",)

    def simulate(self, theta, protocol=None):
        protocol = protocol or SimProtocol()
        k, x0 = self.theta_array(theta)
        grid = protocol.grid()
        states, ok = rk4_integrate(self._rhs, [x0], grid, protocol.step, [k])
        return Trajectory(grid, ("x",), states.T, failed=not ok, check=False)

    @staticmethod
    def exact(k, x0, t):
        return x0 * np.exp(-k * np.asarray(t, dtype=float))


MODELS = {m.name: m for m in (BiphasicToyModel, DecayODEModel)}


def get_model(name):
    try:
        return MODELS[name]()
    except KeyError:
        raise ConfigError(f"unknown model {name!r}; choose from {sorted(MODELS)}") from None


def read_param_file(path_or_text):
    """``key = value`` lines with ``#`` comments -> dict of floats."""
    text = path_or_text
    if "\n" not in str(path_or_text) and "=" not in str(path_or_text):
        with open(path_or_text) as fh:
            text = fh.read()
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataError(f"parameter file line {lineno}: expected 'name = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            out[key] = float(value)
        except ValueError:
            raise DataError(f"parameter file line {lineno}: bad number {value!r}") from None
        if not math.isfinite(out[key]):
            raise DataError(f"parameter file line {lineno}: non-finite value")
    return out


def format_param_file(params):
    return "".join(f"{k} = {float(v)!r}\n" for k, v in params.items())
