"""Simulation output container."""

import numpy as np

from .errors import DataError


class Trajectory:
    """Named observable series sampled on a shared, strictly increasing time grid.

    Series are stored row-wise in ``values`` (one row per name) so that the
    likelihood kernels can gather from a single contiguous array.
    """

    __slots__ = ("times", "names", "values", "failed", "_index")

    def __init__(self, times, names, values, failed=False, check=True):
        self.times = np.asarray(times, dtype=float)
        self.names = tuple(names)
        self.values = np.asarray(values, dtype=float)
        self.failed = bool(failed)
        self._index = {name: i for i, name in enumerate(self.names)}
        if check:
            if self.times.ndim != 1 or self.times.size == 0:
                raise DataError("trajectory needs a non-empty 1-D time grid")
            if np.any(np.diff(self.times) <= 0):
                raise DataError("trajectory times must be strictly increasing")
            if self.values.shape != (len(self.names), self.times.size):
                raise DataError(
                    f"values shape {self.values.shape} does not match "
                    f"{len(self.names)} series x {self.times.size} times"
                )
            if len(self._index) != len(self.names):
                raise DataError("duplicate observable names in trajectory")

    @classmethod
    def from_series(cls, times, series, failed=False):
        names = list(series)
        times = np.asarray(times, dtype=float)
        values = np.empty((len(names), times.size))
        for i, name in enumerate(names):
            values[i] = series[name]
        return cls(times, names, values, failed=failed)

    def __contains__(self, name):
        return name in self._index

    def __getitem__(self, name):
        try:
            return self.values[self._index[name]]
        except KeyError:
            raise KeyError(f"observable {name!r} not in trajectory") from None

    def row(self, name):
        return self._index[name]

    @property
    def series(self):
        return {name: self.values[i] for i, name in enumerate(self.names)}

    @property
    def t_start(self):
        return float(self.times[0])

    @property
    def t_end(self):
        return float(self.times[-1])

    def interpolate(self, name, t):
        """Linear interpolation of one series at time ``t`` inside the grid."""
        if not self.t_start <= t <= self.t_end:
            raise DataError(
                f"time {t} outside simulated range [{self.t_start}, {self.t_end}]"
            )
        return float(np.interp(t, self.times, self[name]))

    def __repr__(self):
        return (
            f"Trajectory({len(self.names)} series, {self.times.size} points, "
            f"t=[{self.t_start:g}, {self.t_end:g}]{', failed' if self.failed else ''})"
        )
