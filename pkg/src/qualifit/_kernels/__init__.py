"""Hot numeric kernels.

Two interchangeable implementations live here: ``_jit`` (numba, loop
style) and ``_numpy`` (vectorized numpy). The numba path is used when
numba imports cleanly and ``QUALIFIT_DISABLE_NUMBA`` is unset or ``0``.
Both modules can always be imported directly, which is what the tests and
the benchmark do.
"""

import os

from . import _numpy


def _numba_requested():
    flag = os.environ.get("QUALIFIT_DISABLE_NUMBA", "").strip().lower()
    return flag in ("", "0", "false", "no")


BACKEND = "numpy"
if _numba_requested():
    try:
        from . import _jit as _impl

        BACKEND = "numba"
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _impl = _numpy
else:
    _impl = _numpy

qual_terms = _impl.qual_terms
qual_nll = _impl.qual_nll
chi2_nll = _impl.chi2_nll
reduce_bindings = _impl.reduce_bindings
biphasic_secondary = _impl.biphasic_secondary
rk4_fixed = _impl.rk4_fixed
maybe_jit = _impl.maybe_jit

MODE_AT = 0
MODE_MAX = 1
MODE_MIN = 2

__all__ = [
    "BACKEND",
    "MODE_AT",
    "MODE_MAX",
    "MODE_MIN",
    "biphasic_secondary",
    "chi2_nll",
    "maybe_jit",
    "qual_nll",
    "qual_terms",
    "reduce_bindings",
    "rk4_fixed",
]
