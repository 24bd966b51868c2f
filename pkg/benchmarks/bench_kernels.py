"""Compare the numba and numpy kernel backends.

Runs each kernel on representative inputs, checks that both backends agree,
and reports the median wall time per call. The end-to-end section times one
full objective evaluation of the biphasic toy problem in a subprocess per
backend, because the backend is fixed at import time.

    python3 benchmarks/bench_kernels.py [--repeat 200] [--json out.json]
"""

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from qualifit._kernels import _jit, _numpy

MODES = ("numba", "numpy")


def _inputs(n_obs, rng):
    pred = rng.normal(0.0, 1.0, n_obs)
    sigma = rng.uniform(0.05, 1.0, n_obs)
    c = np.zeros(n_obs)
    ep = np.full(n_obs, 0.01)
    em = np.full(n_obs, 0.02)
    return pred, sigma, c, ep, em


def _reduce_inputs(n_obs, n_times, rng):
    values = rng.normal(size=(6, n_times))
    lhs_row = rng.integers(0, 6, n_obs)
    rhs_row = np.full(n_obs, -1)
    lhs_const = np.zeros(n_obs)
    rhs_const = rng.normal(size=n_obs)
    sign = np.where(rng.random(n_obs) < 0.5, 1.0, -1.0)
    mode = rng.integers(0, 3, n_obs)
    i0 = rng.integers(0, n_times - 1, n_obs)
    w = rng.random(n_obs)
    lo = rng.integers(0, n_times // 2, n_obs)
    hi = lo + n_times // 2
    return (values, lhs_row, lhs_const, rhs_row, rhs_const, sign, mode, i0, w, lo, hi)


def _decay(t, x, p):
    out = np.empty_like(x)
    out[0] = -p[0] * x[0]
    out[1] = p[0] * x[0] - p[1] * x[1]
    return out


def cases(n_obs=64, rng=None):
    rng = rng or np.random.default_rng(0)
    q = _inputs(n_obs, rng)
    y = rng.normal(size=n_obs)
    red = _reduce_inputs(n_obs, 201, rng)
    delays = np.geomspace(0.5, 64, n_obs)
    grid = np.linspace(0.0, 10.0, 101)
    x0 = np.array([1.0, 0.0])
    params = np.array([0.7, 0.3])
    n_sub = np.full(grid.size - 1, 10, dtype=np.int64)
    rhs = {_jit: _jit.maybe_jit(_decay), _numpy: _numpy.maybe_jit(_decay)}
    return {
        "qual_nll": lambda k: k.qual_nll(*q),
        "chi2_nll": lambda k: k.chi2_nll(y, q[0], q[1]),
        "reduce_bindings": lambda k: k.reduce_bindings(*red),
        "biphasic_secondary": lambda k: k.biphasic_secondary(1.0, 0.6, 30.0, 1.1, 8.0, delays),
        "rk4_fixed": lambda k: k.rk4_fixed(rhs[k], x0, grid, n_sub, params),
    }


def _close(a, b):
    if isinstance(a, tuple):
        return all(_close(x, y) for x, y in zip(a, b))
    return np.allclose(a, b, rtol=1e-12, atol=1e-12, equal_nan=True)


def bench_kernels(repeat):
    rows = []
    for name, fn in cases().items():
        ref, fast = fn(_numpy), fn(_jit)  # first call also triggers compilation
        if not _close(ref, fast):
            raise SystemExit(f"{name}: backends disagree")
        row = {"kernel": name}
        for label, mod in (("numba", _jit), ("numpy", _numpy)):
            times = timeit.repeat(lambda: fn(mod), number=1, repeat=repeat)
            row[label] = float(np.median(times))
        rows.append(row)
    return rows


_E2E = r"""
import timeit, numpy as np
from qualifit.models import BiphasicToyModel, SimProtocol
from qualifit.synthetic import SyntheticSpec, generate, nested_delays
from qualifit.lang import load_constraints
from qualifit.problem import Problem
from qualifit.sampler import Prior
delays = tuple(nested_delays(64))
spec = SyntheticSpec(model="biphasic", truth=BiphasicToyModel.defaults, delays=delays, mode="two-cat")
qual, pen, _ = load_constraints(generate(spec).text)
priors = [Prior.parse(n, "loguniform 0.1 100") for n in ("A", "tau_b", "d", "tau_d")]
prob = Problem(BiphasicToyModel(), SimProtocol(delays=delays), priors, (), qual).check()
x = np.array([1.0, 30.0, 1.1, 8.0])
prob(x)
print(np.median(timeit.repeat(lambda: prob(x), number=1, repeat=REPEAT)))
"""


def bench_end_to_end(repeat):
    out = {}
    for label in MODES:
        env = dict(os.environ, QUALIFIT_DISABLE_NUMBA="0" if label == "numba" else "1")
        res = subprocess.run([sys.executable, "-c", _E2E.replace("REPEAT", str(repeat))],
                             env=env, capture_output=True, text=True, check=True)
        out[label] = float(res.stdout.strip().splitlines()[-1])
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description="numba vs numpy kernel timings")
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--json", metavar="PATH")
    ap.add_argument("--skip-e2e", action="store_true")
    args = ap.parse_args(argv)

    rows = bench_kernels(args.repeat)
    print(f"{'kernel':<20}{'numba (us)':>12}{'numpy (us)':>12}{'speedup':>10}")
    for r in rows:
        print(f"{r['kernel']:<20}{r['numba'] * 1e6:>12.2f}{r['numpy'] * 1e6:>12.2f}"
              f"{r['numpy'] / r['numba']:>10.1f}")
    result = {"kernels": rows}
    if not args.skip_e2e:
        e2e = bench_end_to_end(args.repeat)
        result["objective"] = e2e
        print(f"{'objective (64 obs)':<20}{e2e['numba'] * 1e6:>12.2f}{e2e['numpy'] * 1e6:>12.2f}"
              f"{e2e['numpy'] / e2e['numba']:>10.1f}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(result, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
