"""Posterior summaries: marginal statistics, equal-tailed intervals, histograms."""

import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import DataError


@dataclass
class MarginalSummary:
    param: str
    mean: float
    median: float
    lo: float
    hi: float
    level: float
    bin_edges: np.ndarray
    counts: np.ndarray

    @property
    def width(self):
        return self.hi - self.lo


def _as_matrix(samples, names=None):
    if hasattr(samples, "theta"):
        return np.asarray(samples.theta, dtype=float), tuple(samples.param_names)
    data = np.asarray(samples, dtype=float)
    if data.ndim == 1:
        data = data[:, None]
    names = tuple(names) if names is not None else tuple(f"p{i}" for i in range(data.shape[1]))
    return data, names


def summarize(samples, level=0.95, names=None, bins=30, transform=None):
    """Per-parameter summaries.

    ``samples`` is a :class:`~qualifit.sampler.PosteriorSamples` or an
    ``(n, p)`` array. Interval endpoints are the ``(1 - level)/2`` and
    ``(1 + level)/2`` quantiles with linear interpolation between order
    statistics. ``transform`` maps a parameter name to a callable applied to
    its column first (e.g. ``np.log10``). Results do not depend on row order.
    """
    if not 0 < level < 1:
        raise ValueError("level must lie in (0, 1)")
    data, names = _as_matrix(samples, names)
    if data.shape[0] == 0:
        raise DataError("no samples to summarize")
    out = []
    for i, name in enumerate(names):
        col = np.sort(data[:, i])
        if transform and name in transform:
            col = np.sort(transform[name](col))
        q_lo, q_med, q_hi = np.quantile(col, [(1 - level) / 2, 0.5, (1 + level) / 2])
        if col[0] == col[-1]:
            edges = np.array([col[0] - 0.5, col[0] + 0.5])
            counts = np.array([col.size])
        else:
            counts, edges = np.histogram(col, bins=bins)
        out.append(MarginalSummary(name, math.fsum(col) / col.size, float(q_med),
                                   float(q_lo), float(q_hi), level, edges, counts))
    return out


def pairwise_correlation(samples, names=None):
    """Pearson correlation matrix (symmetric, unit diagonal)."""
    data, _ = _as_matrix(samples, names)
    if data.shape[0] < 2:
        raise DataError("need at least two samples for correlations")
    r = np.corrcoef(data, rowvar=False)
    r = np.atleast_2d(r)
    r = 0.5 * (r + r.T)
    np.fill_diagonal(r, 1.0)
    return r


@dataclass
class WidthReport:
    labels: tuple
    params: tuple
    widths: dict  # (label, param) -> width

    def non_increasing(self, param, rel_tol=0.0):
        """True when widths never grow by more than ``rel_tol`` along ``labels``."""
        w = [self.widths[(lab, param)] for lab in self.labels]
        return all(b <= a * (1.0 + rel_tol) for a, b in zip(w, w[1:]))

    def ordered(self, param):
        """Labels sorted from narrowest to widest for ``param``."""
        return sorted(self.labels, key=lambda lab: self.widths[(lab, param)])

    def table(self):
        lines = ["param," + ",".join(self.labels) + ",non_increasing"]
        for p in self.params:
            cells = ",".join("%.6g" % self.widths[(lab, p)] for lab in self.labels)
            lines.append(f"{p},{cells},{str(self.non_increasing(p)).lower()}")
        return "\n".join(lines) + "\n"


def compare_widths(summaries_by_label):
    """Interval widths per dataset label (insertion order kept)."""
    labels = tuple(summaries_by_label)
    if not labels:
        raise DataError("nothing to compare")
    params = tuple(s.param for s in summaries_by_label[labels[0]])
    widths = {}
    for lab in labels:
        got = tuple(s.param for s in summaries_by_label[lab])
        if got != params:
            raise DataError(f"dataset {lab!r} has parameters {got}, expected {params}")
        for s in summaries_by_label[lab]:
            widths[(lab, s.param)] = s.width
    return WidthReport(labels, params, widths)


def format_summary_csv(summaries):
    lines = ["param,mean,median,lo,hi,width"]
    for s in summaries:
        lines.append(",".join([s.param] + ["%.17g" % v for v in
                                           (s.mean, s.median, s.lo, s.hi, s.width)]))
    return "\n".join(lines) + "\n"


def format_histogram(summary):
    lines = ["bin_lo,bin_hi,count"]
    for a, b, c in zip(summary.bin_edges[:-1], summary.bin_edges[1:], summary.counts):
        lines.append("%.17g,%.17g,%d" % (a, b, c))
    return "\n".join(lines) + "\n"


def format_trace(samples):
    """Whitespace-separated trace columns: chain step nll params..."""
    lines = ["# chain step nll " + " ".join(samples.param_names)]
    order = np.lexsort((samples.step, samples.chain))
    for r in order:
        vals = " ".join("%.17g" % v for v in samples.theta[r])
        lines.append(f"{samples.chain[r]} {samples.step[r]} {'%.17g' % samples.nll[r]} {vals}")
    return "\n".join(lines) + "\n"


def plot_data_export(summaries, out_dir, samples=None):
    """Write ``<param>.hist`` files (and ``trace.dat`` when samples are given)."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for s in summaries:
        path = os.path.join(out_dir, f"{s.param}.hist")
        with open(path, "w") as fh:
            fh.write(format_histogram(s))
        written.append(path)
    if samples is not None:
        path = os.path.join(out_dir, "trace.dat")
        with open(path, "w") as fh:
            fh.write(format_trace(samples))
        written.append(path)
    return written


def split_half_report(samples, level=0.95, transform=None):
    """Relative width difference between the first and second half of each chain."""
    mid = {c: np.median(samples.step[samples.chain == c]) for c in np.unique(samples.chain)}
    first = np.array([s <= mid[c] for c, s in zip(samples.chain, samples.step)])
    a = summarize(samples.theta[first], level, samples.param_names, transform=transform)
    b = summarize(samples.theta[~first], level, samples.param_names, transform=transform)
    return {x.param: abs(x.width - y.width) / max(x.width, y.width, 1e-300)
            for x, y in zip(a, b)}
