"""Synthetic datasets from a ground-truth parameterization, plus the explicit
sampling models that define what a qualitative report means."""

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError
from .models import SimProtocol, get_model, secondary_name
from .observations import QuantitativePoint

MODES = ("quantitative", "two-cat", "three-cat")

LOWER, MIDDLE, UPPER = 0, 1, 2


def nested_delays(n, n_max=64, t_min=0.5, t_max=64.0, decimals=4):
    """``n`` geometrically spaced delays ending at ``t_max``.

    All sizes are subsets of the ``n_max`` grid (every ``n_max // n``-th point
    counted back from ``t_max``), so smaller datasets are nested in larger ones.
    """
    if n < 1 or n_max % n:
        raise ConfigError(f"dataset size {n} must divide {n_max}")
    full = np.round(np.geomspace(t_min, t_max, n_max), decimals)
    return tuple(float(t) for t in full[::-1][:: n_max // n][::-1])


def report_sampling_model(prediction, sigma, threshold, eps_plus, eps_minus, n, rng):
    """Simulate ``n`` reports of a one-sided observation ``y < threshold``.

    With probability ``eps_plus`` the observation is reported satisfied, with
    probability ``eps_minus`` violated, and otherwise ``y`` is drawn from
    ``N(prediction, sigma)`` and compared against the threshold. Returns a
    boolean array (True = ``y < threshold`` reported).
    """
    u = rng.random(n)
    y = prediction + sigma * rng.standard_normal(n)
    return np.where(u < eps_plus, True,
                    np.where(u < eps_plus + eps_minus, False, y < threshold))


def three_category_reports(prediction, sigma, c_low, c_high, eps, n, rng):
    """Simulate ``n`` three-category reports with base discrepancy ``eps`` per outcome.

    Returns codes ``LOWER``/``MIDDLE``/``UPPER``.
    """
    if not 0 <= 3 * eps < 1:
        raise ValueError("3 * eps must lie in [0, 1)")
    u = rng.random(n)
    y = prediction + sigma * rng.standard_normal(n)
    sampled = np.where(y < c_low, LOWER, np.where(y < c_high, MIDDLE, UPPER))
    forced = np.minimum((u / eps).astype(np.int64), 3) if eps > 0 else np.full(n, 3)
    return np.where(forced < 3, forced, sampled)


@dataclass
class SyntheticSpec:
    """What to generate.

    ``noise_sigma`` is the per-output noise. The tolerance written into
    qualitative statements is the standard deviation of the difference
    ``p1 - p3`` under ``combine``: ``"sum"`` (``2 * noise_sigma``) or
    ``"quadrature"`` (``sqrt(2) * noise_sigma``).
    """

    model: str = "biphasic"
    truth: dict = None
    delays: tuple = field(default_factory=lambda: nested_delays(64))
    noise_sigma: float = 0.025
    mode: str = "two-cat"
    threshold: float = None
    combine: str = "sum"
    confidence: float = 0.98
    pmin: float = 0.01
    pmax: float = 0.98
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown generate mode {self.mode!r}; choose from {MODES}")
        if self.combine not in ("sum", "quadrature"):
            raise ConfigError("combine must be 'sum' or 'quadrature'")
        if self.noise_sigma < 0:
            raise ConfigError("noise_sigma must be non-negative")
        if self.threshold is not None and self.threshold <= 0:
            raise ConfigError("three-category threshold must be positive")
        if self.mode == "three-cat" and not self.category_threshold > 0:
            raise ConfigError("three-category data needs a positive threshold "
                              "(set one explicitly when noise_sigma is 0)")
        if self.model != "biphasic":
            raise ConfigError("synthetic generation supports the biphasic model")

    @property
    def diff_sigma(self):
        factor = 2.0 if self.combine == "sum" else math.sqrt(2.0)
        return factor * self.noise_sigma

    @property
    def category_threshold(self):
        return self.threshold if self.threshold is not None else 3.0 * self.diff_sigma

    def protocol(self):
        return SimProtocol(delays=tuple(self.delays), threshold=self.category_threshold)

    def truth_theta(self):
        model = get_model(self.model)
        truth = dict(model.defaults)
        truth.update(self.truth or {})
        return model.theta_array(truth)


def _delay_key(t):
    return int(round(float(t) * 10_000))


def noisy_responses(spec):
    """Noise-corrupted ``(p1, p3)`` pairs.

    Each delay has its own stream keyed by ``(seed, delay)``, so the draw at
    a given delay does not depend on which other delays are in the dataset
    and nested delay sets give nested datasets.
    """
    traj = get_model(spec.model).simulate(spec.truth_theta(), spec.protocol())
    if traj.failed:
        raise DataError("ground-truth simulation failed")
    noise = np.array([np.random.default_rng([spec.seed, _delay_key(t)]).standard_normal(2)
                      for t in spec.delays]).reshape(-1, 2)
    return traj["p1"] + spec.noise_sigma * noise[:, 0], traj["p3"] + spec.noise_sigma * noise[:, 1]


def categorize(diff, threshold):
    """Three-way category of ``p1 - p3`` relative to ``+/- threshold``."""
    diff = np.asarray(diff)
    return np.where(diff < -threshold, LOWER, np.where(diff > threshold, UPPER, MIDDLE))


def _fmt(x):
    return repr(float(x))


@dataclass
class SyntheticDataset:
    spec: SyntheticSpec
    constraints: str = ""
    quantitative: str = ""
    categories: np.ndarray = None

    @property
    def filename(self):
        return "data.csv" if self.spec.mode == "quantitative" else "data.con"

    @property
    def text(self):
        return self.quantitative if self.spec.mode == "quantitative" else self.constraints


def generate(spec):
    """Draw one synthetic dataset for ``spec`` (deterministic given ``spec.seed``)."""
    p1, p3 = noisy_responses(spec)
    delays = spec.delays
    if spec.mode == "quantitative":
        buf = io.StringIO()
        buf.write("observable,delay,value,sigma\n")
        for t, a, b in zip(delays, p1, p3):
            buf.write(f"p1,{_fmt(t)},{'%.17g' % a},{_fmt(spec.noise_sigma)}\n")
            buf.write(f"p3,{_fmt(t)},{'%.17g' % b},{_fmt(spec.noise_sigma)}\n")
        return SyntheticDataset(spec, quantitative=buf.getvalue())

    tol = _fmt(spec.diff_sigma)
    lines = [f"# {spec.mode} synthetic data, seed {spec.seed}, "
             f"noise {spec.noise_sigma!r} per output ({spec.combine} -> tolerance {tol})"]
    if spec.mode == "two-cat":
        qual = f"confidence {_fmt(spec.confidence)} tolerance {tol}"
        for t, a, b in zip(delays, p1, p3):
            op = ">" if a > b else "<"
            lines.append(f"p1 {op} {secondary_name(t)} at time={_fmt(t)} {qual}")
        cats = np.where(p1 > p3, UPPER, LOWER)
    else:
        qual = f"pmin {_fmt(spec.pmin)} pmax {_fmt(spec.pmax)} tolerance {tol}"
        cats = categorize(p1 - p3, spec.category_threshold)
        for t, cat in zip(delays, cats):
            name, at = secondary_name(t), f"at time={_fmt(t)}"
            if cat == UPPER:
                lines.append(f"degrLow > {name} {at} {qual}")
            elif cat == LOWER:
                lines.append(f"degrHigh < {name} {at} {qual}")
            else:
                lines.append(f"degrHigh > {name} {at} {qual}")
                lines.append(f"degrLow < {name} {at} {qual}")
    return SyntheticDataset(spec, constraints="\n".join(lines) + "\n", categories=cats)


def read_quantitative_csv(path_or_text):
    """Quantitative data file ``observable,delay,value,sigma`` -> points."""
    text = path_or_text
    if "\n" not in str(path_or_text):
        with open(path_or_text, newline="") as fh:
            text = fh.read()
    reader = csv.DictReader(io.StringIO(text))
    expected = ["observable", "delay", "value", "sigma"]
    if [f.strip() for f in (reader.fieldnames or [])] != expected:
        raise DataError(f"quantitative data header must be {','.join(expected)}")
    points = []
    for lineno, row in enumerate(reader, start=2):
        try:
            points.append(QuantitativePoint(row["observable"].strip(), float(row["delay"]),
                                            float(row["value"]), float(row["sigma"])))
        except (TypeError, ValueError) as exc:
            raise DataError(f"quantitative data line {lineno}: {exc}") from None
    return points
