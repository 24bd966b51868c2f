"""Random-walk Metropolis-Hastings with parallel tempering.

Chains live in fixed temperature slots ``(k, j)``: ``k`` indexes the
temperature ladder (``k = 0`` is T = 1) and ``j`` the replica column. A
swap exchanges the states held by slots ``(k, j)`` and ``(k + 1, j)``; each
slot keeps its own random stream, and swap decisions are drawn from a
dedicated stream in a fixed pair order, so results do not depend on how
many threads advance the chains.
"""

import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError, SimulationError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Prior:
    """Uniform or log-uniform prior on one parameter.

    Log-uniform parameters are sampled as ``log10`` values, where the prior
    is flat.
    """

    name: str
    kind: str
    lo: float
    hi: float

    def __post_init__(self):
        if self.kind not in ("uniform", "loguniform"):
            raise ConfigError(f"prior for {self.name}: unknown kind {self.kind!r}")
        if not self.lo < self.hi:
            raise ConfigError(f"prior for {self.name}: lo must be below hi")
        if self.kind == "loguniform" and self.lo <= 0:
            raise ConfigError(f"prior for {self.name}: log-uniform bounds must be positive")

    @classmethod
    def parse(cls, name, text):
        """``"loguniform 0.1 10"`` or ``"uniform 0 5"``."""
        parts = text.split()
        if len(parts) != 3:
            raise ConfigError(f"prior for {name}: expected '<kind> <lo> <hi>', got {text!r}")
        try:
            lo, hi = float(parts[1]), float(parts[2])
        except ValueError:
            raise ConfigError(f"prior for {name}: bad bounds in {text!r}") from None
        kind = parts[0].lower().replace("-", "").replace("_", "")
        return cls(name, kind, lo, hi)

    @property
    def log(self):
        return self.kind == "loguniform"

    @property
    def bounds(self):
        """Bounds in sampling space."""
        if self.log:
            return math.log10(self.lo), math.log10(self.hi)
        return self.lo, self.hi

    def to_sampling(self, value):
        return np.log10(value) if self.log else np.asarray(value, dtype=float)

    def to_natural(self, x):
        return 10.0 ** x if self.log else x

    def cdf(self, value):
        """Prior CDF in natural units."""
        a, b = self.bounds
        return np.clip((self.to_sampling(value) - a) / (b - a), 0.0, 1.0)

    def __str__(self):
        return f"{self.kind} {self.lo!r} {self.hi!r}"


class Target:
    """Tempered posterior target over the sampling space of ``priors``.

    ``nll`` maps a natural-unit parameter vector to a negative log
    likelihood. The prior is flat in sampling space, so the energy equals the
    NLL inside the bounds and is infinite outside.
    """

    def __init__(self, priors, nll):
        self.priors = list(priors)
        self.nll_fn = nll
        self.param_names = tuple(p.name for p in self.priors)
        b = np.array([p.bounds for p in self.priors], dtype=float).reshape(-1, 2)
        self.lo = b[:, 0]
        self.hi = b[:, 1]
        self.log_mask = np.array([p.log for p in self.priors], dtype=bool)

    @property
    def dim(self):
        return len(self.priors)

    def natural(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(self.log_mask, 10.0 ** x, x)

    def sampling(self, theta):
        theta = np.asarray(theta, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.log_mask, np.log10(theta), theta)

    def log_prior(self, x):
        if np.all(x >= self.lo) and np.all(x <= self.hi):
            return 0.0
        return -math.inf

    def nll(self, x):
        try:
            value = float(self.nll_fn(self.natural(x)))
        except (FloatingPointError, ArithmeticError) as exc:
            log.debug("likelihood evaluation failed at %s: %s", x, exc)
            return math.inf
        return math.inf if math.isnan(value) else value

    def draw(self, rng):
        return self.lo + (self.hi - self.lo) * rng.random(self.dim)


@dataclass
class SamplerConfig:
    n_temperatures: int = 9
    chains_per_temperature: int = 4
    n_steps: int = 50_000
    burn_in: int = 10_000
    swap_interval: int = 10
    t_max: float = 100.0
    ladder: tuple = None
    proposal_scale: object = 0.1
    seed: int = 0
    thin: int = 1
    n_threads: int = 1

    def validate(self):
        if self.n_temperatures < 1 or self.chains_per_temperature < 1:
            raise ConfigError("need at least one temperature and one chain per temperature")
        if self.n_steps < 1 or not 0 <= self.burn_in < self.n_steps:
            raise ConfigError("burn_in must be non-negative and below n_steps")
        if self.swap_interval < 1 or self.thin < 1 or self.n_threads < 1:
            raise ConfigError("swap_interval, thin and n_threads must be positive")
        temps = self.temperatures()
        if temps[0] != 1.0 or np.any(np.diff(temps) < 0):
            raise ConfigError("temperature ladder must start at 1 and be non-decreasing")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        return self

    def temperatures(self):
        if self.ladder is not None:
            temps = np.asarray(self.ladder, dtype=float)
            if temps.size != self.n_temperatures:
                raise ConfigError(
                    f"ladder has {temps.size} temperatures, n_temperatures={self.n_temperatures}"
                )
            return temps
        if self.n_temperatures == 1:
            return np.ones(1)
        k = np.arange(self.n_temperatures) / (self.n_temperatures - 1)
        return self.t_max ** k

    def scales(self, dim):
        s = np.broadcast_to(np.asarray(self.proposal_scale, dtype=float), (dim,)).copy()
        if np.any(s <= 0):
            raise ConfigError("proposal scales must be positive")
        return s

    @property
    def n_chains(self):
        return self.n_temperatures * self.chains_per_temperature

    @property
    def recorded_steps(self):
        return (self.n_steps - self.burn_in) // self.thin

    @property
    def n_saved(self):
        return self.recorded_steps * self.chains_per_temperature

    def describe(self):
        return (
            f"{self.n_temperatures} temperatures x {self.chains_per_temperature} chains "
            f"= {self.n_chains} chains; {self.n_steps} steps, burn-in {self.burn_in}, "
            f"{self.n_saved} saved samples"
        )


@dataclass
class ChainState:
    x: np.ndarray
    nll: float
    energy: float
    temp_index: int
    rng: np.random.Generator = field(repr=False)
    accepted: int = 0
    proposed: int = 0


def mh_accept_prob(delta_e, temperature=1.0):
    """``min(1, exp(-delta_e / T))``; infinite or undefined increases give 0."""
    if delta_e <= 0:
        return 1.0
    if math.isnan(delta_e) or math.isinf(delta_e):
        return 0.0
    return math.exp(-delta_e / temperature)


def swap_accept_prob(e_a, e_b, t_a, t_b):
    """``min(1, exp((E_a - E_b) * (1/T_a - 1/T_b)))``."""
    if t_a == t_b or e_a == e_b:
        return 1.0
    expo = (e_a - e_b) * (1.0 / t_a - 1.0 / t_b)
    if math.isnan(expo):
        return 0.0
    return 1.0 if expo >= 0 else math.exp(expo)


def _update(x, nll, energy, rng, target, scales, temperature):
    prop = x + scales * rng.standard_normal(x.shape[0])
    u = rng.random()
    lp = target.log_prior(prop)
    if lp == -math.inf:
        return x, nll, energy, False
    new_nll = target.nll(prop)
    new_energy = new_nll - lp
    if u < mh_accept_prob(new_energy - energy, temperature):
        return prop, new_nll, new_energy, True
    return x, nll, energy, False


def mh_step(state, target, scales, temperature=1.0):
    """One random-walk Metropolis-Hastings update of ``state`` (returns a new state)."""
    x, nll, energy, ok = _update(state.x, state.nll, state.energy, state.rng,
                                 target, np.asarray(scales, dtype=float), temperature)
    return ChainState(x, nll, energy, state.temp_index, state.rng,
                      state.accepted + ok, state.proposed + 1)


def swap_attempt(state_a, state_b, t_a, t_b, u):
    """Exchange the positions of two chains with the replica-exchange rule.

    ``u`` is a uniform draw from the swap stream. On acceptance the two
    states trade their parameter vectors and energies; each keeps its own
    temperature index and random stream.
    """
    if u < swap_accept_prob(state_a.energy, state_b.energy, t_a, t_b):
        state_a.x, state_b.x = state_b.x, state_a.x
        state_a.nll, state_b.nll = state_b.nll, state_a.nll
        state_a.energy, state_b.energy = state_b.energy, state_a.energy
        return True
    return False


@dataclass(eq=False)
class PosteriorSamples:
    """Temperature-1 samples after burn-in, in natural parameter units."""

    param_names: tuple
    chain: np.ndarray
    step: np.ndarray
    nll: np.ndarray
    theta: np.ndarray
    stats: dict = field(default_factory=dict, compare=False, repr=False)

    def __len__(self):
        return self.chain.size

    def __eq__(self, other):
        if not isinstance(other, PosteriorSamples):
            return NotImplemented
        return (self.param_names == other.param_names
                and all(np.array_equal(getattr(self, f), getattr(other, f))
                        for f in ("chain", "step", "nll", "theta")))

    def column(self, name):
        return self.theta[:, self.param_names.index(name)]

    def to_csv(self, path=None):
        buf = io.StringIO()
        buf.write(",".join(("chain", "step", "nll", *self.param_names)) + "\n")
        for c, s, e, row in zip(self.chain, self.step, self.nll, self.theta):
            vals = ",".join("%.17g" % v for v in row)
            buf.write(f"{int(c)},{int(s)},{'%.17g' % e},{vals}\n")
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, path_or_text):
        text = path_or_text
        if "\n" not in str(path_or_text):
            with open(path_or_text) as fh:
                text = fh.read()
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise DataError("empty sample file")
        header = [h.strip() for h in lines[0].split(",")]
        if header[:3] != ["chain", "step", "nll"]:
            raise DataError("sample file header must start with chain,step,nll")
        try:
            data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]], dtype=float)
        except ValueError as exc:
            raise DataError(f"bad sample file: {exc}") from None
        data = data.reshape(-1, len(header))
        return cls(tuple(header[3:]), data[:, 0].astype(np.int64), data[:, 1].astype(np.int64),
                   data[:, 2], data[:, 3:])

    @classmethod
    def concat(cls, parts):
        parts = list(parts)
        names = parts[0].param_names
        if any(p.param_names != names for p in parts):
            raise DataError("cannot merge sample sets with different parameters")
        return cls(names,
                   np.concatenate([p.chain for p in parts]),
                   np.concatenate([p.step for p in parts]),
                   np.concatenate([p.nll for p in parts]),
                   np.concatenate([p.theta for p in parts]))


def _init_chains(config, target, temps):
    seqs = np.random.SeedSequence(int(config.seed)).spawn(config.n_chains + 1)
    chains = []
    for k in range(config.n_temperatures):
        row = []
        for j in range(config.chains_per_temperature):
            rng = np.random.default_rng(seqs[k * config.chains_per_temperature + j])
            for _ in range(1000):
                x = target.draw(rng)
                nll = target.nll(x)
                if math.isfinite(nll):
                    break
            else:
                raise SimulationError(
                    "could not find a starting point with finite likelihood in 1000 prior draws"
                )
            row.append(ChainState(x, nll, nll - target.log_prior(x), k, rng))
        chains.append(row)
    swap_rng = np.random.default_rng(seqs[-1])
    return chains, swap_rng


def _swap_sweep(chains, temps, swap_rng, parity, counts):
    for k in range(parity, len(chains) - 1, 2):
        for j in range(len(chains[k])):
            u = swap_rng.random()
            counts[k, 1] += 1
            if swap_attempt(chains[k][j], chains[k + 1][j], temps[k], temps[k + 1], u):
                counts[k, 0] += 1


def _run_segments(config, target, temps_at, chains, swap_rng, on_segment):
    """Advance every chain between swap barriers; returns swap counts."""
    scales = config.scales(target.dim)
    counts = np.zeros((max(len(chains) - 1, 1), 2), dtype=np.int64)
    flat = [c for row in chains for c in row]
    pool = ThreadPoolExecutor(config.n_threads) if config.n_threads > 1 else None
    step, sweep = 0, 0
    try:
        while step < config.n_steps:
            length = min(config.swap_interval, config.n_steps - step)
            temps = temps_at(step)

            def advance(state, start=step, length=length, temps=temps):
                x, nll, energy, rng = state.x, state.nll, state.energy, state.rng
                t = temps[state.temp_index]
                trace = []
                acc = 0
                for i in range(length):
                    x, nll, energy, ok = _update(x, nll, energy, rng, target, scales, t)
                    acc += ok
                    trace.append((start + i + 1, x, nll))
                state.x, state.nll, state.energy = x, nll, energy
                state.accepted += acc
                state.proposed += length
                return trace

            traces = list(pool.map(advance, flat)) if pool else [advance(c) for c in flat]
            step += length
            on_segment(chains, traces, temps)
            if step % config.swap_interval == 0 and len(chains) > 1:
                _swap_sweep(chains, temps, swap_rng, sweep % 2, counts)
                sweep += 1
    finally:
        if pool:
            pool.shutdown()
    return counts


def pt_run(config, target):
    """Parallel-tempering run; returns the recorded temperature-1 samples."""
    config.validate()
    temps = config.temperatures()
    chains, swap_rng = _init_chains(config, target, temps)
    n_cols = config.chains_per_temperature
    n_rec = config.recorded_steps
    chain_ids = np.empty(n_rec * n_cols, dtype=np.int64)
    steps = np.empty(n_rec * n_cols, dtype=np.int64)
    nlls = np.empty(n_rec * n_cols)
    xs = np.empty((n_rec * n_cols, target.dim))

    def record(chains, traces, _temps):
        for j in range(n_cols):
            for s, x, nll in traces[j]:
                if s <= config.burn_in or (s - config.burn_in) % config.thin:
                    continue
                r = ((s - config.burn_in) // config.thin - 1) * n_cols + j
                chain_ids[r], steps[r], nlls[r] = j, s, nll
                xs[r] = x

    counts = _run_segments(config, target, lambda step: temps, chains, swap_rng, record)
    stats = {
        "acceptance": [
            float(np.mean([c.accepted / max(c.proposed, 1) for c in row])) for row in chains
        ],
        "swap_acceptance": [float(a / b) if b else float("nan") for a, b in counts],
        "temperatures": temps.tolist(),
    }
    log.info("PT run finished: acceptance by temperature %s", stats["acceptance"])
    return PosteriorSamples(target.param_names, chain_ids, steps, nlls,
                            target.natural(xs), stats)


@dataclass
class FitResult:
    param_names: tuple
    best_theta: np.ndarray
    best_nll: float
    initial_nll: float
    trace: np.ndarray = field(repr=False)

    def as_dict(self):
        return dict(zip(self.param_names, map(float, self.best_theta)))


def anneal_run(config, target, t_final=1e-4, start=None):
    """Minimize the energy with the tempering machinery and a cooling schedule.

    Every ladder temperature is multiplied by ``t_final ** (step / n_steps)``,
    so the whole ladder cools geometrically towards zero. The best state ever
    visited by any chain is returned. ``start`` (natural units) seeds every
    chain when given.
    """
    config.validate()
    base = config.temperatures()
    chains, swap_rng = _init_chains(config, target, base)
    if start is not None:
        x0 = target.sampling(start)
        if target.log_prior(x0) == -math.inf:
            raise ConfigError("fit start point lies outside the prior bounds")
        nll0 = target.nll(x0)
        for row in chains:
            for c in row:
                c.x, c.nll, c.energy = x0.copy(), nll0, nll0
    init = min((c for row in chains for c in row), key=lambda c: c.energy)
    best = {"x": init.x.copy(), "nll": init.nll, "energy": init.energy}
    initial_nll = init.nll
    trace = []

    def watch(chains, traces, temps):
        for tr in traces:
            for _s, x, nll in tr:
                if nll < best["nll"]:
                    best["x"], best["nll"] = x.copy(), nll
        trace.append((len(trace), best["nll"], temps[0]))

    _run_segments(config, target,
                  lambda step: base * t_final ** (step / config.n_steps),
                  chains, swap_rng, watch)
    return FitResult(target.param_names, target.natural(best["x"]), best["nll"],
                     initial_nll, np.array(trace))
