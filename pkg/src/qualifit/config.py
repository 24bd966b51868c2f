"""Run configuration: ``[section]`` headers with ``key = value`` lines.

Example::

    [model]
    name = biphasic
    params = truth.params        # optional fixed/default values

    [protocol]
    delays = nested 64           # or an explicit comma-separated list
    threshold = 0.3

    [data]
    constraints = data.con
    quantitative = data.csv

    [priors]
    A = loguniform 0.1 10
    b = loguniform 0.06 6

    [sampler]
    n_temperatures = 9
    chains_per_temperature = 4
    n_steps = 50000
    burn_in = 10000
    proposal_scale = 0.1
    seed = 1

Relative paths are resolved against the directory holding the config file.
"""

import configparser
import os
from dataclasses import dataclass, field, fields

from .errors import ConfigError
from .models import SimProtocol, get_model, read_param_file
from .sampler import Prior, SamplerConfig
from .synthetic import SyntheticSpec, nested_delays


def _floats(text, what):
    try:
        return tuple(float(v) for v in text.replace(";", ",").split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"{what}: expected comma-separated numbers, got {text!r}") from None


def parse_delays(text):
    parts = text.split()
    if parts and parts[0] == "nested":
        if len(parts) != 2:
            raise ConfigError("delays: use 'nested N'")
        return nested_delays(int(parts[1]))
    return _floats(text, "delays")


@dataclass
class RunConfig:
    model: str = "biphasic"
    params: dict = field(default_factory=dict)
    protocol: SimProtocol = field(default_factory=SimProtocol)
    quantitative: str = None
    constraints: str = None
    priors: list = field(default_factory=list)
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    generate: dict = field(default_factory=dict)
    objective: str = "likelihood"
    t_final: float = 1e-4
    fit_steps: int = None
    out_dir: str = "out"
    runs: int = 1
    base_dir: str = "."

    def model_instance(self):
        return get_model(self.model)

    def synthetic_spec(self, seed=None):
        g = dict(self.generate)
        model = self.model_instance()
        truth = dict(model.defaults)
        truth.update(self.params)
        kwargs = dict(model=self.model, truth=truth, delays=self.protocol.delays)
        known = {f.name for f in fields(SyntheticSpec)}
        for key, value in g.items():
            if key not in known:
                raise ConfigError(f"[generate] unknown key {key!r}")
            kwargs[key] = value
        if seed is not None:
            kwargs["seed"] = seed
        if "threshold" in kwargs and kwargs["threshold"] != self.protocol.threshold:
            raise ConfigError("[generate] threshold differs from [protocol] threshold")
        kwargs["threshold"] = self.protocol.threshold
        return SyntheticSpec(**kwargs)


_SAMPLER_INT = {"n_temperatures", "chains_per_temperature", "n_steps", "burn_in",
                "swap_interval", "seed", "thin", "n_threads"}
_GEN_FLOAT = {"noise_sigma", "threshold", "confidence", "pmin", "pmax"}


def load_config(path):
    if not os.path.exists(path):
        raise ConfigError(f"config file {path!r} not found")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return config_from_parser(parser, os.path.dirname(os.path.abspath(path)))


def loads_config(text, base_dir="."):
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    return config_from_parser(parser, base_dir)


def config_from_parser(cp, base_dir):
    known = {"model", "protocol", "data", "priors", "sampler", "generate", "fit", "output"}
    unknown = set(cp.sections()) - known
    if unknown:
        raise ConfigError(f"unknown config sections {sorted(unknown)}")
    cfg = RunConfig(base_dir=base_dir)

    def path(value):
        return value if os.path.isabs(value) else os.path.join(base_dir, value)

    if cp.has_section("model"):
        m = cp["model"]
        cfg.model = m.get("name", cfg.model)
        if "params" in m:
            p = path(m["params"])
            if not os.path.exists(p):
                raise ConfigError(f"parameter file {p!r} not found")
            cfg.params = read_param_file(p)
    model = get_model(cfg.model)
    unknown = sorted(set(cfg.params) - set(model.param_names))
    if unknown:
        raise ConfigError(f"parameter file names unknown parameters {unknown}")

    proto = {}
    if cp.has_section("protocol"):
        s = cp["protocol"]
        for key, value in s.items():
            if key == "delays":
                proto["delays"] = parse_delays(value)
            elif key == "times":
                proto["times"] = _floats(value, "times")
            elif key in ("t_end", "dt", "step", "threshold"):
                try:
                    proto[key] = float(value)
                except ValueError:
                    raise ConfigError(f"[protocol] {key}: bad number {value!r}") from None
            else:
                raise ConfigError(f"[protocol] unknown key {key!r}")
    cfg.protocol = SimProtocol(**proto)

    if cp.has_section("data"):
        d = cp["data"]
        for key in d:
            if key not in ("quantitative", "constraints"):
                raise ConfigError(f"[data] unknown key {key!r}")
        if d.get("quantitative"):
            cfg.quantitative = path(d["quantitative"])
        if d.get("constraints"):
            cfg.constraints = path(d["constraints"])

    if cp.has_section("priors"):
        cfg.priors = [Prior.parse(name, text) for name, text in cp["priors"].items()]

    sampler = {}
    if cp.has_section("sampler"):
        for key, value in cp["sampler"].items():
            try:
                if key in _SAMPLER_INT:
                    sampler[key] = int(value)
                elif key == "t_max":
                    sampler[key] = float(value)
                elif key == "ladder":
                    sampler[key] = _floats(value, "ladder")
                elif key == "proposal_scale":
                    vals = _floats(value, "proposal_scale")
                    sampler[key] = vals[0] if len(vals) == 1 else vals
                elif key == "runs":
                    cfg.runs = int(value)
                else:
                    raise ConfigError(f"[sampler] unknown key {key!r}")
            except ValueError:
                raise ConfigError(f"[sampler] {key}: bad value {value!r}") from None
    cfg.sampler = SamplerConfig(**sampler)
    if "ladder" in sampler and "n_temperatures" not in sampler:
        cfg.sampler.n_temperatures = len(sampler["ladder"])

    if cp.has_section("generate"):
        for key, value in cp["generate"].items():
            if key in _GEN_FLOAT:
                try:
                    cfg.generate[key] = float(value)
                except ValueError:
                    raise ConfigError(f"[generate] {key}: bad number {value!r}") from None
            elif key == "seed":
                cfg.generate[key] = int(value)
            elif key in ("mode", "combine"):
                cfg.generate[key] = value.strip()
            else:
                raise ConfigError(f"[generate] unknown key {key!r}")

    if cp.has_section("fit"):
        f = cp["fit"]
        cfg.objective = f.get("objective", cfg.objective)
        if cfg.objective not in ("likelihood", "penalty", "hybrid"):
            raise ConfigError("[fit] objective must be likelihood, penalty or hybrid")
        cfg.t_final = f.getfloat("t_final", cfg.t_final)
        if "n_steps" in f:
            cfg.fit_steps = f.getint("n_steps")

    if cp.has_section("output"):
        cfg.out_dir = path(cp["output"].get("dir", cfg.out_dir))
    else:
        cfg.out_dir = path(cfg.out_dir)
    return cfg
