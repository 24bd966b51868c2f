"""Command-line entry point: ``qualifit {generate,sample,fit,analyze,check}``.

Exit codes: 0 success, 1 usage or configuration error, 2 data or parse
error, 3 runtime failure.
"""

import argparse
import logging
import os
import sys
from dataclasses import replace

import numpy as np

from .analysis import (compare_widths, format_summary_csv, pairwise_correlation,
                       plot_data_export, summarize)
from .config import load_config
from .errors import ConfigError, ConstraintSyntaxError, DataError, QualifitError
from .lang import load_constraints, parse_constraints_collect, validate_category_family
from .models import format_param_file
from .problem import Problem
from .sampler import PosteriorSamples, anneal_run, pt_run
from .synthetic import generate, read_quantitative_csv

log = logging.getLogger("qualifit")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _write(path, text):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _read(path):
    if not os.path.exists(path):
        raise ConfigError(f"file {path!r} not found")
    with open(path) as fh:
        return fh.read()


def _load(args):
    if not args.config:
        raise ConfigError("--config is required")
    cfg = load_config(args.config)
    if getattr(args, "seed", None) is not None:
        cfg.sampler.seed = args.seed
        cfg.generate["seed"] = args.seed
    if getattr(args, "out", None):
        cfg.out_dir = args.out
    if getattr(args, "runs", None) is not None:
        cfg.runs = args.runs
    if getattr(args, "threads", None) is not None:
        cfg.sampler.n_threads = args.threads
    return cfg


def build_problem(cfg, objective="likelihood"):
    quant, qual, penalties = [], [], []
    if cfg.quantitative:
        quant = read_quantitative_csv(_read(cfg.quantitative))
    if cfg.constraints:
        qual, penalties, _ = load_constraints(_read(cfg.constraints))
    if not cfg.priors:
        raise ConfigError("[priors] must declare at least one free parameter")
    problem = Problem(cfg.model_instance(), cfg.protocol, cfg.priors, quant, qual,
                      penalties, fixed=cfg.params, objective=objective)
    return problem.check()


def cmd_generate(args):
    cfg = _load(args)
    spec = cfg.synthetic_spec()
    if args.mode:
        spec = replace(spec, mode=args.mode)
    data = generate(spec)
    out = os.path.join(cfg.out_dir, data.filename)
    _write(out, data.text)
    truth = dict(zip(cfg.model_instance().param_names, spec.truth_theta()))
    _write(os.path.join(cfg.out_dir, "truth.params"), format_param_file(truth))
    print(f"wrote {out}")
    return 0


def cmd_sample(args):
    cfg = _load(args)
    cfg.sampler.validate()
    if cfg.runs < 1:
        raise ConfigError("--runs must be positive")
    problem = build_problem(cfg)
    print(cfg.sampler.describe())
    base_seed = cfg.sampler.seed
    for run in range(cfg.runs):
        sc = replace(cfg.sampler, seed=base_seed + run)
        samples = pt_run(sc, problem.target())
        path = os.path.join(cfg.out_dir, f"samples_run{run}.csv")
        _write(path, samples.to_csv())
        acc = ", ".join("%.2f" % a for a in samples.stats["acceptance"])
        print(f"run {run} (seed {sc.seed}): {len(samples)} samples -> {path}; "
              f"acceptance by temperature [{acc}]")
    if problem.failures:
        log.warning("%d simulations failed and were rejected", problem.failures)
    return 0


def cmd_fit(args):
    cfg = _load(args)
    sc = cfg.sampler
    if cfg.fit_steps:
        sc = replace(sc, n_steps=cfg.fit_steps)
    sc = replace(sc, burn_in=0)
    start = None
    objective = args.objective or cfg.objective
    stages = ["penalty", "likelihood"] if objective == "hybrid" else [objective]
    result = None
    for stage in stages:
        problem = build_problem(cfg, objective=stage)
        result = anneal_run(sc, problem.target(), t_final=cfg.t_final, start=start)
        print(f"{stage}: initial {result.initial_nll:.6g} -> best {result.best_nll:.6g}")
        start = result.best_theta
    best = dict(zip(cfg.model_instance().param_names,
                    problem.full_theta(result.best_theta)))
    path = os.path.join(cfg.out_dir, "best_fit.params")
    _write(path, f"# objective {objective}: {result.best_nll!r}\n" + format_param_file(best))
    print(f"wrote {path}")
    return 0


def _parse_transform(spec, names):
    if not spec:
        return None
    chosen = names if spec == "all" else [s.strip() for s in spec.split(",") if s.strip()]
    unknown = sorted(set(chosen) - set(names))
    if unknown:
        raise ConfigError(f"--log10 names unknown parameters {unknown}")
    return {n: np.log10 for n in chosen}


def _merge(paths):
    parts = []
    for p in paths:
        if not os.path.exists(p):
            raise ConfigError(f"sample file {p!r} not found")
        parts.append(PosteriorSamples.from_csv(p))
    return PosteriorSamples.concat(parts)


def cmd_analyze(args):
    out = args.out or "analysis"
    if not args.files and not args.compare:
        raise ConfigError("give sample files and/or --compare groups")
    if args.files:
        samples = _merge(args.files)
        transform = _parse_transform(args.log10, samples.param_names)
        summaries = summarize(samples, level=args.level, bins=args.bins, transform=transform)
        _write(os.path.join(out, "summary.csv"), format_summary_csv(summaries))
        corr = pairwise_correlation(samples)
        lines = ["param," + ",".join(samples.param_names)]
        for name, row in zip(samples.param_names, corr):
            lines.append(name + "," + ",".join("%.17g" % v for v in row))
        _write(os.path.join(out, "correlation.csv"), "\n".join(lines) + "\n")
        plot_data_export(summaries, out, samples)
        print(f"summarized {len(samples)} samples from {len(args.files)} file(s) -> {out}")
    if args.compare:
        groups = {}
        for item in args.compare:
            if "=" not in item:
                raise ConfigError(f"--compare expects label=file[,file...], got {item!r}")
            label, files = item.split("=", 1)
            samples = _merge([f for f in files.split(",") if f])
            transform = _parse_transform(args.log10, samples.param_names)
            groups[label] = summarize(samples, level=args.level, transform=transform)
        report = compare_widths(groups)
        _write(os.path.join(out, "widths.csv"), report.table())
        print(report.table(), end="")
    return 0


def cmd_check(args):
    text = _read(args.file)
    statements, errors = parse_constraints_collect(text)
    for err in errors:
        print(f"{args.file}:{err.line}:{err.column}: error: {err.message}")
    diags = validate_category_family(statements)
    for d in diags:
        print(f"{args.file}: {d}")
    if args.config:
        cfg = load_config(args.config)
        outputs = set(cfg.model_instance().observables(cfg.protocol))
        for s in statements:
            for name in s.observables:
                if name not in outputs:
                    print(f"{args.file}:{s.line}: error: observable {name!r} is not an output "
                          f"of model {cfg.model!r}")
                    errors.append(name)
    print(f"{len(statements)} statement(s), {len(errors)} error(s), "
          f"{sum(d.level == 'warning' for d in diags)} warning(s)")
    return 2 if errors else 0


def make_parser():
    p = _Parser(prog="qualifit", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, runs=False):
        sp.add_argument("--config", required=True, metavar="PATH")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", metavar="DIR")
        sp.add_argument("--threads", type=int, metavar="N")
        if runs:
            sp.add_argument("--runs", type=int, metavar="K")

    g = sub.add_parser("generate", help="write a synthetic dataset")
    common(g)
    g.add_argument("--mode", choices=["quantitative", "two-cat", "three-cat"])
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("sample", help="parallel-tempering posterior sampling")
    common(s, runs=True)
    s.set_defaults(func=cmd_sample)

    f = sub.add_parser("fit", help="point estimate by annealing")
    common(f, runs=True)
    f.add_argument("--objective", choices=["likelihood", "penalty", "hybrid"])
    f.set_defaults(func=cmd_fit)

    a = sub.add_parser("analyze", help="summarize sample files")
    a.add_argument("files", nargs="*")
    a.add_argument("--out", metavar="DIR")
    a.add_argument("--level", type=float, default=0.95)
    a.add_argument("--bins", type=int, default=30)
    a.add_argument("--log10", metavar="NAMES", help="comma-separated names or 'all'")
    a.add_argument("--compare", action="append", metavar="LABEL=FILES")
    a.add_argument("--config", help=argparse.SUPPRESS)
    a.add_argument("--seed", type=int, help=argparse.SUPPRESS)
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("check", help="validate a constraint file")
    c.add_argument("file")
    c.add_argument("--config", metavar="PATH", help="also check observables against the model")
    c.set_defaults(func=cmd_check)
    return p


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConstraintSyntaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QualifitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # noqa: BLE001 - top-level guard maps to exit code 3
        log.debug("unhandled error", exc_info=True)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
