"""Command-line front end: ``mixzne {tables,prefactor,simulate,analyze}``.

Settings resolve as command-line flag, then config file, then built-in
default.  Exit status: 0 success, 2 usage/config error, 3 I/O error,
4 numerical validation error, 5 malformed or incomplete dataset.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import experiment as exp
from .errors import ConfigError, DatasetParseError, IncompleteDatasetError, MixZNEError
from .qsim.circuit import SpinGraph
from .resources import (
    RuntimeModel,
    ScheduleSpec,
    emit_tables,
    prefactor_all_logical,
    prefactor_mixed,
    runtime_ratio,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERIC = 4
EXIT_DATASET = 5

DEFAULT_GAMMAS = (0.01, 0.1, 0.5, 0.9)
DEFAULT_ORDERS = (1, 2, 3, 4, 5)
DEFAULT_SUBSETS = ((1, 2, 3), (4, 5, 6), (1, 4, 5))

RUN_FIELDS = {f.name for f in dataclasses.fields(exp.RunConfig)}
CONFIG_KEYS = RUN_FIELDS | {"output", "histogram_output", "threads"}


def _floats(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text):
    return [int(x) for x in text.split(",") if x.strip()]


def _subsets(text):
    return [tuple(_ints(part)) for part in text.split(";") if part.strip()]


def load_config(path) -> dict:
    """Read a JSON config and reject unknown keys."""
    if path is None:
        return {}
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be an object")
    unknown = sorted(set(doc) - CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"{path}: unknown keys {unknown}")
    return doc


def run_config_from(doc: dict, **overrides) -> exp.RunConfig:
    kwargs = {k: v for k, v in doc.items() if k in RUN_FIELDS}
    kwargs.update({k: v for k, v in overrides.items() if v is not None})
    graph = kwargs.get("graph")
    if isinstance(graph, dict):
        try:
            kwargs["graph"] = SpinGraph.from_edges(graph["n_sites"], graph.get("edges", []))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad graph entry: {exc}") from None
    try:
        return exp.RunConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def _pick(flag, doc, key, default):
    if flag is not None:
        return flag
    return doc.get(key, default)


def _write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def cmd_tables(args, doc) -> int:
    gammas = args.gammas or list(DEFAULT_GAMMAS)
    orders = args.orders or list(DEFAULT_ORDERS)
    tables = emit_tables(gammas, orders)
    out = Path(_pick(args.output, doc, "output", "tables"))
    for which in ("tau_ratio", "mixed_variance"):
        text = tables.to_text(which)
        print(text)
        _write(out / f"{which}.txt", text)
        _write(out / f"{which}.csv", tables.to_csv(which))
    return EXIT_OK


def cmd_prefactor(args, doc) -> int:
    k, gamma = args.order, args.gamma
    logical = ScheduleSpec.all_logical(k, args.multipliers)
    mixed = ScheduleSpec.mixed(k, gamma, args.mixed_multipliers)
    result = {
        "gamma": gamma,
        "order": k,
        "prefactor_all_logical": prefactor_all_logical(k, args.multipliers),
        "prefactor_mixed": prefactor_mixed(k, gamma, args.mixed_multipliers),
        "tau_ratio_idealized": runtime_ratio(logical, mixed, idealized=True),
    }
    if args.tau_logical is not None and args.tau_physical is not None:
        runtime = RuntimeModel(args.tau_logical, args.tau_physical)
        result["tau_ratio_exact"] = runtime_ratio(logical, mixed, runtime)
    for key, value in result.items():
        print(f"{key}: {value:.6g}" if isinstance(value, float) else f"{key}: {value}")
    if args.output:
        _write(args.output, json.dumps(result, indent=2) + "\n")
    return EXIT_OK


def cmd_simulate(args, doc) -> int:
    config = run_config_from(doc, seed=args.seed, n_shots=args.shots, states=args.states)
    threads = _pick(args.threads, doc, "threads", 1)
    records = exp.run_regime_sweep(config, threads=threads)
    out = _pick(args.output, doc, "output", "dataset.csv")
    _write(out, exp.dataset_to_csv(records))
    print(f"wrote {len(records)} records to {out}")
    return EXIT_OK


def cmd_analyze(args, doc) -> int:
    records = exp.read_dataset(args.dataset)
    states = sorted({r.state for r in records})
    config = run_config_from(doc, states=states, reference=args.reference)
    reference = exp.noiseless_reference(config)
    subsets = args.subsets or list(DEFAULT_SUBSETS)
    analyses = {}
    for subset in subsets:
        analyses[tuple(subset)] = exp.extrapolate_subset(records, subset, args.order, reference)
    out = Path(_pick(args.output, doc, "output", "report.json"))
    _write(out, json.dumps(exp.reports_document(analyses, args.order), indent=2) + "\n")
    hist = _pick(args.histogram, doc, "histogram_output", None) or out.with_name(out.stem + "_hist.csv")
    _write(hist, exp.histogram_csv(analyses))
    for subset, reports in analyses.items():
        s = exp.aggregate_statistics(reports)
        print(
            f"subset {list(subset)}: mean error {s.mean_error:+.5f}, error variance "
            f"{s.error_variance:.3e}, mean estimator variance {s.variance_mean:.3e}"
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    def global_flags(default):
        flags = argparse.ArgumentParser(add_help=False, argument_default=default)
        flags.add_argument("--config", metavar="PATH", help="JSON run configuration")
        flags.add_argument("--seed", type=int, help="master RNG seed")
        flags.add_argument("--output", metavar="PATH", help="output file or directory")
        flags.add_argument("--threads", type=int, help="simulation worker threads")
        return flags

    # Global flags are accepted before or after the subcommand; the
    # subcommand copy must not reset values given before it.
    common = global_flags(argparse.SUPPRESS)
    parser = argparse.ArgumentParser(
        prog="mixzne",
        description="Zero-noise extrapolation with mixed logical and physical data.",
        parents=[global_flags(None)],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tables", parents=[common], help="runtime-ratio and mixed-variance tables")
    p.add_argument("--gammas", type=_floats, help="comma separated, default 0.01,0.1,0.5,0.9")
    p.add_argument("--orders", type=_ints, help="comma separated, default 1,2,3,4,5")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("prefactor", parents=[common], help="variance prefactors and runtime ratio")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--multipliers", type=_floats, help="all-logical M_0..M_K (default 1..K+1)")
    p.add_argument("--mixed-multipliers", type=_floats, help="physical M_1..M_K (default 2..K+1)")
    p.add_argument("--tau-logical", type=float)
    p.add_argument("--tau-physical", type=float)
    p.set_defaults(func=cmd_prefactor)

    p = sub.add_parser("simulate", parents=[common], help="run the noise-regime sweep")
    p.add_argument("--shots", type=int, help="shots per (state, regime)")
    p.add_argument("--states", type=_ints, help="comma separated basis indices")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", parents=[common], help="extrapolate a dataset per regime subset")
    p.add_argument("dataset", help="dataset CSV written by 'simulate'")
    p.add_argument("--subsets", type=_subsets, help="e.g. '1,2,3;4,5,6;1,4,5'")
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--reference", choices=exp.REFERENCE_KINDS)
    p.add_argument("--histogram", metavar="PATH", help="histogram CSV (default <output>_hist.csv)")
    p.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        doc = load_config(args.config)
        return args.func(args, doc)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DatasetParseError, IncompleteDatasetError) as exc:
        print(f"dataset error: {exc}", file=sys.stderr)
        return EXIT_DATASET
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (MixZNEError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
