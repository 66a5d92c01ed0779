"""Command-line entry point.

Subcommands: gen, run, sweep-prob, sweep-effort, scaling, gap, replay,
report. Exit codes: 0 success, 2 config error, 3 cap violation, 4
insufficient data.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .errors import CapExceededError, ConfigError, InsufficientDataError
from .harness.config import ExperimentConfig, load_config
from .harness.seeds import instance_seed
from .harness.sweeps import (
    replay_run,
    report_from_details,
    run_effort_sweep,
    run_gap_study,
    run_probability_sweep,
    run_scaling_study,
)
from .ising import generate_sk, write_instance

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_CAP = 3
EXIT_DATA = 4


def _add_config_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("config", help="experiment config (JSON)")
    parser.add_argument("--out-dir", default=None, help="override the output directory")
    parser.add_argument("--workers", type=int, default=None, help="override worker count")
    parser.add_argument("--quiet", action="store_true", help="suppress progress output")


def _load(args) -> ExperimentConfig:
    config = load_config(args.config)
    overrides = {}
    if args.out_dir is not None:
        overrides["out_dir"] = args.out_dir
    if getattr(args, "workers", None) is not None:
        overrides["workers"] = args.workers
    if overrides:
        doc = config.to_dict()
        doc.update(overrides)
        config = ExperimentConfig.from_dict(doc)
    return config


def _progress(quiet: bool):
    if quiet:
        return None

    def show(done: int, total: int) -> None:
        print(f"\r  task {done}/{total}", end="", file=sys.stderr, flush=True)
        if done == total:
            print(file=sys.stderr)

    return show


def cmd_gen(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for idx in range(args.count):
        seed = instance_seed(args.seed, args.n, idx, "gen")
        instance = generate_sk(args.n, seed)
        path = out_dir / f"sk_n{args.n}_{idx:04d}.sk"
        write_instance(instance, path)
        written.append(str(path))
    print(json.dumps({"n": args.n, "count": args.count, "files": written}, indent=2))
    return EXIT_OK


def cmd_run(args) -> int:
    config = _load(args)
    n = args.n if args.n is not None else config.n_values[0]
    length = args.length if args.length is not None else config.lengths_for(n)[0]
    row = replay_run(config, n, length, args.instance, args.repeat)
    print(json.dumps(row, indent=2, default=str))
    return EXIT_OK


def _finish_sweep(out) -> int:
    doc = {k: str(v) for k, v in out.paths.items()}
    if out.failures:
        doc["failures"] = out.failures
        print(json.dumps(doc, indent=2))
        print(
            f"{len(out.failures)} task(s) hit a size cap; partial results "
            "persisted (see manifest)",
            file=sys.stderr,
        )
        return EXIT_CAP
    print(json.dumps(doc, indent=2))
    return EXIT_OK


def cmd_sweep_prob(args) -> int:
    config = _load(args)
    out = run_probability_sweep(config, resume=args.resume, progress=_progress(args.quiet))
    return _finish_sweep(out)


def cmd_sweep_effort(args) -> int:
    config = _load(args)
    out = run_effort_sweep(config, resume=args.resume, progress=_progress(args.quiet))
    return _finish_sweep(out)


def cmd_scaling(args) -> int:
    config = _load(args)
    out = run_scaling_study(config, resume=args.resume, progress=_progress(args.quiet))
    return _finish_sweep(out)


def cmd_gap(args) -> int:
    config = _load(args)
    out = run_gap_study(config, progress=_progress(args.quiet))
    print(json.dumps({k: str(v) for k, v in out.paths.items()}, indent=2))
    return EXIT_OK


def cmd_replay(args) -> int:
    config = _load(args)
    row = replay_run(
        config, args.n, args.length, args.instance, args.repeat, args.ensemble
    )
    print(json.dumps(row, indent=2, default=str))
    return EXIT_OK


def cmd_report(args) -> int:
    results = report_from_details(args.details, args.out, target_p=args.target_p)
    print(json.dumps({"rows": len(results), "out": args.out}, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qeopt",
        description="Quantum-enhanced annealing/tempering benchmark harness",
    )
    parser.add_argument("--version", action="version", version=f"qeopt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate SK instances to files")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, required=True, help="master seed")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("run", help="execute a single run of the configured method")
    _add_config_arg(p)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--length", type=int, default=None)
    p.add_argument("--instance", type=int, default=0)
    p.add_argument("--repeat", type=int, default=0)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep-prob", help="success probability vs chain length")
    _add_config_arg(p)
    p.add_argument("--resume", action="store_true", help="reuse a partial detail file")
    p.set_defaults(func=cmd_sweep_prob)

    p = sub.add_parser("sweep-effort", help="effort vs chain length with ell* fit")
    _add_config_arg(p)
    p.add_argument("--resume", action="store_true")
    p.set_defaults(func=cmd_sweep_effort)

    p = sub.add_parser("scaling", help="optimal effort vs n (tune then fresh-ensemble eval)")
    _add_config_arg(p)
    p.add_argument("--resume", action="store_true")
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("gap", help="exact spectral gaps vs temperature")
    _add_config_arg(p)
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("replay", help="re-execute one run from ledger coordinates")
    _add_config_arg(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--instance", type=int, required=True)
    p.add_argument("--repeat", type=int, required=True)
    p.add_argument("--ensemble", default="tune", choices=("tune", "eval"))
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("report", help="recompute aggregate CSV from detail CSVs")
    p.add_argument("details", nargs="+", help="detail CSV paths")
    p.add_argument("--out", required=True, help="aggregate CSV to write")
    p.add_argument("--target-p", type=float, default=0.99, dest="target_p")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapExceededError as exc:
        print(f"size cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except InsufficientDataError as exc:
        print(f"insufficient data: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"invalid argument: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
