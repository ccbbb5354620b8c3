"""Command-line entry point: ``uavshare {allocate,sweep,validate,mc-check}``."""

import argparse
import dataclasses
import json
import sys

from .algorithms import Method, prepare, run_method
from .capacity import ConnectivityMode
from .scenario import ConfigError, ScenarioConfig, generate, load_config

EXIT_RUNTIME = 1
EXIT_CONFIG = 3
EXIT_CHECK = 4
EXIT_IO = 5


def _common(p, samples_default=None):
    p.add_argument("--config", help="scenario (or sweep) TOML file")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--mode", choices=[m.value for m in ConnectivityMode],
                   help="connectivity mode")
    p.add_argument("--samples", type=int, default=samples_default,
                   help="Monte Carlo samples")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="uavshare",
        description="Reliability-aware HCU/LCU spectrum sharing: allocation and sweeps.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("allocate", help="run the pairing methods on one scenario")
    _common(p)
    p.add_argument("--method", action="append", choices=[m.value for m in Method],
                   help="method to run (repeatable; default: all)")
    p.add_argument("--refine", action="store_true",
                   help="max-min: re-optimise the sum above the final threshold")

    p = sub.add_parser("sweep", help="run a sweep file and write CSV")
    _common(p)
    p.add_argument("--workers", type=int, default=1, help="worker processes")

    p = sub.add_parser("validate", help="run the small-instance oracle suite")
    _common(p)

    p = sub.add_parser("mc-check", help="closed forms vs Monte Carlo report")
    _common(p, samples_default=200_000)
    return parser


def _open_out(path):
    return open(path, "w", encoding="utf-8") if path else sys.stdout


def _scenario_config(args):
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    if args.mode:
        cfg = cfg.replace(mode=args.mode)
    return cfg


def _cmd_allocate(args):
    cfg = _scenario_config(args)
    inst = generate(cfg)
    problem = prepare(inst)
    methods = args.method or [m.value for m in Method]
    report = {
        "scenario": {"seed": cfg.seed, "mode": cfg.mode.value, "n_hcu": cfg.n_hcu,
                     "n_lcu_pairs": cfg.n_lcu_pairs},
        "results": [run_method(problem, m, seed=cfg.seed, refine=args.refine).to_dict()
                    for m in methods],
    }
    fh = _open_out(args.out)
    try:
        json.dump(report, fh, indent=2, allow_nan=True)
        fh.write("\n")
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def _cmd_sweep(args):
    from .experiments import emit_csv, load_sweep, run_sweep

    if not args.config:
        raise ConfigError("sweep needs --config <sweep file>")
    spec = load_sweep(args.config)
    base = spec.base
    if args.seed is not None:
        base = base.replace(seed=args.seed)
    if args.mode:
        base = base.replace(mode=args.mode)
    changes = {"base": base}
    if args.samples is not None:
        changes["mc_samples"] = args.samples
    spec = dataclasses.replace(spec, **changes)
    result = run_sweep(spec, workers=args.workers)
    emit_csv(result, args.out or sys.stdout)
    for f in result.failures:
        print(f"seed failure: value={f['value']} seed={f['seed']}: {f['error']}", file=sys.stderr)
    if args.out and result.failures:
        with open(args.out + ".failures.log", "w", encoding="utf-8") as fh:
            for f in result.failures:
                fh.write(f"{f['value']}\t{f['seed']}\t{f['error']}\n")
    return 0


def _report(checks, out):
    fh = _open_out(out)
    try:
        for c in checks:
            fh.write(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}\n")
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0 if all(c.passed for c in checks) else EXIT_CHECK


def _cmd_validate(args):
    from .validation import run_validation

    return _report(run_validation(seed=args.seed or 0), args.out)


def _cmd_mc_check(args):
    from .validation import run_mc_check

    if args.samples < 1:
        raise ConfigError("--samples must be positive")
    return _report(run_mc_check(n_samples=args.samples, seed=args.seed or 0), args.out)


_COMMANDS = {"allocate": _cmd_allocate, "sweep": _cmd_sweep,
             "validate": _cmd_validate, "mc-check": _cmd_mc_check}


def cli_main(argv=None):
    """Parse ``argv`` and run a subcommand; returns the process exit code."""
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except Exception as exc:  # noqa: BLE001 - report, don't dump a traceback
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
