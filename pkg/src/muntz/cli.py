"""Command-line experiment runner.

One subcommand per experiment, plus ``run --config FILE`` and ``report``.
Flags override config keys one-for-one. Exit status: 0 pass, 1 fail, 2 error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .experiments import (
    EXPERIMENTS,
    THETAS,
    ConfigError,
    config_from_dict,
    default_output_dir,
    emit_report,
    load_index,
    run_experiment,
)

# flag name -> (config key, type)
_FLAGS = {
    "eps": float,
    "rho": float,
    "c": float,
    "samples": int,
    "n": int,
    "trials": int,
    "starts": int,
    "budget": int,
    "alpha": float,
    "n_max": int,
    "seed": int,
    "workers": int,
}


def _add_overrides(p: argparse.ArgumentParser) -> None:
    for key, typ in _FLAGS.items():
        p.add_argument(f"--{key.replace('_', '-')}", dest=key, type=typ, default=None)
    p.add_argument("--rule", type=json.loads, default=None, help="exponent rule as JSON")
    p.add_argument("--operator", choices=("volterra", "cesaro"), default=None)
    p.add_argument("--theta", choices=sorted(THETAS), default=None)
    p.add_argument("--output-dir", dest="output_dir", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="muntz", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        _add_overrides(sub.add_parser(name, help=f"run the {name} experiment"))
    run = sub.add_parser("run", help="run an experiment from a JSON config file")
    run.add_argument("--config", required=True, type=Path)
    _add_overrides(run)
    report = sub.add_parser("report", help="summarize the run index")
    report.add_argument("--format", choices=("json", "csv"), default="csv")
    report.add_argument("--output-dir", dest="output_dir", default=None)
    return parser


def _config_data(args: argparse.Namespace) -> dict:
    data: dict = {}
    if args.command == "run":
        try:
            data = json.loads(args.config.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError([f"config: {exc}"]) from None
        if not isinstance(data, dict):
            raise ConfigError(["config: document must be a key/value object"])
    else:
        data["experiment"] = args.command
    for key in (*_FLAGS, "rule", "operator", "theta", "output_dir"):
        val = getattr(args, key)
        if val is not None:
            data[key] = val
    data.setdefault("output_dir", default_output_dir())
    return data


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    if args.command == "report":
        records = load_index(Path(args.output_dir or default_output_dir()))
        try:
            sys.stdout.write(emit_report(records, args.format))
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        return 0
    try:
        config = config_from_dict(_config_data(args))
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return 2
    record = run_experiment(config)
    sys.stdout.write(json.dumps(record.to_dict(), sort_keys=True, indent=2) + "\n")
    return record.exit_code


if __name__ == "__main__":
    sys.exit(main())
