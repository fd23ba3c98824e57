"""Command-line experiment runner.

Subcommands:

  reconstruct      run a tomography scheme end to end from a JSON config
  optimality-scan  sweep probe profiles and tabulate error volumes
  mub              construct a mutually unbiased basis family
  error-volume     evaluate the analytic (and optionally empirical) volume

Exit codes: 0 success, 2 configuration error, 3 numerical-validity failure
(reconstruction flags tripped; the report is still written).
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ConfigError, NotPrime, WeaktomoError
from .report import (
    read_report_json,
    run_error_volume,
    run_mub,
    run_optimality_scan,
    run_reconstruct,
    validate_experiment_config,
    validate_scan_config,
    validate_volume_config,
    write_report_csv,
    write_report_json,
    write_scan_csv,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VALIDITY = 3


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError("", f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")


def _emit(report: dict, fmt: str, out: str | None, scan: bool = False) -> None:
    if out is None:
        json.dump(report, sys.stdout, indent=2, allow_nan=False)
        sys.stdout.write("\n")
        return
    if fmt == "json":
        write_report_json(report, out)
    elif scan:
        write_scan_csv(report, out)
    else:
        write_report_csv(report, out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weaktomo", description="mixed-state tomography experiment runner"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="path to the JSON config document")
        p.add_argument("--seed", type=int, default=None, help="override the root seed")
        p.add_argument("--format", choices=("json", "csv"), default=None,
                       help="output format (overrides the config)")
        p.add_argument("--out", default=None, help="output path (default: stdout JSON)")

    common(sub.add_parser("reconstruct", help="simulate data and reconstruct the state"))
    common(sub.add_parser("optimality-scan", help="sweep probe profiles on the simplex"))
    mub_p = sub.add_parser("mub", help="construct a mutually unbiased basis family")
    common(mub_p)
    mub_p.add_argument("--dim", type=int, default=None, help="prime dimension")
    common(sub.add_parser("error-volume", help="evaluate the error-box volume"))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "reconstruct":
            if not args.config:
                raise ConfigError("", "reconstruct requires --config")
            cfg = validate_experiment_config(_load_config(args.config), seed_override=args.seed)
            report = run_reconstruct(cfg)
            fmt = args.format or cfg.fmt
            out = args.out or cfg.output
            _emit(report, fmt, out)
            counts = report["results"]["validity_flag_counts"]
            if any(counts.values()):
                print(f"validity flags tripped: {counts}", file=sys.stderr)
                return EXIT_VALIDITY
            return EXIT_OK

        if args.command == "optimality-scan":
            if not args.config:
                raise ConfigError("", "optimality-scan requires --config")
            cfg = validate_scan_config(_load_config(args.config), seed_override=args.seed)
            report = run_optimality_scan(cfg)
            fmt = args.format or cfg.fmt
            out = args.out or cfg.output
            _emit(report, fmt, out, scan=True)
            return EXIT_OK

        if args.command == "mub":
            dim = args.dim
            if dim is None:
                if not args.config:
                    raise ConfigError("", "mub requires --dim or --config")
                raw = _load_config(args.config)
                if not isinstance(raw, dict) or "dim" not in raw:
                    raise ConfigError("dim", "missing required field")
                dim = raw["dim"]
                if not isinstance(dim, int):
                    raise ConfigError("dim", f"expected an integer, got {dim!r}")
            report = run_mub(dim)
            _emit(report, args.format or "json", args.out)
            return EXIT_OK

        # error-volume
        if not args.config:
            raise ConfigError("", "error-volume requires --config")
        cfg = validate_volume_config(_load_config(args.config), seed_override=args.seed)
        report = run_error_volume(cfg)
        fmt = args.format or cfg["format"]
        out = args.out or cfg["output"]
        _emit(report, fmt, out)
        return EXIT_OK

    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NotPrime as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except WeaktomoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
