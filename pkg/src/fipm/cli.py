"""Command-line front end.

Subcommands:
  run           run one experiment configuration (preset name or file path)
  sweep         rerun one configuration over a list of values for one key
  scan-figure1  raster-scan filter images over the degree-two realizable set
  presets       list the bundled configurations

Exit codes: 0 on success, 2 for configuration/usage errors, 3 when the
solver aborts (breakdown, dual non-convergence, inadmissible states).
"""

from __future__ import annotations

import argparse
import sys

from .config import list_presets, load_config, parse_scan_config, read_config_text
from .errors import ConfigError, FipmError
from .experiment import run_experiment, scan_figure1, sweep


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fipm",
        description="Filtered intrusive moment methods for 1D uncertain conservation laws.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one experiment configuration")
    run_p.add_argument("config", help="bundled preset name or path to a config file")
    run_p.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override one configuration key (repeatable)",
    )
    run_p.add_argument(
        "--dry-run", action="store_true", help="echo the resolved configuration and exit"
    )
    run_p.add_argument("--output-root", default=None, help="root for artifact directories")

    sweep_p = sub.add_parser("sweep", help="run one configuration over several values of a key")
    sweep_p.add_argument("config", help="bundled preset name or path to a config file")
    sweep_p.add_argument("--key", required=True, help="numeric configuration key to vary")
    sweep_p.add_argument(
        "--values", required=True, help="comma-separated list of values for the key"
    )
    sweep_p.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE"
    )
    sweep_p.add_argument("--output-root", default=None)

    scan_p = sub.add_parser(
        "scan-figure1", help="raster-scan filter images over the realizable moment set"
    )
    scan_p.add_argument("config", help="bundled preset name or path to a scan config file")
    scan_p.add_argument("--dry-run", action="store_true")
    scan_p.add_argument("--output-root", default=None)

    sub.add_parser("presets", help="list bundled configuration presets")
    return parser


def _cmd_run(args) -> int:
    cfg = load_config(args.config, overrides=args.overrides)
    if args.dry_run:
        sys.stdout.write(cfg.to_text())
        return 0
    artifacts = run_experiment(cfg, args.output_root)
    if artifacts.exit_code != 0:
        print(f"run failed: {artifacts.error}", file=sys.stderr)
        print(f"log: {artifacts.out_dir / 'run.log'}", file=sys.stderr)
        return artifacts.exit_code
    summary = artifacts.summary
    print(
        f"wrote {artifacts.out_dir} ({artifacts.n_steps} steps, "
        f"deltaE={summary['deltaE']:.6g}, deltaVar={summary['deltaVar']:.6g})"
    )
    return 0


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config, overrides=args.overrides)
    values = [tok.strip() for tok in args.values.split(",") if tok.strip()]
    result = sweep(cfg, args.key, values, args.output_root)
    print("value,deltaE,deltaVar,runtime")
    for row in result.rows:
        print(f"{row.value},{row.deltaE!r},{row.deltaVar!r},{row.runtime:.3f}")
        if row.error is not None:
            print(f"  # {row.value}: {row.error}", file=sys.stderr)
    print(f"wrote {result.table_path}")
    return 0


def _cmd_scan(args) -> int:
    text, source = read_config_text(args.config)
    cfg = parse_scan_config(text, source=source)
    if args.dry_run:
        sys.stdout.write(cfg.to_text())
        return 0
    artifacts = scan_figure1(cfg, args.output_root)
    for name, strength, inside, escaped in artifacts.rows:
        print(f"{name} strength={strength!r}: {escaped} of {inside} realizable points escaped")
    print(f"wrote {artifacts.out_dir}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "scan-figure1":
            return _cmd_scan(args)
        if args.command == "presets":
            for name in list_presets():
                print(name)
            return 0
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 2
    except FipmError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
