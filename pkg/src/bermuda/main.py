# Copyright © 2025 The bermuda authors
# SPDX-License-Identifier: MIT
# See LICENSE file for details

"""
Command-line entry point.

    price run <config-or-preset> [options]
    price sweep <dir-or-config>... [options]
    price presets
"""

from __future__ import annotations

import argparse
import logging
import sys
from importlib import resources
from pathlib import Path
from typing import Any

from . import debug_log
from .config import ConfigError, ExperimentConfig, apply_env_overrides, load_config, with_overrides
from .harness import Report, run_experiment, sweep
from .profiling import enable_profiling, get_profiler

logger = logging.getLogger(__name__)

PRESET_PACKAGE: str = "bermuda.presets"

EXIT_OK: int = 0
EXIT_FAILED: int = 1
EXIT_USAGE: int = 2


def preset_paths() -> list[Path]:
    """All shipped preset files, sorted by name."""
    root = resources.files(PRESET_PACKAGE)
    return sorted(
        (Path(str(entry)) for entry in root.iterdir() if entry.name.endswith(".yaml")),
        key=lambda p: p.name,
    )


def resolve_config_path(name: str) -> Path:
    """A config file path, or the shipped preset of that name (with or without .yaml)."""
    path = Path(name)
    if path.exists():
        return path
    stem = name[:-5] if name.endswith(".yaml") else name
    for preset in preset_paths():
        if preset.stem == stem:
            return preset
    raise ConfigError(f"No config file or preset named {name!r}")


def collect_sweep_paths(targets: list[str]) -> list[Path]:
    """Expand directories to their YAML files; keep files and preset names as given."""
    paths: list[Path] = []
    for target in targets:
        path = Path(target)
        if path.is_dir():
            found = sorted(path.glob("*.yaml"))
            if not found:
                logger.warning("No .yaml configs in %s", path)
            paths.extend(found)
        else:
            paths.append(resolve_config_path(target))
    return paths


def _cli_overrides(args: argparse.Namespace) -> dict[str, Any]:
    overrides: dict[str, Any] = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.scale is not None:
        overrides["scale"] = args.scale
    if args.threads is not None:
        overrides["threads"] = args.threads
    return overrides


def _prepare(path: Path, args: argparse.Namespace) -> ExperimentConfig:
    cfg = apply_env_overrides(load_config(path))
    return with_overrides(cfg, _cli_overrides(args))


def _emit(report: Report, out: str | None) -> None:
    print(report.format_table())
    if out:
        sidecar = report.write_csv(out)
        print(f"\nReport written to {out} (config echo: {sidecar})")


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=lambda s: int(s, 0), default=None,
                        help="Master seed (overrides the config and BERMUDA_SEED)")
    parser.add_argument("--scale", type=float, default=None,
                        help="Multiplier on simulation counts, in (0, 10]")
    parser.add_argument("--out", default=None, help="Write the report as CSV to this path")
    parser.add_argument("--threads", type=int, default=None,
                        help="Worker threads, 0 for one per CPU (overrides BERMUDA_THREADS)")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for stage progress, -vv for per-step detail")
    parser.add_argument("--debug-log", action="store_true",
                        help="Write bin layouts, stopping regions and bounds to ./logs/")
    parser.add_argument("--profile", action="store_true", help="Print stage timings at the end")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="price",
        description="Bermudan option bounds by Markovian coercion of the reward process",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Price one config file or preset")
    run.add_argument("config", help="Config file path or preset name (see `price presets`)")
    _add_run_options(run)
    run.add_argument("--save-coercion", default=None, help="Save the built coercion here")
    run.add_argument("--load-coercion", default=None, help="Reuse a saved coercion")

    sweep_cmd = commands.add_parser("sweep", help="Price every config in directories or lists")
    sweep_cmd.add_argument("targets", nargs="+", help="Directories, config files or preset names")
    _add_run_options(sweep_cmd)

    commands.add_parser("presets", help="List the shipped table-row presets")
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        datefmt="%H:%M:%S",
    )


def _list_presets() -> int:
    print("\nShipped presets:")
    print("-" * 80)
    for path in preset_paths():
        try:
            cfg = load_config(path)
        except ConfigError as e:
            print(f"  {path.stem:<28} (invalid: {e})")
            continue
        varied = ", ".join(f"{k}={v}" for k, v in cfg["varied"].items())
        print(f"  {path.stem:<28} {cfg['example']:<16} {varied}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    """Main entry point; returns the process exit code."""
    args = build_parser().parse_args(argv)

    if args.command == "presets":
        return _list_presets()

    _configure_logging(args.verbose)
    if args.debug_log:
        debug_log.enable()
        print("Debug logging enabled (logs will be saved to ./logs/)")
    if args.profile:
        enable_profiling()

    try:
        if args.command == "run":
            cfg = _prepare(resolve_config_path(args.config), args)
        else:
            cfgs = [_prepare(path, args) for path in collect_sweep_paths(args.targets)]
    except ConfigError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE

    if args.command == "run":
        try:
            report = run_experiment(cfg, args.save_coercion, args.load_coercion)
        except Exception as e:  # pylint: disable=broad-exception-caught
            logger.debug("Run failed", exc_info=True)
            print(f"Error: {type(e).__name__}: {e}", file=sys.stderr)
            return EXIT_FAILED
        out = args.out or cfg["output"]
    else:
        report = sweep(cfgs)
        out = args.out

    _emit(report, out)
    if args.profile:
        get_profiler().print_report()
    return EXIT_FAILED if report.failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
