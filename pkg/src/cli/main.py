# src/cli/main.py
"""
fracbubble command line

Purpose:
- Load and validate one run configuration file
- Run one verification suite, or several with `all`
- Write <suite>.csv / <suite>.json / <suite>_*.svg and manifest.json

Usage:
    python -m src.cli.main constants --config config/run_default.yaml
    python -m src.cli.main lattice --config config/run_default.yaml --out runs/lattice
    python -m src.cli.main all --config config/run_default.yaml --suite reduce,residual --seed 7

Exit status: 0 all selected checks pass, 1 numeric failure or failed check,
2 configuration or usage error.
"""
import argparse
import sys
from typing import List, Optional

from pydantic import ValidationError

from src.core.config import PROJECT_ROOT, configure_logging, load_run_config
from src.core.exceptions import ConfigurationException
from src.core.models import SUITES
from src.processing.verification_pipeline import run_verification

DEFAULT_CONFIG = PROJECT_ROOT / "config" / "run_default.yaml"

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2

SUITE_HELP = {
    "constants": "Physical parameters, A1-A6, B0-B3, D1, D2 and the bubble identity",
    "lattice": "Exact vs leading-order lattice sums over k",
    "interactions": "Monte Carlo interaction integrals vs A5/A6 far-field forms",
    "energy": "Energy expansion vs direct oracle, gradient consistency",
    "reduce": "Critical point of r^(2s) V, (t1, t2) and scaling slopes",
    "residual": "Decay of the residual norm along the scaling regime",
    "pohozaev": "Pohozaev volume identities and the concentration integral",
}


def _u64(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got '{text}'")
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must lie in [0, 2^64), got {value}")
    return value


def _suite_list(text: str) -> List[str]:
    names = [name.strip() for name in text.split(",") if name.strip()]
    unknown = [name for name in names if name not in SUITES]
    if not names or unknown:
        raise argparse.ArgumentTypeError(f"unknown suites {unknown}; choose from {', '.join(SUITES)}")
    return names


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=str(DEFAULT_CONFIG), help="Run configuration (YAML or JSON)")
    common.add_argument("--out", help="Output directory (overrides output_dir)")
    common.add_argument("--seed", type=_u64, help="Monte Carlo seed (overrides mc.seed)")
    common.add_argument("--log-level", help="DEBUG, INFO, WARNING, ERROR")

    parser = argparse.ArgumentParser(prog="fracbubble",
                                     description="Doubled-cylinder fractional bubble verification")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUITES:
        sub.add_parser(name, parents=[common], help=SUITE_HELP[name])
    run_all = sub.add_parser("all", parents=[common], help="Run the selected suites (default: all)")
    run_all.add_argument("--suite", type=_suite_list, help="Comma-separated suite names")
    return parser


def _print_validation_error(error: ValidationError):
    for item in error.errors():
        path = ".".join(str(part) for part in item["loc"]) or "<root>"
        print(f"{path}: {item['msg']}", file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    """Command line entry point; returns the exit status"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK

    configure_logging(args.log_level)

    try:
        config = load_run_config(args.config)
    except ValidationError as e:
        print(f"❌ Invalid run configuration {args.config}", file=sys.stderr)
        _print_validation_error(e)
        return EXIT_CONFIG
    except ConfigurationException as e:
        print(f"{e.config_key or 'config'}: {e.message}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "all":
        suites = args.suite if args.suite else list(config.suites)
    else:
        suites = [args.command]

    result = run_verification(config, suites=suites, seed=args.seed, out_dir=args.out)

    if result["exit_code"] == EXIT_CONFIG:
        print(f"{result.get('error_field') or 'config'}: {result['error']}", file=sys.stderr)
    elif result["exit_code"] == EXIT_FAILED:
        for name in result["failed_checks"]:
            print(f"check failed: {name}", file=sys.stderr)
        for error in result["stats"]["errors"]:
            print(f"numeric failure: {error}", file=sys.stderr)
    return result["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
