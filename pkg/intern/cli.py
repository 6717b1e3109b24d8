import sys, json
from dataclasses import dataclass, field
from pathlib import Path
from datetime import datetime
from typing import Optional
import argparse

from intern.catalog import CATALOG, CatalogError, DEFAULT_LAMBDA, DEFAULT_N, DEFAULT_WEIGHTS, build_example
from intern.manifest import load_config
from intern.suites import REPORT_SCHEMA, SUITE_REGISTRY, RunOptions, dump_reports, run_suites, worst_residual
from intern.utils import (
    Logger, ConfigError, timer, print_header, resolve_config_path,
    LOG_DIR, DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOLERANCE_SCALE,
    EXIT_PASS, EXIT_SUITE_FAILURE, EXIT_USAGE,
)


@dataclass
class Outcome:
    code: int
    logger: Optional[Logger] = None
    reports: list = field(default_factory=list)


def _normalize_args(argv: list) -> list:
    """Allow single-dash long options (e.g. -verbose) as an alias for --verbose."""
    normalized = []
    for arg in argv:
        if arg.startswith('-') and not arg.startswith('--') and len(arg) > 2 and arg[1].isalpha():
            normalized.append('-' + arg)
        else:
            normalized.append(arg)
    return normalized


def _weights(text: str) -> tuple:
    try:
        return tuple(int(w) for w in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"weights must be comma-separated integers, got '{text}'")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weylcone",
                                     description="Numerical verification of CR-Weyl structures and their cones")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log", metavar="PATH", nargs="?", const=True, default=None,
                        help=f"Log to PATH, or to a timestamped file under './{LOG_DIR}'.")
    common.add_argument("--verbose", action="store_true",
                        help="Enable verbose logging (per-check residuals).")
    common.add_argument("--no-color", action="store_true",
                        help="Plain console output.")

    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", parents=[common], help="Run verification suites on an example.")
    source = verify.add_mutually_exclusive_group(required=True)
    source.add_argument("--example", metavar="NAME",
                        help=f"Built-in example ({', '.join(CATALOG)}).")
    source.add_argument("--config", metavar="CONFIG_FILE",
                        help="Path or name of a CRWeyl config under ./configs.")
    verify.add_argument("--suite", action="append", choices=list(SUITE_REGISTRY) + ["all"], default=None,
                        help="Suite to run; repeatable. Defaults to all.")
    verify.add_argument("--samples", type=_positive_int, default=DEFAULT_SAMPLES,
                        help=f"Sample points per check (default {DEFAULT_SAMPLES}).")
    verify.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help=f"Sampling seed (default {DEFAULT_SEED}).")
    verify.add_argument("--tolerance-scale", type=float, default=DEFAULT_TOLERANCE_SCALE,
                        help="Multiplies every tolerance.")
    verify.add_argument("--json", metavar="PATH", default=None,
                        help="Write the suite reports as JSON ('-' for stdout).")
    verify.add_argument("--no-timing", action="store_true",
                        help="Leave wall time out of the JSON reports.")

    params = verify.add_argument_group("Example parameters")
    params.add_argument("--n", type=int, default=DEFAULT_N,
                        help=f"Complex dimension (default {DEFAULT_N}).")
    params.add_argument("--weights", type=_weights, default=DEFAULT_WEIGHTS,
                        help="Circle weights, e.g. --weights=1,-1.")
    params.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA,
                        help=f"Dilation factor (default {DEFAULT_LAMBDA:g}).")

    sub.add_parser("list", parents=[common], help="List built-in examples and their expected outcomes.")
    sub.add_parser("report-schema", help="Print the JSON schema of a suite report.")

    return parser


def _make_logger(args) -> Logger:
    log_file = None
    if args.log is True:
        log_dir = Path(LOG_DIR).resolve()
        log_dir.mkdir(parents=True, exist_ok=True)
        timestamp = datetime.now().strftime("%Y-%m-%d_%H-%M-%S")
        log_file = log_dir / f"{timestamp}.txt"
    elif args.log:
        log_file = Path(args.log).resolve()
        log_file.parent.mkdir(parents=True, exist_ok=True)

    logger = Logger(verbose=args.verbose, use_color=not args.no_color,
                    log_file=log_file)
    if log_file:
        logger.info(f"Logging enabled -> {log_file}")
        logger.info("")
    return logger


def _load_bundle(args, logger: Logger):
    if args.config is not None:
        resolved = resolve_config_path(args.config, logger)
        if not resolved:
            raise ConfigError("config file not found", args.config)
        return load_config(resolved, logger)
    bundle = build_example(args.example, args.n, args.weights, args.lam)
    logger.with_context("CAT").info(f"Built '{bundle.name}' ({CATALOG[args.example].description})")
    return bundle


def _selected_suites(args) -> list:
    if not args.suite or "all" in args.suite:
        return list(SUITE_REGISTRY)
    return list(dict.fromkeys(args.suite))


def _verify(args, logger: Logger) -> Outcome:
    try:
        bundle = _load_bundle(args, logger)
    except (CatalogError, ConfigError) as e:
        logger.error(str(e))
        return Outcome(EXIT_USAGE, logger)

    names = _selected_suites(args)
    options = RunOptions(args.samples, args.seed, args.tolerance_scale)
    logger.info(f"Running {len(names)} suite(s) on '{bundle.name}' "
                f"(samples {options.samples}, seed {options.seed}, tolerance x{options.tolerance_scale:g})")
    reports = run_suites(bundle, names, options, logger)

    for r in reports:
        expected = bundle.expected.get(r.suite)
        if expected is not None and r.outcome != "skip" and r.outcome != expected:
            logger.warn(f"{r.suite}: expected {expected}, got {r.outcome} (worst residual {worst_residual(r):.3e})")

    data = dump_reports(reports, timing=not args.no_timing)
    logger.write_block(data, "reports")
    if args.json == "-":
        print(data)
    elif args.json:
        out = Path(args.json)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(data + "\n", encoding="utf-8")
        logger.info(f"Reports written to {out}")

    code = EXIT_PASS if all(r.passed for r in reports) else EXIT_SUITE_FAILURE
    return Outcome(code, logger, reports)


def _list(logger: Logger) -> Outcome:
    width = max(len(name) for name in CATALOG)
    for name, d in CATALOG.items():
        logger.info(f"{name.ljust(width)}  {d.description}")
        table = ", ".join(f"{suite}={outcome}" for suite, outcome in d.expected.items())
        logger.info(f"{' ' * width}  expects: {table}")
        logger.info(f"{' ' * width}  parameters: {', '.join(d.uses)}")
    return Outcome(EXIT_PASS, logger)


def run(argv: Optional[list] = None) -> Outcome:
    """Parses argv and runs one subcommand; argparse usage errors exit with code 2."""
    parser = _build_arg_parser()
    try:
        args = parser.parse_args(_normalize_args(list(sys.argv[1:] if argv is None else argv)))
    except SystemExit as e:
        return Outcome(EXIT_USAGE if e.code else EXIT_PASS)

    if args.command == "report-schema":
        print(json.dumps(REPORT_SCHEMA, indent=2))
        return Outcome(EXIT_PASS)

    logger = _make_logger(args)
    if args.command == "list":
        return _list(logger)
    return _verify(args, logger)


@timer
def main(argv: Optional[list] = None) -> Outcome:
    print_header()
    return run(argv)
