"""
Command-line front end:

    nilbohr <command> --config <path> [--workers w] [--out dir] [--emit-latex]
    nilbohr verify --result <file>
    nilbohr history [--limit n | --run-id id | --delete id]
"""

import argparse
import sys
from loguru import logger
from nilbohr import __version__
from nilbohr.errors import ParameterError
from nilbohr.logging_decorator import log_decorator as log
from nilbohr.main import EXIT_OK, EXIT_PARAMETER, forget, history, run, verify_file
from nilbohr.validators import COMMANDS, build_config, load_config

LOG_FILE = "nilbohr.log"
LOG_LEVEL_FILE = "DEBUG"
LOG_LEVEL_CONSOLE = "INFO"
LOG_LEVEL_QUIET = "WARNING"
LOG_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss.SSS zz}</green> | "
    "<level>{level: <8}</level> | "
    "<yellow>Line {line: >4} ({file}):</yellow> <b>{message}</b>"
)


def configure_logging(quiet=False):
    """Replaces loguru's default sink with the file and console sinks."""
    logger.remove()
    logger.add(
        LOG_FILE,
        level=LOG_LEVEL_FILE,
        format=LOG_FORMAT,
        colorize=False,
        backtrace=True,
        diagnose=True,
    )
    logger.add(sys.stderr, level=LOG_LEVEL_QUIET if quiet else LOG_LEVEL_CONSOLE, format=LOG_FORMAT)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nilbohr", description="Exact experiments on Nil-Bohr sets and SG_k recurrence."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        sub = commands.add_parser(command, help=f"run a {command} experiment")
        sub.add_argument("--config", required=True, help="JSON instance file")
        sub.add_argument("--workers", type=int, default=None, help="processes for sharded scans")
        sub.add_argument("--out", default=None, help="result directory (default results/)")
        sub.add_argument("--emit-latex", action="store_true", help="also write a LaTeX table")
        sub.add_argument("--seed", type=int, default=None, help="override the config seed")
        sub.add_argument("--quiet", action="store_true", help="console shows warnings only")
    verify = commands.add_parser("verify", help="re-verify a result file independently")
    verify.add_argument("--result", required=True, help="result JSON written by a run")
    verify.add_argument("--quiet", action="store_true")
    listing = commands.add_parser("history", help="list ledger rows, newest first")
    listing.add_argument("--limit", type=int, default=20)
    rows = listing.add_mutually_exclusive_group()
    rows.add_argument("--run-id", default=None, help="show the full row of one run")
    rows.add_argument("--delete", default=None, metavar="RUN_ID", help="remove one run from the ledger")
    listing.add_argument("--quiet", action="store_true")
    return parser


@log
def run_command(args):
    try:
        raw = load_config(args.config)
        config = build_config(
            args.command,
            raw,
            out=args.out,
            workers=args.workers,
            seed=args.seed,
            emit_latex=args.emit_latex,
        )
    except ParameterError as error:
        logger.error("CONFIG FAILURE: {}", error)
        return EXIT_PARAMETER
    return run(config)


@log
def verify_command(args):
    status, report = verify_file(args.result)
    if report is not None:
        for line in report.checks:
            print(line)
    return status


@log
def history_command(args):
    if args.delete:
        if not forget(args.delete):
            logger.error("HISTORY FAILURE: no run {} to delete", args.delete)
            return EXIT_PARAMETER
        print(f"deleted {args.delete}")
        return EXIT_OK
    rows = history(run_id=args.run_id) if args.run_id else history(args.limit)
    if args.run_id and not rows:
        logger.error("HISTORY FAILURE: no run {}", args.run_id)
        return EXIT_PARAMETER
    for row in rows:
        run_id = row["run_id"] if args.run_id else row["run_id"][:12]
        print(
            f"{run_id}  {row['command']:<15} status={row['status']} "
            f"found={row['found']} value={row['value']} {row['timestamp']}"
        )
    return EXIT_OK


def main(argv=None):
    """
    Console entry point.

    :param argv: argument list (default sys.argv[1:])
    :return: exit status
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.quiet)
    if args.command == "verify":
        return verify_command(args)
    if args.command == "history":
        return history_command(args)
    return run_command(args)


if __name__ == "__main__":
    sys.exit(main())
