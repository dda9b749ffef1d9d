"""JetKit - Command Line Entry Point"""
# Standard library imports
import argparse
import logging
import sys
from typing import Optional, Sequence, TextIO

# Third-party imports
from dotenv import load_dotenv

# Load environment variables before config reads them
load_dotenv()

# Local imports - Configuration
from config import (
    DEFAULT_SEED,
    EXACT_THRESHOLD,
    EXIT_CHECK,
    EXIT_ENGINE,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_USAGE,
    FORCE_EXACT,
    LOG_LEVEL,
    MODULAR_RETRIES,
    EngineSettings,
)

# Local imports - Command groups
from commands import CatalogGroup, CheckGroup, CohomologyGroup, SequenceGroup, SystemGroup
from commands.base import CommandContext

# Local imports - Core functionality
from core.errors import DocumentError, JetKitError
from utils.logger import logger, setup_logging
from utils.report_helpers import emit_error, emit_report, emit_text

GROUPS = [SystemGroup(), CohomologyGroup(), SequenceGroup(), CatalogGroup(), CheckGroup()]


class UsageError(Exception):
    """Raised when the command line cannot be parsed"""


class JetKitArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


# ============================================================================
# PARSER
# ============================================================================

def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--json", action="store_true", default=default(False), help="emit JSON reports")
    parser.add_argument("--seed", type=int, default=default(DEFAULT_SEED),
                        help="seed for modular primes and coordinate changes")
    parser.add_argument("--exact", action="store_true", default=default(FORCE_EXACT),
                        help="disable the modular rank fast path")
    parser.add_argument("--verbose", "-v", action="store_true", default=default(False), help="debug logging")
    parser.add_argument("--quiet", "-q", action="store_true", default=default(False), help="warnings only")


def build_parser() -> argparse.ArgumentParser:
    parser = JetKitArgumentParser(
        prog="jetkit",
        description="Exact formal theory of linear constant-coefficient PDE systems",
    )
    _global_flags(parser, suppress=False)
    common = JetKitArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    for group in GROUPS:
        group.register(subparsers, parents=[common])
    return parser


# ============================================================================
# ENTRY POINT
# ============================================================================

def _configure_logging(args) -> None:
    if args.verbose:
        setup_logging(logging.DEBUG)
    elif args.quiet:
        setup_logging(logging.WARNING)
    else:
        setup_logging(logging.getLevelName(LOG_LEVEL.upper()))


def main(argv: Optional[Sequence[str]] = None, stdin: Optional[TextIO] = None) -> int:
    """
    Run one subcommand

    Args:
        argv: Command line without the program name (default: sys.argv[1:])
        stdin: Stream read when no input file is given (default: sys.stdin)

    Returns:
        Exit code: 0 ok, 1 usage, 2 parse error, 3 engine error, 4 check failure
    """
    parser = build_parser()
    as_json = "--json" in (argv if argv is not None else sys.argv[1:])
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        emit_error(str(e), "usage", as_json)
        return EXIT_USAGE
    if not getattr(args, "handler", None):
        parser.print_help(sys.stderr)
        return EXIT_USAGE

    _configure_logging(args)
    settings = EngineSettings(
        seed=args.seed,
        exact=args.exact,
        retries=MODULAR_RETRIES,
        exact_threshold=EXACT_THRESHOLD,
    )
    ctx = CommandContext(settings, args.json, getattr(args, "file", None), stdin or sys.stdin)
    logger.debug(f"Running {args.command} (seed={settings.seed}, exact={settings.exact})")

    try:
        report = args.handler(ctx, args)
    except DocumentError as e:
        emit_error(str(e), e.code, args.json)
        return EXIT_PARSE
    except JetKitError as e:
        emit_error(str(e), e.code, args.json)
        return EXIT_ENGINE
    except ValueError as e:
        emit_error(str(e), "invalid_argument", args.json)
        return EXIT_ENGINE
    except OSError as e:
        emit_error(f"cannot read input: {e}", "io_error", args.json)
        return EXIT_USAGE

    if report.document is not None and not args.json:
        emit_text(report.document)
    else:
        emit_report(report.payload, args.json)
    if not report.ok:
        return EXIT_CHECK if args.command == "check" else EXIT_ENGINE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
