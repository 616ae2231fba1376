import argparse
import sys
import time
from typing import List, Optional

from . import __version__
from .commands import analyze, compare, fit, predict, simulate
from .config import load_config
from .database import RunLedger
from .errors import EXIT_OK, describe_error
from .logger import get_logger, setup_logging
from .metrics import COMMAND_DURATION_SECONDS, COMMAND_LAST_STATUS, export_metrics

logger = get_logger(__name__)

COMMANDS = (predict, simulate, analyze, compare, fit)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="randtext",
        description="Random-text null model: predictions, simulation and corpus comparison.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", default=None, help="config file (default: $RANDTEXT_CONFIG or config.yaml)")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging()

    start_time = time.time()
    settings = None
    try:
        settings = load_config(args.config)
        ledger = RunLedger.from_settings(settings)
        with ledger.record(args.command) as run:
            exit_code = args.handler(args, settings, run)
    except Exception as e:
        summary = describe_error(e)
        logger.error(summary.summary)
        logger.debug("Traceback:", exc_info=True)
        exit_code = summary.exit_code

    COMMAND_DURATION_SECONDS.labels(command=args.command).observe(time.time() - start_time)
    COMMAND_LAST_STATUS.labels(command=args.command).set(exit_code)
    if settings is not None and settings.metrics.textfile:
        export_metrics(settings.metrics.textfile)

    if exit_code != EXIT_OK:
        logger.debug(f"'{args.command}' exited with code {exit_code}")
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
