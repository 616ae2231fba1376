import argparse
import json
from typing import Dict, List

from ..comparison import build_comparison, resolve_params
from ..errors import EXIT_COMPARISON_FAILED, EXIT_OK, ConfigurationError
from ..logger import get_logger
from ..models import Run
from ..schemas import CompareTolerances, Settings
from . import emit, load_document, to_json, write_text

logger = get_logger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("compare", help="Compare a stats file against the model's predictions.")
    parser.add_argument("stats", help="stats JSON written by simulate or analyze")
    parser.add_argument("-m", type=int, default=None, help="alphabet size (default: from the stats file)")
    parser.add_argument("-q", type=float, default=None, help="space probability (default: from the stats file)")
    parser.add_argument("--k-max", type=int, default=None, help="largest word length compared")
    parser.add_argument(
        "--tolerance", action="append", default=[], metavar="NAME=VALUE",
        help=f"override one tolerance; names: {', '.join(CompareTolerances.model_fields)}",
    )
    parser.add_argument("--output", default=None, help="also write the report to this file")
    parser.set_defaults(handler=run)


def parse_tolerances(pairs: List[str], base: CompareTolerances) -> CompareTolerances:
    overrides: Dict[str, float] = {}
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep or name not in CompareTolerances.model_fields:
            raise ConfigurationError(f"bad tolerance '{pair}', expected NAME=VALUE with NAME in {list(CompareTolerances.model_fields)}")
        try:
            overrides[name] = float(value)
        except ValueError as e:
            raise ConfigurationError(f"tolerance '{name}' must be a number, got '{value}'") from e
    return CompareTolerances.model_validate(dict(base.model_dump(), **overrides))


def run(args: argparse.Namespace, settings: Settings, ledger_run: Run) -> int:
    document = load_document(args.stats)
    params, source = resolve_params(document, args.m, args.q)
    tolerances = parse_tolerances(args.tolerance, settings.compare.tolerances)

    ledger_run.params = json.dumps(params.model_dump(exclude_none=True), sort_keys=True)
    ledger_run.n_symbols = document.stats.N_symbols
    ledger_run.seed = document.metadata.seed
    ledger_run.prng_version = document.metadata.prng_version

    report = build_comparison(
        document, params, source,
        tolerances=tolerances,
        k_max=args.k_max or settings.compare.k_max,
        fit=settings.fit,
    )
    text = to_json(report)
    emit(text)
    if args.output:
        ledger_run.output_location = write_text(args.output, text)

    failed = report.failed_rows()
    if failed:
        logger.warning(f"{len(failed)} of {len(report.rows)} comparison rows failed.")
        return EXIT_COMPARISON_FAILED
    logger.info(f"All {len(report.rows)} comparison rows passed.")
    return EXIT_OK
