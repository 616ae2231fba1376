import argparse

from ..errors import EXIT_OK
from ..logger import get_logger
from ..models import Run
from ..schemas import FitMethod, Settings
from ..zipf_fit import fit_mle, fit_ols, load_rank_table
from . import emit, to_json

logger = get_logger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("fit", help="Estimate the rank-frequency exponent of a table.")
    parser.add_argument("table", help="stats JSON, rank CSV (rank,word,count) or frequency CSV (token,count)")
    parser.add_argument("--method", choices=[method.value for method in FitMethod], default=None)
    parser.add_argument("--r-min", type=int, default=None)
    parser.add_argument("--r-max", type=int, default=None)
    parser.add_argument("--min-count", type=float, default=None)
    parser.add_argument(
        "--bins-per-decade", type=int, default=None,
        help="log-rank bins for the OLS fit; 0 fits every rank",
    )
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace, settings: Settings, ledger_run: Run) -> int:
    conf = settings.fit
    method = FitMethod(args.method) if args.method else conf.method
    table = load_rank_table(args.table)
    logger.info(f"Fitting {method.value} on {len(table)} ranks from {args.table}")

    if method == FitMethod.discrete_mle:
        result = fit_mle(table, r_min=args.r_min or 1)
    else:
        bins = conf.bins_per_decade if args.bins_per_decade is None else (args.bins_per_decade or None)
        result = fit_ols(
            table,
            r_min=args.r_min or conf.r_min,
            r_max=args.r_max if args.r_max is not None else conf.r_max,
            min_count=conf.min_count if args.min_count is None else args.min_count,
            bins_per_decade=bins,
        )
    emit(to_json(result))
    return EXIT_OK
