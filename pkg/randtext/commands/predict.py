import argparse
import csv
import io
import json

from ..analytic_model import build_report
from ..errors import EXIT_OK
from ..logger import get_logger
from ..models import Run
from ..schemas import AnalyticReport, ModelParams, Settings
from . import emit, to_json, write_text

logger = get_logger(__name__)

CSV_COLUMNS = [
    "k",
    "word_length_pmf",
    "expected_tokens",
    "word_probability",
    "expected_occurrences",
    "expected_distinct",
    "expected_unique",
]


def register(subparsers) -> None:
    parser = subparsers.add_parser("predict", help="Closed-form predictions for (m, q, N).")
    parser.add_argument("-m", type=int, required=True, help="alphabet size")
    parser.add_argument("-q", type=float, required=True, help="space probability")
    parser.add_argument("-N", type=int, required=True, help="text length in symbols")
    parser.add_argument("--k-max", type=int, default=None, help="largest word length in the per-k maps")
    parser.add_argument("--format", choices=["json", "csv"], default="json")
    parser.add_argument("--output", default=None, help="also write the report to this file")
    parser.set_defaults(handler=run)


def report_csv(report: AnalyticReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for k in sorted(report.expected_tokens_by_length):
        writer.writerow([
            k,
            repr(report.word_length_pmf_by_length[k]),
            repr(report.expected_tokens_by_length[k]),
            repr(report.word_probability_by_length[k]),
            repr(report.expected_occurrences_by_length[k]),
            repr(report.expected_distinct_by_length[k]),
            repr(report.expected_unique_by_length[k]),
        ])
    return buffer.getvalue()


def run(args: argparse.Namespace, settings: Settings, ledger_run: Run) -> int:
    params = ModelParams(m=args.m, q=args.q)
    ledger_run.params = json.dumps(params.model_dump(exclude_none=True), sort_keys=True)
    ledger_run.n_symbols = args.N

    report = build_report(params, args.N, k_max=args.k_max)
    if report.no_core:
        logger.info(f"N q^2 = {args.N * args.q ** 2:.4g} <= 1: no core, every length is in the rare regime.")

    text = report_csv(report) if args.format == "csv" else to_json(report)
    emit(text)
    if args.output:
        ledger_run.output_location = write_text(args.output, text)
    return EXIT_OK
