import argparse
import os
import tempfile
from typing import List

from .. import __version__
from ..corpus import (
    profile_files,
    profile_frequency_csv,
    read_sidecar,
    sidecar_params,
)
from ..errors import EXIT_OK
from ..logger import get_logger
from ..models import Run
from ..schemas import NormalizationOptions, RunMetadata, SeparatorPolicy, Settings, StatsDocument
from ..stats import write_rank_csv, write_tokens_csv
from ..storage import initialize_storage_provider
from ..utils import file_checksum, sanitize_filename
from . import emit, publish, to_json, write_text

logger = get_logger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("analyze", help="Profile real text (or a token,count CSV) and count its words.")
    parser.add_argument("inputs", nargs="+", help="UTF-8 text files, or one frequency CSV")
    parser.add_argument("--no-case-fold", dest="case_fold", action="store_false", default=None)
    parser.add_argument("--keep-punctuation", dest="strip_punctuation", action="store_false", default=None)
    parser.add_argument("--separators", choices=[p.value for p in SeparatorPolicy], default=None)
    parser.add_argument("--tracked-k-max", type=int, default=None)
    parser.add_argument("--csv", action="store_true", default=None, help="also write the tokens and rank CSV tables")
    parser.add_argument("--name", default=None, help="file name stem of the outputs")
    parser.add_argument("--out", default=None, help="output directory (overrides global.output_dir)")
    parser.set_defaults(handler=run)


def normalization_from_args(args: argparse.Namespace, base: NormalizationOptions) -> NormalizationOptions:
    overrides = {}
    if args.case_fold is not None:
        overrides["case_fold"] = args.case_fold
    if args.strip_punctuation is not None:
        overrides["strip_punctuation"] = args.strip_punctuation
    if args.separators is not None:
        overrides["separator_policy"] = SeparatorPolicy(args.separators)
    return base.model_copy(update=overrides)


def run(args: argparse.Namespace, settings: Settings, ledger_run: Run) -> int:
    conf = settings.analyze
    opts = normalization_from_args(args, conf.normalization)
    tracked_k_max = args.tracked_k_max or conf.tracked_k_max
    write_csv = conf.write_csv if args.csv is None else args.csv
    metadata = RunMetadata(source="analyze", tool_version=__version__)

    if len(args.inputs) == 1 and args.inputs[0].lower().endswith(".csv"):
        profile, stats = profile_frequency_csv(args.inputs[0], tracked_k_max)
    else:
        profile, stats = profile_files(
            args.inputs, opts, tracked_k_max, conf.max_word_length,
            workers=settings.global_.max_parallel_jobs,
        )
        metadata.normalization = opts
        sidecar = read_sidecar(args.inputs[0]) if len(args.inputs) == 1 else None
        if sidecar is not None:
            logger.info(f"Using generator parameters m={sidecar['m']}, q={sidecar['q']} from the corpus sidecar.")
            stats = stats.model_copy(update={"params_hint": sidecar_params(sidecar)})
            metadata.seed = sidecar.get("seed")
            metadata.prng_version = sidecar.get("prng_version")
            metadata.chunk_size = sidecar.get("chunk_size")

    ledger_run.n_symbols = stats.N_symbols
    ledger_run.seed = metadata.seed
    ledger_run.prng_version = metadata.prng_version

    storage = initialize_storage_provider(settings, args.out)
    stem = sanitize_filename(args.name or os.path.splitext(os.path.basename(args.inputs[0]))[0]) or "corpus"
    document = StatsDocument(stats=stats, profile=profile, metadata=metadata)

    with tempfile.TemporaryDirectory(prefix="randtext-") as staging:
        stats_path = write_text(os.path.join(staging, f"{stem}.stats.json"), to_json(document))
        ledger_run.checksum = file_checksum(stats_path)
        staged: List[str] = [stats_path]
        if write_csv:
            tokens_path = os.path.join(staging, f"{stem}.tokens.csv")
            ranks_path = os.path.join(staging, f"{stem}.ranks.csv")
            write_tokens_csv(stats, tokens_path)
            write_rank_csv(stats, ranks_path)
            staged += [tokens_path, ranks_path]
        locations = [publish(storage, path) for path in staged]

    ledger_run.output_location = locations[0]
    emit(to_json(profile))
    return EXIT_OK
