import argparse
import json
import os
import tempfile
from typing import List, Optional

from .. import __version__
from ..errors import EXIT_OK
from ..logger import get_logger
from ..models import Run
from ..schemas import CorpusStats, ModelParams, RunMetadata, Settings, StatsDocument
from ..simulation import simulate_stats
from ..stats import write_rank_csv, write_tokens_csv
from ..storage import initialize_storage_provider
from ..utils import file_checksum, sanitize_filename
from . import emit, publish, to_json, write_text

logger = get_logger(__name__)

TOP_RANKS = 10


def register(subparsers) -> None:
    parser = subparsers.add_parser("simulate", help="Generate a seeded random text and count its words.")
    parser.add_argument("-m", type=int, required=True, help="alphabet size")
    parser.add_argument("-q", type=float, required=True, help="space probability")
    parser.add_argument("-N", type=int, required=True, help="text length in symbols")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--chunk-size", type=int, default=None, help="symbols per generator chunk (part of the seed policy)")
    parser.add_argument("--workers", type=int, default=None, help="worker threads; never changes the output")
    parser.add_argument("--tracked-k-max", type=int, default=None)
    parser.add_argument("--export-corpus", action="store_true", default=None, help="also write the corpus text and its sidecar")
    parser.add_argument("--csv", action="store_true", default=None, help="also write the tokens and rank CSV tables")
    parser.add_argument("--name", default=None, help="file name stem of the outputs")
    parser.add_argument("--out", default=None, help="output directory (overrides global.output_dir)")
    parser.set_defaults(handler=run)


def default_stem(params: ModelParams, N: int, seed: int) -> str:
    return sanitize_filename(f"sim m{params.m} q{params.q} n{N} s{seed}")


def summary_line(stats: CorpusStats) -> str:
    top = " ".join(f"{word}:{count}" for _, word, count in list(stats.rank_frequency.entries())[:TOP_RANKS])
    return (
        f"words={stats.total_tokens} types={len(stats.rank_frequency)} "
        f"hapaxes={sum(stats.hapax_by_length.values())} top{TOP_RANKS}=[{top}]"
    )


def run(args: argparse.Namespace, settings: Settings, ledger_run: Run) -> int:
    conf = settings.simulate
    params = ModelParams(m=args.m, q=args.q)
    seed = conf.seed if args.seed is None else args.seed
    chunk_size = args.chunk_size or conf.chunk_size
    workers = args.workers or conf.max_parallel_jobs
    tracked_k_max = args.tracked_k_max or conf.tracked_k_max
    export = conf.export_corpus if args.export_corpus is None else args.export_corpus
    write_csv = conf.write_csv if args.csv is None else args.csv

    ledger_run.params = json.dumps(params.model_dump(exclude_none=True), sort_keys=True)
    ledger_run.n_symbols = args.N
    ledger_run.seed = seed

    storage = initialize_storage_provider(settings, args.out)
    stem = sanitize_filename(args.name) if args.name else default_stem(params, args.N, seed)

    with tempfile.TemporaryDirectory(prefix="randtext-") as staging:
        corpus_path: Optional[str] = os.path.join(staging, f"{stem}.corpus.txt") if export else None
        sidecar_path: Optional[str] = os.path.join(staging, f"{stem}.corpus.json") if export else None

        result = simulate_stats(
            params, args.N, seed,
            chunk_size=chunk_size, workers=workers, tracked_k_max=tracked_k_max,
            max_word_length=conf.max_word_length,
            corpus_path=corpus_path, sidecar_path=sidecar_path,
        )
        ledger_run.prng_version = result.prng_version

        document = StatsDocument(
            stats=result.stats,
            metadata=RunMetadata(
                source="simulate",
                tool_version=__version__,
                seed=seed,
                prng_version=result.prng_version,
                chunk_size=chunk_size,
            ),
        )
        stats_path = write_text(os.path.join(staging, f"{stem}.stats.json"), to_json(document))
        ledger_run.checksum = file_checksum(stats_path)

        staged: List[str] = [stats_path]
        if write_csv:
            tokens_path = os.path.join(staging, f"{stem}.tokens.csv")
            ranks_path = os.path.join(staging, f"{stem}.ranks.csv")
            write_tokens_csv(result.stats, tokens_path)
            write_rank_csv(result.stats, ranks_path)
            staged += [tokens_path, ranks_path]
        if export:
            staged += [corpus_path, sidecar_path]

        locations = [publish(storage, path) for path in staged]

    ledger_run.output_location = locations[0]
    emit(summary_line(result.stats))
    return EXIT_OK
