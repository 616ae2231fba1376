"""
Chunked simulation: chunk i of a corpus is the stream of
StreamSpec(params, n_i, seed, chunk_index=i). Chunks are segmented
independently in worker threads; the words cut by chunk boundaries are joined
again while the per-chunk accumulators are merged in chunk order, so the
statistics equal those of segmenting the concatenated stream in one pass.
"""
import math
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from typing import Iterator, List, NamedTuple, Optional

from .errors import DomainError, WordTooLongError
from .generator import PRNG_VERSION, generate_array, render_symbols, write_sidecar
from .logger import get_logger
from .metrics import CHUNKS_PROCESSED_TOTAL, WORDS_SEGMENTED_TOTAL
from .schemas import CorpusStats, ModelParams, StreamSpec
from .segmenter import DEFAULT_MAX_WORD_LENGTH
from .stats import DEFAULT_TRACKED_K_MAX, StatsAccumulator, finalize

logger = get_logger(__name__)

DEFAULT_CHUNK_SIZE = 1 << 20


class ChunkResult(NamedTuple):
    index: int
    n_symbols: int
    has_space: bool
    head: str
    tail: str
    accumulator: StatsAccumulator
    text: Optional[str]


class SimulationResult(NamedTuple):
    stats: CorpusStats
    accumulator: StatsAccumulator
    n_chunks: int
    chunk_size: int
    prng_version: str


def chunk_specs(params: ModelParams, N: int, seed: int, chunk_size: int = DEFAULT_CHUNK_SIZE) -> List[StreamSpec]:
    if N < 0:
        raise DomainError(f"N must be >= 0, got {N}")
    if chunk_size < 1:
        raise DomainError(f"chunk_size must be >= 1, got {chunk_size}")
    n_chunks = math.ceil(N / chunk_size)
    return [
        StreamSpec(params=params, N=min(chunk_size, N - i * chunk_size), seed=seed, chunk_index=i)
        for i in range(n_chunks)
    ]


def process_chunk(spec: StreamSpec, tracked_k_max: int = DEFAULT_TRACKED_K_MAX,
                  max_word_length: int = DEFAULT_MAX_WORD_LENGTH, keep_text: bool = False) -> ChunkResult:
    text = render_symbols(generate_array(spec), spec.params.m)
    parts = text.split(" ")
    acc = StatsAccumulator(tracked_k_max).add_symbols(spec.N)

    if len(parts) == 1:
        result = ChunkResult(spec.chunk_index, spec.N, False, text, text, acc, text if keep_text else None)
    else:
        interior = [word for word in parts[1:-1] if word]
        if interior:
            longest = max(map(len, interior))
            if longest > max_word_length:
                raise WordTooLongError(longest, max_word_length)
        acc.observe_many(interior)
        result = ChunkResult(spec.chunk_index, spec.N, True, parts[0], parts[-1], acc, text if keep_text else None)

    CHUNKS_PROCESSED_TOTAL.inc()
    logger.debug(f"Chunk {spec.chunk_index}: {spec.N} symbols, {acc.total_tokens} interior words.")
    return result


def _ordered_results(specs: List[StreamSpec], workers: int, **chunk_kwargs) -> Iterator[ChunkResult]:
    if workers <= 1:
        for spec in specs:
            yield process_chunk(spec, **chunk_kwargs)
        return

    # bounded look-ahead keeps at most 2 * workers finished chunks in memory
    with ThreadPoolExecutor(max_workers=workers) as executor:
        pending = deque()
        for spec in specs:
            pending.append(executor.submit(process_chunk, spec, **chunk_kwargs))
            if len(pending) >= 2 * workers:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()


def stitch_chunks(results: Iterator[ChunkResult], tracked_k_max: int = DEFAULT_TRACKED_K_MAX,
                  max_word_length: int = DEFAULT_MAX_WORD_LENGTH,
                  corpus_file=None) -> StatsAccumulator:
    total = StatsAccumulator(tracked_k_max)
    carry = ""
    for result in results:
        if corpus_file is not None:
            corpus_file.write(result.text.encode("utf-8"))
        total.merge_into(result.accumulator)
        if not result.has_space:
            carry += result.head
            if len(carry) > max_word_length:
                raise WordTooLongError(len(carry), max_word_length)
            continue
        word = carry + result.head
        if len(word) > max_word_length:
            raise WordTooLongError(len(word), max_word_length)
        if word:
            total.observe(word)
        carry = result.tail
    if carry:
        total.observe(carry)
    return total


def simulate_stats(params: ModelParams, N: int, seed: int, chunk_size: int = DEFAULT_CHUNK_SIZE,
                   workers: int = 1, tracked_k_max: int = DEFAULT_TRACKED_K_MAX,
                   max_word_length: int = DEFAULT_MAX_WORD_LENGTH,
                   corpus_path: Optional[str] = None, sidecar_path: Optional[str] = None) -> SimulationResult:
    """
    Generates N symbols and returns their word statistics. The result depends
    on (params, N, seed, chunk_size) only, never on ``workers``.
    """
    start_time = time.time()
    specs = chunk_specs(params, N, seed, chunk_size)
    logger.info(f"Simulating N={N} symbols (m={params.m}, q={params.q}, seed={seed}) "
                f"in {len(specs)} chunks with {workers} workers.")

    results = _ordered_results(
        specs, workers,
        tracked_k_max=tracked_k_max, max_word_length=max_word_length, keep_text=corpus_path is not None,
    )
    if corpus_path is not None:
        with open(corpus_path, "wb") as corpus_file:
            acc = stitch_chunks(results, tracked_k_max, max_word_length, corpus_file=corpus_file)
        if sidecar_path is not None:
            write_sidecar(sidecar_path, params, N, seed, chunk_size)
    else:
        acc = stitch_chunks(results, tracked_k_max, max_word_length)

    WORDS_SEGMENTED_TOTAL.labels(source="simulate").inc(acc.total_tokens)
    stats = finalize(acc, params_hint=params)
    logger.info(f"Simulation finished: {acc.total_tokens} words in {time.time() - start_time:.2f}s.")
    return SimulationResult(stats, acc, len(specs), chunk_size, PRNG_VERSION)
