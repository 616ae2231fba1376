"""
Real-text ingestion. Text is normalized (case fold, punctuation strip,
separator classification), then flows through the same segmenter and
accumulator as simulated streams.
"""
import codecs
import csv
import json
import os
import unicodedata
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import CannotInferError, CorpusDecodeError, EmptyCorpusError
from .logger import get_logger
from .metrics import WORDS_SEGMENTED_TOTAL
from .schemas import CorpusProfile, CorpusStats, ModelParams, NormalizationOptions, SeparatorPolicy
from .segmenter import DEFAULT_MAX_WORD_LENGTH, TextSegmenter
from .stats import DEFAULT_TRACKED_K_MAX, StatsAccumulator, accumulate_frequencies, finalize

logger = get_logger(__name__)

SEPARATOR = " "
READ_BLOCK_SIZE = 1 << 20


def _translation_table(text: str, opts: NormalizationOptions) -> Dict[int, Optional[str]]:
    table: Dict[int, Optional[str]] = {}
    for char in set(text):
        if opts.strip_punctuation and unicodedata.category(char).startswith("P"):
            table[ord(char)] = None
        elif opts.separator_policy == SeparatorPolicy.unicode_whitespace and char.isspace():
            table[ord(char)] = SEPARATOR
    return table


def normalize_text(text: str, opts: Optional[NormalizationOptions] = None) -> str:
    """Case fold, then drop P* characters, then map separator characters to a single space each."""
    opts = opts or NormalizationOptions()
    if opts.case_fold:
        text = text.casefold()
    table = _translation_table(text, opts)
    return text.translate(table) if table else text


class TextProfiler:
    """Streaming profile and word statistics over text fed in pieces."""

    def __init__(self, opts: Optional[NormalizationOptions] = None,
                 tracked_k_max: int = DEFAULT_TRACKED_K_MAX,
                 max_word_length: int = DEFAULT_MAX_WORD_LENGTH):
        self.opts = opts or NormalizationOptions()
        self.accumulator = StatsAccumulator(tracked_k_max)
        self.segmenter = TextSegmenter(SEPARATOR, max_word_length)
        self.n_chars = 0
        self.n_separators = 0
        self.letter_histogram: Counter = Counter()

    def feed(self, piece: str) -> "TextProfiler":
        normalized = normalize_text(piece, self.opts)
        if not normalized:
            return self
        separators = normalized.count(SEPARATOR)
        self.n_chars += len(normalized)
        self.n_separators += separators
        self.letter_histogram.update(normalized)
        self.accumulator.add_symbols(len(normalized))
        self.accumulator.observe_many(self.segmenter.feed(normalized))
        return self

    def merge_into(self, other: "TextProfiler") -> "TextProfiler":
        """Adds a finished profiler for a separate text; no word spans the two texts."""
        self.n_chars += other.n_chars
        self.n_separators += other.n_separators
        self.letter_histogram.update(other.letter_histogram)
        self.accumulator.merge_into(other.accumulator)
        return self

    def finish(self) -> Tuple[CorpusProfile, CorpusStats]:
        self.accumulator.observe_many(self.segmenter.finish())
        self.letter_histogram.pop(SEPARATOR, None)
        if not self.letter_histogram:
            raise EmptyCorpusError("no letters left after normalization")

        profile = CorpusProfile(
            n_chars=self.n_chars,
            n_separators=self.n_separators,
            q_hat=self.n_separators / self.n_chars,
            m_hat=len(self.letter_histogram),
            letter_histogram=dict(sorted(self.letter_histogram.items())),
        )
        WORDS_SEGMENTED_TOTAL.labels(source="corpus").inc(self.accumulator.total_tokens)
        return profile, finalize(self.accumulator)


def profile_text(text: str, opts: Optional[NormalizationOptions] = None,
                 tracked_k_max: int = DEFAULT_TRACKED_K_MAX,
                 max_word_length: int = DEFAULT_MAX_WORD_LENGTH) -> Tuple[CorpusProfile, CorpusStats]:
    return TextProfiler(opts, tracked_k_max, max_word_length).feed(text).finish()


def iter_text_file(path: str, block_size: int = READ_BLOCK_SIZE) -> Iterable[str]:
    """Decodes a UTF-8 file incrementally; errors report the absolute byte offset."""
    decoder = codecs.getincrementaldecoder("utf-8")(errors="strict")
    consumed = 0
    with open(path, "rb") as f:
        while True:
            block = f.read(block_size)
            buffered = len(decoder.getstate()[0])
            try:
                text = decoder.decode(block, final=not block)
            except UnicodeDecodeError as e:
                raise CorpusDecodeError(consumed - buffered + e.start, e.reason) from e
            consumed += len(block)
            if text:
                yield text
            if not block:
                break


def _profile_into(path: str, profiler: TextProfiler) -> TextProfiler:
    logger.debug(f"Profiling {path}")
    for piece in iter_text_file(path):
        profiler.feed(piece)
    profiler.accumulator.observe_many(profiler.segmenter.finish())
    return profiler


def profile_file(path: str, opts: Optional[NormalizationOptions] = None,
                 tracked_k_max: int = DEFAULT_TRACKED_K_MAX,
                 max_word_length: int = DEFAULT_MAX_WORD_LENGTH) -> Tuple[CorpusProfile, CorpusStats]:
    return profile_files([path], opts, tracked_k_max, max_word_length)


def profile_files(paths: Sequence[str], opts: Optional[NormalizationOptions] = None,
                  tracked_k_max: int = DEFAULT_TRACKED_K_MAX,
                  max_word_length: int = DEFAULT_MAX_WORD_LENGTH,
                  workers: int = 1) -> Tuple[CorpusProfile, CorpusStats]:
    """Profiles each file as a separate text and merges the results in input order."""
    if not paths:
        raise EmptyCorpusError("no input files")

    def run(path: str) -> TextProfiler:
        return _profile_into(path, TextProfiler(opts, tracked_k_max, max_word_length))

    if workers > 1 and len(paths) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            profilers: List[TextProfiler] = list(executor.map(run, paths))
    else:
        profilers = [run(path) for path in paths]

    total = TextProfiler(opts, tracked_k_max, max_word_length)
    for profiler in profilers:
        total.merge_into(profiler)
    profile, stats = total.finish()
    logger.info(
        f"Profiled {len(paths)} file(s): {profile.n_chars} characters, "
        f"{stats.total_tokens} words, q_hat={profile.q_hat:.4f}, m_hat={profile.m_hat}"
    )
    return profile, stats


def infer_params(profile: CorpusProfile) -> ModelParams:
    """Uniform-letter parameters (m_hat, q_hat); real letter frequencies are not uniform."""
    if profile.m_hat < 2:
        raise CannotInferError(f"need at least 2 distinct letters, found {profile.m_hat}")
    if not 0.0 < profile.q_hat < 1.0:
        raise CannotInferError(f"separator frequency {profile.q_hat} is degenerate")
    return ModelParams(m=profile.m_hat, q=profile.q_hat)


# --- frequency dumps ---

def read_frequency_rows(path: str) -> List[Tuple[str, int]]:
    """(token, count) rows of a CSV dump; a header row is skipped when its count column is not an integer."""
    rows: List[Tuple[str, int]] = []
    with open(path, encoding="utf-8", newline="") as f:
        for line_number, row in enumerate(csv.reader(f), start=1):
            if not row:
                continue
            if len(row) < 2:
                raise CorpusDecodeError(0, f"line {line_number}: expected token,count")
            try:
                count = int(row[1])
            except ValueError:
                if line_number == 1:
                    continue
                raise CorpusDecodeError(0, f"line {line_number}: count {row[1]!r} is not an integer")
            rows.append((row[0], count))
    return rows


def read_frequency_csv(path: str, tracked_k_max: int = DEFAULT_TRACKED_K_MAX) -> StatsAccumulator:
    acc = accumulate_frequencies(read_frequency_rows(path), tracked_k_max)
    if acc.total_tokens == 0:
        raise EmptyCorpusError(f"no usable rows in {path}")
    return acc


def frequency_profile(acc: StatsAccumulator) -> CorpusProfile:
    """Profile of a frequency dump, taking one separator per token."""
    histogram: Counter = Counter()
    for word, count in acc.type_counts().items():
        for char in word:
            histogram[char] += count
    n_letters = acc.letters_seen
    n_chars = n_letters + acc.total_tokens
    return CorpusProfile(
        n_chars=n_chars,
        n_separators=acc.total_tokens,
        q_hat=acc.total_tokens / n_chars,
        m_hat=max(len(histogram), 1),
        letter_histogram=dict(sorted(histogram.items())),
    )


def profile_frequency_csv(path: str, tracked_k_max: int = DEFAULT_TRACKED_K_MAX) -> Tuple[CorpusProfile, CorpusStats]:
    acc = read_frequency_csv(path, tracked_k_max)
    acc.add_symbols(acc.letters_seen + acc.total_tokens)
    WORDS_SEGMENTED_TOTAL.labels(source="frequency_dump").inc(acc.total_tokens)
    return frequency_profile(acc), finalize(acc)


# --- generator sidecars ---

def sidecar_path_for(corpus_path: str) -> str:
    return os.path.splitext(corpus_path)[0] + ".json"


def read_sidecar(corpus_path: str) -> Optional[Dict[str, Any]]:
    """The JSON sidecar written next to an exported corpus, if there is one."""
    path = sidecar_path_for(corpus_path)
    if path == corpus_path or not os.path.exists(path):
        return None
    with open(path, encoding="utf-8") as f:
        sidecar = json.load(f)
    if not isinstance(sidecar, dict) or "m" not in sidecar or "q" not in sidecar:
        logger.warning(f"Ignoring {path}: not a corpus sidecar.")
        return None
    return sidecar


def sidecar_params(sidecar: Dict[str, Any]) -> ModelParams:
    letter_probs = sidecar.get("letter_probs")
    return ModelParams(m=sidecar["m"], q=sidecar["q"], letter_probs=tuple(letter_probs) if letter_probs else None)
