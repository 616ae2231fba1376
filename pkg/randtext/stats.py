import csv
from collections import Counter
from typing import Dict, Iterable, List, Optional, Tuple, Union

from .errors import ConfigurationError, UndefinedValueError
from .generator import letter_order_key, render_word
from .logger import get_logger
from .schemas import CorpusStats, ModelParams, RankFrequencyTable
from .segmenter import WordToken

logger = get_logger(__name__)

DEFAULT_TRACKED_K_MAX = 30

Word = Union[WordToken, str]


def _word_key(word: Word) -> str:
    if isinstance(word, str):
        return word
    # a letter id renders to the same character for every alphabet that contains it
    return render_word(word.letters, max(word.letters))


class StatsAccumulator:
    """
    Exact streaming counts over word tokens. Word types of length up to
    ``tracked_k_max`` are interned to compact ids; longer words only count as
    tokens.
    """

    def __init__(self, tracked_k_max: int = DEFAULT_TRACKED_K_MAX):
        if tracked_k_max < 1:
            raise ConfigurationError(f"tracked_k_max must be >= 1, got {tracked_k_max}")
        self.tracked_k_max = tracked_k_max
        self.tokens_by_length: Counter = Counter()
        self.total_tokens = 0
        self.total_symbols_seen = 0
        self.untracked_tokens = 0
        self._ids: Dict[str, int] = {}
        self._words: List[str] = []
        self._counts: List[int] = []

    def observe(self, word: Word, count: int = 1) -> "StatsAccumulator":
        key = _word_key(word)
        length = len(key)
        if length == 0:
            raise ValueError("words have at least one letter")
        self.tokens_by_length[length] += count
        self.total_tokens += count
        if length > self.tracked_k_max:
            self.untracked_tokens += count
            return self
        self._intern(key, count)
        return self

    def observe_many(self, words: Iterable[str]) -> "StatsAccumulator":
        for key, count in Counter(words).items():
            self.observe(key, count)
        return self

    def add_symbols(self, n_symbols: int) -> "StatsAccumulator":
        self.total_symbols_seen += n_symbols
        return self

    def _intern(self, key: str, count: int) -> None:
        index = self._ids.get(key)
        if index is None:
            self._ids[key] = len(self._counts)
            self._words.append(key)
            self._counts.append(count)
        else:
            self._counts[index] += count

    def type_counts(self) -> Dict[str, int]:
        return dict(zip(self._words, self._counts))

    @property
    def letters_seen(self) -> int:
        return sum(length * count for length, count in self.tokens_by_length.items())

    def merge_into(self, other: "StatsAccumulator") -> "StatsAccumulator":
        """Adds ``other`` into this accumulator, re-keying its ids through this intern table."""
        if other.tracked_k_max != self.tracked_k_max:
            raise ConfigurationError(
                f"cannot merge accumulators tracking up to k={self.tracked_k_max} and k={other.tracked_k_max}"
            )
        self.tokens_by_length.update(other.tokens_by_length)
        self.total_tokens += other.total_tokens
        self.total_symbols_seen += other.total_symbols_seen
        self.untracked_tokens += other.untracked_tokens
        for key, count in zip(other._words, other._counts):
            self._intern(key, count)
        return self

    def copy(self) -> "StatsAccumulator":
        return StatsAccumulator(self.tracked_k_max).merge_into(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, StatsAccumulator):
            return NotImplemented
        return (
            self.tracked_k_max == other.tracked_k_max
            and self.total_tokens == other.total_tokens
            and self.total_symbols_seen == other.total_symbols_seen
            and self.untracked_tokens == other.untracked_tokens
            and +self.tokens_by_length == +other.tokens_by_length
            and self.type_counts() == other.type_counts()
        )

    def __repr__(self) -> str:
        return (
            f"StatsAccumulator(tokens={self.total_tokens}, types={len(self._counts)}, "
            f"symbols={self.total_symbols_seen}, tracked_k_max={self.tracked_k_max})"
        )


def observe(acc: StatsAccumulator, word: Word) -> StatsAccumulator:
    return acc.observe(word)


def merge(a: StatsAccumulator, b: StatsAccumulator) -> StatsAccumulator:
    """A new accumulator holding the pointwise sum of ``a`` and ``b``."""
    if a.tracked_k_max != b.tracked_k_max:
        raise ConfigurationError(
            f"cannot merge accumulators tracking up to k={a.tracked_k_max} and k={b.tracked_k_max}"
        )
    return a.copy().merge_into(b)


def finalize(acc: StatsAccumulator, params_hint: Optional[ModelParams] = None) -> CorpusStats:
    types_by_length: Counter = Counter()
    hapax_by_length: Counter = Counter()
    for word, count in zip(acc._words, acc._counts):
        types_by_length[len(word)] += 1
        if count == 1:
            hapax_by_length[len(word)] += 1

    # count desc, length asc, letter order asc
    order = sorted(range(len(acc._counts)), key=lambda i: (-acc._counts[i], len(acc._words[i]), letter_order_key(acc._words[i])))
    table = RankFrequencyTable(
        words=[acc._words[i] for i in order],
        counts=[acc._counts[i] for i in order],
    )

    if acc.untracked_tokens:
        logger.info(
            f"{acc.untracked_tokens} tokens longer than {acc.tracked_k_max} letters were counted as tokens only."
        )

    return CorpusStats(
        N_symbols=acc.total_symbols_seen,
        total_tokens=acc.total_tokens,
        tokens_by_length=dict(sorted(acc.tokens_by_length.items())),
        types_by_length=dict(sorted(types_by_length.items())),
        hapax_by_length={k: hapax_by_length.get(k, 0) for k in sorted(types_by_length)},
        rank_frequency=table,
        tracked_k_max=acc.tracked_k_max,
        untracked_tokens=acc.untracked_tokens,
        params_hint=params_hint,
    )


def hapax_fraction(stats: CorpusStats, k: int) -> float:
    types = stats.types_by_length.get(k, 0)
    if types == 0:
        raise UndefinedValueError(f"no word types of length {k}")
    return stats.hapax_by_length.get(k, 0) / types


def accumulate_frequencies(pairs: Iterable[Tuple[str, int]],
                           tracked_k_max: int = DEFAULT_TRACKED_K_MAX) -> StatsAccumulator:
    """Builds an accumulator from (token, count) rows, bypassing segmentation."""
    acc = StatsAccumulator(tracked_k_max)
    for token, count in pairs:
        if count < 1 or not token:
            logger.debug(f"Skipping frequency row ({token!r}, {count}).")
            continue
        acc.observe(token, count)
    return acc


# --- CSV tables ---

TOKENS_COLUMNS = ["k", "tokens", "types", "hapaxes"]
RANK_COLUMNS = ["rank", "word", "count"]


def write_tokens_csv(stats: CorpusStats, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(TOKENS_COLUMNS)
        for k in sorted(stats.tokens_by_length):
            writer.writerow([
                k,
                stats.tokens_by_length[k],
                stats.types_by_length.get(k, 0),
                stats.hapax_by_length.get(k, 0),
            ])


def write_rank_csv(stats: CorpusStats, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(RANK_COLUMNS)
        writer.writerows(stats.rank_frequency.entries())
