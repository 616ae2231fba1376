import math
from enum import Enum
from typing import Dict, Iterator, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

UNIFORM_TOLERANCE = 1e-12
MAX_SEED = 2**64 - 1


class ModelParams(BaseModel):
    """Alphabet size m, space probability q and optional per-letter probabilities."""

    model_config = ConfigDict(frozen=True)

    m: int = Field(ge=2)
    q: float = Field(gt=0.0, lt=1.0)
    letter_probs: Optional[Tuple[float, ...]] = None

    @model_validator(mode="after")
    def _check_letter_probs(self):
        if self.letter_probs is None:
            return self
        if len(self.letter_probs) != self.m:
            raise ValueError(f"letter_probs must have m={self.m} entries, got {len(self.letter_probs)}")
        if any(not p > 0.0 for p in self.letter_probs):
            raise ValueError("every letter probability must be > 0")
        total = math.fsum(self.letter_probs)
        if abs(total - (1.0 - self.q)) > UNIFORM_TOLERANCE:
            raise ValueError(f"letter_probs sum to {total!r}, expected 1 - q = {1.0 - self.q!r}")
        return self

    @property
    def uniform(self) -> bool:
        if self.letter_probs is None:
            return True
        share = (1.0 - self.q) / self.m
        return all(abs(p - share) <= UNIFORM_TOLERANCE for p in self.letter_probs)


class StreamSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    params: ModelParams
    N: int = Field(ge=0)
    seed: int = Field(ge=0, le=MAX_SEED)
    chunk_index: int = Field(default=0, ge=0)


class CriticalLength(BaseModel):
    model_config = ConfigDict(frozen=True)

    k_star: float
    has_core: bool


class AnalyticReport(BaseModel):
    params: ModelParams
    N: int
    k_max: int
    expected_words: float
    mean_length: float
    length_variance: float
    word_length_pmf_by_length: Dict[int, float]
    expected_tokens_by_length: Dict[int, float]
    word_probability_by_length: Dict[int, float]
    expected_occurrences_by_length: Dict[int, float]
    expected_distinct_by_length: Dict[int, float]
    expected_unique_by_length: Dict[int, float]
    critical_length: float
    no_core: bool
    zipf_alpha: float
    rank_boundaries: Dict[int, int]
    expected_vocabulary: float
    expected_hapax_total: float
    underflow_lengths: List[int] = Field(default_factory=list)


class ExactWordStats(BaseModel):
    N: int
    q: float
    k_max: int
    expected_words: float
    expected_tokens_by_length: Dict[int, float]
    approximate_tokens_by_length: Dict[int, float]
    relative_deviation_by_length: Dict[int, float]


class RankFrequencyTable(BaseModel):
    """Words ordered by rank; rank i + 1 belongs to words[i]."""

    words: List[str] = Field(default_factory=list)
    counts: List[int] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_shape(self):
        if len(self.words) != len(self.counts):
            raise ValueError("words and counts must have the same length")
        return self

    def __len__(self) -> int:
        return len(self.counts)

    def entries(self) -> Iterator[Tuple[int, str, int]]:
        for index, (word, count) in enumerate(zip(self.words, self.counts)):
            yield index + 1, word, count


class CorpusStats(BaseModel):
    N_symbols: int = Field(ge=0)
    total_tokens: int = Field(ge=0)
    tokens_by_length: Dict[int, int] = Field(default_factory=dict)
    types_by_length: Dict[int, int] = Field(default_factory=dict)
    hapax_by_length: Dict[int, int] = Field(default_factory=dict)
    rank_frequency: RankFrequencyTable = Field(default_factory=RankFrequencyTable)
    tracked_k_max: int
    untracked_tokens: int = 0
    params_hint: Optional[ModelParams] = None


class SeparatorPolicy(str, Enum):
    ascii_space_only = "ascii_space_only"
    unicode_whitespace = "unicode_whitespace"


class NormalizationOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    case_fold: bool = True
    strip_punctuation: bool = True
    separator_policy: SeparatorPolicy = SeparatorPolicy.unicode_whitespace


class CorpusProfile(BaseModel):
    n_chars: int = Field(ge=0)
    n_separators: int = Field(ge=0)
    q_hat: float = Field(ge=0.0, le=1.0)
    m_hat: int = Field(ge=1)
    letter_histogram: Dict[str, int] = Field(default_factory=dict)


class RunMetadata(BaseModel):
    source: str
    tool_version: str
    seed: Optional[int] = None
    prng_version: Optional[str] = None
    chunk_size: Optional[int] = None
    normalization: Optional[NormalizationOptions] = None


class StatsDocument(BaseModel):
    """On-disk form of a stats file: what `analyze`/`simulate` write and `compare` reads."""

    stats: CorpusStats
    profile: Optional[CorpusProfile] = None
    metadata: RunMetadata


class FitMethod(str, Enum):
    ols_loglog = "ols_loglog"
    discrete_mle = "discrete_mle"


class FitResult(BaseModel):
    alpha_hat: float = Field(ge=0.0)
    stderr: float = Field(ge=0.0)
    method: FitMethod
    rank_window: Tuple[int, int]
    n_points: int = Field(ge=3)
    n_observations: Optional[float] = None

    @model_validator(mode="after")
    def _check_window(self):
        r_min, r_max = self.rank_window
        if r_min < 1 or r_max <= r_min:
            raise ValueError(f"invalid rank window {self.rank_window}")
        return self


class ComparisonRow(BaseModel):
    name: str
    k: Optional[int] = None
    empirical: float
    predicted: float
    rel_error: float
    tolerance: float
    passed: bool = Field(alias="pass")

    model_config = ConfigDict(populate_by_name=True)


class ReportMetadata(BaseModel):
    params: ModelParams
    N: int
    seed: Optional[int] = None
    prng_version: Optional[str] = None
    tool_version: str
    params_source: str


class ComparisonReport(BaseModel):
    rows: List[ComparisonRow] = Field(default_factory=list)
    metadata: ReportMetadata
    notes: List[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    def failed_rows(self) -> List[ComparisonRow]:
        return [row for row in self.rows if not row.passed]


# --- Settings (config.yaml) ---

class S3Settings(BaseModel):
    endpoint_url: Optional[str] = None
    access_key: Optional[str] = None
    secret_key: Optional[str] = None
    bucket: str


class StorageSettings(BaseModel):
    type: str = "local"
    s3: Optional[S3Settings] = None

    @model_validator(mode="after")
    def _check_type(self):
        if self.type not in ("local", "s3"):
            raise ValueError(f"unsupported storage type: {self.type}")
        if self.type == "s3" and self.s3 is None:
            raise ValueError("storage type 's3' requires an 's3' section")
        return self


class GlobalSettings(BaseModel):
    output_dir: str = "data"
    seed: int = Field(default=42, ge=0, le=MAX_SEED)
    chunk_size: int = Field(default=1 << 20, ge=1)
    max_parallel_jobs: int = Field(default=4, ge=1)
    tracked_k_max: int = Field(default=30, ge=1)
    max_word_length: int = Field(default=1 << 20, ge=1)


class SimulateSettings(BaseModel):
    seed: int = Field(default=42, ge=0, le=MAX_SEED)
    chunk_size: int = Field(default=1 << 20, ge=1)
    max_parallel_jobs: int = Field(default=4, ge=1)
    tracked_k_max: int = Field(default=30, ge=1)
    max_word_length: int = Field(default=1 << 20, ge=1)
    export_corpus: bool = False
    write_csv: bool = False


class AnalyzeSettings(BaseModel):
    tracked_k_max: int = Field(default=30, ge=1)
    max_word_length: int = Field(default=1 << 20, ge=1)
    normalization: NormalizationOptions = Field(default_factory=NormalizationOptions)
    write_csv: bool = False


class CompareTolerances(BaseModel):
    total_tokens: float = 0.005
    tokens_by_length: float = 0.03
    types_by_length: float = 0.05
    hapax_by_length: float = 0.05
    vocabulary: float = 0.05
    hapax_total: float = 0.05
    alpha_abs: float = 0.1
    critical_length_abs: float = 1.0
    min_expected: float = 25.0
    # per-length token rows predicting at least this many use tokens_by_length as is
    large_count: float = 1e4


class CompareSettings(BaseModel):
    tolerances: CompareTolerances = Field(default_factory=CompareTolerances)
    k_max: Optional[int] = Field(default=None, ge=1)


class FitSettings(BaseModel):
    method: FitMethod = FitMethod.ols_loglog
    r_min: int = Field(default=10, ge=1)
    r_max: Optional[int] = None
    min_count: float = Field(default=5, ge=0)
    bins_per_decade: Optional[int] = Field(default=20, ge=1)


class LedgerSettings(BaseModel):
    enabled: bool = True
    path: Optional[str] = None


class MetricsSettings(BaseModel):
    textfile: Optional[str] = None


class Settings(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    global_: GlobalSettings = Field(default_factory=GlobalSettings, alias="global")
    storage: StorageSettings = Field(default_factory=StorageSettings)
    simulate: SimulateSettings = Field(default_factory=SimulateSettings)
    analyze: AnalyzeSettings = Field(default_factory=AnalyzeSettings)
    compare: CompareSettings = Field(default_factory=CompareSettings)
    fit: FitSettings = Field(default_factory=FitSettings)
    ledger: LedgerSettings = Field(default_factory=LedgerSettings)
    metrics: MetricsSettings = Field(default_factory=MetricsSettings)
