"""
Closed-form predictions of the random-text model.

Conventions: ``q`` is the per-symbol space probability and ``m`` the number of
letters. Word lengths follow P(L = k) = q (1 - q)^(k - 1) for k >= 1; a word is a
maximal run of letters, so consecutive spaces produce no word and length-0
words do not exist.

Some derivations of the same quantities use a per-position convention with
``p`` for the space probability, ``q`` for the letter probability and ``A`` for
the alphabet size. They map onto the functions here as::

    p (space)   <-> q
    q (letter)  <-> 1 - q
    A           <-> m
    W_N         <-> K_N   (expected_word_count)
    E[X_w]      <-> lambda_k (expected_occurrences)

The per-position count E[W_N] = N p is only a first-order count; the exact
value used here is E[K_N] = (1 - q)(1 + (N - 1) q).
"""
import math
import operator
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, OracleCostError, RankOverflowError, UnsupportedConfigurationError
from .logger import get_logger
from .schemas import AnalyticReport, CriticalLength, ExactWordStats, ModelParams

logger = get_logger(__name__)

# largest R_k reported; for m = 26 this is reached at k = 13
MAX_RANK = 2**63 - 1
MAX_ORACLE_LENGTH = 20
ORACLE_BLOCK_PATTERNS = 1 << 12


def _check_q(q: float) -> float:
    if not 0.0 < q < 1.0:
        raise DomainError(f"space probability must lie in (0, 1), got {q!r}")
    return float(q)


def _as_int(value, name: str, minimum: int) -> int:
    try:
        value = operator.index(value)
    except TypeError:
        raise DomainError(f"{name} must be an integer, got {value!r}") from None
    if value < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {value}")
    return value


def _check_text_length(N) -> int:
    return _as_int(N, "N", 0)


def _require_uniform(params: ModelParams) -> None:
    if not params.uniform:
        raise UnsupportedConfigurationError(
            "closed-form word statistics assume equiprobable letters; "
            "these params carry non-uniform letter_probs"
        )


# --- word lengths ---

def word_length_pmf(q: float, k: int) -> float:
    q = _check_q(q)
    k = _as_int(k, "k", 1)
    return q * (1.0 - q) ** (k - 1)


def word_length_tail(q: float, k: int) -> float:
    """P(L > k)."""
    q = _check_q(q)
    k = _as_int(k, "k", 0)
    return (1.0 - q) ** k


def word_length_moments(q: float) -> Tuple[float, float]:
    q = _check_q(q)
    return 1.0 / q, (1.0 - q) / (q * q)


def expected_word_count(N: int, q: float) -> float:
    """Exact E[K_N]: a word starts at position 1 if it is a letter, elsewhere after a space."""
    q = _check_q(q)
    N = _check_text_length(N)
    if N == 0:
        return 0.0
    return (1.0 - q) * (1.0 + (N - 1) * q)


def expected_tokens_of_length(N: int, q: float, k: int) -> float:
    """E[K_N^(k)] ~ N q^2 (1 - q)^k, ignoring the two text boundaries."""
    q = _check_q(q)
    N = _check_text_length(N)
    k = _as_int(k, "k", 1)
    return N * q * q * (1.0 - q) ** k


# --- word types ---

def _log_word_probability(params: ModelParams, k: float) -> float:
    return math.log(params.q) + (k - 1) * math.log1p(-params.q) - k * math.log(params.m)


def word_probability(params: ModelParams, k: int) -> float:
    """pi_k: probability that a word token equals one fixed k-letter string."""
    _require_uniform(params)
    k = _as_int(k, "k", 1)
    return math.exp(_log_word_probability(params, k))


def expected_occurrences(params: ModelParams, N: int, k: float) -> float:
    """
    lambda_k = N q^2 ((1 - q)/m)^k, the expected count of one fixed k-letter word.
    ``k`` may be real so the crossing lambda = 1 can be evaluated at k*.
    """
    _require_uniform(params)
    N = _check_text_length(N)
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k!r}")
    if N == 0:
        return 0.0
    q = params.q
    return math.exp(math.log(N) + 2.0 * math.log(q) + k * (math.log1p(-q) - math.log(params.m)))


def expected_distinct_types(params: ModelParams, N: int, k: int) -> float:
    """E[V_k] = m^k [1 - (1 - pi_k)^K] with real K = N q (1 - q)."""
    _require_uniform(params)
    N = _check_text_length(N)
    k = _as_int(k, "k", 1)
    q = params.q
    K = N * q * (1.0 - q)
    if K == 0.0:
        return 0.0
    pi = word_probability(params, k)
    if pi == 0.0:
        # rare-regime limit m^k K pi
        return expected_tokens_of_length(N, q, k)
    fraction = -math.expm1(K * math.log1p(-pi))
    if fraction == 0.0:
        return 0.0
    return math.exp(k * math.log(params.m) + math.log(fraction))


def expected_distinct_types_poisson(params: ModelParams, N: int, k: int) -> float:
    """Poisson form m^k (1 - e^(-lambda_k)); agrees with expected_distinct_types to first order in pi_k."""
    lam = expected_occurrences(params, N, _as_int(k, "k", 1))
    if lam == 0.0:
        return expected_tokens_of_length(N, params.q, k)
    return math.exp(k * math.log(params.m) + math.log(-math.expm1(-lam)))


def expected_unique_types(params: ModelParams, N: int, k: int) -> float:
    """U_k = m^k lambda_k e^(-lambda_k), the Poisson-approximate count of hapax types of length k."""
    lam = expected_occurrences(params, N, _as_int(k, "k", 1))
    # m^k lambda_k is the expected token count of length k
    return expected_tokens_of_length(N, params.q, k) * math.exp(-lam)


def critical_length(params: ModelParams, N: int) -> CriticalLength:
    """k* solving lambda_k = 1; flagged as having no core when N q^2 <= 1."""
    _require_uniform(params)
    N = _as_int(N, "N", 1)
    q = params.q
    log_scale = math.log(N) + 2.0 * math.log(q)
    k_star = log_scale / (math.log(params.m) - math.log1p(-q))
    return CriticalLength(k_star=k_star, has_core=log_scale > 0.0)


def zipf_exponent(params: ModelParams) -> float:
    return 1.0 - math.log1p(-params.q) / math.log(params.m)


# --- ranks ---

def rank_boundary(m: int, k: int) -> int:
    """R_k = m (m^k - 1)/(m - 1), the number of words of length <= k."""
    m = _as_int(m, "m", 2)
    k = _as_int(k, "k", 0)
    boundary = m * (m**k - 1) // (m - 1)
    if boundary > MAX_RANK:
        raise RankOverflowError(f"R_{k} for m={m} exceeds {MAX_RANK}")
    return boundary


def length_at_rank(m: int, r: int) -> int:
    """The unique k with R_(k-1) < r <= R_k."""
    m = _as_int(m, "m", 2)
    r = _as_int(r, "r", 1)
    k, boundary, block = 1, m, m
    while boundary < r:
        block *= m
        boundary += block
        k += 1
    return k


def predicted_rank_frequency(params: ModelParams, r: int) -> float:
    _require_uniform(params)
    return word_probability(params, length_at_rank(params.m, r))


def predicted_rank_table(params: ModelParams, r_max: int) -> Tuple[np.ndarray, np.ndarray]:
    """Ranks 1..r_max and the exact step-function probability at each."""
    _require_uniform(params)
    r_max = _as_int(r_max, "r_max", 1)
    ranks = np.arange(1, r_max + 1, dtype=np.int64)
    probabilities = np.empty(r_max, dtype=np.float64)
    start, block, k = 0, params.m, 1
    while start < r_max:
        stop = min(start + block, r_max)
        probabilities[start:stop] = word_probability(params, k)
        start = stop
        block *= params.m
        k += 1
    return ranks, probabilities


def poisson_occurrence_pmf(lam: float, c: int) -> float:
    if lam < 0:
        raise DomainError(f"lambda must be >= 0, got {lam!r}")
    c = _as_int(c, "c", 0)
    if lam == 0:
        return 1.0 if c == 0 else 0.0
    return math.exp(c * math.log(lam) - lam - float(gammaln(c + 1)))


# --- totals ---

def default_k_max(params: ModelParams, N: int) -> int:
    k_max = math.ceil(4.0 / params.q)
    if N >= 1:
        crit = critical_length(params, N)
        if crit.has_core:
            k_max = max(k_max, math.ceil(2.0 * crit.k_star))
    return max(k_max, 1)


def _rare_tail(N: int, q: float, k_max: int) -> float:
    # sum over k > k_max of N q^2 (1 - q)^k
    return N * q * (1.0 - q) ** (k_max + 1)


def expected_vocabulary(params: ModelParams, N: int, k_max: Optional[int] = None) -> float:
    """V(N) = sum_k E[V_k]; lengths past k_max are taken in the rare regime, where V_k equals the token count."""
    _require_uniform(params)
    N = _check_text_length(N)
    if N == 0:
        return 0.0
    k_max = k_max or default_k_max(params, N)
    terms = [expected_distinct_types(params, N, k) for k in range(1, k_max + 1)]
    terms.append(_rare_tail(N, params.q, k_max))
    return math.fsum(terms)


def expected_hapax_total(params: ModelParams, N: int, k_max: Optional[int] = None) -> float:
    _require_uniform(params)
    N = _check_text_length(N)
    if N == 0:
        return 0.0
    k_max = k_max or default_k_max(params, N)
    terms = [expected_unique_types(params, N, k) for k in range(1, k_max + 1)]
    terms.append(_rare_tail(N, params.q, k_max))
    return math.fsum(terms)


def expected_hapax_ratio(params: ModelParams, N: int) -> float:
    """Expected hapaxes per word token; tends to a constant set by (m, q) as N grows."""
    words = expected_word_count(N, params.q)
    if words == 0.0:
        raise DomainError("no words are expected in an empty text")
    return expected_hapax_total(params, N) / words


def vocabulary_growth_curve(params: ModelParams, sizes: Sequence[int]) -> List[Tuple[int, float]]:
    return [(int(N), expected_vocabulary(params, N)) for N in sizes]


# --- report ---

def build_report(params: ModelParams, N: int, k_max: Optional[int] = None) -> AnalyticReport:
    _require_uniform(params)
    N = _as_int(N, "N", 1)
    q = params.q
    crit = critical_length(params, N)
    k_max = k_max or default_k_max(params, N)
    lengths = range(1, k_max + 1)

    pmf = {k: word_length_pmf(q, k) for k in lengths}
    tokens = {k: expected_tokens_of_length(N, q, k) for k in lengths}
    pis = {k: word_probability(params, k) for k in lengths}
    lambdas = {k: expected_occurrences(params, N, k) for k in lengths}
    distinct = {k: expected_distinct_types(params, N, k) for k in lengths}
    unique = {k: expected_unique_types(params, N, k) for k in lengths}
    underflow = [k for k in lengths if pis[k] == 0.0 or lambdas[k] == 0.0]
    if underflow:
        logger.warning(f"Word probabilities underflow to 0 for {len(underflow)} lengths from k={underflow[0]}.")

    boundaries: Dict[int, int] = {}
    for k in lengths:
        try:
            boundaries[k] = rank_boundary(params.m, k)
        except RankOverflowError:
            logger.debug(f"Rank boundaries truncated at k={k - 1} (R_k beyond {MAX_RANK}).")
            break

    mean, variance = word_length_moments(q)
    return AnalyticReport(
        params=params,
        N=N,
        k_max=k_max,
        expected_words=expected_word_count(N, q),
        mean_length=mean,
        length_variance=variance,
        word_length_pmf_by_length=pmf,
        expected_tokens_by_length=tokens,
        word_probability_by_length=pis,
        expected_occurrences_by_length=lambdas,
        expected_distinct_by_length=distinct,
        expected_unique_by_length=unique,
        critical_length=crit.k_star,
        no_core=not crit.has_core,
        zipf_alpha=zipf_exponent(params),
        rank_boundaries=boundaries,
        expected_vocabulary=expected_vocabulary(params, N, k_max),
        expected_hapax_total=expected_hapax_total(params, N, k_max),
        underflow_lengths=underflow,
    )


# --- exact oracle ---

def _pattern_block(first: int, stop: int, N: int, q: float, k_max: int) -> Tuple[List[float], Dict[int, List[float]]]:
    """Weighted word counts of the patterns first..stop-1; bit j of a pattern marks a letter at position j + 1."""
    patterns = np.arange(first, stop, dtype=np.int64)
    letters = ((patterns[:, None] >> np.arange(N)) & 1).astype(np.int8)
    n_letters = letters.sum(axis=1, dtype=np.int64)
    weights = np.power(1.0 - q, n_letters) * np.power(q, N - n_letters)

    padded = np.pad(letters, ((0, 0), (1, 1)))
    prefix = np.zeros((len(patterns), N + 3), dtype=np.int8)
    np.cumsum(padded, axis=1, dtype=np.int8, out=prefix[:, 1:])

    starts = (padded[:, 1:N + 1] == 1) & (padded[:, 0:N] == 0)
    words = [math.fsum(weights * starts.sum(axis=1))]

    by_length: Dict[int, List[float]] = {}
    for k in range(1, k_max + 1):
        runs = np.zeros(len(patterns), dtype=np.int64)
        # a run of exactly k letters occupying padded positions s..s+k-1
        for s in range(1, N - k + 2):
            runs += (
                (padded[:, s - 1] == 0)
                & (padded[:, s + k] == 0)
                & (prefix[:, s + k] - prefix[:, s] == k)
            )
        by_length[k] = [math.fsum(weights * runs)]
    return words, by_length


def exact_bruteforce_word_stats(N: int, q: float, k_max: int) -> ExactWordStats:
    """
    Exact E[K_N] and E[K_N^(k)] by summing over all 2^N space/letter patterns.
    Letters are interchangeable here, so only the pattern matters. Patterns
    are enumerated in blocks of ORACLE_BLOCK_PATTERNS.
    """
    q = _check_q(q)
    N = _as_int(N, "N", 1)
    k_max = _as_int(k_max, "k_max", 1)
    if N > MAX_ORACLE_LENGTH:
        raise OracleCostError(f"exhaustive enumeration is limited to N <= {MAX_ORACLE_LENGTH}, got {N}")

    word_terms: List[float] = []
    length_terms: Dict[int, List[float]] = {k: [] for k in range(1, k_max + 1)}
    n_patterns = 2**N
    for first in range(0, n_patterns, ORACLE_BLOCK_PATTERNS):
        words, by_length = _pattern_block(first, min(first + ORACLE_BLOCK_PATTERNS, n_patterns), N, q, k_max)
        word_terms += words
        for k, terms in by_length.items():
            length_terms[k] += terms

    expected_words = math.fsum(word_terms)
    exact = {k: math.fsum(terms) for k, terms in length_terms.items()}
    approximate = {k: N * q * q * (1.0 - q) ** k for k in exact}
    deviation = {k: (exact[k] - approximate[k]) / approximate[k] for k in exact}
    return ExactWordStats(
        N=N,
        q=q,
        k_max=k_max,
        expected_words=expected_words,
        expected_tokens_by_length=exact,
        approximate_tokens_by_length=approximate,
        relative_deviation_by_length=deviation,
    )
