"""
Estimators for the rank-frequency exponent.

``fit_ols`` regresses ln(count) on ln(rank). The model's rank curve is a
staircase with plateaus that grow geometrically with length, so points are
first averaged inside log-spaced rank bins; with ``bins_per_decade=None`` every
rank is its own point.

``fit_mle`` is the discrete power-law maximum-likelihood estimator with
Hurwitz zeta normalization, solved by bisection.
"""
import csv
import json
import math
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize, special, stats as sps

from .errors import InsufficientDataError
from .logger import get_logger
from .metrics import FIT_ALPHA_HAT
from .schemas import FitMethod, FitResult, RankFrequencyTable, StatsDocument

logger = get_logger(__name__)

DEFAULT_R_MIN = 10
DEFAULT_MIN_COUNT = 5
DEFAULT_BINS_PER_DECADE = 20
MIN_MLE_OBSERVATIONS = 100

ALPHA_BRACKET = (1.0001, 10.0)
ALPHA_XTOL = 1e-6
_ZETA_STEP = 1e-5

RankTable = Union[RankFrequencyTable, Tuple[Sequence[float], Sequence[float]], Sequence[float]]


def rank_arrays(table: RankTable) -> Tuple[np.ndarray, np.ndarray]:
    """(ranks, counts) for a table, a (ranks, counts) pair, or a plain count sequence ranked from 1."""
    if isinstance(table, RankFrequencyTable):
        counts = np.asarray(table.counts, dtype=np.float64)
        return np.arange(1, len(counts) + 1, dtype=np.float64), counts
    if isinstance(table, tuple) and len(table) == 2:
        ranks, counts = (np.asarray(part, dtype=np.float64) for part in table)
        if ranks.shape != counts.shape:
            raise ValueError("ranks and counts must have the same length")
        return ranks, counts
    counts = np.asarray(table, dtype=np.float64)
    return np.arange(1, len(counts) + 1, dtype=np.float64), counts


def _log_bin_means(log_r: np.ndarray, log_c: np.ndarray, bins_per_decade: int) -> Tuple[np.ndarray, np.ndarray]:
    bins = np.floor(log_r / math.log(10) * bins_per_decade + 1e-9).astype(np.int64)
    _, inverse, sizes = np.unique(bins, return_inverse=True, return_counts=True)
    return np.bincount(inverse, weights=log_r) / sizes, np.bincount(inverse, weights=log_c) / sizes


def fit_ols(table: RankTable, r_min: int = DEFAULT_R_MIN, r_max: Optional[int] = None,
            min_count: float = DEFAULT_MIN_COUNT,
            bins_per_decade: Optional[int] = DEFAULT_BINS_PER_DECADE) -> FitResult:
    ranks, counts = rank_arrays(table)
    if r_max is None:
        r_max = int(ranks.max()) if ranks.size else r_min

    mask = (ranks >= r_min) & (ranks <= r_max) & (counts >= min_count) & (counts > 0)
    n_eligible = int(mask.sum())
    if n_eligible < 3 or r_max <= r_min:
        raise InsufficientDataError(
            f"need at least 3 ranks in [{r_min}, {r_max}] with count >= {min_count}, found {n_eligible}"
        )

    log_r = np.log(ranks[mask])
    log_c = np.log(counts[mask])
    if bins_per_decade is not None:
        log_r, log_c = _log_bin_means(log_r, log_c, bins_per_decade)
    if log_r.size < 3:
        raise InsufficientDataError(f"only {log_r.size} rank bins in [{r_min}, {r_max}]; widen the window")

    regression = sps.linregress(log_r, log_c)
    alpha_hat = -float(regression.slope)
    if abs(alpha_hat) < 1e-12:
        alpha_hat = 0.0
    if alpha_hat < 0:
        raise InsufficientDataError(f"counts increase with rank in [{r_min}, {r_max}] (slope {-alpha_hat:.4f})")

    result = FitResult(
        alpha_hat=alpha_hat,
        stderr=float(regression.stderr),
        method=FitMethod.ols_loglog,
        rank_window=(r_min, r_max),
        n_points=int(log_r.size),
        n_observations=float(n_eligible),
    )
    FIT_ALPHA_HAT.labels(method=result.method.value).set(result.alpha_hat)
    logger.debug(f"OLS fit over [{r_min}, {r_max}]: alpha_hat={alpha_hat:.5f} from {log_r.size} points.")
    return result


# --- maximum likelihood ---

def _log_zeta(alpha: float, x_min: float) -> float:
    return math.log(special.zeta(alpha, x_min))


def _log_zeta_derivative(alpha: float, x_min: float) -> float:
    return (_log_zeta(alpha + _ZETA_STEP, x_min) - _log_zeta(alpha - _ZETA_STEP, x_min)) / (2 * _ZETA_STEP)


def _mle_stderr(n: float, alpha: float, x_min: float) -> float:
    h = _ZETA_STEP
    z = special.zeta(alpha, x_min)
    first = (special.zeta(alpha + h, x_min) - special.zeta(alpha - h, x_min)) / (2 * h)
    second = (special.zeta(alpha + h, x_min) - 2 * z + special.zeta(alpha - h, x_min)) / h ** 2
    information = n * (second / z - (first / z) ** 2)
    return 1.0 / math.sqrt(information) if information > 0 else float("inf")


def _mle_observations(data: Union[RankFrequencyTable, Sequence[int]], r_min: int) -> Tuple[np.ndarray, np.ndarray]:
    """(values, weights) of the observations at or above the cutoff."""
    if isinstance(data, RankFrequencyTable):
        counts = np.asarray(data.counts, dtype=np.float64)
        if counts.size and np.all(counts == counts[0]):
            raise InsufficientDataError("all counts are equal; the likelihood has no maximum")
        values = np.arange(1, counts.size + 1, dtype=np.float64)
        weights = counts
    else:
        values, weights = np.unique(np.asarray(data, dtype=np.float64), return_counts=True)
        weights = weights.astype(np.float64)
    keep = values >= r_min
    return values[keep], weights[keep]


def fit_mle(data: Union[RankFrequencyTable, Sequence[int]], r_min: int = 1) -> FitResult:
    """
    Fits p(x) = x^-alpha / zeta(alpha, r_min) for x >= r_min. ``data`` is either
    a sequence of integer observations or a rank-frequency table, where each
    token observes its word's rank.
    """
    values, weights = _mle_observations(data, r_min)
    n = float(weights.sum())
    if n < MIN_MLE_OBSERVATIONS:
        raise InsufficientDataError(f"need at least {MIN_MLE_OBSERVATIONS} observations >= {r_min}, found {n:g}")
    if values.size < 3:
        raise InsufficientDataError(f"need at least 3 distinct values >= {r_min}, found {values.size}")

    mean_log = float(np.dot(weights, np.log(values)) / n)

    def objective(alpha: float) -> float:
        return _log_zeta_derivative(alpha, r_min) + mean_log

    low, high = ALPHA_BRACKET
    f_low, f_high = objective(low), objective(high)
    if f_low >= 0:
        alpha_hat = low
    elif f_high <= 0:
        alpha_hat = high
    else:
        alpha_hat = optimize.bisect(objective, low, high, xtol=ALPHA_XTOL)
    if alpha_hat in ALPHA_BRACKET:
        logger.warning(f"MLE exponent hit the search bound {alpha_hat}")

    result = FitResult(
        alpha_hat=float(alpha_hat),
        stderr=_mle_stderr(n, alpha_hat, r_min),
        method=FitMethod.discrete_mle,
        rank_window=(r_min, int(values.max())),
        n_points=int(values.size),
        n_observations=n,
    )
    FIT_ALPHA_HAT.labels(method=result.method.value).set(result.alpha_hat)
    logger.debug(f"MLE fit from {n:g} observations: alpha_hat={result.alpha_hat:.5f} +/- {result.stderr:.5f}")
    return result


# --- table files ---

def load_rank_table(path: str) -> RankFrequencyTable:
    """
    Reads a rank-frequency table from a stats JSON document, a rank CSV
    (rank,word,count) or a frequency dump CSV (token,count).
    """
    if path.endswith(".json"):
        with open(path, encoding="utf-8") as f:
            return StatsDocument.model_validate(json.load(f)).stats.rank_frequency

    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        rows = list(reader)
    if header == ["rank", "word", "count"]:
        rows.sort(key=lambda row: int(row[0]))
        return RankFrequencyTable(words=[row[1] for row in rows], counts=[int(row[2]) for row in rows])

    from .corpus import read_frequency_csv
    from .stats import finalize

    return finalize(read_frequency_csv(path)).rank_frequency
