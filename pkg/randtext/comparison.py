"""
Empirical statistics against the model's closed forms. Each row carries a
relative error and a tolerance; a report passes when every row passes.
"""
import math
from typing import List, Optional, Tuple

from . import __version__
from .analytic_model import (
    critical_length,
    default_k_max,
    expected_distinct_types,
    expected_occurrences,
    expected_tokens_of_length,
    expected_unique_types,
    expected_word_count,
    zipf_exponent,
)
from .corpus import infer_params
from .errors import CannotInferError, InsufficientDataError, UndefinedValueError
from .logger import get_logger
from .metrics import COMPARISON_ROWS_TOTAL
from .schemas import (
    ComparisonReport,
    ComparisonRow,
    CompareTolerances,
    CorpusStats,
    FitSettings,
    ModelParams,
    ReportMetadata,
    StatsDocument,
)
from .stats import hapax_fraction
from .zipf_fit import fit_ols

logger = get_logger(__name__)

EPSILON = 1e-12
# lambda e^-lambda / (1 - e^-lambda) at lambda = 1
HAPAX_CROSSING_FRACTION = math.exp(-1.0) / -math.expm1(-1.0)


def relative_error(empirical: float, predicted: float) -> float:
    return abs(empirical - predicted) / max(abs(predicted), EPSILON)


def make_row(name: str, empirical: float, predicted: float, tolerance: float, k: Optional[int] = None) -> ComparisonRow:
    error = relative_error(empirical, predicted)
    return ComparisonRow(
        name=name, k=k, empirical=float(empirical), predicted=float(predicted),
        rel_error=error, tolerance=tolerance, passed=error <= tolerance,
    )


def spread_tolerance(base: float, predicted: float, variance: float) -> float:
    """The configured tolerance, widened to five standard deviations of the count."""
    return max(base, 5.0 * math.sqrt(max(variance, 0.0)) / max(predicted, EPSILON))


def count_tolerance(base: float, predicted: float) -> float:
    """``spread_tolerance`` for a Poisson count, whose variance is its mean."""
    return spread_tolerance(base, predicted, predicted)


def type_moments(params: ModelParams, N: int, k: int) -> Tuple[float, float]:
    """
    Mean and variance of the number of distinct k-letter words, with each of
    the m^k words seen independently with probability 1 - e^(-lambda_k).
    Saturated lengths have almost no variance.
    """
    lam = expected_occurrences(params, N, k)
    mean = expected_distinct_types(params, N, k)
    return mean, mean * math.exp(-lam)


def hapax_moments(params: ModelParams, N: int, k: int) -> Tuple[float, float]:
    """Mean and variance of the hapax count at length k; a word is a hapax with probability lambda_k e^(-lambda_k)."""
    lam = expected_occurrences(params, N, k)
    mean = expected_unique_types(params, N, k)
    return mean, mean * (1.0 - lam * math.exp(-lam))


def token_tolerance(tolerances: CompareTolerances, predicted: float) -> float:
    if predicted >= tolerances.large_count:
        return tolerances.tokens_by_length
    return count_tolerance(tolerances.tokens_by_length, predicted)


def resolve_params(document: StatsDocument, m: Optional[int] = None,
                   q: Optional[float] = None) -> Tuple[ModelParams, str]:
    """Command-line values first, then the parameters the stats were simulated with, then inference from the profile."""
    base: Optional[ModelParams] = None
    source = None
    if document.stats.params_hint is not None:
        base, source = document.stats.params_hint, "simulation"
    elif document.profile is not None and (m is None or q is None):
        base, source = infer_params(document.profile), "inferred"

    if m is not None and q is not None:
        return ModelParams(m=m, q=q), "command_line"
    if base is None:
        raise CannotInferError("no model parameters: pass -m and -q, or compare stats that carry a corpus profile")
    if m is None and q is None:
        return base, source
    return ModelParams(m=m if m is not None else base.m, q=q if q is not None else base.q), f"command_line+{source}"


def _length_rows(stats: CorpusStats, params: ModelParams, N: int, k_max: int,
                 tolerances: CompareTolerances) -> List[ComparisonRow]:
    rows: List[ComparisonRow] = []
    for k in range(1, k_max + 1):
        predicted = expected_tokens_of_length(N, params.q, k)
        if predicted < tolerances.min_expected:
            continue
        rows.append(make_row(
            "tokens_by_length", stats.tokens_by_length.get(k, 0), predicted,
            token_tolerance(tolerances, predicted), k=k,
        ))

    for k in range(1, min(k_max, stats.tracked_k_max) + 1):
        predicted, variance = type_moments(params, N, k)
        if predicted >= tolerances.min_expected:
            rows.append(make_row(
                "types_by_length", stats.types_by_length.get(k, 0), predicted,
                spread_tolerance(tolerances.types_by_length, predicted, variance), k=k,
            ))
        predicted, variance = hapax_moments(params, N, k)
        if predicted >= tolerances.min_expected:
            rows.append(make_row(
                "hapax_by_length", stats.hapax_by_length.get(k, 0), predicted,
                spread_tolerance(tolerances.hapax_by_length, predicted, variance), k=k,
            ))
    return rows


def _total_rows(stats: CorpusStats, params: ModelParams, N: int,
                tolerances: CompareTolerances) -> List[ComparisonRow]:
    lengths = range(1, stats.tracked_k_max + 1)
    rows: List[ComparisonRow] = []

    predicted = expected_word_count(N, params.q)
    if predicted >= tolerances.min_expected:
        rows.append(make_row(
            "total_tokens", stats.total_tokens, predicted,
            count_tolerance(tolerances.total_tokens, predicted),
        ))

    for name, moments, observed, tolerance in (
        ("vocabulary", type_moments, stats.types_by_length, tolerances.vocabulary),
        ("hapax_total", hapax_moments, stats.hapax_by_length, tolerances.hapax_total),
    ):
        by_length = [moments(params, N, k) for k in lengths]
        predicted = math.fsum(mean for mean, _ in by_length)
        if predicted >= tolerances.min_expected:
            variance = math.fsum(variance for _, variance in by_length)
            rows.append(make_row(
                name, sum(observed.values()), predicted,
                spread_tolerance(tolerance, predicted, variance),
            ))
    return rows


def _alpha_row(stats: CorpusStats, params: ModelParams, tolerances: CompareTolerances,
               fit: FitSettings, notes: List[str]) -> Optional[ComparisonRow]:
    alpha = zipf_exponent(params)
    try:
        result = fit_ols(
            stats.rank_frequency, r_min=fit.r_min, r_max=fit.r_max,
            min_count=fit.min_count, bins_per_decade=fit.bins_per_decade,
        )
    except InsufficientDataError as e:
        notes.append(f"zipf_alpha skipped: {e}")
        return None
    return make_row("zipf_alpha", result.alpha_hat, alpha, tolerances.alpha_abs / alpha)


def observed_crossing_length(stats: CorpusStats, threshold: float = HAPAX_CROSSING_FRACTION) -> Optional[int]:
    """Smallest length whose hapax fraction exceeds ``threshold``."""
    for k in sorted(stats.types_by_length):
        try:
            if hapax_fraction(stats, k) > threshold:
                return k
        except UndefinedValueError:
            continue
    return None


def _crossing_row(stats: CorpusStats, params: ModelParams, N: int, tolerances: CompareTolerances,
                  notes: List[str]) -> Optional[ComparisonRow]:
    crit = critical_length(params, N)
    if not crit.has_core:
        notes.append("critical_length skipped: N q^2 <= 1, every length is in the rare regime")
        return None
    observed = observed_crossing_length(stats)
    if observed is None:
        notes.append(f"critical_length skipped: no tracked length has hapax fraction above {HAPAX_CROSSING_FRACTION:.4f}")
        return None
    return make_row(
        "critical_length", observed, crit.k_star,
        tolerances.critical_length_abs / max(crit.k_star, EPSILON),
    )


def build_comparison(document: StatsDocument, params: ModelParams, params_source: str,
                     tolerances: Optional[CompareTolerances] = None, k_max: Optional[int] = None,
                     fit: Optional[FitSettings] = None) -> ComparisonReport:
    tolerances = tolerances or CompareTolerances()
    fit = fit or FitSettings()
    stats = document.stats
    N = stats.N_symbols
    if N < 1:
        raise InsufficientDataError("cannot compare an empty corpus")
    k_max = k_max or default_k_max(params, N)

    notes: List[str] = []
    if params_source.endswith("inferred"):
        notes.append("parameters inferred from the corpus profile; real letter frequencies are not uniform")

    rows = _total_rows(stats, params, N, tolerances) + _length_rows(stats, params, N, k_max, tolerances)
    for row in (_alpha_row(stats, params, tolerances, fit, notes), _crossing_row(stats, params, N, tolerances, notes)):
        if row is not None:
            rows.append(row)

    metadata = ReportMetadata(
        params=params,
        N=N,
        seed=document.metadata.seed,
        prng_version=document.metadata.prng_version,
        tool_version=__version__,
        params_source=params_source,
    )
    report = ComparisonReport(rows=rows, metadata=metadata, notes=notes)

    failed = report.failed_rows()
    COMPARISON_ROWS_TOTAL.labels(outcome="pass").inc(len(rows) - len(failed))
    COMPARISON_ROWS_TOTAL.labels(outcome="fail").inc(len(failed))
    for row in failed:
        logger.info(
            f"Row {row.name}{'' if row.k is None else f'[k={row.k}]'} failed: empirical={row.empirical:.6g} "
            f"predicted={row.predicted:.6g} rel_error={row.rel_error:.4f} > {row.tolerance:.4f}"
        )
    return report
