import pytest

from randtext.comparison import (
    HAPAX_CROSSING_FRACTION,
    build_comparison,
    count_tolerance,
    hapax_moments,
    make_row,
    observed_crossing_length,
    relative_error,
    resolve_params,
    spread_tolerance,
    token_tolerance,
    type_moments,
)
from randtext.corpus import profile_text
from randtext.errors import CannotInferError, InsufficientDataError
from randtext.schemas import CompareTolerances, CorpusStats, ModelParams, RunMetadata, StatsDocument
from randtext.simulation import simulate_stats

PARAMS = ModelParams(m=4, q=0.3)
ENGLISH = ModelParams(m=26, q=0.2)
COUNT_ROWS = {"total_tokens", "tokens_by_length", "types_by_length", "hapax_by_length", "vocabulary", "hapax_total"}


def document_for(result, seed):
    return StatsDocument(stats=result.stats, metadata=RunMetadata(source="simulate", tool_version="test", seed=seed))


@pytest.fixture(scope="module")
def simulated_document():
    return document_for(simulate_stats(PARAMS, 200_000, seed=9, workers=2), seed=9)


@pytest.fixture(scope="module")
def english_document():
    return document_for(simulate_stats(ENGLISH, 100_000, seed=1), seed=1)


def test_relative_error_and_rows():
    assert relative_error(110, 100) == pytest.approx(0.1)
    assert relative_error(1, 0) > 1e6
    row = make_row("total_tokens", 102, 100, 0.05)
    assert row.passed
    assert row.model_dump(by_alias=True)["pass"] is True
    assert not make_row("total_tokens", 120, 100, 0.05).passed


def test_count_tolerance_has_poisson_floor():
    assert count_tolerance(0.005, 1e8) == 0.005
    assert count_tolerance(0.005, 100) == pytest.approx(0.5)
    assert spread_tolerance(0.05, 26, 1e-40) == 0.05
    assert spread_tolerance(0.05, 100, 64) == pytest.approx(0.4)


def test_token_rows_use_configured_tolerance_for_large_counts():
    tolerances = CompareTolerances()
    assert token_tolerance(tolerances, 1e4) == 0.03
    assert token_tolerance(tolerances, 2.5e5) == 0.03
    assert token_tolerance(tolerances, 2500) == pytest.approx(0.1)


def test_type_moments_vanish_when_saturated():
    mean, variance = type_moments(ENGLISH, 10**6, 1)
    assert mean == pytest.approx(26)
    assert variance < 1e-100
    # rare regime: every word seen at most once, so the count is Poisson
    mean, variance = type_moments(ENGLISH, 10**6, 8)
    assert variance == pytest.approx(mean, rel=1e-3)
    mean, variance = hapax_moments(ENGLISH, 10**6, 8)
    assert variance == pytest.approx(mean, rel=1e-3)


def test_model_passes_every_row_at_its_own_params(simulated_document):
    params, source = resolve_params(simulated_document)
    assert params == PARAMS
    assert source == "simulation"

    report = build_comparison(simulated_document, params, source)
    names = {row.name for row in report.rows}
    assert names >= COUNT_ROWS | {"zipf_alpha", "critical_length"}
    assert report.passed, [row for row in report.rows if not row.passed]
    assert report.metadata.N == 200_000
    assert report.metadata.seed == 9


def test_saturated_type_count_is_held_to_configured_tolerance(english_document):
    row = next(row for row in build_comparison(english_document, ENGLISH, "simulation").rows
               if row.name == "types_by_length" and row.k == 1)
    assert row.empirical == 26
    assert row.tolerance == 0.05
    assert row.passed

    stats = english_document.stats
    halved = english_document.model_copy(update={
        "stats": stats.model_copy(update={"types_by_length": {**stats.types_by_length, 1: 13}}),
    })
    report = build_comparison(halved, ENGLISH, "simulation")
    row = next(row for row in report.rows if row.name == "types_by_length" and row.k == 1)
    assert row.rel_error == pytest.approx(0.5)
    assert not row.passed
    assert not report.passed


def test_hapax_total_has_its_own_tolerance(simulated_document):
    tolerances = CompareTolerances(vocabulary=0.5, hapax_total=0.9)
    report = build_comparison(simulated_document, PARAMS, "simulation", tolerances=tolerances)
    assert next(row for row in report.rows if row.name == "hapax_total").tolerance >= 0.9
    assert next(row for row in report.rows if row.name == "vocabulary").tolerance == pytest.approx(0.5)


def test_wrong_space_probability_fails_total_tokens(simulated_document):
    report = build_comparison(simulated_document, ModelParams(m=4, q=0.4), "command_line")
    total = next(row for row in report.rows if row.name == "total_tokens")
    assert not total.passed
    assert not report.passed


def test_rows_below_min_expected_are_omitted(simulated_document):
    report = build_comparison(simulated_document, PARAMS, "simulation")
    assert all(row.predicted >= 25 for row in report.rows if row.name in COUNT_ROWS)
    # all 4 one-letter words are always seen, and 4 < 25
    assert not any(row.name == "types_by_length" and row.k == 1 for row in report.rows)


def test_resolve_params_precedence(simulated_document):
    assert resolve_params(simulated_document, 5, 0.2) == (ModelParams(m=5, q=0.2), "command_line")
    assert resolve_params(simulated_document, q=0.25) == (ModelParams(m=4, q=0.25), "command_line+simulation")

    profile, stats = profile_text("ab cd ab ef")
    document = StatsDocument(stats=stats, profile=profile, metadata=RunMetadata(source="analyze", tool_version="test"))
    params, source = resolve_params(document)
    assert source == "inferred"
    assert params.m == 6

    bare = StatsDocument(stats=stats, metadata=RunMetadata(source="analyze", tool_version="test"))
    with pytest.raises(CannotInferError):
        resolve_params(bare)


def test_inferred_parameters_add_a_note():
    profile, stats = profile_text("the cat sat on the mat " * 40)
    document = StatsDocument(stats=stats, profile=profile, metadata=RunMetadata(source="analyze", tool_version="test"))
    params, source = resolve_params(document)
    report = build_comparison(document, params, source)
    assert any("inferred" in note for note in report.notes)


def test_empty_stats_cannot_be_compared():
    document = StatsDocument(stats=CorpusStats(N_symbols=0, total_tokens=0, tracked_k_max=30),
                             metadata=RunMetadata(source="simulate", tool_version="test"))
    with pytest.raises(InsufficientDataError):
        build_comparison(document, PARAMS, "command_line")


def test_observed_crossing_length():
    stats = CorpusStats(
        N_symbols=100, total_tokens=30, tracked_k_max=30,
        tokens_by_length={1: 10, 2: 10, 3: 10},
        types_by_length={1: 4, 2: 8, 3: 10},
        hapax_by_length={1: 0, 2: 4, 3: 10},
    )
    assert HAPAX_CROSSING_FRACTION == pytest.approx(0.582, abs=1e-3)
    assert observed_crossing_length(stats) == 3
    assert observed_crossing_length(stats, threshold=0.4) == 2
    assert observed_crossing_length(stats, threshold=1.0) is None
