import pytest

from randtext.corpus import (
    iter_text_file,
    infer_params,
    normalize_text,
    profile_file,
    profile_files,
    profile_frequency_csv,
    profile_text,
    read_frequency_rows,
    read_sidecar,
    sidecar_params,
    sidecar_path_for,
)
from randtext.errors import CannotInferError, CorpusDecodeError, EmptyCorpusError
from randtext.schemas import ModelParams, NormalizationOptions, SeparatorPolicy
from randtext.simulation import simulate_stats

RAW = NormalizationOptions(case_fold=False, strip_punctuation=False,
                           separator_policy=SeparatorPolicy.ascii_space_only)


def test_profile_simple_text():
    profile, stats = profile_text("ab cd")
    assert profile.n_chars == 5
    assert profile.n_separators == 1
    assert profile.q_hat == pytest.approx(0.2)
    assert profile.m_hat == 4
    assert stats.tokens_by_length == {2: 2}
    assert stats.types_by_length == {2: 2}
    assert stats.N_symbols == 5


def test_case_fold_and_punctuation_strip():
    assert normalize_text("Ab, ab!") == "ab ab"
    _, stats = profile_text("Ab, ab!")
    assert stats.types_by_length == {2: 1}
    assert stats.hapax_by_length == {2: 0}


def test_whitespace_runs_split_like_spaces():
    profile, stats = profile_text("a\tb\n\nc")
    assert stats.rank_frequency.words == ["a", "b", "c"]
    assert profile.n_separators == 3


def test_ascii_space_only_keeps_other_whitespace_as_letters():
    opts = NormalizationOptions(separator_policy=SeparatorPolicy.ascii_space_only)
    profile, stats = profile_text("a\tb c", opts)
    assert stats.rank_frequency.words == ["c", "a\tb"]
    assert "\t" in profile.letter_histogram


@pytest.mark.parametrize("text", [
    "The  Quick, brown fox!\n",
    "¿Qué tal?\tBIEN; gracias.",
    "ΣΊΣΥΦΟΣ straße",
])
def test_normalization_is_idempotent(text):
    once = normalize_text(text)
    assert normalize_text(once) == once


def test_infer_params():
    profile, _ = profile_text("ab cd")
    assert infer_params(profile) == ModelParams(m=4, q=0.2)


@pytest.mark.parametrize("text", ["aaaa aa", "abcd"])
def test_infer_params_rejects_degenerate_profiles(text):
    profile, _ = profile_text(text)
    with pytest.raises(CannotInferError):
        infer_params(profile)


@pytest.mark.parametrize("text", ["", "   ", "!!! ... ?"])
def test_empty_corpus(text):
    with pytest.raises(EmptyCorpusError):
        profile_text(text)


def test_decode_error_reports_byte_offset(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_bytes(b"ab cd \xff ef")
    with pytest.raises(CorpusDecodeError) as excinfo:
        profile_file(str(path))
    assert excinfo.value.byte_offset == 6


def test_decode_error_offset_across_blocks(tmp_path):
    path = tmp_path / "split.txt"
    path.write_bytes("abcé".encode("utf-8") + b"\xff")
    with pytest.raises(CorpusDecodeError) as excinfo:
        list(iter_text_file(str(path), block_size=4))
    assert excinfo.value.byte_offset == 5


def test_multibyte_characters_split_between_blocks(tmp_path):
    text = "añb çd ñ" * 50
    path = tmp_path / "utf8.txt"
    path.write_bytes(text.encode("utf-8"))
    assert "".join(iter_text_file(str(path), block_size=3)) == text


def test_profile_files_keeps_texts_apart(tmp_path):
    first = tmp_path / "one.txt"
    second = tmp_path / "two.txt"
    first.write_text("ab cd")
    second.write_text("ef ab")
    profile, stats = profile_files([str(first), str(second)], workers=2)
    assert stats.total_tokens == 4
    assert stats.rank_frequency.words[0] == "ab"
    assert "cdef" not in stats.rank_frequency.words
    assert profile.n_chars == 10


def test_profile_files_requires_input():
    with pytest.raises(EmptyCorpusError):
        profile_files([])


def test_frequency_csv(tmp_path):
    path = tmp_path / "freq.csv"
    path.write_text("token,count\nthe,3\nof,1\n")
    profile, stats = profile_frequency_csv(str(path))
    assert stats.total_tokens == 4
    assert stats.rank_frequency.words == ["the", "of"]
    assert profile.n_chars == 15
    assert profile.q_hat == pytest.approx(4 / 15)
    assert profile.m_hat == 5


def test_frequency_csv_rejects_bad_counts(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("the,3\nof,many\n")
    with pytest.raises(CorpusDecodeError):
        read_frequency_rows(str(path))


def test_exported_corpus_round_trips_through_ingestion(tmp_path):
    params = ModelParams(m=3, q=0.3)
    corpus = tmp_path / "sim.corpus.txt"
    simulated = simulate_stats(params, 50_000, seed=31, chunk_size=4096, workers=2,
                               corpus_path=str(corpus), sidecar_path=sidecar_path_for(str(corpus)))

    sidecar = read_sidecar(str(corpus))
    assert sidecar is not None
    assert sidecar_params(sidecar) == params

    profile, stats = profile_file(str(corpus), RAW)
    stats = stats.model_copy(update={"params_hint": sidecar_params(sidecar)})
    assert stats == simulated.stats
    assert profile.m_hat == 3
    assert profile.n_chars == 50_000


def test_read_sidecar_ignores_missing_or_foreign_files(tmp_path):
    corpus = tmp_path / "text.txt"
    corpus.write_text("ab")
    assert read_sidecar(str(corpus)) is None
    (tmp_path / "text.json").write_text('{"unrelated": true}')
    assert read_sidecar(str(corpus)) is None
