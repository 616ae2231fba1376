import json
import math

import numpy as np
import pytest
from scipy import stats as sps

from randtext.generator import (
    ASCII_LETTERS,
    PRNG_VERSION,
    SPACE,
    cumulative_table,
    derive_chunk_seed,
    export_corpus,
    generate_array,
    generate_stream,
    iter_blocks,
    render_symbols,
    render_word,
    symbol_alphabet,
)
from randtext.schemas import ModelParams, StreamSpec

SEED = 20240607


def spec(m=26, q=0.2, N=10**6, seed=SEED, chunk_index=0, letter_probs=None):
    return StreamSpec(params=ModelParams(m=m, q=q, letter_probs=letter_probs), N=N, seed=seed, chunk_index=chunk_index)


def test_stream_is_deterministic():
    first = generate_array(spec(N=50_000))
    second = generate_array(spec(N=50_000))
    assert first.tobytes() == second.tobytes()
    assert list(generate_stream(spec(N=1000))) == first[:1000].tolist()


def test_different_seeds_and_chunks_give_different_streams():
    base = generate_array(spec(N=1000))
    assert not np.array_equal(base, generate_array(spec(N=1000, seed=SEED + 1)))
    assert not np.array_equal(base, generate_array(spec(N=1000, chunk_index=1)))


@pytest.mark.parametrize("block_size", [1, 7, 4096, 10**6])
def test_blocks_concatenate_to_the_same_stream(block_size):
    expected = generate_array(spec(N=20_000))
    blocks = list(iter_blocks(spec(N=20_000), block_size=block_size))
    assert np.array_equal(np.concatenate(blocks), expected)


def test_empty_stream():
    assert generate_array(spec(N=0)).size == 0
    assert list(generate_stream(spec(N=0))) == []


def test_symbols_stay_in_range():
    symbols = generate_array(spec(m=3, q=0.4, N=100_000))
    assert symbols.min() >= 0
    assert symbols.max() <= 3


def test_space_fraction_within_binomial_bound():
    N = 10**6
    symbols = generate_array(spec(N=N))
    space_fraction = np.count_nonzero(symbols == SPACE) / N
    assert abs(space_fraction - 0.2) < 4 * math.sqrt(0.2 * 0.8 / N)


def test_letter_frequencies_within_five_sigma():
    N = 10**6
    counts = np.bincount(generate_array(spec(N=N)), minlength=27)
    p = 0.8 / 26
    sigma = math.sqrt(N * p * (1 - p))
    assert np.all(np.abs(counts[1:] - N * p) < 5 * sigma)


def test_symbol_histogram_chi_square():
    N = 10**6
    counts = np.bincount(generate_array(spec(N=N)), minlength=27)
    expected = np.array([0.2] + [0.8 / 26] * 26) * N
    assert sps.chisquare(counts, expected).pvalue > 1e-4


def test_non_uniform_letters_follow_their_probabilities():
    N = 10**6
    letter_probs = (0.1, 0.2, 0.4)
    counts = np.bincount(generate_array(spec(m=3, q=0.3, N=N, letter_probs=letter_probs)), minlength=4)
    expected = np.array((0.3,) + letter_probs) * N
    assert sps.chisquare(counts, expected).pvalue > 1e-4


def test_lag_one_pairs_are_independent():
    symbols = generate_array(spec(m=4, q=0.3, N=10**6)).astype(np.int64)
    table = np.zeros((5, 5), dtype=np.int64)
    np.add.at(table, (symbols[:-1], symbols[1:]), 1)
    assert sps.chi2_contingency(table).pvalue > 1e-4


def test_cumulative_table_ends_at_one():
    table = cumulative_table(ModelParams(m=26, q=0.2))
    assert table[0] == 0.2
    assert table[-1] == 1.0
    assert np.all(np.diff(table) > 0)


# --- chunk seeds ---

def test_derived_seeds_are_stable():
    assert derive_chunk_seed(0, 0) == derive_chunk_seed(0, 0)
    assert 0 <= derive_chunk_seed(2**64 - 1, 12345) < 2**64


def test_derived_seeds_do_not_collide():
    seeds = {derive_chunk_seed(SEED, i) for i in range(10**6)}
    assert len(seeds) == 10**6


def test_derived_seed_avalanche():
    flips = [
        bin(derive_chunk_seed(SEED + s, 7) ^ derive_chunk_seed(SEED + s, 8)).count("1") / 64
        for s in range(10**4)
    ]
    assert 0.4 < sum(flips) / len(flips) < 0.6


# --- rendering and export ---

def test_symbol_alphabet():
    assert symbol_alphabet(3) == " abc"
    assert symbol_alphabet(94)[1:] == ASCII_LETTERS
    wide = symbol_alphabet(100)
    assert wide[95] == "一"
    assert len(wide) == 101
    with pytest.raises(ValueError):
        symbol_alphabet(10**6)


def test_render_symbols():
    assert render_symbols(np.array([0, 1, 2, 0, 3], dtype=np.uint8), 3) == " ab c"
    assert render_symbols(np.array([95, 0, 1], dtype=np.uint32), 100) == "一 a"
    assert render_word((3, 1), 26) == "ca"


def test_export_corpus_writes_bytes_and_sidecar(tmp_path):
    stream = spec(m=26, q=0.2, N=5000)
    corpus_path = tmp_path / "corpus" / "sample.txt"
    sidecar_path = tmp_path / "corpus" / "sample.json"
    export_corpus(stream, str(corpus_path), str(sidecar_path))

    data = corpus_path.read_bytes()
    assert len(data) == 5000
    assert data.decode("ascii") == render_symbols(generate_array(stream), 26)

    sidecar = json.loads(sidecar_path.read_text())
    assert sidecar["m"] == 26
    assert sidecar["q"] == 0.2
    assert sidecar["N"] == 5000
    assert sidecar["seed"] == SEED
    assert sidecar["prng_version"] == PRNG_VERSION


def test_export_corpus_large_alphabet_is_utf8(tmp_path):
    stream = spec(m=200, q=0.2, N=2000)
    corpus_path = tmp_path / "wide.txt"
    export_corpus(stream, str(corpus_path))
    assert len(corpus_path.read_bytes().decode("utf-8")) == 2000
