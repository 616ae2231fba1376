"""
Seeded i.i.d. symbol streams.

Symbol 0 is the space, symbols 1..m are the letters. Every stream is drawn from
a Philox-4x64 counter-based generator keyed by ``derive_chunk_seed(seed,
chunk_index)``; each symbol consumes one uniform double and is mapped through
the (m + 1)-entry cumulative table (inverse CDF). The pair
(PRNG_VERSION, seed) fixes the corpus on every platform.
"""
import json
import os
from functools import lru_cache
from typing import Iterator, NewType, Optional

import numpy as np

from .logger import get_logger
from .metrics import SYMBOLS_GENERATED_TOTAL
from .schemas import ModelParams, StreamSpec

logger = get_logger(__name__)

SymbolId = NewType("SymbolId", int)

SPACE = SymbolId(0)
PRNG_VERSION = "philox4x64-invcdf-v1"
DEFAULT_BLOCK_SIZE = 1 << 16

_MASK64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15

# letters 1..94 render as ASCII graphic characters; beyond that, CJK ideographs
ASCII_LETTERS = (
    "abcdefghijklmnopqrstuvwxyz"
    "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    "0123456789"
    "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~"
)
_WIDE_LETTER_BASE = 0x4E00
MAX_RENDERABLE_ALPHABET = len(ASCII_LETTERS) + 20992

# letters keep their ids below 128, so translated words compare in letter order;
# other characters follow by code point (ASCII controls take 95..127)
_LETTER_ORDER = {ord(c): i for i, c in enumerate(ASCII_LETTERS, start=1)}
_LETTER_ORDER.update({c: 95 + c for c in range(32)})
_LETTER_ORDER[0x7F] = 127


def letter_order_key(word: str) -> str:
    """Sort key ordering rendered words by symbol id, with 'a' < 'z' < 'A' < '0' < CJK letters."""
    return word.translate(_LETTER_ORDER)


def derive_chunk_seed(seed: int, chunk_index: int) -> int:
    """SplitMix64 finalizer over seed + (chunk_index + 1) * golden gamma; a bijection for fixed seed."""
    z = (seed + (chunk_index + 1) * _GOLDEN_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def symbol_dtype(m: int) -> np.dtype:
    return np.dtype(np.uint8) if m <= 255 else np.dtype(np.uint32)


def cumulative_table(params: ModelParams) -> np.ndarray:
    """[q, q + p_1, ..., 1]; searchsorted(table, u, 'right') maps u in [0, 1) to a symbol."""
    if params.letter_probs is None:
        letters = np.full(params.m, (1.0 - params.q) / params.m)
    else:
        letters = np.asarray(params.letter_probs, dtype=np.float64)
    table = np.concatenate([[params.q], params.q + np.cumsum(letters)])
    table[-1] = 1.0
    return table


def make_rng(spec: StreamSpec) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=derive_chunk_seed(spec.seed, spec.chunk_index)))


def iter_blocks(spec: StreamSpec, block_size: int = DEFAULT_BLOCK_SIZE) -> Iterator[np.ndarray]:
    """The stream of ``spec`` as consecutive arrays; the concatenation does not depend on block_size."""
    rng = make_rng(spec)
    table = cumulative_table(spec.params)
    dtype = symbol_dtype(spec.params.m)
    remaining = spec.N
    while remaining > 0:
        size = min(block_size, remaining)
        symbols = np.searchsorted(table, rng.random(size), side="right")
        np.minimum(symbols, spec.params.m, out=symbols)
        remaining -= size
        SYMBOLS_GENERATED_TOTAL.inc(size)
        yield symbols.astype(dtype, copy=False)


def generate_array(spec: StreamSpec) -> np.ndarray:
    blocks = list(iter_blocks(spec, block_size=max(spec.N, 1)))
    if not blocks:
        return np.empty(0, dtype=symbol_dtype(spec.params.m))
    return blocks[0]


def generate_stream(spec: StreamSpec) -> Iterator[SymbolId]:
    for block in iter_blocks(spec):
        yield from block.tolist()


# --- rendering and export ---

@lru_cache(maxsize=32)
def symbol_alphabet(m: int) -> str:
    """Character for each symbol id: index 0 is the space."""
    if m > MAX_RENDERABLE_ALPHABET:
        raise ValueError(f"cannot render alphabets larger than {MAX_RENDERABLE_ALPHABET} letters")
    letters = ASCII_LETTERS[:m]
    if m > len(ASCII_LETTERS):
        letters += "".join(chr(_WIDE_LETTER_BASE + i) for i in range(m - len(ASCII_LETTERS)))
    return " " + letters


@lru_cache(maxsize=32)
def _code_table(m: int) -> np.ndarray:
    return np.array([ord(c) for c in symbol_alphabet(m)], dtype=np.uint32)


def render_symbols(symbols: np.ndarray, m: int) -> str:
    codes = _code_table(m)[symbols]
    if m <= len(ASCII_LETTERS):
        return codes.astype(np.uint8).tobytes().decode("ascii")
    return codes.astype("<u4").tobytes().decode("utf-32-le")


def render_word(letters, m: int) -> str:
    alphabet = symbol_alphabet(m)
    return "".join(alphabet[s] for s in letters)


def write_sidecar(path: str, params: ModelParams, N: int, seed: int, chunk_size: Optional[int]) -> None:
    sidecar = {
        "m": params.m,
        "q": params.q,
        "N": N,
        "seed": seed,
        "prng_version": PRNG_VERSION,
        "chunk_size": chunk_size,
    }
    if params.letter_probs is not None:
        sidecar["letter_probs"] = list(params.letter_probs)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(sidecar, f, indent=2, sort_keys=True)
        f.write("\n")


def export_corpus(spec: StreamSpec, corpus_path: str, sidecar_path: Optional[str] = None) -> None:
    """Writes one stream as text (one byte per symbol for m <= 94, UTF-8 otherwise)."""
    parent = os.path.dirname(corpus_path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(corpus_path, "wb") as f:
        for block in iter_blocks(spec):
            f.write(render_symbols(block, spec.params.m).encode("utf-8"))
    if sidecar_path:
        write_sidecar(sidecar_path, spec.params, spec.N, spec.seed, None)
    logger.info(f"Exported {spec.N} symbols to {corpus_path}")
