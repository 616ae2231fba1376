"""
Words are maximal runs of non-space symbols. A run closed by the end of the
input is still a word; runs of spaces produce nothing.
"""
from typing import Iterable, Iterator, List, NamedTuple, Tuple

from .errors import WordTooLongError
from .generator import SPACE, SymbolId

DEFAULT_MAX_WORD_LENGTH = 1 << 20


class WordToken(NamedTuple):
    letters: Tuple[SymbolId, ...]

    @property
    def length(self) -> int:
        return len(self.letters)


def segment(symbols: Iterable[SymbolId], max_word_length: int = DEFAULT_MAX_WORD_LENGTH) -> Iterator[WordToken]:
    """Streams one WordToken per maximal letter run, holding at most one partial word."""
    current: List[SymbolId] = []
    for symbol in symbols:
        if symbol == SPACE:
            if current:
                yield WordToken(tuple(current))
                current = []
            continue
        current.append(symbol)
        if len(current) > max_word_length:
            raise WordTooLongError(len(current), max_word_length)
    if current:
        yield WordToken(tuple(current))


def split_words(text: str, separator: str = " ") -> List[str]:
    """The same rule over rendered text whose separators are already a single character."""
    return [word for word in text.split(separator) if word]


class TextSegmenter:
    """
    Segments text fed in pieces. Words straddling piece boundaries are joined,
    so feeding a text in any partition yields the words of the whole text.
    """

    def __init__(self, separator: str = " ", max_word_length: int = DEFAULT_MAX_WORD_LENGTH):
        self.separator = separator
        self.max_word_length = max_word_length
        self._carry = ""

    def feed(self, piece: str) -> List[str]:
        if not piece:
            return []
        parts = piece.split(self.separator)
        if len(parts) == 1:
            self._carry += parts[0]
            self._check(self._carry)
            return []

        head = self._carry + parts[0]
        words: List[str] = [head] if head else []
        words.extend(word for word in parts[1:-1] if word)
        if words:
            self._check(max(words, key=len))
        self._carry = parts[-1]
        self._check(self._carry)
        return words

    def finish(self) -> List[str]:
        carry, self._carry = self._carry, ""
        return [carry] if carry else []

    @property
    def pending(self) -> str:
        return self._carry

    def _check(self, word: str) -> None:
        if len(word) > self.max_word_length:
            raise WordTooLongError(len(word), self.max_word_length)
