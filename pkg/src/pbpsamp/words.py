"""Strings over the alphabet [d], stored as tuples of ints.

Inputs of length n are also indexed lexicographically (first symbol most
significant) so that sets of inputs can be packed into Python ints.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, Iterator, Sequence, Tuple

Word = Tuple[int, ...]


def check_word(x: Sequence[int], d: int, length: int | None = None) -> Word:
    x = tuple(int(s) for s in x)
    if length is not None and len(x) != length:
        raise ValueError(f"expected a string of length {length}, got {len(x)}")
    for s in x:
        if not 0 <= s < d:
            raise ValueError(f"symbol {s} outside alphabet [{d}]")
    return x


def parse_word(text: str, d: int = 2) -> Word:
    """Parse ``"0110"`` (or ``"0,11,3"`` for alphabets wider than 10)."""
    text = text.strip()
    if "," in text:
        return check_word([int(t) for t in text.split(",") if t != ""], d)
    return check_word([int(c) for c in text], d)


def format_word(x: Sequence[int], d: int = 2) -> str:
    if d <= 10:
        return "".join(str(s) for s in x)
    return ",".join(str(s) for s in x)


def all_words(n: int, d: int = 2) -> Iterator[Word]:
    """All of [d]^n in lexicographic order (matches :func:`word_index`)."""
    return product(range(d), repeat=n)


def word_index(x: Sequence[int], d: int = 2) -> int:
    idx = 0
    for s in x:
        idx = idx * d + s
    return idx


def index_word(idx: int, n: int, d: int = 2) -> Word:
    out = [0] * n
    for j in range(n - 1, -1, -1):
        idx, out[j] = divmod(idx, d)
    return tuple(out)


def words_mask(words: Iterable[Sequence[int]], d: int = 2) -> int:
    """Pack a set of equal-length words into a bitmask over input indices."""
    mask = 0
    for x in words:
        mask |= 1 << word_index(x, d)
    return mask
