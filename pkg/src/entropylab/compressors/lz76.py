"""Lempel-Ziv (1976) production complexity."""

from __future__ import annotations

from ..core import Sequence


def _as_str(data) -> str:
    return "".join(map(chr, data))


def lz76_complexity(s: Sequence) -> int:
    """Number of phrases in the exhaustive-history parse of ``s``.

    Each phrase is the shortest prefix of the remaining input that cannot be
    copied from a start position inside the already-parsed prefix; the copy
    may run into the phrase itself. A trailing reproducible remainder counts
    as one final phrase.
    """
    n = s.n
    if n == 0:
        return 0
    text = _as_str(s.data)
    i = 0
    phrases = 0
    while i < n:
        length = 1
        # s[i:i+length] reproducible iff it occurs starting before i, i.e. inside text[:i+length-1]
        while i + length <= n and text.find(text[i:i + length], 0, i + length - 1) != -1:
            length += 1
        phrases += 1
        i += length
    return phrases
