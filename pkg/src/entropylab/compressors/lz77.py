"""Greedy LZ77 with an unbounded window."""

from __future__ import annotations

from typing import NamedTuple

from ..bitio import BitReader, BitWriter, BitstreamError, bit_width, ceil_log2
from ..core import Sequence


class Lz77Phrase(NamedTuple):
    offset: int  # distance back to the copy source; 0 for a literal-only phrase
    length: int
    symbol: int


def _longest_match(text: str, i: int, limit: int) -> tuple[int, int]:
    """Longest copy for position i (length <= limit), nearest source on ties."""

    def source(length):
        # start j < i with text[j:j+length] == text[i:i+length]; overlapping copies allowed
        return text.rfind(text[i:i + length], 0, i + length - 1)

    if i == 0 or limit == 0 or source(1) < 0:
        return 0, 0
    lo, hi = 1, 2
    while hi <= limit and source(hi) >= 0:
        lo, hi = hi, hi * 2
    hi = min(hi, limit + 1)
    # invariant: source(lo) found, source(hi) missing or hi beyond limit
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if source(mid) >= 0:
            lo = mid
        else:
            hi = mid
    return i - source(lo), lo


def lz77_parse(s: Sequence) -> list[Lz77Phrase]:
    """Greedy longest-match parse; every phrase ends with an explicit next symbol."""
    text = "".join(map(chr, s.data))
    n = s.n
    phrases = []
    i = 0
    while i < n:
        offset, length = _longest_match(text, i, n - i - 1)
        phrases.append(Lz77Phrase(offset, length, s.data[i + length]))
        i += length + 1
    return phrases


def lz77_phrase_bits(n: int, sigma: int) -> int:
    return 2 * bit_width(n) + ceil_log2(sigma)


def lz77_write(phrases: list[Lz77Phrase], n: int, sigma: int, writer: BitWriter) -> None:
    wn, ws = bit_width(n), ceil_log2(sigma)
    for p in phrases:
        writer.write(p.offset, wn)
        writer.write(p.length, wn)
        writer.write(p.symbol, ws)


def lz77_read(reader: BitReader, n: int, sigma: int) -> list[int]:
    wn, ws = bit_width(n), ceil_log2(sigma)
    out: list[int] = []
    while len(out) < n:
        at = reader.pos
        offset = reader.read(wn)
        length = reader.read(wn)
        symbol = reader.read(ws)
        if offset > len(out) or (length and not offset) or (offset and not length):
            raise BitstreamError(f"invalid phrase (offset={offset}, length={length})", at, "lz77")
        if len(out) + length + 1 > n or symbol >= sigma:
            raise BitstreamError("phrase runs past the declared length or alphabet", at, "lz77")
        start = len(out) - offset
        for j in range(length):
            out.append(out[start + j])
        out.append(symbol)
    if reader.remaining:
        raise BitstreamError("trailing bits after the last phrase", reader.pos, "lz77")
    return out


def lz77_decode_phrases(phrases: list[Lz77Phrase]) -> list[int]:
    out: list[int] = []
    for p in phrases:
        start = len(out) - p.offset
        for j in range(p.length):
            out.append(out[start + j])
        out.append(p.symbol)
    return out
