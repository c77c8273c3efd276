"""LZ78 dictionary-trie parse."""

from __future__ import annotations

from typing import NamedTuple, Optional

from ..bitio import BitReader, BitWriter, BitstreamError, ceil_log2
from ..core import Sequence


class Lz78Phrase(NamedTuple):
    parent: int  # id of an earlier phrase, 0 for the empty phrase
    symbol: Optional[int]  # None marks a final phrase with no extension


def lz78_parse(s: Sequence) -> list[Lz78Phrase]:
    """Each phrase is the longest earlier phrase plus one symbol.

    If the input ends inside an existing phrase, that phrase is emitted
    once more as a final, extension-less phrase.
    """
    trie: dict[tuple[int, int], int] = {}
    phrases = []
    node = 0
    for c in s.data:
        nxt = trie.get((node, c))
        if nxt is None:
            phrases.append(Lz78Phrase(node, c))
            trie[(node, c)] = len(phrases)
            node = 0
        else:
            node = nxt
    if node:
        phrases.append(Lz78Phrase(node, None))
    return phrases


def lz78_write(phrases: list[Lz78Phrase], sigma: int, writer: BitWriter) -> None:
    """Phrase t (1-based) takes ceil(log2 t) bits of parent id and ceil(log2 sigma) of symbol.

    The final extension-less phrase stores only its parent id; the decoder
    recognises it because the parent alone completes the declared length.
    """
    ws = ceil_log2(sigma)
    for t, p in enumerate(phrases, 1):
        writer.write(p.parent, ceil_log2(t))
        if p.symbol is not None:
            writer.write(p.symbol, ws)


def lz78_read(reader: BitReader, n: int, sigma: int) -> list[int]:
    ws = ceil_log2(sigma)
    # phrase id -> (parent id, last symbol, length)
    parents = [0]
    lasts = [-1]
    out: list[int] = []
    t = 0
    while len(out) < n:
        t += 1
        at = reader.pos
        parent = reader.read(ceil_log2(t))
        if parent >= t:
            raise BitstreamError(f"phrase {t} references unknown phrase {parent}", at, "lz78")
        body = _expand(parent, parents, lasts)
        if len(out) + len(body) == n and parent:
            out.extend(body)
            break
        symbol = reader.read(ws)
        if symbol >= sigma or len(out) + len(body) + 1 > n:
            raise BitstreamError("phrase runs past the declared length or alphabet", at, "lz78")
        body.append(symbol)
        out.extend(body)
        parents.append(parent)
        lasts.append(symbol)
    if reader.remaining:
        raise BitstreamError("trailing bits after the last phrase", reader.pos, "lz78")
    return out


def _expand(node: int, parents: list[int], lasts: list[int]) -> list[int]:
    out = []
    while node:
        out.append(lasts[node])
        node = parents[node]
    out.reverse()
    return out


def lz78_decode_phrases(phrases: list[Lz78Phrase]) -> list[int]:
    parents, lasts = [0], [-1]
    out: list[int] = []
    for p in phrases:
        body = _expand(p.parent, parents, lasts)
        if p.symbol is not None:
            body.append(p.symbol)
            parents.append(p.parent)
            lasts.append(p.symbol)
        out.extend(body)
    return out


def lz78_bits(phrases: list[Lz78Phrase], sigma: int) -> int:
    ws = ceil_log2(sigma)
    return sum(ceil_log2(t) + (ws if p.symbol is not None else 0) for t, p in enumerate(phrases, 1))
