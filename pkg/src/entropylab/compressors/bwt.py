"""Burrows-Wheeler transform with an explicit sentinel, and the
move-to-front and zero-run (1-2 code) stages that follow it."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import Alphabet, Sequence

SENTINEL = -1
RUNA, RUNB = 0, 1


def suffix_array(data) -> np.ndarray:
    """Suffix array of ``data`` (non-negative ints) with a unique smallest sentinel appended.

    Prefix doubling on rank pairs; O(n log^2 n) with numpy sorts.
    """
    arr = np.asarray(data, dtype=np.int64)
    n = arr.size + 1
    rank = np.empty(n, dtype=np.int64)
    rank[:-1] = arr + 1
    rank[-1] = 0
    sa = np.argsort(rank, kind="stable")
    h = 1
    while True:
        second = np.zeros(n, dtype=np.int64)
        second[: n - h] = rank[h:] + 1 if h < n else 0
        sa = np.lexsort((second, rank))
        r1, r2 = rank[sa], second[sa]
        new = np.empty(n, dtype=np.int64)
        new[sa] = np.concatenate(([0], np.cumsum((r1[1:] != r1[:-1]) | (r2[1:] != r2[:-1]))))
        rank = new
        if rank[sa[-1]] == n - 1:
            return sa
        h *= 2


@dataclass(frozen=True)
class BwtResult:
    """Last column of the sorted rotations of s + sentinel.

    ``last`` holds alphabet indices with :data:`SENTINEL` (-1) in the
    sentinel's slot, at ``sentinel_index``.
    """

    alphabet: Alphabet
    last: tuple[int, ...]
    sentinel_index: int

    def __post_init__(self):
        if self.last.count(SENTINEL) != 1:
            raise ValueError("BWT output must contain exactly one sentinel")
        if self.last[self.sentinel_index] != SENTINEL:
            raise ValueError("sentinel_index does not point at the sentinel")

    def without_sentinel(self) -> Sequence:
        i = self.sentinel_index
        return Sequence(self.alphabet, self.last[:i] + self.last[i + 1:])

    def to_text(self, sentinel: str = "$") -> str:
        syms = self.alphabet.symbols
        return "".join(sentinel if c == SENTINEL else chr(syms[c]) for c in self.last)


def bwt(s: Sequence) -> BwtResult:
    if s.n == 0:
        return BwtResult(s.alphabet, (SENTINEL,), 0)
    sa = suffix_array(s.array)
    n1 = s.n + 1
    ext = np.empty(n1, dtype=np.int64)
    ext[:-1] = s.array
    ext[-1] = SENTINEL
    last = ext[(sa - 1) % n1]
    return BwtResult(s.alphabet, tuple(last.tolist()), int(np.flatnonzero(sa == 0)[0]))


def ibwt(result: BwtResult) -> Sequence:
    """Invert via the last-to-first mapping, walking backwards from the sentinel row."""
    last = result.last
    if last.count(SENTINEL) != 1:
        raise ValueError("BWT output must contain exactly one sentinel")
    sigma = result.alphabet.size
    if any(c >= sigma or c < SENTINEL for c in last):
        raise ValueError("BWT output has symbols outside the alphabet")
    # first-column start of each symbol; the sentinel sorts before everything
    counts = [0] * (sigma + 1)
    for c in last:
        counts[c + 1] += 1
    starts = [0] * (sigma + 1)
    acc = 0
    for c in range(sigma + 1):
        starts[c] = acc
        acc += counts[c]
    seen = [0] * (sigma + 1)
    lf = [0] * len(last)
    for i, c in enumerate(last):
        lf[i] = starts[c + 1] + seen[c + 1]
        seen[c + 1] += 1
    n = len(last) - 1
    out = [0] * n
    row = 0  # row 0 is the rotation starting with the sentinel; its last char is s[n-1]
    for j in range(n - 1, -1, -1):
        c = last[row]
        if c == SENTINEL:
            raise ValueError("inconsistent BWT: reached the sentinel early")
        out[j] = c
        row = lf[row]
    return Sequence(result.alphabet, tuple(out))


def mtf(s: Sequence) -> Sequence:
    """Move-to-front ranks, starting from the alphabet order. Output alphabet is range(sigma)."""
    table = list(range(s.sigma))
    out = []
    for c in s.data:
        r = table.index(c)
        out.append(r)
        if r:
            del table[r]
            table.insert(0, c)
    return Sequence(Alphabet(tuple(range(s.sigma))), tuple(out))


def imtf(ranks: Sequence, alphabet: Alphabet) -> Sequence:
    table = list(range(alphabet.size))
    out = []
    for pos, r in enumerate(ranks.data):
        if r >= len(table):
            raise ValueError(f"rank {r} at position {pos} out of range for {len(table)} symbols")
        c = table[r]
        out.append(c)
        if r:
            del table[r]
            table.insert(0, c)
    return Sequence(alphabet, tuple(out))


def _run_digits(length: int) -> list[int]:
    """Bijective base-2 digits of a run length, least significant first: RUNA = 1, RUNB = 2."""
    out = []
    while length:
        if length & 1:
            out.append(RUNA)
            length = (length - 1) >> 1
        else:
            out.append(RUNB)
            length = (length - 2) >> 1
    return out


def rle0(ranks: Sequence) -> Sequence:
    """Replace each run of zero ranks by its 1-2 code; rank r > 0 becomes token r + 1.

    Tokens: 0 = RUNA, 1 = RUNB, 2..sigma = ranks 1..sigma-1, so the token
    alphabet has sigma + 1 entries.
    """
    out = []
    run = 0
    for r in ranks.data:
        if r == 0:
            run += 1
            continue
        if run:
            out.extend(_run_digits(run))
            run = 0
        out.append(r + 1)
    if run:
        out.extend(_run_digits(run))
    return Sequence(Alphabet(tuple(range(ranks.sigma + 1))), tuple(out))


def irle0(tokens: Sequence, sigma: int | None = None) -> Sequence:
    sigma = tokens.sigma - 1 if sigma is None else sigma
    out = []
    run = 0
    weight = 1
    for pos, t in enumerate(tokens.data):
        if t == RUNA or t == RUNB:
            run += weight * (t + 1)
            weight <<= 1
            continue
        if t > sigma:
            raise ValueError(f"token {t} at position {pos} out of range")
        if run:
            out.extend([0] * run)
            run, weight = 0, 1
        out.append(t - 1)
    out.extend([0] * run)
    return Sequence(Alphabet(tuple(range(sigma))), tuple(out))
