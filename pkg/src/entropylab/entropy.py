"""Empirical entropy, context statistics and order-k Markov models.

All logarithms are base 2. ``hk`` divides by the full length ``n``: the
first ``k`` positions carry no conditional cost, there is no wrap-around
and no padding.
"""

from __future__ import annotations

import itertools
import math
import struct
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .bitio import BitReader, BitWriter, BitstreamError, bit_width
from .core import Alphabet, FrequencyVector, Sequence, check_cap, frequencies

DIST_TOL = 1e-12
MODEL_MAGIC = b"EMK1"
MODEL_HEADER = struct.Struct("<4sIHQ")  # magic, sigma, k, n
MODEL_HEADER_BITS = MODEL_HEADER.size * 8


@dataclass(frozen=True)
class Distribution:
    probabilities: tuple

    def __post_init__(self):
        probs = tuple(self.probabilities)
        if not probs:
            raise ValueError("distribution must have at least one outcome")
        if any(p < 0 or p > 1 for p in probs):
            raise ValueError("probabilities must lie in [0, 1]")
        total = math.fsum(float(p) for p in probs)
        if abs(total - 1.0) > DIST_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "probabilities", probs)

    @classmethod
    def from_counts(cls, counts: Iterable[int]) -> Distribution:
        counts = list(counts)
        total = sum(counts)
        if total <= 0:
            raise ValueError("counts must have a positive total")
        return cls(tuple(Fraction(c, total) for c in counts))

    def __len__(self):
        return len(self.probabilities)

    def __iter__(self):
        return iter(self.probabilities)


def shannon_entropy(P) -> float:
    """H(P) = sum of p log2(1/p) over the outcomes with p > 0."""
    if not isinstance(P, Distribution):
        P = Distribution(tuple(P))
    return math.fsum(-float(p) * math.log2(p) for p in P.probabilities if p > 0)


def _counts_entropy_bits(counts: Iterable[int]) -> float:
    """n * H_0 for a count vector: sum of n_i log2(n / n_i)."""
    counts = [c for c in counts if c > 0]
    total = sum(counts)
    if total == 0:
        return 0.0
    log_total = math.log2(total)
    return math.fsum(c * (log_total - math.log2(c)) for c in counts)


def h0(s: Sequence) -> float:
    """Zeroth-order empirical entropy in bits per character (0 for the empty sequence)."""
    if s.n == 0:
        return 0.0
    return _counts_entropy_bits(frequencies(s).counts) / s.n


def context_string(s: Sequence, w) -> Sequence:
    """Characters immediately following each occurrence of ``w``, left to right.

    ``w`` is a tuple of symbol indices, or text/bytes over byte-valued symbols.
    """
    w = _as_context(s.alphabet, w)
    if len(w) < 1:
        raise ValueError("context must be non-empty")
    k = len(w)
    data = s.data
    out = [data[i + k] for i in range(s.n - k) if data[i:i + k] == w]
    return Sequence(s.alphabet, tuple(out))


def _as_context(alphabet: Alphabet, w) -> tuple:
    if isinstance(w, str):
        w = w.encode("latin-1")
    if isinstance(w, (bytes, bytearray)):
        # symbols missing from the alphabet can never occur, so map them to -1
        return tuple(alphabet.index(b) if b in alphabet else -1 for b in w)
    return tuple(w)


@dataclass(frozen=True)
class ContextTable:
    """Follower counts for every length-``order`` context that occurs in a sequence.

    ``entries`` maps a context tuple to a sparse ``{symbol: count}`` dict;
    contexts that never precede a character are absent.
    """

    order: int
    alphabet: Alphabet
    entries: Mapping[tuple, Mapping[int, int]] = field(repr=False)

    def followers(self, w) -> FrequencyVector:
        w = _as_context(self.alphabet, w)
        counts = [0] * self.alphabet.size
        for c, cnt in self.entries.get(w, {}).items():
            counts[c] = cnt
        return FrequencyVector(tuple(counts), sum(counts))

    def total(self, w) -> int:
        return sum(self.entries.get(tuple(w), {}).values())

    def contexts(self) -> list[tuple]:
        return sorted(self.entries)

    @property
    def positions(self) -> int:
        return sum(sum(f.values()) for f in self.entries.values())


def context_table(s: Sequence, k: int) -> ContextTable:
    if k < 0:
        raise ValueError("k must be non-negative")
    data = s.data
    pairs = Counter(data[i:i + k + 1] for i in range(max(s.n - k, 0)))
    entries: dict[tuple, dict[int, int]] = defaultdict(dict)
    for gram, cnt in pairs.items():
        entries[gram[:k]][gram[k]] = cnt
    return ContextTable(k, s.alphabet, {w: dict(sorted(f.items())) for w, f in entries.items()})


def _gram_counts_numpy(s: Sequence, k: int):
    """(context id, count) arrays for all (k+1)-grams, or None if codes would overflow int64."""
    sigma = s.sigma
    if sigma ** (k + 1) >= 2**62:
        return None
    arr = s.array
    m = s.n - k
    codes = np.zeros(m, dtype=np.int64)
    for j in range(k + 1):
        codes *= sigma
        codes += arr[j:j + m]
    grams, counts = np.unique(codes, return_counts=True)
    return grams // sigma, counts


def hk_bits(s: Sequence, k: int) -> float:
    """n * H_k(s): the minimum order-k self-information of ``s`` in bits."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if s.n == 0 or k >= s.n:
        return 0.0
    if k == 0:
        return _counts_entropy_bits(frequencies(s).counts)
    fast = _gram_counts_numpy(s, k)
    if fast is not None:
        ctx, counts = fast
        # grams are sorted, so equal contexts are contiguous
        _, first, inverse = np.unique(ctx, return_index=True, return_inverse=True)
        totals = np.add.reduceat(counts, first)[inverse]
        terms = counts * (np.log2(totals) - np.log2(counts))
        return math.fsum(terms.tolist())
    table = context_table(s, k)
    return math.fsum(_counts_entropy_bits(f.values()) for f in table.entries.values())


def hk(s: Sequence, k: int) -> float:
    """kth-order empirical entropy in bits per character."""
    if s.n == 0:
        return 0.0
    return hk_bits(s, k) / s.n


@dataclass(frozen=True)
class EntropyProfile:
    values: tuple[float, ...]

    def __getitem__(self, k):
        return self.values[k]

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


def entropy_profile(s: Sequence, kmax: int) -> EntropyProfile:
    if kmax < 0:
        raise ValueError("kmax must be non-negative")
    return EntropyProfile(tuple(hk(s, k) for k in range(kmax + 1)))


class ZeroProbabilityError(ValueError):
    def __init__(self, position: int, context: tuple, symbol: int):
        self.position = position
        self.context = context
        self.symbol = symbol
        super().__init__(
            f"model assigns probability 0 to symbol {symbol} after context {context} at position {position}"
        )


@dataclass(frozen=True, eq=False)
class MarkovModel:
    """Order-k conditional distribution.

    Fitted models carry the follower counts in ``table`` and use the
    maximum-likelihood estimate count / |s_w|. Passing ``probabilities``
    overrides the estimate (used to build competing, non-MLE models).
    """

    order: int
    alphabet: Alphabet
    n: int
    table: ContextTable
    probabilities: Mapping[tuple, Mapping[int, float]] | None = None

    def prob(self, c: int, w: tuple) -> float:
        if self.probabilities is not None:
            return self.probabilities.get(w, {}).get(c, 0.0)
        followers = self.table.entries.get(w)
        if not followers:
            return 0.0
        return followers.get(c, 0) / sum(followers.values())

    def conditional(self, w) -> dict[int, float]:
        w = _as_context(self.alphabet, w)
        if self.probabilities is not None:
            return dict(self.probabilities.get(w, {}))
        followers = self.table.entries.get(w, {})
        total = sum(followers.values())
        return {c: cnt / total for c, cnt in followers.items()}

    def cost(self, c: int, w: tuple) -> float:
        """Self-information log2(1/p(c|w)); ``inf`` when p is 0."""
        if self.probabilities is not None:
            p = self.prob(c, w)
            return math.inf if p <= 0 else -math.log2(p)
        followers = self.table.entries.get(w)
        cnt = followers.get(c, 0) if followers else 0
        if cnt == 0:
            return math.inf
        return math.log2(sum(followers.values())) - math.log2(cnt)

    @property
    def sigma(self) -> int:
        return self.alphabet.size

    @property
    def table_bits(self) -> int:
        return model_table_bits(self.sigma, self.order, self.n)

    def __eq__(self, other):
        if not isinstance(other, MarkovModel):
            return NotImplemented
        return (
            self.order == other.order
            and self.alphabet == other.alphabet
            and self.n == other.n
            and dict(self.table.entries) == dict(other.table.entries)
            and self.probabilities == other.probabilities
        )


def fit_markov(s: Sequence, k: int) -> MarkovModel:
    """Maximum-likelihood order-k model of ``s``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if s.n <= k:
        raise ValueError(f"sequence of length {s.n} has no conditional positions at order {k}")
    return MarkovModel(k, s.alphabet, s.n, context_table(s, k))


def self_information(s: Sequence, m: MarkovModel) -> float:
    """Total bits log2(1/p(s[i] | preceding k symbols)) over positions k..n-1."""
    k = m.order
    if k >= s.n:
        raise ValueError(f"model order {k} must be below the sequence length {s.n}")
    if s.sigma != m.sigma:
        raise ValueError("sequence and model alphabets differ in size")
    data = s.data
    if m.probabilities is None:
        # group identical (context, symbol) events so each distinct cost is computed once
        events = Counter(data[i - k:i + 1] for i in range(k, s.n))
        terms = []
        for gram, times in events.items():
            cost = m.cost(gram[k], gram[:k])
            if math.isinf(cost):
                pos = next(i for i in range(k, s.n) if data[i - k:i + 1] == gram)
                raise ZeroProbabilityError(pos, gram[:k], gram[k])
            terms.append(times * cost)
        return math.fsum(terms)
    terms = []
    for i in range(k, s.n):
        w = data[i - k:i]
        cost = m.cost(data[i], w)
        if math.isinf(cost):
            raise ZeroProbabilityError(i, w, data[i])
        terms.append(cost)
    return math.fsum(terms)


def model_table_bits(sigma: int, k: int, n: int) -> int:
    """Serialized size: sigma^(k+1) counts of ceil(log2(n+1)) bits each, plus the header."""
    return sigma ** (k + 1) * bit_width(n) + MODEL_HEADER_BITS


@dataclass(frozen=True)
class SerializedModel:
    bit_length: int
    data: bytes

    @property
    def padding_bits(self) -> int:
        return len(self.data) * 8 - self.bit_length


def serialize_model(m: MarkovModel) -> SerializedModel:
    """Dense count table: contexts in lexicographic index order, sigma counts per context.

    Layout (little-endian): ``EMK1`` magic, sigma (u32), k (u16), n (u64),
    then sigma^(k+1) counts of ceil(log2(n+1)) bits each, LSB-first.
    """
    if m.probabilities is not None:
        raise ValueError("only count-based (fitted) models can be serialized")
    sigma, k, n = m.sigma, m.order, m.n
    width = bit_width(n)
    cells = sigma ** (k + 1)
    check_cap(cells, max(width / 8, 1.0), f"order-{k} model table over {sigma} symbols")
    writer = BitWriter()
    for byte in MODEL_HEADER.pack(MODEL_MAGIC, sigma, k, n):
        writer.write(byte, 8)
    entries = m.table.entries
    zero_row = [0] * sigma
    for w in itertools.product(range(sigma), repeat=k):
        followers = entries.get(w)
        if followers:
            row = zero_row.copy()
            for c, cnt in followers.items():
                row[c] = cnt
        else:
            row = zero_row
        for cnt in row:
            writer.write(cnt, width)
    assert writer.bit_length == model_table_bits(sigma, k, n)
    return SerializedModel(writer.bit_length, writer.getvalue())


def deserialize_model(blob: SerializedModel | bytes, alphabet: Alphabet | None = None) -> MarkovModel:
    if isinstance(blob, SerializedModel):
        data, bit_length = blob.data, blob.bit_length
    else:
        data, bit_length = bytes(blob), None
    if len(data) < MODEL_HEADER.size:
        raise BitstreamError("model stream shorter than its header", len(data) * 8, "model-header")
    magic, sigma, k, n = MODEL_HEADER.unpack_from(data)
    if magic != MODEL_MAGIC:
        raise BitstreamError(f"bad model magic {magic!r}", 0, "model-header")
    if alphabet is None:
        alphabet = Alphabet(tuple(range(sigma)))
    elif alphabet.size != sigma:
        raise ValueError(f"alphabet has {alphabet.size} symbols, stream declares {sigma}")
    width = bit_width(n)
    expected = model_table_bits(sigma, k, n)
    if bit_length is None:
        bit_length = expected
    if bit_length != expected:
        raise BitstreamError(f"model stream is {bit_length} bits, expected {expected}", bit_length, "model-table")
    reader = BitReader(data, bit_length, stage="model-table")
    reader.pos = MODEL_HEADER_BITS
    entries = {}
    for w in itertools.product(range(sigma), repeat=k):
        row = {}
        for c in range(sigma):
            cnt = reader.read(width)
            if cnt:
                row[c] = cnt
        if row:
            entries[w] = row
    table = ContextTable(k, alphabet, entries)
    if table.positions != max(n - k, 0):
        raise BitstreamError("count table does not total n - k", reader.pos, "model-table")
    return MarkovModel(k, alphabet, n, table)
