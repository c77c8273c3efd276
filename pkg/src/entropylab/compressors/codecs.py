"""Encoders and decoders producing :class:`CompressedBlob` containers."""

from __future__ import annotations

from ..bitio import BitReader, BitWriter, BitstreamError, bit_width
from ..core import Alphabet, Sequence, frequencies
from ..entropy import _counts_entropy_bits
from .arith import order0_read, order0_write
from .bwt import SENTINEL, BwtResult, bwt, ibwt, imtf, irle0, mtf, rle0
from .container import CompressedBlob
from .lz77 import lz77_parse, lz77_read, lz77_write
from .lz78 import lz78_parse, lz78_read, lz78_write


def _require_nonempty(s: Sequence) -> None:
    if s.n < 1:
        raise ValueError("cannot compress an empty sequence")


def _blob(algorithm, s, writer, sections, stats=None) -> CompressedBlob:
    assert sum(sections.values()) == writer.bit_length
    return CompressedBlob(algorithm, s.n, s.alphabet, writer.getvalue(), writer.bit_length, sections, stats or {})


def _reader(blob: CompressedBlob, algorithm: str) -> BitReader:
    if blob.algorithm != algorithm:
        raise ValueError(f"blob holds {blob.algorithm} data, not {algorithm}")
    return BitReader(blob.payload, blob.payload_bits, stage=algorithm)


def lz77_encode(s: Sequence) -> CompressedBlob:
    _require_nonempty(s)
    phrases = lz77_parse(s)
    writer = BitWriter()
    lz77_write(phrases, s.n, s.sigma, writer)
    return _blob("lz77", s, writer, {"phrases": writer.bit_length}, {"phrase_count": len(phrases)})


def lz77_decode(blob: CompressedBlob) -> Sequence:
    return Sequence(blob.alphabet, tuple(lz77_read(_reader(blob, "lz77"), blob.n, blob.alphabet.size)))


def lz78_encode(s: Sequence) -> CompressedBlob:
    _require_nonempty(s)
    phrases = lz78_parse(s)
    writer = BitWriter()
    lz78_write(phrases, s.sigma, writer)
    return _blob("lz78", s, writer, {"phrases": writer.bit_length}, {"phrase_count": len(phrases)})


def lz78_decode(blob: CompressedBlob) -> Sequence:
    return Sequence(blob.alphabet, tuple(lz78_read(_reader(blob, "lz78"), blob.n, blob.alphabet.size)))


def order0_encode(s: Sequence) -> CompressedBlob:
    _require_nonempty(s)
    writer = BitWriter()
    model_bits, code_bits = order0_write(s, writer)
    stats = {"entropy_bits": _counts_entropy_bits(frequencies(s).counts)}
    return _blob("order0", s, writer, {"order0_model": model_bits, "order0_code": code_bits}, stats)


def order0_decode(blob: CompressedBlob) -> Sequence:
    data = order0_read(_reader(blob, "order0"), blob.n, blob.alphabet.size)
    return Sequence(blob.alphabet, tuple(data))


def bwt_pipeline_encode(s: Sequence) -> CompressedBlob:
    """BWT, move-to-front, zero-run 1-2 coding, then order-0 arithmetic coding.

    Payload: sentinel row (ceil(log2(n+1)) bits), token count m (same
    width), then the order-0 stream over the sigma+1 run/rank tokens.
    """
    _require_nonempty(s)
    transformed = bwt(s)
    ranks = mtf(transformed.without_sentinel())
    tokens = rle0(ranks)
    width = bit_width(s.n)
    writer = BitWriter()
    writer.write(transformed.sentinel_index, width)
    writer.write(tokens.n, width)
    model_bits, code_bits = order0_write(tokens, writer)
    sections = {
        "bwt_sentinel": width,
        "mtf": 0,
        "rle_length": width,
        "order0_model": model_bits,
        "order0_code": code_bits,
    }
    counts = [0] * tokens.sigma
    for t in tokens.data:
        counts[t] += 1
    stats = {"tokens": tokens.n, "token_entropy_bits": _counts_entropy_bits(counts)}
    return _blob("bwt", s, writer, sections, stats)


def bwt_pipeline_decode(blob: CompressedBlob) -> Sequence:
    reader = _reader(blob, "bwt")
    n, sigma = blob.n, blob.alphabet.size
    width = bit_width(n)
    at = reader.pos
    sentinel = reader.read(width)
    if sentinel > n:
        raise BitstreamError(f"sentinel row {sentinel} beyond length {n}", at, "bwt")
    at = reader.pos
    m = reader.read(width)
    if m > n:
        raise BitstreamError(f"token count {m} exceeds length {n}", at, "rle")
    reader.stage = "order0"
    tokens = order0_read(reader, m, sigma + 1)
    try:
        ranks = irle0(Sequence(Alphabet(tuple(range(sigma + 1))), tuple(tokens)), sigma)
    except ValueError as exc:
        raise BitstreamError(str(exc), reader.pos, "rle") from None
    if ranks.n != n:
        raise BitstreamError(f"run expansion gives {ranks.n} symbols, expected {n}", reader.pos, "rle")
    last = imtf(ranks, blob.alphabet).data
    try:
        result = BwtResult(blob.alphabet, last[:sentinel] + (SENTINEL,) + last[sentinel:], sentinel)
        return ibwt(result)
    except ValueError as exc:
        raise BitstreamError(str(exc), reader.pos, "bwt") from None


ENCODERS = {
    "lz77": lz77_encode,
    "lz78": lz78_encode,
    "order0": order0_encode,
    "bwt": bwt_pipeline_encode,
}
DECODERS = {
    "lz77": lz77_decode,
    "lz78": lz78_decode,
    "order0": order0_decode,
    "bwt": bwt_pipeline_decode,
}


def encode(s: Sequence, algorithm: str) -> CompressedBlob:
    try:
        return ENCODERS[algorithm](s)
    except KeyError:
        raise ValueError(f"unknown algorithm {algorithm!r}") from None


def decode(blob: CompressedBlob) -> Sequence:
    return DECODERS[blob.algorithm](blob)
