"""CompressedBlob container.

Byte layout, all integers little-endian::

    magic        4 bytes  b"ELAB"
    algorithm    u8       1 lz77, 2 lz78, 3 order0, 4 bwt pipeline
    length       u64      original sequence length n
    alphabet     u8 kind  0: the 256 byte values in order
                          1: u16 sigma, then sigma symbol bytes in order
                          2: u32 sigma, symbols are 0..sigma-1 (not byte-valued)
    payload_bits u64
    payload      ceil(payload_bits / 8) bytes, bits packed LSB-first

Only the trailing partial byte is padding; it is reported separately
from the header and payload bit counts.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

from ..bitio import BitstreamError
from ..core import Alphabet

MAGIC = b"ELAB"
ALGORITHMS = {"lz77": 1, "lz78": 2, "order0": 3, "bwt": 4}
ALGORITHM_NAMES = {v: k for k, v in ALGORITHMS.items()}

_FIXED = struct.Struct("<4sBQ")
_U64 = struct.Struct("<Q")


def _alphabet_bytes(alphabet: Alphabet) -> bytes:
    if alphabet.is_full_byte_range:
        return b"\x00"
    if alphabet.is_bytes:
        return b"\x01" + struct.pack("<H", alphabet.size) + bytes(alphabet.symbols)
    if alphabet.symbols == tuple(range(alphabet.size)):
        return b"\x02" + struct.pack("<I", alphabet.size)
    raise ValueError("alphabet symbols must be byte values or 0..sigma-1")


@dataclass(frozen=True)
class CompressedBlob:
    algorithm: str
    n: int
    alphabet: Alphabet
    payload: bytes
    payload_bits: int
    sections: dict = field(default_factory=dict, compare=False)  # itemized payload bits
    stats: dict = field(default_factory=dict, compare=False)  # encoder-side measurements, not stored

    @property
    def header_bits(self) -> int:
        return (_FIXED.size + len(_alphabet_bytes(self.alphabet)) + _U64.size) * 8

    @property
    def padding_bits(self) -> int:
        return (-self.payload_bits) % 8

    @property
    def total_bits(self) -> int:
        return self.header_bits + self.payload_bits + self.padding_bits

    def accounting(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "n": self.n,
            "sigma": self.alphabet.size,
            "header_bits": self.header_bits,
            "payload_bits": self.payload_bits,
            "sections": dict(self.sections),
            **({"stats": dict(self.stats)} if self.stats else {}),
            "padding_bits": self.padding_bits,
            "total_bits": self.total_bits,
        }

    def to_bytes(self) -> bytes:
        return (
            _FIXED.pack(MAGIC, ALGORITHMS[self.algorithm], self.n)
            + _alphabet_bytes(self.alphabet)
            + _U64.pack(self.payload_bits)
            + self.payload
        )

    @classmethod
    def from_bytes(cls, raw: bytes) -> CompressedBlob:
        raw = bytes(raw)
        if len(raw) < _FIXED.size + 1:
            raise BitstreamError("blob shorter than its header", len(raw) * 8, "container")
        magic, algo, n = _FIXED.unpack_from(raw)
        if magic != MAGIC:
            raise BitstreamError(f"bad magic {magic!r}", 0, "container")
        if algo not in ALGORITHM_NAMES:
            raise BitstreamError(f"unknown algorithm id {algo}", 32, "container")
        pos = _FIXED.size
        kind = raw[pos]
        pos += 1
        try:
            if kind == 0:
                alphabet = Alphabet.bytes()
            elif kind == 1:
                (sigma,) = struct.unpack_from("<H", raw, pos)
                pos += 2
                if len(raw) < pos + sigma:
                    raise BitstreamError("truncated alphabet", pos * 8, "container")
                alphabet = Alphabet(tuple(raw[pos:pos + sigma]))
                pos += sigma
            elif kind == 2:
                (sigma,) = struct.unpack_from("<I", raw, pos)
                pos += 4
                alphabet = Alphabet(tuple(range(sigma)))
            else:
                raise BitstreamError(f"unknown alphabet kind {kind}", (pos - 1) * 8, "container")
            (payload_bits,) = _U64.unpack_from(raw, pos)
        except struct.error:
            raise BitstreamError("truncated header", pos * 8, "container") from None
        except ValueError as exc:
            if isinstance(exc, BitstreamError):
                raise
            raise BitstreamError(str(exc), pos * 8, "container") from None
        pos += _U64.size
        payload = raw[pos:]
        if len(payload) != (payload_bits + 7) // 8:
            raise BitstreamError(
                f"payload is {len(payload)} bytes, header declares {payload_bits} bits", pos * 8, "container"
            )
        return cls(ALGORITHM_NAMES[algo], n, alphabet, payload, payload_bits)
