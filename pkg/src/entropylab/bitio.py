"""Little-endian bit packing.

Values are written least-significant bit first, and bits fill each byte
from its least-significant end. Bit counts, not byte counts, are the unit
of accounting; padding to a byte boundary is reported separately.
"""

from __future__ import annotations


class BitstreamError(ValueError):
    """Read past the end of a bit stream, or a malformed field."""

    def __init__(self, message: str, offset: int | None = None, stage: str | None = None):
        self.offset = offset
        self.stage = stage
        where = []
        if stage:
            where.append(f"stage {stage}")
        if offset is not None:
            where.append(f"bit offset {offset}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


def bit_width(max_value: int) -> int:
    """Bits needed to store any integer in ``[0, max_value]``: ceil(log2(max_value + 1))."""
    if max_value < 0:
        raise ValueError("max_value must be non-negative")
    return max_value.bit_length()


def ceil_log2(x: int) -> int:
    """ceil(log2 x) for a positive integer; 0 for x == 1."""
    if x < 1:
        raise ValueError("x must be positive")
    return (x - 1).bit_length()


class BitWriter:
    def __init__(self):
        self._buf = bytearray()
        self._acc = 0
        self._nacc = 0
        self.bit_length = 0

    def write(self, value: int, width: int) -> None:
        if width == 0:
            return
        if value < 0 or value >> width:
            raise ValueError(f"value {value} does not fit in {width} bits")
        self._acc |= value << self._nacc
        self._nacc += width
        self.bit_length += width
        if self._nacc >= 8:
            nbytes = self._nacc >> 3
            self._buf += (self._acc & ((1 << (nbytes * 8)) - 1)).to_bytes(nbytes, "little")
            self._acc >>= nbytes * 8
            self._nacc &= 7

    def write_bit(self, bit: int) -> None:
        self._acc |= bit << self._nacc
        self._nacc += 1
        self.bit_length += 1
        if self._nacc == 8:
            self._buf.append(self._acc)
            self._acc = 0
            self._nacc = 0

    def write_bits(self, bits: int, count: int) -> None:
        """Write ``count`` bits given most-significant first (as an arithmetic coder emits them)."""
        for shift in range(count - 1, -1, -1):
            self.write_bit((bits >> shift) & 1)

    def getvalue(self) -> bytes:
        """Packed bytes, zero-padded to a byte boundary."""
        if self._nacc:
            return bytes(self._buf) + bytes([self._acc])
        return bytes(self._buf)

    @property
    def padding_bits(self) -> int:
        return (-self.bit_length) % 8


class BitReader:
    def __init__(self, data: bytes, bit_length: int | None = None, stage: str | None = None):
        self._data = bytes(data)
        self.bit_length = len(self._data) * 8 if bit_length is None else bit_length
        if self.bit_length > len(self._data) * 8:
            raise BitstreamError("declared bit length exceeds available data", len(self._data) * 8, stage)
        self.pos = 0
        self.stage = stage

    @property
    def remaining(self) -> int:
        return self.bit_length - self.pos

    def read(self, width: int) -> int:
        if width == 0:
            return 0
        if self.pos + width > self.bit_length:
            raise BitstreamError(f"truncated stream: wanted {width} bits", self.pos, self.stage)
        start = self.pos >> 3
        end = (self.pos + width + 7) >> 3
        chunk = int.from_bytes(self._data[start:end], "little")
        value = (chunk >> (self.pos & 7)) & ((1 << width) - 1)
        self.pos += width
        return value

    def read_bit(self) -> int:
        if self.pos >= self.bit_length:
            raise BitstreamError("truncated stream", self.pos, self.stage)
        bit = (self._data[self.pos >> 3] >> (self.pos & 7)) & 1
        self.pos += 1
        return bit

    def read_bit_or_zero(self) -> int:
        """Like :meth:`read_bit` but yields 0 past the end (arithmetic decoder lookahead)."""
        if self.pos >= self.bit_length:
            self.pos += 1
            return 0
        bit = (self._data[self.pos >> 3] >> (self.pos & 7)) & 1
        self.pos += 1
        return bit
