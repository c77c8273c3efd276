"""Alphabets, sequences and symbol counts.

Symbols are opaque indices into an explicit, ordered :class:`Alphabet`.
The alphabet's symbols are usually byte values, which is what lets a
sequence round-trip to a byte stream.
"""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence as SeqType

import numpy as np

DEFAULT_MEM_CAP = 2 * 1024**3
MEM_CAP_ENV = "ENTROPY_LAB_MEM_CAP"


class CapacityError(ValueError):
    """A requested table or sequence would exceed the configured memory cap."""


class UndeclaredSymbolError(ValueError):
    def __init__(self, byte: int, offset: int):
        self.byte = byte
        self.offset = offset
        super().__init__(
            f"byte 0x{byte:02x} ({chr(byte)!r}) at offset {offset} is not in the declared alphabet"
        )


def memory_cap() -> int:
    """Memory budget in bytes; ``ENTROPY_LAB_MEM_CAP`` overrides the 2 GiB default."""
    raw = os.environ.get(MEM_CAP_ENV)
    if not raw:
        return DEFAULT_MEM_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"{MEM_CAP_ENV} must be an integer byte count, got {raw!r}") from None
    if cap <= 0:
        raise ValueError(f"{MEM_CAP_ENV} must be positive")
    return cap


def check_cap(cells: int, bytes_per_cell: float, what: str) -> None:
    need = cells * bytes_per_cell
    cap = memory_cap()
    if need > cap:
        raise CapacityError(f"{what} needs about {int(need)} bytes, over the {cap}-byte memory cap")


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple

    def __post_init__(self):
        symbols = tuple(self.symbols)
        if not symbols:
            raise ValueError("alphabet must contain at least one symbol")
        if len(set(symbols)) != len(symbols):
            raise ValueError("alphabet symbols must be distinct")
        object.__setattr__(self, "symbols", symbols)

    @property
    def size(self) -> int:
        return len(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    @cached_property
    def _index(self) -> dict:
        return {sym: i for i, sym in enumerate(self.symbols)}

    def index(self, symbol) -> int:
        return self._index[symbol]

    def __contains__(self, symbol) -> bool:
        return symbol in self._index

    @property
    def is_bytes(self) -> bool:
        return all(isinstance(c, int) and 0 <= c < 256 for c in self.symbols)

    @property
    def is_full_byte_range(self) -> bool:
        return self.symbols == tuple(range(256))

    @classmethod
    def bytes(cls) -> Alphabet:
        return cls(tuple(range(256)))

    @classmethod
    def from_bytes(cls, declared: bytes | str) -> Alphabet:
        """Alphabet of the given byte values, in the order given."""
        if isinstance(declared, str):
            declared = declared.encode("latin-1")
        return cls(tuple(declared))

    @classmethod
    def infer(cls, raw: bytes) -> Alphabet:
        """Sorted set of byte values observed in ``raw``."""
        seen = sorted(set(raw))
        if not seen:
            raise ValueError("cannot infer an alphabet from empty input")
        return cls(tuple(seen))

    @classmethod
    def digits(cls, base: int) -> Alphabet:
        """Symbols for base-``base`` digits: ``0-9a-z`` up to 36, plain integers beyond."""
        if base < 1:
            raise ValueError("base must be positive")
        if base <= 36:
            return cls.from_bytes("0123456789abcdefghijklmnopqrstuvwxyz"[:base])
        return cls(tuple(range(base)))


def read_alphabet_file(path: str | os.PathLike) -> Alphabet:
    """Parse an alphabet declaration: one single-byte symbol per line, order significant.

    ``\\n`` and ``\\t`` escapes name the newline and tab bytes.
    """
    with open(path, "rb") as fh:
        lines = fh.read().split(b"\n")
    if lines and lines[-1] == b"":
        lines.pop()
    escapes = {b"\\n": 0x0A, b"\\t": 0x09, b"\\r": 0x0D, b"\\\\": 0x5C}
    symbols = []
    for lineno, line in enumerate(lines, 1):
        if len(line) > 1 and line.endswith(b"\r"):
            line = line[:-1]
        if line in escapes:
            symbols.append(escapes[line])
        elif len(line) == 1:
            symbols.append(line[0])
        else:
            raise ValueError(f"{path}:{lineno}: expected one symbol per line, got {line!r}")
    return Alphabet(tuple(symbols))


@dataclass(frozen=True)
class FrequencyVector:
    counts: tuple[int, ...]
    total: int

    def __post_init__(self):
        if sum(self.counts) != self.total:
            raise ValueError("counts do not sum to total")

    def __getitem__(self, i: int) -> int:
        return self.counts[i]

    def __len__(self) -> int:
        return len(self.counts)


@dataclass(frozen=True, eq=False)
class Sequence:
    """A finite string of symbol indices over an explicit alphabet."""

    alphabet: Alphabet
    data: tuple[int, ...]

    def __post_init__(self):
        data = tuple(self.data)
        object.__setattr__(self, "data", data)
        if data:
            lo, hi = min(data), max(data)
            if lo < 0 or hi >= self.alphabet.size:
                raise ValueError(f"symbol index out of range for alphabet of size {self.alphabet.size}")

    def __len__(self) -> int:
        return len(self.data)

    @property
    def n(self) -> int:
        return len(self.data)

    @property
    def sigma(self) -> int:
        return self.alphabet.size

    def __iter__(self):
        return iter(self.data)

    def __getitem__(self, i):
        return self.data[i]

    def __eq__(self, other):
        if not isinstance(other, Sequence):
            return NotImplemented
        return self.alphabet == other.alphabet and self.data == other.data

    def __hash__(self):
        return hash((self.alphabet, self.data))

    def __repr__(self):
        preview = self.to_text() if self.alphabet.is_bytes and self.n <= 40 else f"<{self.n} symbols>"
        return f"Sequence({preview!r}, sigma={self.sigma})"

    @cached_property
    def array(self) -> np.ndarray:
        arr = np.fromiter(self.data, dtype=np.int64, count=len(self.data))
        arr.flags.writeable = False
        return arr

    @classmethod
    def from_text(cls, text: str | bytes, alphabet: Alphabet | str | bytes | None = None) -> Sequence:
        """Build a sequence from text; ``alphabet=None`` infers the sorted observed set."""
        raw = text.encode("latin-1") if isinstance(text, str) else bytes(text)
        if alphabet is None:
            return ingest(raw, "infer")
        if not isinstance(alphabet, Alphabet):
            alphabet = Alphabet.from_bytes(alphabet)
        return ingest(raw, "explicit", alphabet)

    def to_bytes(self) -> bytes:
        if not self.alphabet.is_bytes:
            raise ValueError("alphabet symbols are not byte values")
        syms = self.alphabet.symbols
        return bytes(syms[i] for i in self.data)

    def to_text(self) -> str:
        return self.to_bytes().decode("latin-1")

    def with_data(self, data: Iterable[int]) -> Sequence:
        return Sequence(self.alphabet, tuple(data))


def ingest(raw: bytes, mode: str = "bytes", alphabet: Alphabet | None = None) -> Sequence:
    """Turn a byte stream into a :class:`Sequence`.

    ``mode`` is ``"bytes"`` (256-value alphabet, identity mapping), ``"explicit"``
    (every byte must be declared in ``alphabet``) or ``"infer"`` (sorted
    observed byte values).
    """
    raw = bytes(raw)
    if mode == "bytes":
        return Sequence(Alphabet.bytes(), tuple(raw))
    if mode == "infer":
        if not raw:
            return Sequence(alphabet or Alphabet.bytes(), ())
        alphabet = Alphabet.infer(raw)
    elif mode == "explicit":
        if alphabet is None:
            raise ValueError("explicit mode requires an alphabet")
    else:
        raise ValueError(f"unknown ingest mode {mode!r}")
    table = [-1] * 256
    for i, sym in enumerate(alphabet.symbols):
        if isinstance(sym, int) and 0 <= sym < 256:
            table[sym] = i
    data = [table[b] for b in raw]
    if data and min(data) < 0:
        offset = data.index(-1)
        raise UndeclaredSymbolError(raw[offset], offset)
    return Sequence(alphabet, tuple(data))


def frequencies(s: Sequence) -> FrequencyVector:
    counts = [0] * s.sigma
    for sym, c in Counter(s.data).items():
        counts[sym] = c
    return FrequencyVector(tuple(counts), s.n)
