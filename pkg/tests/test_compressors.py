import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from entropylab.bitio import BitstreamError
from entropylab.compressors import (
    BwtResult, CompressedBlob, Lz77Phrase, Lz78Phrase, bwt, bwt_pipeline_decode,
    bwt_pipeline_encode, decode, encode, ibwt, imtf, irle0, lz76_complexity, lz77_decode,
    lz77_encode, lz77_parse, lz78_decode, lz78_encode, lz78_parse, mtf, order0_decode,
    order0_encode, rle0, suffix_array,
)
from entropylab.compressors.arith import CODER_CONSTANT, TERMINATION_BITS
from entropylab.compressors.bwt import RUNA, RUNB, SENTINEL
from entropylab.core import Alphabet, Sequence, ingest
from entropylab.entropy import h0
from entropylab.generators import de_bruijn

from conftest import CORPUS, random_sequence, sequences, toronto

ALGORITHMS = ("lz77", "lz78", "order0", "bwt")


# oracles ---------------------------------------------------------------

def lz76_oracle(data) -> int:
    """Exhaustive-history parse straight from the definition, by explicit comparison."""
    n, i, c = len(data), 0, 0
    while i < n:
        length = 1
        while i + length <= n and any(
            all(data[j + t] == data[i + t] for t in range(length)) for j in range(i)
        ):
            length += 1
        c += 1
        i += length
    return c


def lz77_oracle(data):
    """Greedy parse with an exhaustive search over every earlier start; nearest source on ties."""
    n, i, out = len(data), 0, []
    while i < n:
        best_len, best_off = 0, 0
        for j in range(i - 1, -1, -1):
            length = 0
            while length < n - i - 1 and data[j + length] == data[i + length]:
                length += 1
            if length > best_len:
                best_len, best_off = length, i - j
        out.append((best_off, best_len, data[i + best_len]))
        i += best_len + 1
    return out


def lz78_oracle(data):
    """Dictionary of phrase tuples rather than a trie."""
    phrases = {(): 0}
    out, cur = [], ()
    for c in data:
        if cur + (c,) in phrases:
            cur = cur + (c,)
        else:
            out.append((phrases[cur], c))
            phrases[cur + (c,)] = len(phrases)
            cur = ()
    if cur:
        out.append((phrases[cur], None))
    return out


def rotation_bwt(text: str) -> str:
    """Sort all rotations of text + '$' ('$' below every letter used)."""
    t = text + "\x00"
    rows = sorted(t[i:] + t[:i] for i in range(len(t)))
    return "".join(r[-1] for r in rows).replace("\x00", "$")


# LZ76 ------------------------------------------------------------------

def test_lz76_examples():
    assert lz76_complexity(Sequence.from_text("A")) == 1
    const = Sequence.from_text("A" * 64)
    assert lz76_complexity(const) == lz76_oracle(const.data) <= 8
    db = de_bruijn(2, 6)
    same_len = Sequence(db.alphabet, (0,) * db.n)
    assert lz76_complexity(db) > lz76_complexity(same_len)


def test_lz76_classic_example():
    # Kaspar-Schuster's worked string 0 | 001 | 10 | 100 | 1000 | 101
    s = Sequence.from_text("0001101001000101", "01")
    assert lz76_complexity(s) == 6


@settings(max_examples=200, deadline=None)
@given(sequences(min_n=1, max_n=40))
def test_lz76_matches_oracle(s):
    assert lz76_complexity(s) == lz76_oracle(s.data)


@settings(max_examples=100, deadline=None)
@given(sequences(min_n=1, max_n=80))
def test_lz76_below_lz78_phrase_count(s):
    assert lz76_complexity(s) <= len(lz78_parse(s)) <= s.n


def test_lz76_de_bruijn_beats_short_periods():
    for k in (4, 6, 8):
        db = de_bruijn(2, k)
        c = lz76_complexity(db)
        rng = random.Random(k)
        for period in range(1, k + 1):
            pattern = [rng.randrange(2) for _ in range(period)]
            periodic = Sequence(db.alphabet, tuple(pattern[i % period] for i in range(db.n)))
            assert c >= lz76_complexity(periodic)


# LZ77 ------------------------------------------------------------------

def test_lz77_constant_string():
    s = Sequence.from_text("AAAAAAA")
    assert lz77_parse(s) == [Lz77Phrase(0, 0, 0), Lz77Phrase(1, 5, 0)]
    assert lz77_decode(lz77_encode(s)) == s


def test_lz77_two_literals():
    s = Sequence.from_text("AB")
    assert lz77_parse(s) == [Lz77Phrase(0, 0, 0), Lz77Phrase(0, 0, 1)]


@settings(max_examples=200, deadline=None)
@given(sequences(min_n=1, max_n=60))
def test_lz77_matches_bruteforce(s):
    assert [tuple(p) for p in lz77_parse(s)] == lz77_oracle(s.data)


def test_lz77_bit_accounting():
    s = Sequence.from_text("ABRACADABRA")
    blob = lz77_encode(s)
    per_phrase = 2 * math.ceil(math.log2(s.n + 1)) + math.ceil(math.log2(s.sigma))
    assert blob.payload_bits == len(lz77_parse(s)) * per_phrase


def test_lz77_random_10k_roundtrip():
    s = random_sequence(random.Random(77), max_sigma=4, min_n=10_000, max_n=10_000)
    assert lz77_decode(lz77_encode(s)) == s


# LZ78 ------------------------------------------------------------------

def test_lz78_constant_string():
    s = Sequence.from_text("AAAA")
    assert lz78_parse(s) == [Lz78Phrase(0, 0), Lz78Phrase(1, 0), Lz78Phrase(1, None)]
    assert lz78_decode(lz78_encode(s)) == s


def test_lz78_single_symbol():
    s = Sequence.from_text("Q")
    assert lz78_parse(s) == [Lz78Phrase(0, 0)]
    assert lz78_decode(lz78_encode(s)) == s


@settings(max_examples=200, deadline=None)
@given(sequences(min_n=1, max_n=80))
def test_lz78_matches_oracle(s):
    assert [tuple(p) for p in lz78_parse(s)] == lz78_oracle(s.data)


def test_lz78_bit_accounting():
    s = Sequence.from_text("AAAA", "AB")
    # phrase 1: 0 + 1 bits, phrase 2: 1 + 1, phrase 3 (final, no symbol): 2
    assert lz78_encode(s).payload_bits == 1 + 2 + 2


def test_lz78_random_10k_roundtrip():
    s = random_sequence(random.Random(78), max_sigma=6, min_n=10_000, max_n=10_000)
    assert lz78_decode(lz78_encode(s)) == s


# BWT / MTF / RLE -------------------------------------------------------

def test_bwt_toronto():
    assert bwt(toronto()).to_text() == "OOTRTON$" == rotation_bwt("TORONTO")


def test_bwt_single_char():
    result = bwt(Sequence.from_text("A"))
    assert result.to_text() == rotation_bwt("A") == "A$"
    assert ibwt(result).to_text() == "A"


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet="abcd", min_size=1, max_size=50))
def test_bwt_matches_rotation_sort(text):
    s = Sequence.from_text(text, "abcd")
    assert bwt(s).to_text() == rotation_bwt(text)


def test_bwt_roundtrip_random():
    rng = random.Random(11)
    for _ in range(1000):
        s = random_sequence(rng, max_sigma=6, max_n=120)
        result = bwt(s)
        assert sorted(result.last) == sorted(s.data + (SENTINEL,))
        assert ibwt(result) == s


def test_bwt_rejects_bad_sentinel_count():
    with pytest.raises(ValueError):
        BwtResult(Alphabet.from_bytes("AB"), (0, 1, 0), 0)
    with pytest.raises(ValueError):
        BwtResult(Alphabet.from_bytes("AB"), (SENTINEL, 1, SENTINEL), 0)


def test_suffix_array_against_sorted_suffixes():
    rng = random.Random(5)
    for _ in range(200):
        data = [rng.randrange(3) for _ in range(rng.randint(1, 40))]
        ext = [d + 1 for d in data] + [0]
        expected = sorted(range(len(ext)), key=lambda i: ext[i:])
        assert suffix_array(data).tolist() == expected


def test_mtf_examples():
    assert mtf(Sequence.from_text("AAAA", "AB")).data == (0, 0, 0, 0)
    assert mtf(Sequence.from_text("BA", "AB")).data == (1, 1)


@given(sequences())
def test_mtf_roundtrip(s):
    assert imtf(mtf(s), s.alphabet) == s


def test_imtf_rejects_out_of_range():
    with pytest.raises(ValueError):
        imtf(Sequence(Alphabet(tuple(range(3))), (0, 2)), Alphabet.from_bytes("AB"))


@pytest.mark.parametrize("length,digits", [
    (1, [RUNA]), (2, [RUNB]), (3, [RUNA, RUNA]), (4, [RUNB, RUNA]),
    (5, [RUNA, RUNB]), (6, [RUNB, RUNB]), (7, [RUNA, RUNA, RUNA]),
])
def test_rle0_one_two_code(length, digits):
    ranks = Sequence(Alphabet(tuple(range(2))), (0,) * length)
    assert list(rle0(ranks).data) == digits
    assert irle0(rle0(ranks)) == ranks


def test_rle0_without_zeros_shifts_ranks():
    ranks = Sequence(Alphabet(tuple(range(4))), (1, 3, 2))
    assert rle0(ranks).data == (2, 4, 3)


@given(sequences())
def test_rle0_roundtrip(s):
    ranks = Sequence(Alphabet(tuple(range(s.sigma))), s.data)
    assert irle0(rle0(ranks), s.sigma) == ranks


def test_irle0_rejects_bad_token():
    with pytest.raises(ValueError):
        irle0(Sequence(Alphabet(tuple(range(5))), (0, 4)), sigma=2)


# order-0 arithmetic coder ----------------------------------------------

def test_order0_constant_costs_nothing():
    s = Sequence.from_text("AAAA")
    blob = order0_encode(s)
    assert blob.sections["order0_code"] == 0
    assert order0_decode(blob) == s


def test_order0_toronto_interval():
    s = toronto()
    blob = order0_encode(s)
    ideal = s.n * h0(s)
    assert ideal == pytest.approx(12.8966, abs=1e-4)
    assert ideal <= blob.sections["order0_code"] <= ideal + TERMINATION_BITS + CODER_CONSTANT
    assert order0_decode(blob) == s


def test_order0_overhead_random_1e5():
    rng = random.Random(31)
    for sigma in (2, 5, 26):
        weights = [rng.random() for _ in range(sigma)]
        data = tuple(rng.choices(range(sigma), weights=weights, k=100_000))
        s = Sequence(Alphabet.digits(sigma), data)
        blob = order0_encode(s)
        overhead = blob.sections["order0_code"] / s.n - h0(s)
        assert 0 <= overhead <= 0.1
        assert order0_decode(blob) == s


@settings(max_examples=200, deadline=None)
@given(sequences(min_n=1, max_n=200))
def test_order0_payload_interval(s):
    code = order0_encode(s).sections["order0_code"]
    ideal = s.n * h0(s)
    assert ideal - 1e-9 <= code <= ideal + TERMINATION_BITS + CODER_CONSTANT


# containers and full pipeline ------------------------------------------

ADVERSARIAL = [
    Sequence.from_text("A" * 500),
    Sequence.from_text("AB" * 250),
    de_bruijn(2, 9),
    de_bruijn(4, 4),
]


@pytest.mark.parametrize("algo", ALGORITHMS)
@pytest.mark.parametrize("s", ADVERSARIAL, ids=["constant", "alternating", "debruijn2", "debruijn4"])
def test_roundtrip_adversarial(algo, s):
    blob = encode(s, algo)
    assert decode(CompressedBlob.from_bytes(blob.to_bytes())) == s


@pytest.mark.parametrize("algo", ALGORITHMS)
def test_compressing_a_blob(algo):
    inner = encode(Sequence.from_text("abracadabra " * 40), "bwt").to_bytes()
    s = ingest(inner)
    assert decode(encode(s, algo)) == s


@pytest.mark.parametrize("algo", ALGORITHMS)
@settings(max_examples=50, deadline=None)
@given(s=sequences(min_n=1, max_n=100))
def test_roundtrip_property(algo, s):
    blob = encode(s, algo)
    assert decode(CompressedBlob.from_bytes(blob.to_bytes())) == s


def test_accounting_identity():
    s = Sequence.from_text("she sells sea shells by the sea shore")
    for algo in ALGORITHMS:
        blob = encode(s, algo)
        assert sum(blob.sections.values()) == blob.payload_bits
        assert blob.header_bits + blob.payload_bits + blob.padding_bits == blob.total_bits
        assert blob.total_bits == 8 * len(blob.to_bytes())


def test_bwt_pipeline_stages_itemized():
    blob = bwt_pipeline_encode(Sequence.from_text("banana bandana"))
    assert list(blob.sections) == ["bwt_sentinel", "mtf", "rle_length", "order0_model", "order0_code"]


def test_corrupt_blobs_rejected():
    s = Sequence.from_text("mississippi river")
    for algo in ALGORITHMS:
        raw = encode(s, algo).to_bytes()
        with pytest.raises(BitstreamError) as err:
            CompressedBlob.from_bytes(b"XXXX" + raw[4:])
        assert err.value.stage == "container"
        with pytest.raises(BitstreamError):
            CompressedBlob.from_bytes(raw[:-1])


def test_corrupt_payload_names_stage():
    s = Sequence.from_text("mississippi river")
    blob = lz77_encode(s)
    broken = CompressedBlob(blob.algorithm, blob.n, blob.alphabet, blob.payload[:-2] + b"\xff\xff",
                            blob.payload_bits)
    with pytest.raises(BitstreamError) as err:
        lz77_decode(broken)
    assert err.value.stage == "lz77" and err.value.offset is not None


def test_empty_input_rejected():
    with pytest.raises(ValueError):
        encode(Sequence(Alphabet.from_bytes("A"), ()), "lz77")


@pytest.mark.slow
def test_bwt_pipeline_roundtrip_1mb_corpus():
    s = ingest(CORPUS.read_bytes(), "infer")
    assert s.n >= 1_000_000
    assert bwt_pipeline_decode(CompressedBlob.from_bytes(bwt_pipeline_encode(s).to_bytes())) == s
