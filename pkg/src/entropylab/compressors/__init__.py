"""LZ76/LZ77/LZ78 parsers, the BWT pipeline and order-0 arithmetic coding."""

from .bwt import BwtResult, bwt, ibwt, imtf, irle0, mtf, rle0, suffix_array
from .codecs import (
    bwt_pipeline_decode,
    bwt_pipeline_encode,
    decode,
    encode,
    lz77_decode,
    lz77_encode,
    lz78_decode,
    lz78_encode,
    order0_decode,
    order0_encode,
)
from .container import CompressedBlob
from .lz76 import lz76_complexity
from .lz77 import Lz77Phrase, lz77_parse
from .lz78 import Lz78Phrase, lz78_parse

__all__ = [
    "BwtResult", "CompressedBlob", "Lz77Phrase", "Lz78Phrase",
    "bwt", "ibwt", "mtf", "imtf", "rle0", "irle0", "suffix_array",
    "lz76_complexity", "lz77_parse", "lz78_parse",
    "lz77_encode", "lz77_decode", "lz78_encode", "lz78_decode",
    "order0_encode", "order0_decode", "bwt_pipeline_encode", "bwt_pipeline_decode",
    "encode", "decode",
]
