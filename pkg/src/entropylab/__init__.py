"""Exact empirical entropy, structured sequence generators, LZ/BWT
compressors with bit-exact accounting, and entropy-bound checks."""

__version__ = "0.1.0"

from .core import Alphabet, FrequencyVector, Sequence, frequencies, ingest
from .entropy import (
    Distribution,
    EntropyProfile,
    MarkovModel,
    context_string,
    context_table,
    entropy_profile,
    fit_markov,
    h0,
    hk,
    self_information,
    serialize_model,
    deserialize_model,
    shannon_entropy,
)
