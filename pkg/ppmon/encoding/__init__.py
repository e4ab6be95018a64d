from ._matrix import NOISE, training_matrix
from ._prefix import (
    EncodedPrefix,
    FeatureVector,
    PrefixSelectionConfig,
    build_alphabet,
    encode_frequency,
    encode_prefix,
    select_prefixes,
)

__all__ = [
    "NOISE",
    "EncodedPrefix",
    "FeatureVector",
    "PrefixSelectionConfig",
    "build_alphabet",
    "encode_frequency",
    "encode_prefix",
    "select_prefixes",
    "training_matrix",
]
