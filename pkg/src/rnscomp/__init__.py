"""Residue number system comparison with a single redundant modulus."""

from .comparison import (
    GEQ,
    LT,
    ComparisonOutcome,
    classic_compare,
    classic_compare_batch,
    rns_compare,
    rns_compare_batch,
)
from .mixed_radix import MixedRadixDigits, extend_to_redundant, mrc_convert, mrc_reconstruct
from .rns_core import (
    InconsistentBase,
    ModulusTooLarge,
    NotCoprime,
    OpCounter,
    OutOfRange,
    RnsBase,
    RnsError,
    RnsValue,
    TooFewModuli,
    base_new,
    channel_add,
    channel_mul,
    channel_sub,
    counting,
    decode,
    encode,
)

__version__ = "0.1.0"
