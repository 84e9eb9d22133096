"""Zero-error codes, prefix codes and epsilon-error simulation."""

from .binning import SimOutcome, binning_simulate, covering_simulate
from .huffman import canonical_code, expected_length, huffman_code, huffman_lengths, is_prefix_free, kraft_sum
from .zero_error import (
    Codebook,
    DecodeError,
    Verification,
    build_index_code,
    build_zero_error_code,
    codebook_from_dict,
    codebook_from_json,
    decode1,
    decode2,
    measured_rate,
    merge_colors,
    verify_index_code,
    verify_zero_error,
)

__all__ = [
    "Codebook",
    "DecodeError",
    "SimOutcome",
    "Verification",
    "binning_simulate",
    "build_index_code",
    "build_zero_error_code",
    "canonical_code",
    "codebook_from_dict",
    "codebook_from_json",
    "covering_simulate",
    "decode1",
    "decode2",
    "expected_length",
    "huffman_code",
    "huffman_lengths",
    "is_prefix_free",
    "kraft_sum",
    "measured_rate",
    "merge_colors",
    "verify_index_code",
    "verify_zero_error",
]
