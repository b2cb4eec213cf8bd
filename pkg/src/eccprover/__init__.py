"""Formal verification workbench for ECC encoder/decoder circuits.

Codes are built from GF(2) parity-check matrices, synthesized into gate-level
circuits, and checked with a built-in CDCL solver driving bounded model
checking and k-induction. A brute-force oracle cross-checks everything.
"""

__version__ = "0.1.0"

from .codes import CodeSpec, build_code, min_distance
from .oracle import count_patterns, decode_ref, encode_ref, exhaustive_check

__all__ = [
    "CodeSpec",
    "build_code",
    "count_patterns",
    "decode_ref",
    "encode_ref",
    "exhaustive_check",
    "min_distance",
]
