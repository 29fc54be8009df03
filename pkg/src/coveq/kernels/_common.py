"""Shared constants and scalar reference routines for both backends."""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX_M1 = 0xBF58476D1CE4E5B9
MIX_M2 = 0x94D049BB133111EB

# (uint64 >> 11) + 0.5 scaled by 2**-53 maps to the open interval (0, 1).
U64_TO_UNIT = 2.0**-53


def mix64(z: int) -> int:
    """SplitMix64 finalizer (Stafford mix13) on a 64-bit integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX_M1) & MASK64
    z = ((z ^ (z >> 27)) * MIX_M2) & MASK64
    return z ^ (z >> 31)


def stream_seed(master_seed: int, stream_index: int) -> int:
    """Starting counter of stream ``stream_index`` under ``master_seed``."""
    base = (master_seed + GOLDEN * ((stream_index & MASK64) + 1)) & MASK64
    return mix64(base)
