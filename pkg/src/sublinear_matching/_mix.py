"""Keyed counter-based mixing: every random decision in a run is a pure
function of a 128-bit master seed, a stream label, and integer counters.

The same construction is used from plain Python, vectorized numpy, and the
jitted kernels, so all three produce bit-identical streams.
"""

from __future__ import annotations

import numpy as np

U64 = np.uint64

# splitmix64 / murmur3-style avalanche constants
_GOLD = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)
_STEP_A = U64(0xD6E8FEB86659FD93)
_STEP_B = U64(0xCA5A826395121157)

# stream labels (arbitrary distinct constants)
LBL_RANK = U64(0x01)
LBL_COLOR = U64(0x02)
LBL_COIN = U64(0x03)
LBL_JSTAR = U64(0x04)
LBL_SAMPLE = U64(0x05)
LBL_SUBSEED = U64(0x06)
LBL_LAZY = U64(0x07)

_S30 = U64(30)
_S27 = U64(27)
_S31 = U64(31)
_S11 = U64(11)

_INV_2_53 = 2.0 ** -53


def _avalanche(x):
    x = (x ^ (x >> _S30)) * _MIX1
    x = (x ^ (x >> _S27)) * _MIX2
    return x ^ (x >> _S31)


def mix64(s0, s1, label, a, b):
    """Map (seed, label, a, b) to a uniform-looking 64-bit word.

    Works on numpy uint64 scalars and elementwise on uint64 arrays.
    """
    x = _avalanche(s0 ^ (label * _GOLD))
    x = _avalanche(x ^ (a * _STEP_A))
    x = _avalanche(x ^ (b * _STEP_B))
    return _avalanche(x ^ s1)


def mix64_vec(s0: int, s1: int, label, a, b) -> np.ndarray:
    """Vectorized mix64 over uint64 arrays a and b."""
    with np.errstate(over="ignore"):
        return mix64(U64(s0), U64(s1), label, np.asarray(a, dtype=np.uint64),
                     np.asarray(b, dtype=np.uint64))


def mix64_scalar(s0: int, s1: int, label, a: int, b: int) -> int:
    with np.errstate(over="ignore"):
        return int(mix64(U64(s0), U64(s1), label, U64(a), U64(b)))


def unit_from_bits(value) -> float:
    """Map a 64-bit word to (0, 1]; order-preserving on the top 53 bits."""
    return (float(value >> _S11) + 1.0) * _INV_2_53


def parse_seed(text: str) -> tuple[int, int]:
    """Parse a hex seed string (up to 128 bits) into two 64-bit words."""
    value = int(text, 16)
    if value < 0 or value >= 1 << 128:
        raise ValueError("seed must be a non-negative 128-bit hex string")
    return value & 0xFFFFFFFFFFFFFFFF, value >> 64


def format_seed(seed: tuple[int, int]) -> str:
    return f"{(seed[1] << 64) | seed[0]:x}"


def derive_seed(seed: tuple[int, int], label: int, index: int = 0) -> tuple[int, int]:
    """Derive an independent labelled sub-seed; adding new labels never
    perturbs existing streams."""
    s0, s1 = seed
    return (
        mix64_scalar(s0, s1, LBL_SUBSEED, label, 2 * index),
        mix64_scalar(s0, s1, LBL_SUBSEED, label, 2 * index + 1),
    )
