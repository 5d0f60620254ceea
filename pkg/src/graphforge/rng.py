"""Deterministic, platform-independent random number generation.

Everything that needs randomness (parameter init, synthetic data, batch
shuffling) draws from SplitMix64 so that results are bit-reproducible
across runs and platforms. SplitMix64 is counter-based: output i is

    mix64(seed + (i+1) * 0x9E3779B97F4A7C15)   (mod 2**64)

with the standard finalizer (xor-shift 30, * 0xBF58476D1CE4E5B9,
xor-shift 27, * 0x94D049BB133111EB, xor-shift 31). Reference vectors
for seed 0 are frozen in the test suite.

Uniform doubles take the top 53 bits: (u >> 11) * 2**-53, giving values
in [0, 1). Normals use Box-Muller; note cos/sin go through libm, so
normal streams are bit-stable per platform/numpy build (integer and
uniform streams are bit-stable everywhere).
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a 64-bit state value."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, label: str) -> int:
    """Derive an independent stream seed from (seed, label).

    The label is hashed with FNV-1a 64 and mixed into the seed, so the
    init stream, the shuffle stream, and the data stream never overlap.
    """
    h = 0xCBF29CE484222325
    for b in label.encode("utf-8"):
        h = ((h ^ b) * 0x100000001B3) & _MASK64
    return mix64((seed & _MASK64) ^ h)


class SplitMix64:
    """Sequential SplitMix64 stream over Python ints (exact, portable)."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return mix64(self._state)

    def next_float(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * 2.0**-53

    def next_below(self, n: int) -> int:
        """Uniform int in [0, n). Modulo bias is negligible for n << 2**64."""
        return self.next_u64() % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.next_below(i + 1)
            items[i], items[j] = items[j], items[i]

    def permutation(self, n: int) -> np.ndarray:
        idx = list(range(n))
        self.shuffle(idx)
        return np.asarray(idx, dtype=np.intp)


def _mix64_array(state: np.ndarray) -> np.ndarray:
    z = state
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def uniform_array(seed: int, count: int, low: float = 0.0, high: float = 1.0) -> np.ndarray:
    """Vectorized counter-based draw: `count` uniforms in [low, high).

    Identical to taking `count` next_float() values from SplitMix64(seed).
    """
    with np.errstate(over="ignore"):
        idx = np.arange(1, count + 1, dtype=np.uint64)
        state = np.uint64(seed & _MASK64) + idx * np.uint64(_GOLDEN)
        bits = _mix64_array(state)
    u = (bits >> np.uint64(11)).astype(np.float64) * 2.0**-53
    return low + u * (high - low)


def normal_array(seed: int, count: int) -> np.ndarray:
    """`count` standard normals via Box-Muller over the uniform stream."""
    pairs = (count + 1) // 2
    u = uniform_array(seed, 2 * pairs)
    # u1 shifted into (0, 1] so the log is finite.
    u1 = u[:pairs] + 2.0**-53
    u2 = u[pairs:]
    r = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    z = np.concatenate([r * np.cos(theta), r * np.sin(theta)])
    return z[:count]
