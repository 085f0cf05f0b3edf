"""Portable pseudo-random numbers for instance generation.

The generator is xoshiro256** seeded through splitmix64, written out in pure
Python so a seed produces the same stream on every platform and every
interpreter version.
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state; returns ``(new_state, output)``."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


class Xoshiro256:
    """xoshiro256** 1.0 (Blackman and Vigna)."""

    def __init__(self, seed: int = 0):
        state = seed & _MASK64
        s = []
        for _ in range(4):
            state, out = splitmix64(state)
            s.append(out)
        self._s = s

    def next_u64(self) -> int:
        s = self._s
        result = (_rotl((s[1] * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s[1] << 17) & _MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randbelow(self, k: int) -> int:
        """Uniform integer in [0, k) by masked rejection."""
        if k <= 0:
            raise ValueError("k must be positive")
        if k == 1:
            return 0
        bits = (k - 1).bit_length()
        while True:
            r = self.next_u64() >> (64 - bits)
            if r < k:
                return r

    def nonzero_weight(self, bound: int) -> int:
        """Uniform integer in [-bound, bound] with 0 excluded."""
        k = self.randbelow(2 * bound)
        return k - bound if k < bound else k - bound + 1

    def geometric_skip(self, log_q: float) -> int:
        """Number of failures before the next success, ``log_q = log(1 - p)``."""
        r = self.random()
        return int(math.floor(math.log(1.0 - r) / log_q))
