"""Deterministic pseudo-random primitives.

Everything randomized in this package derives from counter-based SplitMix64:
output i is a pure function of (seed, i), so scalar loops, vectorized numpy,
and jitted kernels can reproduce the same stream bit-for-bit. Range reduction
is modulo with rejection of the biased tail.
"""

from __future__ import annotations

from .errors import DomainError

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB

# 1/2^53; a 53-bit draw times this lands in [0, 1).
UNIT_SCALE = 1.0 / 9007199254740992.0


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a 64-bit state word."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX_A) & MASK64
    z = ((z ^ (z >> 27)) * _MIX_B) & MASK64
    return z ^ (z >> 31)


def splitmix64_at(seed: int, index: int) -> int:
    """Output at stream position index (0-based) for the given seed."""
    return mix64((seed + (index + 1) * GOLDEN_GAMMA) & MASK64)


class SplitMix64:
    """Sequential view of the counter-based stream.

    Tracks how many outputs have been consumed; `position` can be handed to
    the bulk kernels to continue the same stream without overlap.
    """

    __slots__ = ("seed", "position")

    def __init__(self, seed: int, position: int = 0):
        self.seed = seed & MASK64
        self.position = position

    def next_u64(self) -> int:
        value = splitmix64_at(self.seed, self.position)
        self.position += 1
        return value

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n) by modulo with tail rejection."""
        if n <= 0:
            raise DomainError("bound must be positive")
        # Reject draws from the final partial block of size 2^64 mod n.
        accept_max = MASK64 - ((1 << 64) % n)
        while True:
            u = self.next_u64()
            if u <= accept_max:
                return u % n

    def next_unit(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * UNIT_SCALE

    def next_bit(self) -> int:
        return self.next_u64() >> 63
