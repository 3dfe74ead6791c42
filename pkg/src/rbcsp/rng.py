"""Deterministic 64-bit random number generation.

Every random draw in this package comes from the splitmix64 generator so
that instances are reproducible bit-for-bit from a single integer seed,
in any environment, forever.  The algorithm is the public-domain one from
Sebastiano Vigna (http://prng.di.unimi.it/splitmix64.c):

    state  <- (state + 0x9E3779B97F4A7C15) mod 2^64
    z      <- state
    z      <- (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9   mod 2^64
    z      <- (z XOR (z >> 27)) * 0x94D049BB133111EB   mod 2^64
    output <- z XOR (z >> 31)

Derived draws are defined on top of the raw 64-bit stream:

* ``next_below(bound)`` draws uniformly from ``[0, bound)`` by rejection:
  draws ``x`` are rejected while ``x < 2^64 mod bound``; the first accepted
  ``x`` yields ``x mod bound``.  The accepted range has size a multiple of
  ``bound``, so the result is exactly uniform.
* ``next_float()`` maps a draw to ``[0, 1)`` as ``(x >> 11) * 2^-53``.

``derive_stream(base_seed, index)`` is the stateless batch-seed derivation:
it returns the splitmix64 output function applied to
``base_seed + (index + 1) * 0x9E3779B97F4A7C15``, i.e. element ``index`` of
the splitmix64 sequence seeded with ``base_seed``.  The output function is
a bijection on 64-bit integers, so distinct indices always give distinct
seeds.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB

_INV_2_53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    """splitmix64 output function (a 64-bit bijection)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def derive_stream(base_seed: int, index: int) -> int:
    """Seed for batch element `index`, decorrelated from its neighbours."""
    if index < 0:
        raise ValueError(f"stream index must be nonnegative, got {index}")
    return mix64((base_seed + (index + 1) * GAMMA) & MASK64)


class SplitMix64:
    """Sequential splitmix64 stream over the documented constants."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + GAMMA) & MASK64
        return mix64(self._state)

    def next_below(self, bound: int) -> int:
        """Exactly uniform integer in [0, bound) via modulo rejection."""
        if bound <= 0:
            raise ValueError(f"bound must be positive, got {bound}")
        threshold = (1 << 64) % bound
        x = self.next_u64()
        while x < threshold:
            x = self.next_u64()
        return x % bound

    def next_float(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * _INV_2_53
