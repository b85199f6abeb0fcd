"""Deterministic pseudo-randomness used everywhere a seed appears.

All stochastic steps (KID subset draws, embedding initialization) run on a
small fixed PRNG rather than numpy's global state, so results are
bit-reproducible across runs, platforms, and worker counts.
"""

from __future__ import annotations

import math

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF
_MASK32 = 0xFFFFFFFF
_PCG_MULT = 6364136223846793005
_PCG_DEFAULT_SEQ = 54


def splitmix64(x: int) -> int:
    """One splitmix64 step: maps a 64-bit value to a well-mixed 64-bit value."""
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def stream_seed(master_seed: int, repetition: int) -> int:
    """Per-repetition seed: splitmix64 of the master seed XOR the repetition index."""
    return splitmix64(master_seed & _MASK64) ^ (repetition & _MASK64)


class Pcg32:
    """PCG-XSH-RR 32-bit generator (64-bit state), seeded like the reference
    ``pcg32_srandom_r``. A fixed stream constant keeps call sites one-argument.
    """

    def __init__(self, seed: int, seq: int = _PCG_DEFAULT_SEQ):
        self._state = 0
        self._inc = (((seq & _MASK64) << 1) | 1) & _MASK64
        self._next_u32()
        self._state = (self._state + (seed & _MASK64)) & _MASK64
        self._next_u32()
        self._spare_normal: float | None = None

    def _next_u32(self) -> int:
        old = self._state
        self._state = (old * _PCG_MULT + self._inc) & _MASK64
        xorshifted = (((old >> 18) ^ old) >> 27) & _MASK32
        rot = old >> 59
        return ((xorshifted >> rot) | (xorshifted << ((-rot) & 31))) & _MASK32

    def next_u32(self) -> int:
        return self._next_u32()

    def bounded(self, bound: int) -> int:
        """Uniform integer in [0, bound) without modulo bias (rejection loop)."""
        if bound <= 0:
            raise ValueError(f"bound must be positive, got {bound}")
        threshold = (1 << 32) % bound
        while True:
            r = self._next_u32()
            if r >= threshold:
                return r % bound

    def uniform(self) -> float:
        """53-bit uniform double in [0, 1)."""
        hi = self._next_u32() >> 5
        lo = self._next_u32() >> 6
        return (hi * 67108864.0 + lo) / 9007199254740992.0

    def normal(self) -> float:
        """Standard normal via Box-Muller; draws come in deterministic pairs."""
        if self._spare_normal is not None:
            z = self._spare_normal
            self._spare_normal = None
            return z
        u1 = 1.0 - self.uniform()  # (0, 1], keeps log() finite
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        theta = 2.0 * math.pi * u2
        self._spare_normal = r * math.sin(theta)
        return r * math.cos(theta)

    def normal_array(self, n: int) -> np.ndarray:
        return np.array([self.normal() for _ in range(n)], dtype=np.float64)

    def sample_indices(self, n: int, k: int) -> np.ndarray:
        """k distinct indices from range(n) by partial Fisher-Yates.

        The first k slots of the shuffled index array are returned in draw
        order, so the result depends only on the generator state.
        """
        if not 0 <= k <= n:
            raise ValueError(f"cannot draw {k} of {n} indices")
        idx = list(range(n))
        for i in range(k):
            j = i + self.bounded(n - i)
            idx[i], idx[j] = idx[j], idx[i]
        return np.asarray(idx[:k], dtype=np.intp)
