"""xorshift64* : the one seeded PRNG used outside the physics.

It drives the A2 ablation's substitute energy sequence, the attack noise and
the ``noise`` synthetic image.  Vigna's xorshift64* with shifts (12, 25, 27)
and multiplier 0x2545F4914F6CDD1D; a zero seed is remapped because the
all-zero state is a fixed point.
"""

from __future__ import annotations

import math

import numpy as np

_MASK = (1 << 64) - 1
_MULT = 0x2545F4914F6CDD1D


class XorShift64Star:
    def __init__(self, seed: int):
        self.state = (seed & _MASK) or 0x9E3779B97F4A7C15

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & _MASK
        x ^= x >> 27
        self.state = x
        return (x * _MULT) & _MASK

    def random(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniforms(self, n: int) -> np.ndarray:
        return np.array([self.random() for _ in range(n)])

    def bytes(self, n: int) -> np.ndarray:
        return np.array([self.next_u64() >> 56 for _ in range(n)], dtype=np.uint8)

    def normals(self, n: int) -> np.ndarray:
        """Standard normals by Box-Muller, both outputs of each pair used."""
        out = np.empty(n)
        for i in range(0, n, 2):
            u1 = 1.0 - self.random()  # (0, 1]
            u2 = self.random()
            r = math.sqrt(-2.0 * math.log(u1))
            out[i] = r * math.cos(2.0 * math.pi * u2)
            if i + 1 < n:
                out[i + 1] = r * math.sin(2.0 * math.pi * u2)
        return out


def fallback_energies(n: int, seed: int = 215) -> np.ndarray:
    """Stand-in energy sequence: uniform reals in [0, 10)."""
    return XorShift64Star(seed).uniforms(n) * 10.0
