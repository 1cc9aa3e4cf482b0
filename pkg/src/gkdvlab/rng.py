"""Seeded randomness with a fixed, documented generator.

SplitMix64 (Steele, Lea, and Flood constants) in pure integer arithmetic,
so fixtures transfer across platforms and implementations. Doubles in
[0, 1) take the top 53 bits of the output word.
"""

from __future__ import annotations

import numpy as np

from .grid import Grid

__all__ = ["SplitMix64", "random_smooth_values", "DEFAULT_SEED"]

DEFAULT_SEED = 1000003

_MASK64 = (1 << 64) - 1


class SplitMix64:
    GAMMA = 0x9E3779B97F4A7C15
    MIX1 = 0xBF58476D1CE4E5B9
    MIX2 = 0x94D049BB133111EB

    def __init__(self, seed: int) -> None:
        self.state = int(seed) & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + self.GAMMA) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * self.MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * self.MIX2) & _MASK64
        return (z ^ (z >> 31)) & _MASK64

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        return lo + (hi - lo) * ((self.next_u64() >> 11) * 2.0 ** -53)


def random_smooth_values(g: Grid, rng: SplitMix64, n_modes: int = 8,
                         width: float = 6.0) -> np.ndarray:
    """Localized random field: low harmonics under a Gaussian envelope.

    Coefficients are drawn in a fixed order (cosine then sine per harmonic),
    so the result is fully determined by the generator state. The envelope
    width keeps the tail below the box boundary guard at the default box.
    """
    arg = np.pi * g.x / g.half_length
    vals = np.zeros(g.n_points)
    for m in range(1, n_modes + 1):
        a = rng.uniform(-1.0, 1.0)
        b = rng.uniform(-1.0, 1.0)
        vals += a * np.cos(m * arg) + b * np.sin(m * arg)
    return vals * np.exp(-0.5 * (g.x / width) ** 2)
