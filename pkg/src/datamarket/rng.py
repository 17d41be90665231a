"""Seeded deterministic random numbers for instance generation.

SplitMix64: a named 64-bit counter-based generator with a published
recurrence, so instance generation is reproducible from the seed alone in
any language. One instance of the generator is consumed in a documented
phase order by the scenario generator (see scenario.generate).
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1


class SplitMix64:
    """64-bit counter generator: state advances by the golden-gamma constant,
    outputs are the mixed counter."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) / (1 << 53)

    def unit_open(self) -> float:
        """Uniform float in (0, 1); rejects exact zeros."""
        u = self.random()
        while u == 0.0:
            u = self.random()
        return u

    def weighted_index(self, weights: list[float]) -> int:
        """Index drawn with probability proportional to weights."""
        total = 0.0
        for w in weights:
            total += w
        r = self.random() * total
        acc = 0.0
        for i, w in enumerate(weights):
            acc += w
            if r < acc:
                return i
        return len(weights) - 1
