"""Counter-based random streams.

Each trial owns a Philox stream keyed by ``(seed, trial)``; variates are consumed
in a fixed entry order, so trial ``t`` always sees the same numbers no matter how
trials are scheduled across threads.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RandomStream:
    seed: int
    trial: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed & _MASK64, self.trial & _MASK64], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def substream(self, trial: int) -> "RandomStream":
        return RandomStream(self.seed, trial)
