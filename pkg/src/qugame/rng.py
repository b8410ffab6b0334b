"""Deterministic random source used by every stochastic operation.

The generator is numpy's PCG64. All sampling in the package goes through an
explicit RandomSource so that a seed fully determines every outcome sequence;
nothing draws from global random state.
"""

from __future__ import annotations

import numpy as np

DEFAULT_SEED = 0


class RandomSource:
    """PCG64 stream behind a small sampling interface.

    Same seed, same call sequence -> identical outcomes across runs and
    platforms.
    """

    def __init__(self, seed: int = DEFAULT_SEED):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def __repr__(self) -> str:
        return f"RandomSource(seed={self.seed})"

    def choice(self, probs) -> int:
        """Sample an index according to the probability vector `probs`."""
        p = np.asarray(probs, dtype=float)
        # guard against tiny negative / drifting sums from float arithmetic
        p = np.clip(p, 0.0, None)
        p = p / p.sum()
        return int(self._gen.choice(len(p), p=p))

    def integer(self, low: int, high: int) -> int:
        """Uniform integer in the inclusive range [low, high]."""
        return int(self._gen.integers(low, high + 1))

    def uniform(self) -> float:
        return float(self._gen.uniform())
