"""Deterministic random primitives for simulation runs.

Every stochastic choice in a run draws from a single `SimRng` in a fixed,
documented order (see `engine.run`), so a run is a pure function of its
64-bit seed. The underlying bit generator is PCG64; uniforms are pulled
in blocks and consumed one at a time, which keeps the per-draw cost low
enough for the pure-Python sweep kernel.
"""

from __future__ import annotations

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF


def splitmix64(x: int) -> int:
    """One splitmix64 avalanche step; a bijection on 64-bit integers."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


class SimRng:
    """Buffered uniform stream over PCG64.

    `uniform` returns doubles in [0, 1). Integer draws are derived as
    floor(u * n); the bias is below n / 2**53 and irrelevant for the
    population sizes used here (n <= ~10**6).
    """

    __slots__ = ("_gen", "_buf", "_pos", "_block")

    def __init__(self, seed: int, block: int = 8192):
        self._gen = np.random.Generator(np.random.PCG64(seed))
        self._block = block
        self._buf = self._gen.random(block).tolist()
        self._pos = 0

    def uniform(self) -> float:
        pos = self._pos
        if pos == self._block:
            self._buf = self._gen.random(self._block).tolist()
            pos = 0
        self._pos = pos + 1
        return self._buf[pos]

    def randint(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        return int(self.uniform() * n)

    def bernoulli(self, p: float) -> bool:
        return self.uniform() < p

    def sample_prefix(self, pool: list, count: int) -> list:
        """`count` distinct items from `pool`, uniformly without replacement.

        Partial Fisher-Yates over a copy; consumes exactly `count` uniforms.
        """
        if count == 0:
            return []
        work = list(pool)
        size = len(work)
        for s in range(count):
            j = s + int(self.uniform() * (size - s))
            work[s], work[j] = work[j], work[s]
        return work[:count]

    def sample_ids_excluding(self, n: int, count: int, exclude: int) -> list:
        """`count` distinct ids from {0..n-1} minus {exclude}, without replacement.

        Rejection over the shifted range; uniform because each accepted draw
        is uniform over the remaining ids.
        """
        out: list[int] = []
        seen: set[int] = set()
        while len(out) < count:
            x = int(self.uniform() * (n - 1))
            if x >= exclude:
                x += 1
            if x not in seen:
                seen.add(x)
                out.append(x)
        return out
