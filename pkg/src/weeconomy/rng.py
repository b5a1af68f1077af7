"""Seeded random stream with a fixed consumption order.

The generator is numpy's PCG64 (PCG XSL RR 128/64) seeded through
``SeedSequence(seed)``. All derived values come from its raw 64-bit outputs so
that the mapping is fully specified here and does not depend on numpy's
higher-level sampling routines:

* unit float ``u = (raw >> 11) * 2**-53`` in [0, 1)
* open unit float ``(raw >> 11 + 0.5) * 2**-53`` in (0, 1)
* one exchange step consumes exactly three raws, in order: first agent
  ``floor(u0 * N)``, second agent ``floor(u1 * (N - 1))`` over the remaining
  agents, then ``delta = lo + (hi - lo) * u2``

Raws are consumed strictly sequentially, so drawing many steps at once
yields the same values as drawing them one at a time.
"""

from __future__ import annotations

import numpy as np

RNG_ID = "numpy.random.PCG64/SeedSequence; u53=(raw>>11)*2^-53; step=(i,j,delta)"

_SCALE = 2.0**-53


class StepStream:
    def __init__(self, seed: int):
        if int(seed) != seed or seed < 0 or seed >= 2**64:
            raise ValueError(f"seed must be an integer in [0, 2**64), got {seed!r}")
        self.seed = int(seed)
        self._bitgen = np.random.PCG64(np.random.SeedSequence(self.seed))

    def raw(self, n: int) -> np.ndarray:
        return self._bitgen.random_raw(n).astype(np.uint64)

    def uniforms(self, n: int) -> np.ndarray:
        return (self.raw(n) >> np.uint64(11)).astype(np.float64) * _SCALE

    def open_uniforms(self, n: int) -> np.ndarray:
        return ((self.raw(n) >> np.uint64(11)).astype(np.float64) + 0.5) * _SCALE

    def draw_steps(self, count: int, n_agents: int, lo: float, hi: float):
        """Return 0-based ``(i, j, delta)`` arrays for ``count`` exchange steps, ``i != j``."""
        u = self.uniforms(3 * count).reshape(count, 3)
        i = np.minimum((u[:, 0] * n_agents).astype(np.int64), n_agents - 1)
        j = np.minimum((u[:, 1] * (n_agents - 1)).astype(np.int64), n_agents - 2)
        j += j >= i
        delta = lo + (hi - lo) * u[:, 2]
        return i, j, delta
