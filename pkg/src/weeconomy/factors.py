"""Per-agent moral-responsibility and risk-vulnerability factors."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class FactorKey(str, Enum):
    """Which factor array weights a distribution or redistribution."""

    M = "M"
    R = "R"
    MR = "MR"


@dataclass(frozen=True)
class FactorTable:
    """Factor arrays stored 0-based; agent ``i`` (1-based) lives at ``i - 1``."""

    n_agents: int
    rho_m: np.ndarray
    rho_r: np.ndarray
    rho: np.ndarray

    def weights(self, key: FactorKey) -> np.ndarray:
        key = FactorKey(key)
        if key is FactorKey.M:
            return self.rho_m
        if key is FactorKey.R:
            return self.rho_r
        return self.rho


def compute_factors(n_agents: int) -> FactorTable:
    """Straight-line factors: rho_m = 0.2 + 0.8 i/N, rho_r = 1 - 0.2 i/N, rho = rho_m rho_r."""
    if int(n_agents) != n_agents or n_agents < 2:
        raise ValueError(f"n_agents must be an integer >= 2, got {n_agents!r}")
    n = int(n_agents)
    # i/N first so that agent N lands exactly on 1.0 and 0.8
    frac = np.arange(1, n + 1, dtype=np.float64) / n
    rho_m = 0.2 + 0.8 * frac
    rho_r = 1.0 - 0.2 * frac
    rho = rho_m * rho_r
    for arr in (rho_m, rho_r, rho):
        arr.setflags(write=False)
    return FactorTable(n, rho_m, rho_r, rho)


def factor_weight(table: FactorTable, key: FactorKey, i: int) -> float:
    """Factor of 1-based agent ``i`` selected by ``key``."""
    if not 1 <= i <= table.n_agents:
        raise IndexError(f"agent index {i} outside 1..{table.n_agents}")
    return float(table.weights(key)[i - 1])
