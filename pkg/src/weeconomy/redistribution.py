"""Periodic population-wide redistribution of wealth stocks."""

from __future__ import annotations

import math

import numpy as np

from .factors import FactorKey, FactorTable


def redistribute(m, table: FactorTable, key: FactorKey, xi: float) -> np.ndarray:
    """Collect ``xi * rho_m[i] * m[i]`` from everyone and pay it back pro rata to ``key``.

    Collection always uses moral responsibility; only the payout weights
    depend on ``key``. Returns a new array.
    """
    if not (math.isfinite(xi) and 0.0 <= xi <= 1.0):
        raise ValueError(f"transfer rate xi must lie in [0, 1], got {xi!r}")
    m = np.asarray(m, dtype=np.float64)
    if m.shape != (table.n_agents,):
        raise ValueError(f"wealth has shape {m.shape}, factor table expects ({table.n_agents},)")
    if np.any(m < 0) or not np.all(np.isfinite(m)):
        raise ValueError("wealth must be finite and nonnegative")
    if xi == 0.0:
        return m.copy()
    rho_m = table.rho_m
    w = table.weights(key)
    collected = math.fsum((rho_m * m).tolist())
    payout = xi * (w / math.fsum(w.tolist())) * collected
    return (1.0 - xi * rho_m) * m + payout
