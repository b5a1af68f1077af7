"""Inequality and distribution statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GiniSample:
    t: int
    g: float


@dataclass(frozen=True)
class Histogram:
    bin_width: float
    bin_edges: np.ndarray
    counts: np.ndarray


@dataclass(frozen=True)
class SnapshotStats:
    mean: float
    min: float
    max: float
    band: tuple[float, float]
    band_fraction: float

    def fraction_in_band(self, lo: float, hi: float) -> float:
        if (lo, hi) != self.band:
            raise ValueError(f"stats were computed for band {self.band}, not {(lo, hi)}")
        return self.band_fraction


def _sorted_wealth(m) -> np.ndarray:
    mu = np.sort(np.asarray(m, dtype=np.float64), kind="stable")
    if mu.ndim != 1 or mu.size == 0:
        raise ValueError("wealth must be a non-empty 1-d array")
    if not np.all(np.isfinite(mu)):
        raise ValueError("wealth must be finite")
    if mu[0] < 0:
        raise ValueError("wealth must be nonnegative")
    if mu[-1] == 0:
        raise ValueError("Gini index undefined for all-zero wealth")
    return mu


def gini(m) -> float:
    """Discrete Gini index ``2 sum(k mu_k) / (N sum mu) - (N + 1) / N`` over ascending ``mu``.

    Evaluated in the algebraically identical centred form
    ``sum((2k - N - 1) mu_k) / (N sum mu)`` with exactly rounded sums, which
    gives exactly 0 for equal wealth.
    """
    mu = _sorted_wealth(m)
    n = mu.size
    coef = 2.0 * np.arange(1, n + 1, dtype=np.float64) - (n + 1)
    num = math.fsum((coef * mu).tolist())
    return num / (n * math.fsum(mu.tolist()))


def lorenz(m) -> np.ndarray:
    """Lorenz curve points ``(k/N, cumulative wealth share)`` for k = 0..N, shape (N+1, 2)."""
    mu = _sorted_wealth(m)
    n = mu.size
    cum = np.concatenate(([0.0], np.cumsum(mu)))
    share = cum / cum[-1]
    share[-1] = 1.0
    return np.column_stack((np.arange(n + 1, dtype=np.float64) / n, share))


def histogram(m, bin_width: float = 0.05) -> Histogram:
    """Count agents in half-open bins ``[k w, (k+1) w)`` starting at 0 and covering max(m)."""
    if not (math.isfinite(bin_width) and bin_width > 0):
        raise ValueError(f"bin_width must be positive, got {bin_width!r}")
    m = np.asarray(m, dtype=np.float64)
    if not np.all(np.isfinite(m)):
        raise ValueError("wealth must be finite")
    if np.any(m < 0):
        raise ValueError("wealth must be nonnegative")
    top = float(m.max()) if m.size else 0.0
    nbins = int(math.floor(top / bin_width)) + 1
    edges = np.arange(nbins + 1, dtype=np.float64) * bin_width
    while edges[-1] <= top:
        edges = np.append(edges, edges.size * bin_width)
    idx = np.searchsorted(edges, m, side="right") - 1
    counts = np.bincount(idx, minlength=edges.size - 1).astype(np.int64)
    return Histogram(float(bin_width), edges, counts)


def snapshot_stats(m, band: tuple[float, float] = (0.5, 1.5)) -> SnapshotStats:
    m = np.asarray(m, dtype=np.float64)
    if m.size == 0:
        raise ValueError("wealth must be non-empty")
    if not np.all(np.isfinite(m)):
        raise ValueError("wealth must be finite")
    lo, hi = float(band[0]), float(band[1])
    if lo > hi:
        raise ValueError(f"band lower bound {lo} exceeds upper bound {hi}")
    inside = np.count_nonzero((m >= lo) & (m <= hi))
    return SnapshotStats(
        mean=math.fsum(m.tolist()) / m.size,
        min=float(m.min()),
        max=float(m.max()),
        band=(lo, hi),
        band_fraction=inside / m.size,
    )
