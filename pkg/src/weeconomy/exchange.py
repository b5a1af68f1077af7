"""Pairwise wealth-update kernels for joint-venture and WE-economy exchanges.

Every kernel takes the two agents' current wealth and returns their wealth
after one interaction. Agent ``j`` is the one that may act as a free rider:
its moral responsibility is scaled by ``rf_j`` in both the retained and the
contributed term. ``rf_j = 1`` gives the cooperative models.

The underscore-prefixed functions skip validation and are what the engine
calls in its inner loop; the public wrappers check their arguments first.
The floating-point evaluation order is part of the contract (replays and
the reduction identities rely on it), so do not rearrange the expressions.
"""

from __future__ import annotations

import math
from enum import Enum
from typing import NamedTuple


class PairUpdate(NamedTuple):
    m_i_next: float
    m_j_next: float


class ExchangeRule(str, Enum):
    JV_BASIC = "JVBasic"
    JV_RESPONSIBILITY = "JVResponsibility"
    WE_POOLED = "WEPooled"


def _jv_basic(m_i, m_j, lam, delta):
    gain = (1.0 + delta) * (1.0 - lam)
    return lam * m_i + gain * m_i, lam * m_j + gain * m_j


def _jv_responsibility(m_i, m_j, rho_i, rho_j, lam, delta):
    # rho_j already carries the free-rider factor
    keep = 1.0 - lam
    gain = (1.0 + delta) * keep
    return (
        lam * m_i + keep * (1.0 - rho_i) * m_i + gain * rho_i * m_i,
        lam * m_j + keep * (1.0 - rho_j) * m_j + gain * rho_j * m_j,
    )


def _we_pooled(m_i, m_j, rho_i, rho_j, share_i, share_j, lam, delta):
    # share_i + share_j == 1 up to rounding; rho_j carries the free-rider factor
    keep = 1.0 - lam
    pool = keep * (rho_i * m_i + rho_j * m_j)
    grown = (1.0 + delta) * pool
    return (
        lam * m_i + keep * (1.0 - rho_i) * m_i + share_i * grown,
        lam * m_j + keep * (1.0 - rho_j) * m_j + share_j * grown,
    )


def _check_common(m_i, m_j, lam, delta):
    for name, v in (("m_i", m_i), ("m_j", m_j), ("lambda", lam), ("delta", delta)):
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v!r}")
    if m_i < 0 or m_j < 0:
        raise ValueError(f"wealth must be nonnegative, got ({m_i}, {m_j})")
    if not 0.0 <= lam < 1.0:
        raise ValueError(f"savings rate must lie in [0, 1), got {lam}")
    if delta < -1.0:
        raise ValueError(f"delta must be >= -1, got {delta}")


def _check_unit(name, v):
    if not (math.isfinite(v) and 0.0 < v <= 1.0):
        raise ValueError(f"{name} must lie in (0, 1], got {v!r}")


def step_jv_basic(m_i: float, m_j: float, lam: float, delta: float) -> PairUpdate:
    """Basic joint venture: each agent stakes everything but its savings."""
    _check_common(m_i, m_j, lam, delta)
    return PairUpdate(*_jv_basic(m_i, m_j, lam, delta))


def step_jv_responsibility(
    m_i: float,
    m_j: float,
    rho_mi: float,
    rho_mj: float,
    lam: float,
    delta: float,
    rf_j: float = 1.0,
) -> PairUpdate:
    """Joint venture where each agent stakes a moral-responsibility share of its non-savings wealth."""
    _check_common(m_i, m_j, lam, delta)
    _check_unit("rho_mi", rho_mi)
    _check_unit("rho_mj", rho_mj)
    _check_unit("rf_j", rf_j)
    return PairUpdate(*_jv_responsibility(m_i, m_j, rho_mi, rf_j * rho_mj, lam, delta))


def step_we_pooled(
    m_i: float,
    m_j: float,
    rho_mi: float,
    rho_mj: float,
    w_i: float,
    w_j: float,
    lam: float,
    delta: float,
    rf_j: float = 1.0,
) -> PairUpdate:
    """WE economy: both stakes are pooled, grown by ``1 + delta`` and split ``w_i : w_j``.

    ``w_i`` and ``w_j`` are raw factor values (rho_m, rho_r or rho of the two
    agents); they are normalised here.
    """
    _check_common(m_i, m_j, lam, delta)
    _check_unit("rho_mi", rho_mi)
    _check_unit("rho_mj", rho_mj)
    _check_unit("rf_j", rf_j)
    if not (math.isfinite(w_i) and math.isfinite(w_j)) or w_i <= 0 or w_j <= 0:
        raise ValueError(f"distribution weights must be positive, got ({w_i}, {w_j})")
    total = w_i + w_j
    return PairUpdate(
        *_we_pooled(m_i, m_j, rho_mi, rf_j * rho_mj, w_i / total, w_j / total, lam, delta)
    )
