"""Simulation driver: pair sampling, exchanges, periodic redistribution, sampling, sweeps."""

from __future__ import annotations

import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .exchange import ExchangeRule, _jv_basic, _jv_responsibility, _we_pooled
from .factors import FactorKey, FactorTable, compute_factors
from .metrics import GiniSample, Histogram, SnapshotStats, gini, histogram, snapshot_stats
from .redistribution import redistribute
from .rng import RNG_ID, StepStream

_INF = math.inf
_BLOCK = 1 << 16


class InitKind(str, Enum):
    EQUAL = "equal"  # every agent starts with m = 1
    UNIFORM = "uniform"  # independent draws from the open interval (0, 2)


class SimulationError(RuntimeError):
    """Raised when wealth becomes non-finite; ``step`` is the step that produced it."""

    def __init__(self, message: str, step: int):
        super().__init__(message)
        self.step = step


@dataclass(frozen=True)
class ModelSpec:
    name: str
    exchange: ExchangeRule
    distribution_key: FactorKey | None = None
    redistribution: FactorKey | None = None
    free_rider_enabled: bool = False


def _preset_table() -> dict[str, tuple[ModelSpec, InitKind | None]]:
    table = {}
    jv, we = ExchangeRule.JV_RESPONSIBILITY, ExchangeRule.WE_POOLED
    table["JV-B"] = (ModelSpec("JV-B", ExchangeRule.JV_BASIC), None)
    table["JV-M"] = (ModelSpec("JV-M", jv), None)
    for key in FactorKey:
        name = f"JV-M-{key.value}"
        table[name] = (ModelSpec(name, jv, redistribution=key), None)
    for key in FactorKey:
        name = f"WE-M-{key.value}"
        table[name] = (ModelSpec(name, we, distribution_key=key), None)
    for base in ("JV-M-M", "WE-M-M"):
        spec = table[base][0]
        table[f"{base}-FR"] = (replace(spec, name=f"{base}-FR", free_rider_enabled=True), None)
        table[f"{base}-IR"] = (replace(spec, name=f"{base}-IR"), InitKind.UNIFORM)
    return table


PRESETS = _preset_table()
MODEL_NAMES = tuple(PRESETS)


def named_preset(name: str) -> tuple[ModelSpec, InitKind | None]:
    """Model decomposition for one of the named models, plus the initial-distribution override."""
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(
            f"unknown model {name!r}; valid names: {', '.join(MODEL_NAMES)}"
        ) from None


def default_sample_times(total_steps: int) -> tuple[int, ...]:
    times = {0, total_steps}
    p = 100
    while p <= total_steps:
        times.add(p)
        p *= 10
    return tuple(sorted(times))


@dataclass(frozen=True)
class SimParams:
    model: ModelSpec
    n_agents: int = 1000
    total_steps: int = 10**6
    lam: float = 0.25
    delta_lo: float = -0.1
    delta_hi: float = 0.1
    t_p: int = 10**4
    xi: float = 0.5
    r_f: float = 0.5
    seed: int = 1
    sample_times: tuple[int, ...] | None = None
    init: InitKind = InitKind.EQUAL

    @classmethod
    def preset(cls, name: str, **overrides) -> "SimParams":
        spec, init = named_preset(name)
        if init is not None:
            overrides.setdefault("init", init)
        return cls(model=spec, **overrides)

    def validate(self) -> "SimParams":
        if int(self.n_agents) != self.n_agents or self.n_agents < 2:
            raise ValueError(f"n_agents must be an integer >= 2, got {self.n_agents!r}")
        if int(self.total_steps) != self.total_steps or self.total_steps < 0:
            raise ValueError(f"total_steps must be a nonnegative integer, got {self.total_steps!r}")
        if not 0.0 <= self.lam < 1.0:
            raise ValueError(f"lambda must lie in [0, 1), got {self.lam}")
        if not (math.isfinite(self.delta_lo) and math.isfinite(self.delta_hi)):
            raise ValueError("delta bounds must be finite")
        if self.delta_lo > self.delta_hi:
            raise ValueError(f"delta_lo {self.delta_lo} exceeds delta_hi {self.delta_hi}")
        if self.delta_lo <= -1.0:
            raise ValueError(f"delta_lo must be > -1, got {self.delta_lo}")
        if int(self.t_p) != self.t_p or self.t_p < 1:
            raise ValueError(f"t_p must be an integer >= 1, got {self.t_p!r}")
        if not 0.0 <= self.xi <= 1.0:
            raise ValueError(f"xi must lie in [0, 1], got {self.xi}")
        if not 0.0 < self.r_f <= 1.0:
            raise ValueError(f"r_f must lie in (0, 1], got {self.r_f}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an integer in [0, 2**64), got {self.seed!r}")
        times = self.times
        if list(times) != sorted(set(times)):
            raise ValueError("sample_times must be strictly ascending")
        if times and (times[0] < 0 or times[-1] > self.total_steps):
            raise ValueError(f"sample_times must lie in [0, {self.total_steps}]")
        InitKind(self.init)
        return self

    @property
    def times(self) -> tuple[int, ...]:
        if self.sample_times is None:
            return default_sample_times(self.total_steps)
        return tuple(int(t) for t in self.sample_times)

    @property
    def rf_j(self) -> float:
        return self.r_f if self.model.free_rider_enabled else 1.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["model"] = {
            "name": self.model.name,
            "exchange": self.model.exchange.value,
            "distribution_key": self.model.distribution_key and self.model.distribution_key.value,
            "redistribution": self.model.redistribution and self.model.redistribution.value,
            "free_rider_enabled": self.model.free_rider_enabled,
        }
        d["init"] = InitKind(self.init).value
        d["sample_times"] = list(self.times)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SimParams":
        d = dict(d)
        m = d.pop("model")
        if isinstance(m, str):
            spec, init = named_preset(m)
            if init is not None:
                d.setdefault("init", init)
        else:
            spec = ModelSpec(
                name=m["name"],
                exchange=ExchangeRule(m["exchange"]),
                distribution_key=m.get("distribution_key") and FactorKey(m["distribution_key"]),
                redistribution=m.get("redistribution") and FactorKey(m["redistribution"]),
                free_rider_enabled=bool(m.get("free_rider_enabled", False)),
            )
        if "init" in d:
            d["init"] = InitKind(d["init"])
        if d.get("sample_times") is not None:
            d["sample_times"] = tuple(int(t) for t in d["sample_times"])
        return cls(model=spec, **d)


@dataclass
class WealthState:
    t: int
    m: np.ndarray


@dataclass
class Snapshot:
    m: np.ndarray
    histogram: Histogram
    stats: SnapshotStats


@dataclass
class RunResult:
    gini_series: list[GiniSample]
    snapshots: dict[int, Snapshot]
    params_echo: dict
    rng_id: str = RNG_ID

    @property
    def final_g(self) -> float:
        return self.gini_series[-1].g


def init_state(params: SimParams, rng: StepStream) -> WealthState:
    n = params.n_agents
    if InitKind(params.init) is InitKind.UNIFORM:
        m = 2.0 * rng.open_uniforms(n)
    else:
        m = np.ones(n, dtype=np.float64)
    return WealthState(0, m)


def _pair_updater(params: SimParams, table: FactorTable) -> Callable[[list, int, int, float], None]:
    """In-place update ``m[i], m[j]`` for one interaction of ``params.model``."""
    lam = params.lam
    spec = params.model
    rf = params.rf_j
    rho_m = table.rho_m.tolist()
    rho_m_j = (rf * table.rho_m).tolist()

    if spec.exchange is ExchangeRule.JV_BASIC:

        def update(m, i, j, d):
            m[i], m[j] = _jv_basic(m[i], m[j], lam, d)

    elif spec.exchange is ExchangeRule.JV_RESPONSIBILITY:

        def update(m, i, j, d):
            m[i], m[j] = _jv_responsibility(m[i], m[j], rho_m[i], rho_m_j[j], lam, d)

    elif spec.exchange is ExchangeRule.WE_POOLED:
        if spec.distribution_key is None:
            raise ValueError(f"model {spec.name!r}: WE exchange needs a distribution key")
        w = table.weights(spec.distribution_key).tolist()

        def update(m, i, j, d):
            wi, wj = w[i], w[j]
            tot = wi + wj
            m[i], m[j] = _we_pooled(m[i], m[j], rho_m[i], rho_m_j[j], wi / tot, wj / tot, lam, d)

    else:
        raise ValueError(f"unsupported exchange rule {spec.exchange!r}")
    return update


def _check_pair(m, i, j, t):
    a, b = m[i], m[j]
    if not (a < _INF and b < _INF):
        raise SimulationError(
            f"non-finite wealth at step {t}: agents {i + 1}, {j + 1} -> ({a}, {b})", t
        )


def step(state: WealthState, params: SimParams, table: FactorTable, rng: StepStream) -> WealthState:
    """Advance one interaction; redistributes when the new ``t`` is a multiple of ``t_p``."""
    if state.t >= params.total_steps:
        raise ValueError(f"state is at t={state.t}, run length is {params.total_steps}")
    i, j, d = rng.draw_steps(1, params.n_agents, params.delta_lo, params.delta_hi)
    i, j, d = int(i[0]), int(j[0]), float(d[0])
    m = state.m.tolist()
    _pair_updater(params, table)(m, i, j, d)
    t = state.t + 1
    _check_pair(m, i, j, t)
    out = np.array(m, dtype=np.float64)
    if params.model.redistribution is not None and t % params.t_p == 0:
        out = redistribute(out, table, params.model.redistribution, params.xi)
    return WealthState(t, out)


def _record(result: RunResult, t: int, m: np.ndarray, bin_width: float, band):
    m = m.copy()
    result.gini_series.append(GiniSample(t, gini(m)))
    result.snapshots[t] = Snapshot(m, histogram(m, bin_width), snapshot_stats(m, band))


def run(
    params: SimParams,
    bin_width: float = 0.05,
    band: tuple[float, float] = (0.5, 1.5),
    table: FactorTable | None = None,
) -> RunResult:
    """Execute ``params.total_steps`` interactions and sample at ``params.times``.

    Samples taken at a multiple of ``t_p`` see the post-redistribution state.
    ``table`` replaces the straight-line factors (used to test reductions).
    """
    params.validate()
    if table is None:
        table = compute_factors(params.n_agents)
    elif table.n_agents != params.n_agents:
        raise ValueError("factor table size does not match n_agents")
    rng = StepStream(params.seed)
    state = init_state(params, rng)
    result = RunResult([], {}, params.to_dict())

    times = params.times
    redis_key = params.model.redistribution
    t_p = params.t_p
    update = _pair_updater(params, table)
    m = state.m.tolist()
    t = 0
    ti = 0
    if times and times[0] == 0:
        _record(result, 0, state.m, bin_width, band)
        ti = 1

    total = params.total_steps
    while t < total:
        # stop each block at the next event so redistribution/sampling happen on time
        nxt = total
        if ti < len(times):
            nxt = min(nxt, times[ti])
        if redis_key is not None:
            nxt = min(nxt, (t // t_p + 1) * t_p)
        count = nxt - t
        while count > 0:
            k = min(count, _BLOCK)
            ii, jj, dd = rng.draw_steps(k, params.n_agents, params.delta_lo, params.delta_hi)
            for i, j, d in zip(ii.tolist(), jj.tolist(), dd.tolist()):
                update(m, i, j, d)
                t += 1
                if not (m[i] < _INF and m[j] < _INF):
                    _check_pair(m, i, j, t)
            count -= k
        if redis_key is not None and t % t_p == 0:
            m = redistribute(np.array(m), table, redis_key, params.xi).tolist()
        if ti < len(times) and t == times[ti]:
            _record(result, t, np.array(m), bin_width, band)
            ti += 1
    return result


@dataclass
class SweepRow:
    model: str
    seed: int
    final_g: float | None = None
    mean_m: float | None = None
    band_fraction: float | None = None
    error: str | None = None
    params: dict = field(default_factory=dict)
    result: RunResult | None = None


def _sweep_cell(args) -> SweepRow:
    params, bin_width, band, keep = args
    row = SweepRow(params.model.name, params.seed)
    try:
        row.params = params.to_dict()
        res = run(params, bin_width=bin_width, band=band)
    except Exception as exc:  # isolate cell failures
        row.error = f"{type(exc).__name__}: {exc}"
        return row
    last = res.snapshots[max(res.snapshots)]
    row.final_g = res.final_g
    row.mean_m = last.stats.mean
    row.band_fraction = last.stats.band_fraction
    if keep:
        row.result = res
    return row


def sweep(
    param_grid: Sequence[SimParams],
    replicate_seeds: Sequence[int],
    workers: int = 1,
    bin_width: float = 0.05,
    band: tuple[float, float] = (0.5, 1.5),
    keep_results: bool = False,
) -> list[SweepRow]:
    """Run every ``(params, seed)`` cell; rows come back in grid-major, seed-minor order."""
    if not param_grid:
        raise ValueError("parameter grid is empty")
    if not replicate_seeds:
        raise ValueError("no replicate seeds given")
    cells = [
        (replace(p, seed=int(s)), bin_width, tuple(band), keep_results)
        for p in param_grid
        for s in replicate_seeds
    ]
    if workers <= 1 or len(cells) == 1:
        return [_sweep_cell(c) for c in cells]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_cell, cells))


def summarize(rows: Sequence[SweepRow]) -> dict[str, dict]:
    """Median, min and max final Gini per model, in first-appearance order."""
    by_model: dict[str, list[float]] = {}
    for r in rows:
        by_model.setdefault(r.model, [])
        if r.error is None:
            by_model[r.model].append(r.final_g)
    out = {}
    for name, gs in by_model.items():
        if gs:
            out[name] = {
                "median": statistics.median(gs),
                "min": min(gs),
                "max": max(gs),
                "n": len(gs),
            }
        else:
            out[name] = {"median": None, "min": None, "max": None, "n": 0}
    return out
