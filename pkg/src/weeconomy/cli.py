"""Command-line front end: ``run``, ``sweep``, ``reproduce`` and ``list-models``.

Exit codes: 0 success, 1 invalid configuration, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import fields, replace
from pathlib import Path

from . import __version__
from .engine import (
    MODEL_NAMES,
    InitKind,
    RunResult,
    SimParams,
    SimulationError,
    named_preset,
    run,
    summarize,
    sweep,
)
from .factors import compute_factors
from .rng import RNG_ID

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2

PARAM_KEYS = {f.name for f in fields(SimParams)}
ALIASES = {"lambda": "lam"}
OUTPUT_KEYS = {"out", "bin_width", "band", "preset"}
# informational keys written into run.json; accepted so run.json is itself a config
PROVENANCE_KEYS = {"rng_id", "version"}

FIGURES = {
    "fig1": ("JV-B", "JV-M", "WE-M-M"),
    "fig2": ("JV-M-M", "JV-M-R", "JV-M-MR"),
    "fig3": ("WE-M-M", "WE-M-R", "WE-M-MR"),
    "fig4": ("JV-M-M-IR", "WE-M-M-IR"),
    "fig5": ("JV-M-M-FR", "WE-M-M-FR"),
    "fig6": (
        "JV-M", "JV-M-M", "JV-M-R", "JV-M-MR", "WE-M-M", "WE-M-R", "WE-M-MR",
        "JV-M-M-IR", "JV-M-M-FR", "WE-M-M-IR", "WE-M-M-FR",
    ),
}
SNAPSHOT_FIGURE_TIMES = (10**4, 10**5, 10**6)


class ConfigError(ValueError):
    pass


def fmt(x) -> str:
    """Shortest round-trip text for floats; plain text otherwise."""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


# configuration ----------------------------------------------------------------


def _parse_band(text) -> tuple[float, float]:
    if isinstance(text, str):
        parts = text.split(",")
    else:
        parts = list(text)
    if len(parts) != 2:
        raise ConfigError(f"band must be 'lo,hi', got {text!r}")
    lo, hi = (float(p) for p in parts)
    if lo > hi:
        raise ConfigError(f"band lower bound {lo} exceeds upper bound {hi}")
    return lo, hi


def _parse_int_list(text) -> list[int]:
    if isinstance(text, str):
        return [int(p) for p in text.split(",") if p.strip()]
    return [int(p) for p in text]


def _normalise(raw: dict, where: str) -> dict:
    out = {}
    for k, v in raw.items():
        k = ALIASES.get(k, k)
        if k not in PARAM_KEYS | OUTPUT_KEYS | PROVENANCE_KEYS:
            raise ConfigError(f"{where}: unknown key {k!r}")
        out[k] = v
    if "rng_id" in out and out["rng_id"] != RNG_ID:
        raise ConfigError(f"{where}: written with RNG {out['rng_id']!r}, this build uses {RNG_ID!r}")
    return out


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    return raw


def resolve_params(cfg: dict) -> tuple[SimParams, dict]:
    """Build SimParams from a normalised config dict; returns (params, output options)."""
    cfg = dict(cfg)
    preset = cfg.pop("preset", None)
    if preset is not None:
        cfg["model"] = preset
        cfg.pop("init", None)
    opts = {
        "out": cfg.pop("out", None),
        "bin_width": float(cfg.pop("bin_width", 0.05)),
        "band": _parse_band(cfg.pop("band", (0.5, 1.5))),
    }
    for k in PROVENANCE_KEYS:
        cfg.pop(k, None)
    if "model" not in cfg:
        raise ConfigError("no model given (use --model or a 'model'/'preset' key)")
    if isinstance(cfg["model"], str):
        named_preset(cfg["model"])  # raises with the list of valid names
    try:
        params = SimParams.from_dict(cfg)
    except (TypeError, KeyError) as exc:
        raise ConfigError(f"invalid parameters: {exc}") from None
    return params, opts


def _flag_overrides(args) -> dict:
    pairs = {
        "model": args.model,
        "n_agents": args.agents,
        "total_steps": args.steps,
        "seed": args.seed,
        "lam": args.lam,
        "delta_lo": args.delta_lo,
        "delta_hi": args.delta_hi,
        "t_p": args.tp,
        "xi": args.xi,
        "r_f": args.rf,
        "init": args.init,
        "bin_width": args.bin_width,
        "band": args.band,
        "sample_times": _parse_int_list(args.sample_times) if args.sample_times else None,
        "out": args.out,
    }
    return {k: v for k, v in pairs.items() if v is not None}


# outputs ------------------------------------------------------------------------


def write_run(out: Path, params: SimParams, result: RunResult, bin_width, band) -> None:
    out.mkdir(parents=True, exist_ok=True)
    table = compute_factors(params.n_agents)
    write_csv(out / "gini.csv", ("t", "g"), ((s.t, s.g) for s in result.gini_series))
    for t, snap in result.snapshots.items():
        write_csv(
            out / f"snapshot_{t}.csv",
            ("agent_id", "rho_m", "rho_r", "rho", "m"),
            (
                (i + 1, float(table.rho_m[i]), float(table.rho_r[i]), float(table.rho[i]), float(v))
                for i, v in enumerate(snap.m)
            ),
        )
        h = snap.histogram
        write_csv(
            out / f"histogram_{t}.csv",
            ("bin_lo", "bin_hi", "count"),
            (
                (float(h.bin_edges[k]), float(h.bin_edges[k + 1]), int(c))
                for k, c in enumerate(h.counts)
            ),
        )
    write_json(out / "run.json", provenance(params, bin_width, band))


def provenance(params: SimParams, bin_width, band) -> dict:
    d = params.to_dict()
    d.update(bin_width=bin_width, band=list(band), rng_id=RNG_ID, version=__version__)
    return d


# subcommands --------------------------------------------------------------------


def cmd_list_models(args) -> int:
    for name in MODEL_NAMES:
        spec, init = named_preset(name)
        parts = [spec.exchange.value]
        if spec.distribution_key:
            parts.append(f"split={spec.distribution_key.value}")
        if spec.redistribution:
            parts.append(f"redistribute={spec.redistribution.value}")
        if spec.free_rider_enabled:
            parts.append("free-rider")
        if init is not None:
            parts.append(f"init={init.value}")
        print(f"{name:<11} {' '.join(parts)}")
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = _normalise(load_config(args.config), args.config or "config")
    cfg.update(_normalise(_flag_overrides(args), "flags"))
    if args.model is not None:
        cfg.pop("preset", None)
    params, opts = resolve_params(cfg)
    try:
        params.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    out = Path(opts["out"] or "out")
    try:
        result = run(params, bin_width=opts["bin_width"], band=opts["band"])
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    write_run(out, params, result, opts["bin_width"], opts["band"])
    print(f"{params.model.name} seed={params.seed}: final g = {result.final_g:.6f} -> {out}")
    return EXIT_OK


SWEEP_KEYS = {"base", "models", "grid", "seeds", "workers", "bin_width", "band", "out"}


def _sweep_grid(cfg: dict) -> tuple[list[SimParams], dict]:
    unknown = set(cfg) - SWEEP_KEYS
    if unknown:
        raise ConfigError(f"sweep config: unknown keys {sorted(unknown)}")
    base = _normalise(cfg.get("base", {}), "base")
    cells = [dict(c) for c in cfg.get("grid", [])]
    cells += [{"model": name} for name in cfg.get("models", [])]
    if not cells:
        raise ConfigError("sweep config: give 'models' or 'grid'")
    grid = []
    for k, cell in enumerate(cells):
        merged = dict(base)
        merged.update(_normalise(cell, f"grid[{k}]"))
        params, _ = resolve_params(merged)
        grid.append(params)
    opts = {
        "seeds": _parse_int_list(cfg.get("seeds", [1, 2, 3, 4, 5])),
        "workers": int(cfg.get("workers", 1)),
        "bin_width": float(cfg.get("bin_width", 0.05)),
        "band": _parse_band(cfg.get("band", (0.5, 1.5))),
        "out": cfg.get("out"),
    }
    if not opts["seeds"]:
        raise ConfigError("sweep config: empty seed list")
    return grid, opts


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if args.seeds:
        cfg["seeds"] = args.seeds
    if args.workers is not None:
        cfg["workers"] = args.workers
    if args.out:
        cfg["out"] = args.out
    grid, opts = _sweep_grid(cfg)
    out = Path(opts["out"] or "sweep_out")
    out.mkdir(parents=True, exist_ok=True)
    rows = sweep(grid, opts["seeds"], workers=opts["workers"],
                 bin_width=opts["bin_width"], band=opts["band"])
    write_csv(
        out / "sweep.csv",
        ("model", "seed", "final_g", "mean_m", "band_fraction"),
        ((r.model, r.seed, r.final_g, r.mean_m, r.band_fraction) for r in rows if r.error is None),
    )
    write_csv(
        out / "failures.csv",
        ("model", "seed", "error"),
        ((r.model, r.seed, r.error) for r in rows if r.error is not None),
    )
    for k, r in enumerate(rows):
        cell = out / "cells" / f"{k:03d}_{r.model}_{r.seed}"
        cell.mkdir(parents=True, exist_ok=True)
        prov = dict(r.params, bin_width=opts["bin_width"], band=list(opts["band"]),
                    rng_id=RNG_ID, version=__version__)
        if r.error is not None:
            prov["error"] = r.error
        write_json(cell / "run.json", prov)
    ok = sum(r.error is None for r in rows)
    print(f"{ok}/{len(rows)} cells succeeded -> {out}")
    return EXIT_OK if ok else EXIT_RUNTIME


def reproduce_times(total_steps: int) -> tuple[int, ...]:
    """Log-spaced sampling (1, 2, 5 per decade) for Gini time series."""
    times = {0, total_steps}
    p = 1
    while p <= total_steps:
        times.update(c * p for c in (1, 2, 5) if c * p <= total_steps)
        p *= 10
    return tuple(sorted(times))


def cmd_reproduce(args) -> int:
    fig = args.figure
    if fig not in FIGURES:
        raise ConfigError(f"unknown figure {fig!r}; valid: {', '.join(FIGURES)}")
    seeds = _parse_int_list(args.seeds) if args.seeds else [1, 2, 3, 4, 5]
    overrides = {}
    if args.steps is not None:
        overrides["total_steps"] = args.steps
    if args.agents is not None:
        overrides["n_agents"] = args.agents
    band = _parse_band(args.band) if args.band else (0.5, 1.5)
    bin_width = args.bin_width or 0.05
    grid = []
    for name in FIGURES[fig]:
        p = SimParams.preset(name, **overrides)
        p = replace(p, sample_times=reproduce_times(p.total_steps))
        try:
            p.validate()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        grid.append(p)
    out = Path(args.out or "reproduce_out") / fig
    out.mkdir(parents=True, exist_ok=True)
    rows = sweep(grid, seeds, workers=args.workers or 1, bin_width=bin_width, band=band,
                 keep_results=True)
    failed = [r for r in rows if r.error is not None]
    for r in failed:
        print(f"error: {r.model} seed={r.seed}: {r.error}", file=sys.stderr)
    good = [r for r in rows if r.error is None]

    write_csv(
        out / "gini_series.csv",
        ("model", "seed", "t", "g"),
        ((r.model, r.seed, s.t, s.g) for r in good for s in r.result.gini_series),
    )
    if fig != "fig6":
        snap_rows, hist_rows, wealth_rows = [], [], []
        for r in good:
            final = max(r.result.snapshots)
            for t in sorted(r.result.snapshots):
                if t not in SNAPSHOT_FIGURE_TIMES:
                    continue
                snap = r.result.snapshots[t]
                h = snap.histogram
                hist_rows += [
                    (r.model, r.seed, t, float(h.bin_edges[k]), float(h.bin_edges[k + 1]), int(c))
                    for k, c in enumerate(h.counts)
                ]
                s = snap.stats
                snap_rows.append((r.model, r.seed, t, s.mean, s.min, s.max, s.band_fraction))
            wealth_rows += [
                (r.model, r.seed, final, i + 1, float(v))
                for i, v in enumerate(r.result.snapshots[final].m)
            ]
        write_csv(out / "histograms.csv", ("model", "seed", "t", "bin_lo", "bin_hi", "count"), hist_rows)
        write_csv(out / "snapshot_stats.csv",
                  ("model", "seed", "t", "mean", "min", "max", "band_fraction"), snap_rows)
        write_csv(out / "wealth.csv", ("model", "seed", "t", "agent_id", "m"), wealth_rows)

    summary = summarize(rows)
    write_csv(
        out / "summary.csv",
        ("model", "n_seeds", "median_final_g", "min_final_g", "max_final_g"),
        ((name, s["n"], s["median"], s["min"], s["max"]) for name, s in summary.items()),
    )
    write_json(out / "run.json", {
        "figure": fig,
        "seeds": seeds,
        "bin_width": bin_width,
        "band": list(band),
        "rng_id": RNG_ID,
        "version": __version__,
        "cells": [r.params for r in rows],
    })
    print(f"{'model':<11} {'median g':>9} {'min g':>9} {'max g':>9}")
    for name, s in summary.items():
        if s["n"]:
            print(f"{name:<11} {s['median']:9.4f} {s['min']:9.4f} {s['max']:9.4f}")
        else:
            print(f"{name:<11} {'failed':>9}")
    return EXIT_RUNTIME if failed and not good else EXIT_OK


# argument parsing -----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", help="named model, see list-models")
    p.add_argument("--agents", type=int)
    p.add_argument("--steps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--delta-lo", type=float)
    p.add_argument("--delta-hi", type=float)
    p.add_argument("--tp", type=int)
    p.add_argument("--xi", type=float)
    p.add_argument("--rf", type=float)
    p.add_argument("--init", choices=[k.value for k in InitKind])
    p.add_argument("--bin-width", type=float)
    p.add_argument("--band", help="lo,hi")
    p.add_argument("--sample-times", help="comma-separated step indices")
    p.add_argument("--out")
    p.add_argument("--config", help="JSON run config; flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="weeconomy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="run one seeded simulation")
    _add_param_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run a grid of models x seeds from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--seeds", help="comma-separated seeds, overrides the config")
    p.add_argument("--workers", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reproduce", help="regenerate the data behind one figure")
    p.add_argument("figure", help=", ".join(FIGURES))
    p.add_argument("--seeds", help="comma-separated seeds (default 1,2,3,4,5)")
    p.add_argument("--steps", type=int)
    p.add_argument("--agents", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--bin-width", type=float)
    p.add_argument("--band", help="lo,hi")
    p.add_argument("--out")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("list-models", help="print the named models")
    p.set_defaults(func=cmd_list_models)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
