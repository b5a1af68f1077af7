"""Fraction of agents near m = 1 at the final step, for several band widths.

Compares WE-M-M against JV-M-M (and the other redistribution/WE models) to
show how the concentration ranking depends on the band.

    python scripts/band_concentration.py --seeds 1,2,3,4,5
"""

import argparse
import statistics

from weeconomy.engine import SimParams, sweep

MODELS = ["JV-M-M", "JV-M-MR", "WE-M-M", "WE-M-MR", "JV-M-M-FR", "WE-M-M-FR"]
HALF_WIDTHS = [0.5, 0.25, 0.1, 0.05]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", default="1,2,3,4,5")
    ap.add_argument("--steps", type=int, default=10**6)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    seeds = [int(s) for s in args.seeds.split(",")]
    rows = sweep([SimParams.preset(m, total_steps=args.steps) for m in MODELS], seeds,
                 workers=args.workers, keep_results=True)
    print("model      " + "".join(f"  +-{h:<5}" for h in HALF_WIDTHS) + "   min m    max m")
    for name in MODELS:
        finals = [r.result.snapshots[args.steps].m for r in rows if r.model == name]
        fracs = [
            statistics.median(float(((m >= 1 - h) & (m <= 1 + h)).mean()) for m in finals)
            for h in HALF_WIDTHS
        ]
        lo = statistics.median(float(m.min()) for m in finals)
        hi = statistics.median(float(m.max()) for m in finals)
        print(f"{name:<11}" + "".join(f"  {f:7.3f}" for f in fracs) + f"  {lo:7.3f}  {hi:7.3f}")


if __name__ == "__main__":
    main()
