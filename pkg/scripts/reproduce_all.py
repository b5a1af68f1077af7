"""Regenerate the data for every figure at paper defaults.

    python scripts/reproduce_all.py --out results --workers 4
"""

import argparse
import sys

from weeconomy.cli import FIGURES, main


def cli():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--seeds", default="1,2,3,4,5")
    ap.add_argument("--workers", default="1")
    args = ap.parse_args()
    worst = 0
    for fig in FIGURES:
        print(f"== {fig}")
        code = main(["reproduce", fig, "--out", args.out, "--seeds", args.seeds,
                     "--workers", args.workers])
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(cli())
