"""Regenerate the spectral-efficiency curves of every figure preset as CSV files.

    python3 scripts/reproduce_figures.py --out-dir results --trials 200 --workers 4
"""

import argparse
import sys

from nuq_hybrid import cli
from nuq_hybrid.presets import FIGURES


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("figures", nargs="*", default=list(FIGURES))
    parser.add_argument("--out-dir", default="results")
    parser.add_argument("--trials", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()
    for fig in args.figures:
        print(f"== {fig}")
        code = cli.main(["reproduce", fig, "--out-dir", f"{args.out_dir}/{fig}", "--trials", str(args.trials),
                         "--seed", str(args.seed), "--workers", str(args.workers)])
        if code:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
