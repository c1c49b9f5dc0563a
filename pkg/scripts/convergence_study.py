"""Observed convergence order of the Volterra solver against the t^H benchmark.

Prints sup errors on the level p + 1 grid and the base-2 log of the ratio
between consecutive levels.

Usage: python scripts/convergence_study.py [--H 0.5] [--alpha 0.8] [--pmax 9]
"""

from __future__ import annotations

import argparse
import math

from tlfrac.tables import table1_error


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--H", type=float, default=0.5)
    ap.add_argument("--alpha", type=float, default=0.8)
    ap.add_argument("--pmax", type=int, default=9)
    args = ap.parse_args()
    prev = None
    for p in range(2, args.pmax + 1):
        err = table1_error(args.H, args.alpha, p)
        order = "" if prev is None else f"  observed order {math.log2(prev / err):.3f}"
        print(f"p={p:2d}  sup error {err:.4e}{order}")
        prev = err


if __name__ == "__main__":
    main()
