"""Recompute the linear Riemann-Stieltjes benchmark table (p = 6, beta = -2, gamma = 3, x0 = 1).

Usage: python scripts/repro_table2.py [--grid-level L]
"""

from __future__ import annotations

import argparse

from tlfrac.tables import reproduce_table2


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid-level", type=int, default=14)
    args = ap.parse_args()
    print(f"{'H':>5} {'sup error':>10} {'published':>10} {'coeff dev':>10} {'published':>10}")
    for r in reproduce_table2(grid_level=args.grid_level):
        print(f"{r.hurst:>5} {r.sup_error:>10.5f} {r.published_sup:>10.5f} {r.coeff_dev:>10.5f} {r.published_coeff:>10.5f}")


if __name__ == "__main__":
    main()
