"""Emit curve data for the mis-specified Hurst exponent experiment.

Writes one CSV per assumed H (columns t, g, X, X_p on the level-10 grid) and
a summary of sup errors. Optionally plots with matplotlib if installed.

Usage: python scripts/figure_data.py --seed 7 [--H 0.51] [--H-mis 0.8 0.6] [--out figdata] [--plot]
"""

from __future__ import annotations

import argparse
from pathlib import Path

from tlfrac.cli import main as cli_main


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--H", type=float, default=0.51)
    ap.add_argument("--H-mis", type=float, nargs="+", default=[0.8])
    ap.add_argument("--p", type=int, default=6)
    ap.add_argument("--out", type=Path, default=Path("figdata"))
    ap.add_argument("--plot", action="store_true", help="render PNGs (needs matplotlib)")
    args = ap.parse_args()
    argv = ["figure-data", "--seed", str(args.seed), "--H", str(args.H), "--p", str(args.p), "--out", str(args.out)]
    code = cli_main(argv + ["--H-mis", *map(str, args.H_mis)])
    if code or not args.plot:
        raise SystemExit(code)
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import numpy as np

    for path in sorted(args.out.glob("figure_H*.csv")):
        t, _, x, xp = np.loadtxt(path, delimiter=",", skiprows=1, unpack=True)
        fig, ax = plt.subplots(figsize=(6, 3.5))
        ax.plot(t, x, "k", lw=1, label="X")
        ax.plot(t, xp, "r", lw=1, label="X_p")
        ax.set_title(path.stem)
        ax.legend()
        fig.tight_layout()
        fig.savefig(path.with_suffix(".png"), dpi=120)
        plt.close(fig)


if __name__ == "__main__":
    main()
