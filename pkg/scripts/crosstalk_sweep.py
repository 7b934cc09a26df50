"""Relative crosstalk distance of the nanomagnet register versus Zeeman contrast.

    python3 scripts/crosstalk_sweep.py --points 8 --max 4 --out crosstalk.csv
"""
import argparse
from pathlib import Path

import numpy as np

from forge.cli import write_csv
from forge.platform import crosstalk_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--min", type=float, default=0.5, help="smallest (g_B^z - g_A^z) B_z in tesla")
    ap.add_argument("--max", type=float, default=4.0)
    ap.add_argument("--points", type=int, default=8)
    ap.add_argument("--out", type=Path, default=None)
    args = ap.parse_args()

    rows = crosstalk_sweep(np.linspace(args.min, args.max, args.points))
    print("x [T]     D")
    for x, dist in rows:
        print(f"{x:6.3f}   {dist:.3e}")
    if args.out:
        write_csv(args.out, ["x_T", "D"], rows)


if __name__ == "__main__":
    main()
