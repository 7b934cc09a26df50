"""|c_x| and |c_zz| over a log grid of relative amplitude errors on f1 and f2.

    python3 scripts/robustness_map.py --points 41 --out robustness.csv
"""
import argparse
from pathlib import Path

from forge.cli import write_csv
from forge.design import DriveProtocol, default_robustness_grid, robustness_scan
from forge.prop import StepControl

ROW = DriveProtocol(5.0, 0.04, (1.0849517026900328, 1.2455409822710848))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=41)
    ap.add_argument("--steps", type=int, default=512, help="steps per period")
    ap.add_argument("--out", type=Path, default=Path("robustness.csv"))
    args = ap.parse_args()

    grid = default_robustness_grid(args.points)
    rows = robustness_scan(ROW, grid, grid, sc=StepControl(args.steps, None))
    write_csv(args.out, ["eps1", "eps2", "abs_cx", "abs_czz"], rows)
    worst = max(rows, key=lambda r: max(r[2:]))
    print(f"{len(rows)} points -> {args.out}; largest at eps={worst[:2]}: {max(worst[2:]):.3e} J")
    for e1, e2, cx, czz in robustness_scan(ROW, [1e-2], [1e-3]):
        print(f"eps=({e1:g}, {e2:g}): |c_x|={cx:.3e} J  |c_zz|={czz:.3e} J")


if __name__ == "__main__":
    main()
