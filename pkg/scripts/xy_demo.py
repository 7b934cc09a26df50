"""Digital XZX + YZY chain: coefficient chart and decoupling curve.

    python3 scripts/xy_demo.py --h 100
"""
import argparse

from forge.chain import ChainSpec, XYDrive, XY_TARGET, decoupling_distance, xy_digital


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--h", type=int, default=100, help="decoupling field in units of omega")
    ap.add_argument("--top", type=int, default=12)
    args = ap.parse_args()

    spec, d = ChainSpec(4, "open", "xy"), XYDrive()
    res = xy_digital(spec, d, args.h * d.omega)
    chart = res.chart()
    for s, v in chart[:args.top]:
        print(f"{s}  {v:.3e}{'  *' if s in XY_TARGET else ''}")
    target = min(v for s, v in chart if s in XY_TARGET)
    rest = max(v for s, v in chart if s not in XY_TARGET)
    print(f"target / largest undesired = {target / rest:.1f}")

    print("\nh/omega   D")
    for h in (2, 3, 5, 10, 50, 100):
        print(f"{h:7d}   {decoupling_distance(spec, d, h * d.omega):.3e}")


if __name__ == "__main__":
    main()
