"""Physical units for the omega = 5J drive on a transmon chain and a nanomagnet register.

    python3 scripts/platform_numbers.py --J-MHz 10
"""
import argparse
import json

from forge.design import DriveProtocol
from forge.platform import NanomagnetParams, TABLE_ROW_OMEGA5, nanomagnet_map, superconducting_map


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--J-MHz", type=float, default=10.0, help="transmon ZZ coupling J/2pi")
    ap.add_argument("--tau-us", type=float, default=20.0, help="coherence time")
    args = ap.parse_args()

    p = DriveProtocol(5.0, TABLE_ROW_OMEGA5[0], TABLE_ROW_OMEGA5[1:])
    report = {
        "superconducting": superconducting_map(args.J_MHz, 5.0, p, tau_c_us=args.tau_us),
        "nanomagnet": nanomagnet_map(NanomagnetParams(), TABLE_ROW_OMEGA5),
    }
    print(json.dumps(report, indent=2))


if __name__ == "__main__":
    main()
