"""Cluster-state fidelity against ramp duration on the six-site ring.

    python3 scripts/cluster_fidelity_scan.py --tf 100 200 300 400 500 600

Each t_f takes roughly t_f/7 seconds per field setting.
"""
import argparse

from forge.chain import RampSpec, adiabatic_prepare
from forge.design import DriveProtocol
from forge.parallel import parallel_map
from forge.prop import StepControl

OMEGA = 10.0


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tf", type=int, nargs="+", default=[2, 100, 200, 300, 400, 500, 600],
                    help="ramp durations in periods (even)")
    ap.add_argument("--steps", type=int, default=128)
    ap.add_argument("--no-residual", action="store_true", help="switch off the inactive-site field")
    args = ap.parse_args()

    p = DriveProtocol.for_target(OMEGA, -0.009 * OMEGA, (1.200, 1.224))
    sc = StepControl(args.steps, None, scheme="magnus4")
    fids = parallel_map(lambda tf: adiabatic_prepare(p, RampSpec(tf), sc=sc,
                                                     inactive_field=not args.no_residual), args.tf)
    print("t_f/T   fidelity")
    for tf, f in zip(args.tf, fids):
        print(f"{tf:5d}   {f:.5f}")


if __name__ == "__main__":
    main()
