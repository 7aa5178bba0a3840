"""Deflection versus impact parameter for the exact and approximate Eaton lenses.

    python scripts/eaton_deflection.py --step 1e-4
"""

import argparse
import math

import numpy as np

from dualwave.optics import IndexMap, deflection_curve


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--step", type=float, default=1e-4)
    parser.add_argument("--a", type=float, default=1.0)
    args = parser.parse_args()

    impacts = np.round(np.linspace(0.1, 0.9, 9) * args.a, 12)
    exact = deflection_curve(IndexMap.eaton_exact(args.a), impacts, args.step)
    print("exact lens (target pi)")
    for row in exact:
        print(f"  b={row.b:.2f}  deflection={row.deflection:.12f}  "
              f"error={row.deflection - math.pi:+.2e}  drift={row.path.bouguer_drift:.1e}")

    # the power-law form is only meant to hold near the centre
    small = [0.02, 0.05, 0.1, 0.2]
    for phi in (math.pi / 3, math.pi / 2, 2 * math.pi / 3, math.pi):
        print(f"approximate lens, phi = {phi:.4f}")
        for row in deflection_curve(IndexMap.eaton_approx(args.a, phi), small, args.step):
            if row.deflection is None:
                print(f"  b={row.b:.2f}  {row.termination}")
            else:
                rel = (row.deflection - phi) / phi
                print(f"  b={row.b:.2f}  deflection={row.deflection:.6f}  relative={rel:+.3%}")


if __name__ == "__main__":
    main()
