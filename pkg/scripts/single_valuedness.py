"""Angular period of both duals across a sweep of exponents n.

    python scripts/single_valuedness.py
"""

import argparse

import numpy as np

from dualwave.complex_core import PotentialSpec
from dualwave.wavefunction import single_valuedness


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=float, nargs="*",
                        default=[2.0, 1.0, 0.0, -0.5, -1.0, -1.5, -2.0, -3.0, -4.0])
    args = parser.parse_args()

    print(f"{'n':>6} {'period/pi':>10} {'mismatch u':>11} {'mismatch v':>11}  multivalued")
    for n in args.n:
        rep = single_valuedness(PotentialSpec.monomial(n))
        multi = [k for k, v in rep.multivalued.items() if v]
        print(f"{n:6g} {rep.period / np.pi:10.4f} {rep.mismatch['u']:11.2e} "
              f"{rep.mismatch['v']:11.2e}  {','.join(multi) or '-'}")


if __name__ == "__main__":
    main()
