"""Observed convergence orders of every identity for the canonical monomials.

    python scripts/convergence_table.py [--size 64] [--csv table.csv]
"""

import argparse

from dualwave.complex_core import HolomorphicPair, PotentialSpec
from dualwave.io import write_csv
from dualwave.verifier import canonical_grid, run_suite

CASES = (0.0, 2.0, -1.0, -2.0)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=64, help="coarse nodes per axis")
    parser.add_argument("--csv", help="also write the table here")
    args = parser.parse_args()

    rows = []
    print(f"{'n':>5} {'identity':<16} dual {'linf':>11} {'order':>7}")
    for n in CASES:
        spec = PotentialSpec.monomial(n)
        grid = canonical_grid(HolomorphicPair.from_spec(spec), args.size)
        result = run_suite(spec, grid)
        for row in result.rows():
            order = row["order"]
            print(f"{n:>5g} {row['identity']:<16} {row['dual']:^4} {row['linf']:11.3e} "
                  f"{order if order is None else format(order, '7.3f')}")
            rows.append((n, row["identity"], row["dual"], row["l2"], row["linf"], order))
        print(f"{'':>5} analytic max relative {result.analytic['max_relative']:.2e}")
    if args.csv:
        write_csv(args.csv, ("n", "identity", "dual", "l2", "linf", "order"), rows)


if __name__ == "__main__":
    main()
