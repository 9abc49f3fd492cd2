#!/usr/bin/env python3
"""Compare closed forms, recurrences and quadrature in the Coulomb limit (q = 0)."""

import argparse

from hartmann_gup import HartmannModel, build_table, scan_states
from hartmann_gup.gup_perturb import diagonal_check
from hartmann_gup.matel import radial_oracle


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--Z", type=float, default=1.0, help="nuclear charge (sets eta)")
    ap.add_argument("--levels", type=int, default=3, help="largest N + n")
    args = ap.parse_args()

    model = HartmannModel(eta=args.Z)
    print(f"{'state':>10} {'n_prime':>7} {'E0':>12} {'<r> table':>14} {'<r> oracle':>14} {'<p^4>':>12}")
    for st in scan_states(model, args.levels, args.levels):
        if st.m < 0:
            continue
        r1 = build_table(st, (-2, 1), 0).radial[1].value
        oracle = radial_oracle(st, st, 1).value
        p4 = diagonal_check(st).p4
        print(f"{str(st.label):>10} {st.n_prime:7.0f} {st.E0:12.8f} {r1:14.10f} {oracle:14.10f} {p4:12.8f}")


if __name__ == "__main__":
    main()
