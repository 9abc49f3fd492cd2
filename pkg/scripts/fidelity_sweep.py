#!/usr/bin/env python3
"""Run `verify` over a range of ring strengths and tabulate mismatch counts per formula."""

import argparse
import io
import json
from collections import defaultdict

from hartmann_gup.cli import main as cli_main


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=float, nargs="+", default=[0.0, 0.5, 2.0, 8.0])
    ap.add_argument("--cap-level", type=int, default=2)
    args = ap.parse_args()

    table: dict[str, dict[float, str]] = defaultdict(dict)
    for q in args.q:
        out = io.StringIO()
        code = cli_main(["verify", "--format", "json"], stdout=out, stderr=io.StringIO(), environ={"HARTMANN_Q": str(q), "HARTMANN_CAP_LEVEL": str(args.cap_level)})
        if code != 0:
            raise SystemExit(f"verify failed for q={q} (exit {code})")
        for row in json.loads(out.getvalue())["summary"]:
            table[row["formula"]][q] = f"{row['match']}/{row['match'] + row['mismatch']}"

    width = max(map(len, table))
    print("matches / evaluated".rjust(width) + "".join(f"{'q=' + format(q, 'g'):>12}" for q in args.q))
    for formula in sorted(table):
        print(formula.ljust(width) + "".join(f"{table[formula].get(q, '-'):>12}" for q in args.q))


if __name__ == "__main__":
    main()
