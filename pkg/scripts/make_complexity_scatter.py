#!/usr/bin/env python3
"""Emit the op-count vs domain-range scatter rows for the builtin catalog.

Writes a CSV suitable for external plotting and prints per-set medians.

Example:
    python scripts/make_complexity_scatter.py --out /tmp/scatter.csv
"""

import argparse
import statistics

from srsdkit.catalog import BUILTIN_SETS, builtin_problems, emit_scatter
from srsdkit.cli import main as cli


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    code = cli(["complexity", "--out", args.out])
    if code != 0:
        raise SystemExit(code)

    for set_name in BUILTIN_SETS:
        rows = emit_scatter(builtin_problems(set_name))
        ops = [r[1] for r in rows]
        ranges = [r[2] for r in rows if r[2] is not None]
        print(
            f"{set_name:<8} n={len(rows):<3} median ops={statistics.median(ops):.1f} "
            f"median domain range={statistics.median(ranges):.2f}"
        )
    print(f"csv: {args.out}")


if __name__ == "__main__":
    main()
