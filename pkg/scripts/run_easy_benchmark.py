#!/usr/bin/env python3
"""Desk-scale benchmark run: generate the easy set, fit the GP baseline with
a handful of seeds, select per-problem models on validation rows, and print
the accuracy / solution-rate / mean-NED table.

Example:
    python scripts/run_easy_benchmark.py --workdir /tmp/easy-run --rows 2000 --seeds 5
"""

import argparse
import json
import sys
from pathlib import Path

from srsdkit.cli import main as cli


def run(argv):
    code = cli(argv)
    if code != 0:
        sys.exit(code)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--workdir", required=True)
    ap.add_argument("--set", default="easy", choices=("easy", "medium", "hard", "all"))
    ap.add_argument("--rows", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--noise", type=float, default=0.0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--gp-config", default=None)
    args = ap.parse_args()

    work = Path(args.workdir)
    data = work / "data"
    preds = work / "preds"
    report_path = work / "report.json"

    run(["generate", "--set", args.set, "--rows", str(args.rows),
         "--seed", str(args.seed), "--noise", str(args.noise),
         "--workers", str(args.workers), "--out", str(data)])
    discover = ["discover", "--data-dir", str(data), "--seeds", str(args.seeds),
                "--seed", str(args.seed), "--workers", str(args.workers),
                "--out", str(preds)]
    if args.gp_config:
        discover += ["--gp-config", args.gp_config]
    run(discover)
    run(["eval", "--pred-dir", str(preds), "--data-dir", str(data),
         "--out", str(report_path)])

    payload = json.loads(report_path.read_text())
    print()
    print(f"{'set':<8} {'n':>4} {'accuracy':>9} {'solution':>9} {'mean NED':>9}")
    for name, s in payload["summary"].items():
        print(f"{name:<8} {s['count']:>4} {s['accuracy_rate']:>9.3f} "
              f"{s['solution_rate']:>9.3f} {s['mean_normalized_edit_distance']:>9.3f}")
    if payload["skipped"]:
        print(f"skipped (no viable candidate): {', '.join(payload['skipped'])}")
    print(f"full report: {report_path}")


if __name__ == "__main__":
    main()
