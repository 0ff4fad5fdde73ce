#!/usr/bin/env python3
"""Time full rebuild against diff-driven alignment and print a CSV table.

    python scripts/bench_align.py --sizes 200,500,1000,2000 --diff 0.01 --reps 5
"""

from __future__ import annotations

import argparse
import csv
import sys

from repograph.sim import bench_align, slopes


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--sizes", default="200,500,1000,2000")
    ap.add_argument("--diff", type=float, default=0.01)
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rows = bench_align([int(s) for s in args.sizes.split(",")], args.diff, args.reps, seed=args.seed)
    writer = csv.writer(sys.stdout)
    writer.writerow(["size", "diff_files", "t_rebuild_s", "t_align_s", "speedup"])
    for r in rows:
        writer.writerow([r.size, r.diff_files, f"{r.t_rebuild:.5f}", f"{r.t_align:.5f}", f"{r.speedup:.1f}"])
    if len(rows) >= 2:
        rebuild, aligned = slopes(rows)
        print(f"# slope rebuild={rebuild:.3e} s/file align={aligned:.3e} s/file ratio={aligned / rebuild:.4f}",
              file=sys.stderr)


if __name__ == "__main__":
    main()
