#!/usr/bin/env python3
"""Accuracy of every loss/kernel pair on one synthetic 300/120 split.

Prints the table as markdown and optionally writes the full-precision CSV.
Reruns with the same seed are byte-identical (the CSV carries no timings).
"""

import argparse

from splitsvm._io import write_text_atomic
from splitsvm.experiments import loss_kernel_table, rows_to_csv, rows_to_markdown


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--starts", type=int, default=20)
    ap.add_argument("--output", help="optional output CSV")
    args = ap.parse_args()

    rows = loss_kernel_table(args.seed, starts=args.starts)
    print(rows_to_markdown(rows, include_seconds=False), end="")
    if args.output:
        write_text_atomic(args.output, rows_to_csv(rows, include_seconds=False))
        print(f"wrote {len(rows)} rows to {args.output}")


if __name__ == "__main__":
    main()
