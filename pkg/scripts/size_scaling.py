#!/usr/bin/env python3
"""Training-size sweep: accuracy and wall time as the problem grows.

Each size draws its own train/test split; the test set is 40% of the
training size.  Wall times land in the CSV, so reruns are not byte-stable.
"""

import argparse

from splitsvm._io import write_text_atomic
from splitsvm.experiments import rows_to_csv, rows_to_markdown, size_scaling_table


def parse_sizes(text):
    return tuple(int(tok) for tok in text.split(",") if tok)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--starts", type=int, default=20)
    ap.add_argument(
        "--sizes",
        type=parse_sizes,
        default=(100, 200, 300, 400, 500, 600, 700, 800, 900, 1000),
        help="comma-separated training sizes (default 100..1000)",
    )
    ap.add_argument("--output", help="optional output CSV")
    args = ap.parse_args()

    rows = size_scaling_table(args.seed, sizes=args.sizes, starts=args.starts)
    print(rows_to_markdown(rows, include_seconds=True), end="")
    if args.output:
        write_text_atomic(args.output, rows_to_csv(rows, include_seconds=True))
        print(f"wrote {len(rows)} rows to {args.output}")


if __name__ == "__main__":
    main()
