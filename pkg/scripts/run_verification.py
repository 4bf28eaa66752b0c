#!/usr/bin/env python3
"""Run the full formula-verification battery and write the JSON report."""

import argparse
import sys

from ighit.verification import run_verification


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--only", default=None, help="substring filter on record ids")
    ap.add_argument("--out", default="verification.json")
    args = ap.parse_args()

    report = run_verification(only=args.only)
    report.to_json(args.out)
    for line in report.summary_lines():
        print(line)
    print(args.out)
    return 0 if report.ok else 3


if __name__ == "__main__":
    sys.exit(main())
