#!/usr/bin/env python3
"""Randomized verification of the transform algebra on finite group actions.

Runs the full check suite (duality, ordering, invariance bounds, conjugate
invariance, set correspondence, translate closure) over randomized finite
discrete actions and prints per-law counts.  Everything is exact rational
arithmetic; one violation fails the run.
"""

import argparse
import time

from metriclogic.suite import run_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--instances", type=int, default=50)
    ap.add_argument("--max-points", type=int, default=12)
    ap.add_argument("--max-group", type=int, default=24)
    ap.add_argument("--max-denominator", type=int, default=8)
    args = ap.parse_args()

    start = time.monotonic()
    report = run_suite(args.seed, args.instances, args.max_points,
                       args.max_group, args.max_denominator)
    elapsed = time.monotonic() - start

    print(f"instances: {report.instances}   checks: {report.checks}   "
          f"time: {elapsed:.2f}s")
    for lemma, count in sorted(report.per_lemma.items()):
        print(f"  {lemma:<28} {count:>8}")
    if report.violations:
        print(f"\n{len(report.violations)} violations:")
        for v in report.violations[:20]:
            print("  ", v)
        raise SystemExit(1)
    print("\nno violations")


if __name__ == "__main__":
    main()
