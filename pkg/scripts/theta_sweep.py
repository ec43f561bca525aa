#!/usr/bin/env python3
"""Sweep the square-root transform value over the admissible parameter range.

For each q on the grid, encloses inf over e in [0,q] of (10 *. (q-e)) +. sqrt(e)
and compares the enclosure against sqrt(q) computed independently at high
precision.  The infimum sits at the right endpoint everywhere on the grid, so
every row should report CONTAINS.
"""

import argparse
from fractions import Fraction
from math import isqrt

from metriclogic.urysohn import theta_demo


def sqrt_bounds(q: Fraction, bits: int = 96):
    scale = 1 << bits
    n = q.numerator * q.denominator * scale * scale
    r = isqrt(n)
    den = q.denominator * scale
    return Fraction(r, den), Fraction(r + 1, den)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tol", default="1/1000000")
    ap.add_argument("--step", type=int, default=1, help="grid step in hundredths")
    args = ap.parse_args()
    tol = Fraction(args.tol)

    print(f"{'q':>8} {'enclosure width':>18} {'sqrt(q)':>12}  verdict")
    worst = Fraction(0)
    for k in range(11, 50, args.step):
        q = Fraction(k, 100)
        e = theta_demo(q, tol)
        lo, hi = sqrt_bounds(q)
        contains = e.lo <= lo and hi <= e.hi or (e.lo * e.lo <= q <= e.hi * e.hi)
        worst = max(worst, e.width)
        print(f"{str(q):>8} {float(e.width):>18.3e} {float(lo):>12.6f}  "
              f"{'CONTAINS' if contains else 'MISS'}")
        if not contains:
            raise SystemExit(1)
    print(f"\nall grid points enclosed; worst width {float(worst):.3e} <= {float(tol):.1e}")


if __name__ == "__main__":
    main()
