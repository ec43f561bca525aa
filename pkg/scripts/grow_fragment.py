#!/usr/bin/env python3
"""Grow a rational fragment by one-point extensions and evaluate over it.

Starting from a two-point seed, realizes every bounded-denominator
admissible distance vector over small subsets, then exercises the exact
quantifier-free decision procedure and the certified quantifier evaluator
against the finite fragment (finite sup below certified sup, finite inf
above certified inf).
"""

import argparse
from fractions import Fraction

from metriclogic.formula import Signature
from metriclogic.metric import RationalMetricSpace
from metriclogic.quenum import qu_enumerate
from metriclogic.structures import FiniteStructure, evaluate
from metriclogic.syntax import parse
from metriclogic.urysohn import (AnchoredStructure, QuantifierBudget,
                                 eval_urysohn, qf_decide)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--denominator-bound", type=int, default=2)
    ap.add_argument("--budget", type=int, default=2)
    ap.add_argument("--mesh", default="1/32")
    ap.add_argument("--rounds", type=int, default=1)
    args = ap.parse_args()

    seed = RationalMetricSpace.build(("a", "b"), {("a", "b"): Fraction(1, 2)})
    fragment, cert = qu_enumerate(seed, args.denominator_bound, args.budget)
    added = sum(1 for t in cert.tasks if t.added_point)
    print(f"fragment: {len(fragment.points)} points "
          f"({added} added over {len(cert.tasks)} tasks)")

    sig = Signature((), fragment.points)
    M = FiniteStructure(fragment, sig, {}, {p: p for p in fragment.points})
    sentences = ["(d a b)", "(neg (d a b))", "(dotminus (d a q0) (d b q0))",
                 "(min (d a q0) (half (d a b)))"]
    for text in sentences:
        phi = parse(text, sig)
        print(f"  qf  {text:<36} = {qf_decide(phi, fragment)}")

    anchored = AnchoredStructure(seed)
    seed_sig = Signature((), seed.points)
    budget = QuantifierBudget(Fraction(args.mesh), args.rounds)
    for text in ["(sup x (d a x))", "(inf x (max (d a x) (d b x)))"]:
        phi = parse(text, seed_sig)
        enc = eval_urysohn(phi, anchored, {}, budget)
        finite = evaluate(phi, M)
        side = "<=" if text.startswith("(sup") else ">="
        bound = enc.hi if text.startswith("(sup") else enc.lo
        ok = finite <= enc.hi if text.startswith("(sup") else finite >= enc.lo
        print(f"  {text:<40} finite {finite} {side} certified {bound}  "
              f"{'OK' if ok else 'VIOLATION'}")
        if not ok:
            raise SystemExit(1)


if __name__ == "__main__":
    main()
