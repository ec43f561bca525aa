"""Shared oracles and random-instance generators for the test suite.

The oracles here are deliberately independent re-derivations (plain loops,
no calls into the code paths they check).
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations, product

from metriclogic.formula import (AbsDiff, AtomD, AtomR, Const, ConstName,
                                 DotMinus, DotPlus, DotScale, Half, Inf, Max,
                                 Min, Neg, Relation, Signature, Sup, Var)
from metriclogic.metric import RationalMetricSpace
from metriclogic.structures import FiniteStructure


def triangle_violations(points, d):
    """Independent exhaustive triangle check; d is a callable."""
    bad = []
    for a, b, c in combinations(points, 3):
        ab, bc, ac = d(a, b), d(b, c), d(a, c)
        if ac > ab + bc or ab > ac + bc or bc > ab + ac:
            bad.append((a, b, c))
    return bad


def metric_ok(space: RationalMetricSpace) -> bool:
    for p in space.points:
        if space.d(p, p) != 0:
            return False
    for p, q in combinations(space.points, 2):
        d = space.d(p, q)
        if d != space.d(q, p) or not (0 <= d <= 1):
            return False
    return not triangle_violations(space.points, space.d)


def random_far_space(rng: random.Random, n: int, lo=Fraction(1, 2)) -> RationalMetricSpace:
    """All distances in [lo, min(2*lo, 1)]: triangles hold for free."""
    dens = (4, 8, 10, 16, 20)
    hi = min(2 * lo, Fraction(1))
    pts = tuple(f"a{i}" for i in range(n))
    dist = {}
    for p, q in combinations(pts, 2):
        den = rng.choice(dens)
        num = rng.randint(-(-lo.numerator * den // lo.denominator),
                          hi.numerator * den // hi.denominator)
        dist[(p, q)] = Fraction(num, den)
    return RationalMetricSpace.build(pts, dist)


def amalgam_instance(rng: random.Random, n: int, q: int, with_geodesic=False):
    """A random instance satisfying the amalgamation hypotheses.

    Returns (host, a_points, b_space, q, eps).  The host distances live in
    [1/2, 1] so triangles cost nothing; eps is sized from the smallest
    positive margin.  With with_geodesic=True and q = 2 an exactly-geodesic
    triple with both endpoints fixed is planted (the one allowed pattern).
    """
    from math import comb

    while True:
        host = random_far_space(rng, n)
        pts = list(host.points)
        dist = {k: v for k, v in host.dist.items()}
        if with_geodesic and q == 2 and n > q:
            half = Fraction(1, 2)
            dist[(pts[0], pts[q])] = dist[(pts[q], pts[0])] = half
            dist[(pts[q], pts[1])] = dist[(pts[1], pts[q])] = half
            dist[(pts[0], pts[1])] = dist[(pts[1], pts[0])] = Fraction(1)
            host = RationalMetricSpace(tuple(pts), dist)
        cbound = 2 * comb(n - q, 2) + 1

        margins = [host.d(p, r) for p, r in combinations(pts, 2)]
        forbidden_geodesic = False
        for a, b, c in combinations(range(n), 3):
            moved = sum(1 for t in (a, b, c) if t >= q)
            for ctr, u, v in ((a, b, c), (b, a, c), (c, a, b)):
                m = host.d(pts[ctr], pts[u]) + host.d(pts[ctr], pts[v]) \
                    - host.d(pts[u], pts[v])
                if m != 0:
                    margins.append(m)
                elif moved >= 2:
                    forbidden_geodesic = True
        if forbidden_geodesic:
            continue
        eps = min(margins) / (cbound * rng.choice((2, 3, 4)))

        bnames = tuple(f"b{i}" for i in range(n))
        for _ in range(20):
            bdist = {}
            ok = True
            for ii, jj in combinations(range(n), 2):
                base = host.d(pts[ii], pts[jj])
                if jj < q:
                    delta = Fraction(0)
                else:
                    delta = rng.choice((-eps, -eps / 2, Fraction(0), eps / 2, eps))
                bdist[(bnames[ii], bnames[jj])] = base + delta
                if not 0 <= base + delta <= 1:
                    ok = False
            if not ok:
                continue
            try:
                b_space = RationalMetricSpace.build(bnames, bdist)
            except Exception:
                continue
            return host, tuple(pts), b_space, q, eps


# ---------------------------------------------------------------- formulas

def random_structure(rng: random.Random, n: int, sig: Signature) -> FiniteStructure:
    """Random structure with modulus-compliant tables.

    Tables are built as c/arity-Lipschitz functions of distances to random
    reference points, which satisfies the declared modulus for free.
    """
    space = random_far_space(rng, n, lo=Fraction(1, 4))
    tables = {}
    for rel in sig.relations:
        ref = [rng.choice(space.points) for _ in range(rel.arity)]
        offset = Fraction(rng.randint(0, 4), 8)
        slope = rel.modulus_coefficient / rel.arity
        table = {}
        for tup in product(space.points, repeat=rel.arity):
            raw = offset + slope * min(
                Fraction(1), sum((space.d(t, r) for t, r in zip(tup, ref)),
                                 Fraction(0)) / rel.arity)
            table[tup] = min(Fraction(1), raw)
        tables[rel.name] = table
    constants = {}
    for name in sig.constants:
        constants[name] = rng.choice(space.points)
    return FiniteStructure(space, sig, tables, constants)


def random_formula(rng: random.Random, sig: Signature, variables, depth: int):
    """Random AST of bounded depth over the signature."""
    def atom():
        choices = []
        terms = [Var(v) for v in variables] + [ConstName(c) for c in sig.constants]
        if len(terms) >= 1:
            choices.append(lambda: AtomD(rng.choice(terms), rng.choice(terms)))
        for rel in sig.relations:
            choices.append(lambda rel=rel: AtomR(
                rel.name, tuple(rng.choice(terms) for _ in range(rel.arity))))
        choices.append(lambda: Const(Fraction(rng.randint(0, 8), 8)))
        return rng.choice(choices)()

    def build(d):
        if d <= 0:
            return atom()
        kind = rng.randrange(10)
        if kind == 0:
            return Half(build(d - 1))
        if kind == 1:
            return Neg(build(d - 1))
        if kind == 2:
            return DotScale(Fraction(rng.randint(1, 6), rng.randint(1, 3)), build(d - 1))
        if kind == 3:
            return Min(build(d - 1), build(d - 1))
        if kind == 4:
            return Max(build(d - 1), build(d - 1))
        if kind == 5:
            return AbsDiff(build(d - 1), build(d - 1))
        if kind == 6:
            return DotMinus(build(d - 1), build(d - 1))
        if kind == 7:
            return DotPlus(build(d - 1), build(d - 1))
        if kind == 8 and variables:
            return Sup(rng.choice(list(variables)), build(d - 1))
        if kind == 9 and variables:
            return Inf(rng.choice(list(variables)), build(d - 1))
        return atom()

    return build(depth)


SMALL_SIG = Signature((Relation("P", 1), Relation("E", 2)), ())
