"""Exact evaluation of formulas over finite metric structures.

A FiniteStructure pairs a rational metric space with total rational-valued
relation tables and constant interpretations.  Evaluation of sup/inf ranges
over the finite point set, so every value is an exact rational.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, List, Mapping, Sequence, Tuple

from .formula import (AbsDiff, AtomD, AtomR, Const, ConstName, DotMinus,
                      DotPlus, DotScale, Formula, Half, Inf,
                      Max, Min, Neg, Signature, Sup, Var, check_wellformed)
from .intervals import Enclosure
from .metric import RationalMetricSpace
from .rational import ONE, ZERO, dot_add, dot_scale, dot_sub, in_unit


class StructureError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteStructure:
    space: RationalMetricSpace
    sig: Signature
    tables: Mapping[str, Mapping[Tuple[str, ...], Fraction]] = field(default_factory=dict)
    constants: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        pts = self.space.points
        for rel in self.sig.relations:
            table = self.tables.get(rel.name)
            if table is None:
                raise StructureError(f"no table for relation {rel.name}")
            for tup in product(pts, repeat=rel.arity):
                v = table.get(tup)
                if v is None:
                    raise StructureError(f"table {rel.name} missing entry {tup}")
                if not in_unit(v):
                    raise StructureError(f"{rel.name}{tup} = {v} outside [0,1]")
        for name in self.sig.constants:
            p = self.constants.get(name)
            if p is None or p not in pts:
                raise StructureError(f"constant {name} not interpreted by a point")

    def rel_value(self, name: str, args: Tuple[str, ...]) -> Fraction:
        return self.tables[name][args]

    def modulus_violations(self) -> List[str]:
        """Exhaustive check of |R(x) - R(y)| <= coeff * max_i d(x_i, y_i)."""
        out = []
        pts = self.space.points
        for rel in self.sig.relations:
            table = self.tables[rel.name]
            tuples = list(product(pts, repeat=rel.arity))
            for xs in tuples:
                for ys in tuples:
                    gap = abs(table[xs] - table[ys])
                    spread = max(self.space.d(x, y) for x, y in zip(xs, ys))
                    if gap > rel.modulus_coefficient * spread:
                        out.append(f"{rel.name}{xs} vs {rel.name}{ys}: "
                                   f"{gap} > {rel.modulus_coefficient}*{spread}")
        return out

    def transport(self, iso: Mapping[str, str]) -> "FiniteStructure":
        """Image structure under a bijective self-isometry of the space."""
        inv = {v: k for k, v in iso.items()}
        if len(inv) != len(self.space.points):
            raise StructureError("transport needs a bijection of the point set")
        tables = {
            rel.name: {tup: self.tables[rel.name][tuple(inv[p] for p in tup)]
                       for tup in product(self.space.points, repeat=rel.arity)}
            for rel in self.sig.relations}
        constants = {c: iso[p] for c, p in self.constants.items()}
        return FiniteStructure(self.space, self.sig, tables, constants)


def resolve_term(term, M: FiniteStructure, assignment: Mapping[str, str]) -> str:
    if isinstance(term, Var):
        p = assignment.get(term.name)
        if p is None:
            raise StructureError(f"unbound variable {term.name!r}")
        if p not in M.space.points:
            raise StructureError(f"assignment of {term.name!r} is not a point")
        return p
    if isinstance(term, ConstName):
        return M.constants[term.name]
    raise StructureError(f"bad term {term!r}")


def evaluate(phi: Formula, M: FiniteStructure,
             assignment: Mapping[str, str] | None = None) -> Fraction:
    """Exact value of phi in M under the assignment."""
    check_wellformed(phi, M.sig)
    env = dict(assignment or {})

    def go(f: Formula, env: Dict[str, str]) -> Fraction:
        if isinstance(f, Const):
            return Fraction(f.value)
        if isinstance(f, AtomD):
            return M.space.d(resolve_term(f.left, M, env), resolve_term(f.right, M, env))
        if isinstance(f, AtomR):
            return M.rel_value(f.name, tuple(resolve_term(t, M, env) for t in f.args))
        if isinstance(f, Half):
            return go(f.body, env) / 2
        if isinstance(f, Neg):
            return ONE - go(f.body, env)
        if isinstance(f, DotScale):
            return dot_scale(f.factor, go(f.body, env))
        if isinstance(f, Min):
            return min(go(f.left, env), go(f.right, env))
        if isinstance(f, Max):
            return max(go(f.left, env), go(f.right, env))
        if isinstance(f, AbsDiff):
            return abs(go(f.left, env) - go(f.right, env))
        if isinstance(f, DotMinus):
            return dot_sub(go(f.left, env), go(f.right, env))
        if isinstance(f, DotPlus):
            return dot_add(go(f.left, env), go(f.right, env))
        if isinstance(f, (Sup, Inf)):
            pick = max if isinstance(f, Sup) else min
            saved = env.get(f.var)
            best = None
            for p in M.space.points:
                env[f.var] = p
                v = go(f.body, env)
                best = v if best is None else pick(best, v)
            if saved is None:
                del env[f.var]
            else:
                env[f.var] = saved
            if best is None:
                raise StructureError("quantifier over an empty point set")
            return best
        raise StructureError(f"unknown node {f!r}")

    return go(phi, env)


TupleEnumeration = Sequence[Tuple[str, Tuple[str, ...]]]


def canonical_enumeration(sig: Signature, space: RationalMetricSpace) -> List[Tuple[str, Tuple[str, ...]]]:
    """Relations in signature order, argument tuples in point order."""
    out = []
    for rel in sig.relations:
        for tup in product(space.points, repeat=rel.arity):
            out.append((rel.name, tup))
    return out


def delta_seq(M: FiniteStructure, N: FiniteStructure,
              enumeration: TupleEnumeration, k: int) -> Enclosure:
    """Weighted structure distance, truncated after k terms.

    Term i carries weight 2^-i; the tail of the series is bounded by 2^-k,
    giving the enclosure [partial sum, partial sum + 2^-k].
    """
    if M.space.points != N.space.points or M.sig != N.sig:
        raise StructureError("structures must share their space and signature")
    if k < 0:
        raise StructureError("truncation must be >= 0")
    if k > len(enumeration):
        raise StructureError(f"truncation {k} exceeds the enumeration length")
    total = ZERO
    for i, (name, tup) in enumerate(enumeration[:k], start=1):
        total += Fraction(1, 2 ** i) * abs(M.rel_value(name, tup) - N.rel_value(name, tup))
    return Enclosure(total, min(total + Fraction(1, 2 ** k), ONE))


def delta_exact(M: FiniteStructure, N: FiniteStructure,
                enumeration: TupleEnumeration) -> Fraction:
    """Full weighted sum over a finite enumeration (no tail)."""
    return delta_seq(M, N, enumeration, len(enumeration)).lo


def mod_member(M: FiniteStructure, phi: Formula, assignment: Mapping[str, str],
               eps: Fraction, cmp: str) -> bool:
    """Strict membership eval(phi) < eps or > eps, decided exactly."""
    value = evaluate(phi, M, assignment)
    if cmp == "<":
        return value < eps
    if cmp == ">":
        return value > eps
    raise StructureError(f"comparison must be '<' or '>', got {cmp!r}")


def automorphisms(M: FiniteStructure) -> List[Dict[str, str]]:
    """All distance-, table- and constant-preserving bijections, lex order."""
    pts = M.space.points
    fixed = set(M.constants.values())
    out = []

    def extend(partial: Dict[str, str], used: set, idx: int):
        if idx == len(pts):
            cand = dict(partial)
            for rel in M.sig.relations:
                table = M.tables[rel.name]
                for tup in product(pts, repeat=rel.arity):
                    if table[tup] != table[tuple(cand[p] for p in tup)]:
                        return
            out.append(cand)
            return
        p = pts[idx]
        for q in pts:
            if q in used:
                continue
            # named constants must stay put
            if (p in fixed or q in fixed) and p != q:
                continue
            if any(M.space.d(p, pts[i]) != M.space.d(q, partial[pts[i]]) for i in range(idx)):
                continue
            partial[p] = q
            used.add(q)
            extend(partial, used, idx + 1)
            used.discard(q)
            del partial[p]

    extend({}, set(), 0)
    return out


def space_isometries(space: RationalMetricSpace) -> List[Dict[str, str]]:
    """All distance-preserving bijections of a finite space, lex order."""
    pts = space.points
    out = []

    def extend(partial: Dict[str, str], used: set, idx: int):
        if idx == len(pts):
            out.append(dict(partial))
            return
        p = pts[idx]
        for q in pts:
            if q in used:
                continue
            if any(space.d(p, pts[i]) != space.d(q, partial[pts[i]]) for i in range(idx)):
                continue
            partial[p] = q
            used.add(q)
            extend(partial, used, idx + 1)
            used.discard(q)
            del partial[p]

    extend({}, set(), 0)
    return out
