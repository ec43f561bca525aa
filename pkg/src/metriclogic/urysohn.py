"""Certified evaluation of quantified sentences over the universal space.

Quantifiers are compiled into optimization over the polytope of admissible
distance vectors: a new abstract point is described by its distances to the
finite partial space built so far (named anchors plus outer quantified
points), subject to |f(a)-f(b)| <= d(a,b) <= f(a)+f(b) and f in [0,1].
Every admissible rational vector over a finite rational subspace is realized
in the universal space of diameter 1 (universality plus ultrahomogeneity),
so grid optimization under-approximates sup and over-approximates inf; a
Lipschitz error term closes the gap from the other side.

The requested mesh is snapped to 1/(D * 2^t) where D clears the anchor
distance denominators.  With every known distance on that grid, rounding an
admissible real vector up coordinatewise stays admissible, which is what
makes the lipschitz * mesh error bound sound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor, lcm
from typing import Dict, List, Mapping, Optional, Tuple

from .formula import (AbsDiff, AtomD, AtomR, Const, ConstName, DotMinus,
                      DotPlus, DotScale, Formula, Half, Inf,
                      Max, Min, Neg, Signature, Sup, Var, free_variables,
                      is_quantifier_free, lipschitz)
from .intervals import (Enclosure, enc_absdiff, enc_dot_add, enc_dot_sub,
                        enc_half, enc_max, enc_min, enc_neg, enc_scale,
                        sqrt_enclosure)
from .metric import RationalMetricSpace
from .rational import ONE, ZERO, dot_scale
from .structures import FiniteStructure, evaluate


class UrysohnError(ValueError):
    pass


@dataclass(frozen=True)
class PredicateDef:
    """A relation symbol defined by a quantifier-free distance formula."""
    params: Tuple[str, ...]
    body: Formula

    def __post_init__(self):
        if not self.params:
            raise UrysohnError("predicate definition needs at least one parameter")
        if not is_quantifier_free(self.body):
            raise UrysohnError("predicate definitions must be quantifier free")


@dataclass(frozen=True)
class AnchoredStructure:
    anchors: RationalMetricSpace
    defs: Mapping[str, PredicateDef] = field(default_factory=dict)

    def __post_init__(self):
        for name, d in self.defs.items():
            for atom_name in _relation_names(d.body):
                raise UrysohnError(
                    f"definition of {name} uses relation symbol {atom_name}")
            loose = free_variables(d.body) - set(d.params)
            if loose:
                raise UrysohnError(f"definition of {name} has stray variables {loose}")

    @property
    def signature(self) -> Signature:
        return Signature((), self.anchors.points)


def _relation_names(phi: Formula):
    if isinstance(phi, AtomR):
        yield phi.name
    for c in phi.children():
        yield from _relation_names(c)


def expand_predicates(phi: Formula, anchored: AnchoredStructure) -> Formula:
    """Inline every relation atom through its definition."""
    def sub_term(t, env):
        if isinstance(t, Var) and t.name in env:
            return env[t.name]
        return t

    def sub(f: Formula, env) -> Formula:
        if isinstance(f, Const):
            return f
        if isinstance(f, AtomD):
            return AtomD(sub_term(f.left, env), sub_term(f.right, env))
        if isinstance(f, AtomR):
            raise UrysohnError(f"nested relation symbol {f.name}")
        return _rebuild(f, [sub(c, env) for c in f.children()])

    def go(f: Formula) -> Formula:
        if isinstance(f, AtomR):
            d = anchored.defs.get(f.name)
            if d is None:
                raise UrysohnError(f"no definition for relation symbol {f.name}")
            if len(f.args) != len(d.params):
                raise UrysohnError(f"arity mismatch for {f.name}")
            return sub(d.body, dict(zip(d.params, f.args)))
        if isinstance(f, (Const, AtomD)):
            return f
        return _rebuild(f, [go(c) for c in f.children()])

    return go(phi)


def _rebuild(f: Formula, kids: List[Formula]) -> Formula:
    if isinstance(f, Half):
        return Half(kids[0])
    if isinstance(f, Neg):
        return Neg(kids[0])
    if isinstance(f, DotScale):
        return DotScale(f.factor, kids[0])
    if isinstance(f, (Min, Max, AbsDiff, DotMinus, DotPlus)):
        return type(f)(kids[0], kids[1])
    if isinstance(f, Sup):
        return Sup(f.var, kids[0])
    if isinstance(f, Inf):
        return Inf(f.var, kids[0])
    raise UrysohnError(f"cannot rebuild {f!r}")


@dataclass(frozen=True)
class QuantifierBudget:
    mesh: Fraction
    rounds: int = 0

    def __post_init__(self):
        if Fraction(self.mesh) <= 0:
            raise UrysohnError("mesh must be positive")
        if self.rounds < 0:
            raise UrysohnError("rounds must be >= 0")


def snap_mesh(requested: Fraction, space: RationalMetricSpace) -> Fraction:
    """Largest 1/(D*2^t) <= requested, D clearing the anchor denominators."""
    dens = [space.dist[(p, q)].denominator
            for i, p in enumerate(space.points)
            for q in space.points[i + 1:]]
    d = lcm(*dens) if dens else 1
    h = Fraction(1, d)
    while h > requested:
        h /= 2
    return h


def eval_urysohn(phi: Formula, anchored: AnchoredStructure,
                 params: Optional[Mapping[str, str]] = None,
                 budget: QuantifierBudget = QuantifierBudget(Fraction(1, 16), 2)) -> Enclosure:
    """Enclosure of the value of phi over the universal space.

    params sends the free variables of phi to anchor points; the refined
    enclosures of successive rounds are intersected, so the width never
    grows with extra rounds.
    """
    params = dict(params or {})
    body = expand_predicates(phi, anchored)
    sig = anchored.signature
    missing = free_variables(body) - set(params)
    if missing:
        raise UrysohnError(f"unbound variables after substitution: {sorted(missing)}")
    for v, p in params.items():
        if not anchored.anchors.has_point(p):
            raise UrysohnError(f"parameter {v} -> {p!r} is not an anchor")

    h0 = snap_mesh(Fraction(budget.mesh), anchored.anchors)
    result = None
    for r in range(budget.rounds + 1):
        e = _eval_at_mesh(body, anchored.anchors, sig, params, h0 / (2 ** r))
        result = e if result is None else result.intersect(e)
    return result


def _eval_at_mesh(phi: Formula, anchors: RationalMetricSpace, sig: Signature,
                  params: Mapping[str, str], h: Fraction) -> Enclosure:
    names = anchors.points
    index = {p: i for i, p in enumerate(names)}
    n0 = len(names)
    # Distance matrix of the partial space; abstract points append rows.
    dmat: List[List[Fraction]] = [[anchors.d(p, q) for q in names] for p in names]

    env: Dict[str, int] = {v: index[p] for v, p in params.items()}

    def point_of(term) -> int:
        if isinstance(term, ConstName):
            return index[term.name]
        i = env.get(term.name)
        if i is None:
            raise UrysohnError(f"unbound variable {term.name!r}")
        return i

    def dist(i: int, j: int):
        if i == j:
            return ZERO
        i, j = (i, j) if i > j else (j, i)
        return dmat[i][j]

    def go(f: Formula) -> Enclosure:
        return _enc_eval(f, dist, point_of, quantify)

    def quantify(f) -> Enclosure:
        is_sup = isinstance(f, Sup)
        coeff = lipschitz(f.body, sig, only_var=f.var)
        err = coeff * h
        m = len(dmat)
        prunable = is_quantifier_free(f.body)
        best: List[Optional[Enclosure]] = [None]

        saved = env.get(f.var)
        env[f.var] = m
        row: List[Fraction] = []
        dmat.append(row)

        def candidate_bound_ok() -> bool:
            # Interval extension with [0,1] for unset coordinates; prunes
            # subtrees that provably cannot move the running optimum.
            if not prunable or best[0] is None:
                return True
            filled = len(row)
            row_ext = row + [Enclosure(ZERO, ONE)] * (m - filled)

            def dist_ext(i, j):
                if i == j:
                    return ZERO
                i, j = (i, j) if i > j else (j, i)
                if i == m:
                    return row_ext[j]
                return dmat[i][j]

            e = _enc_eval(f.body, dist_ext, point_of, None)
            if is_sup:
                return e.hi > best[0].lo
            return e.lo < best[0].hi

        def assign(k: int):
            if k == m:
                e = go(f.body)
                if best[0] is None:
                    best[0] = e
                elif is_sup:
                    best[0] = Enclosure(max(best[0].lo, e.lo), max(best[0].hi, e.hi))
                else:
                    best[0] = Enclosure(min(best[0].lo, e.lo), min(best[0].hi, e.hi))
                return
            lo, hi = ZERO, ONE
            for j, fj in enumerate(row):
                dij = dist(k, j)
                lo = max(lo, dij - fj, fj - dij)
                hi = min(hi, fj + dij)
            start = ceil(lo / h)
            stop = floor(hi / h)
            for step in range(start, stop + 1):
                row.append(h * step)
                if candidate_bound_ok():
                    assign(k + 1)
                row.pop()

        if m == 0:
            e = go(f.body)
            best[0] = e
        else:
            assign(0)

        dmat.pop()
        if saved is None:
            del env[f.var]
        else:
            env[f.var] = saved

        if best[0] is None:
            raise UrysohnError("empty admissibility polytope; inputs were inconsistent")
        if m == 0:
            # the first abstract point is unconstrained: one exact branch
            return best[0]
        if is_sup:
            return Enclosure(best[0].lo, min(ONE, best[0].hi + err))
        return Enclosure(max(ZERO, best[0].lo - err), best[0].hi)

    return go(phi)


def _enc_eval(f: Formula, dist, point_of, quantify) -> Enclosure:
    """Enclosure arithmetic over the current partial space.

    dist may return exact rationals or enclosures (the pruning path passes
    [0,1] placeholders for unset coordinates); quantify handles the sup/inf
    nodes and is None in quantifier-free contexts.
    """
    def go(f):
        if isinstance(f, (Sup, Inf)):
            if quantify is None:
                raise UrysohnError("quantifier in a quantifier-free context")
            return quantify(f)
        if isinstance(f, Const):
            return Enclosure.exact(f.value)
        if isinstance(f, AtomD):
            d = dist(point_of(f.left), point_of(f.right))
            return d if isinstance(d, Enclosure) else Enclosure.exact(d)
        if isinstance(f, Half):
            return enc_half(go(f.body))
        if isinstance(f, Neg):
            return enc_neg(go(f.body))
        if isinstance(f, DotScale):
            return enc_scale(f.factor, go(f.body))
        if isinstance(f, Min):
            return enc_min(go(f.left), go(f.right))
        if isinstance(f, Max):
            return enc_max(go(f.left), go(f.right))
        if isinstance(f, AbsDiff):
            return enc_absdiff(go(f.left), go(f.right))
        if isinstance(f, DotMinus):
            return enc_dot_sub(go(f.left), go(f.right))
        if isinstance(f, DotPlus):
            return enc_dot_add(go(f.left), go(f.right))
        raise UrysohnError(f"unknown node {f!r}")

    return go(f)


def qf_decide(phi: Formula, fragment: RationalMetricSpace) -> Fraction:
    """Exact value of a quantifier-free sentence over a stored fragment."""
    if not is_quantifier_free(phi):
        raise UrysohnError("qf_decide needs a quantifier-free formula")
    if free_variables(phi):
        raise UrysohnError("qf_decide needs a sentence (no free variables)")
    sig = Signature((), fragment.points)
    M = FiniteStructure(fragment, sig, {}, {p: p for p in fragment.points})
    return evaluate(phi, M, {})


def qf_threshold(phi: Formula, fragment: RationalMetricSpace,
                 eps: Fraction, cmp: str) -> bool:
    value = qf_decide(phi, fragment)
    if cmp == "<":
        return value < eps
    if cmp == ">":
        return value > eps
    raise UrysohnError(f"comparison must be '<' or '>', got {cmp!r}")


def theta_demo(q: Fraction, tol: Fraction) -> Enclosure:
    """Enclose inf over e in [0,q] of (10 *. (q - e)) +. sqrt(e).

    Adaptive bisection with interval arithmetic; the square root is enclosed
    by outward rounding at a precision well below tol.  Valid for
    1/10 < q < 1/2, where the infimum equals sqrt(q).
    """
    q, tol = Fraction(q), Fraction(tol)
    if not (Fraction(1, 10) < q < Fraction(1, 2)):
        raise UrysohnError(f"q = {q} outside the open interval (1/10, 1/2)")
    if tol <= 0:
        raise UrysohnError("tol must be positive")

    prec = 8
    while Fraction(1, 2 ** prec) > tol / 8:
        prec += 1

    ten = Fraction(10)

    def cell_enclosure(e1: Fraction, e2: Fraction) -> Enclosure:
        lin = Enclosure(dot_scale(ten, max(q - e2, ZERO)),
                        dot_scale(ten, max(q - e1, ZERO)))
        rt = Enclosure(sqrt_enclosure(e1, prec).lo, sqrt_enclosure(e2, prec).hi)
        return enc_dot_add(lin, rt)

    cells = [(ZERO, q)]
    enclosures = {(ZERO, q): cell_enclosure(ZERO, q)}
    while True:
        global_hi = min(enclosures[c].hi for c in cells)
        live = [c for c in cells if enclosures[c].lo < global_hi]
        global_lo = min((enclosures[c].lo for c in live), default=global_hi)
        if global_hi - global_lo <= tol:
            return Enclosure(global_lo, global_hi)
        # split the live cell with the smallest lower bound
        target = min(live, key=lambda c: (enclosures[c].lo, c))
        e1, e2 = target
        mid = (e1 + e2) / 2
        cells.remove(target)
        del enclosures[target]
        for cell in ((e1, mid), (mid, e2)):
            cells.append(cell)
            enclosures[cell] = cell_enclosure(*cell)
