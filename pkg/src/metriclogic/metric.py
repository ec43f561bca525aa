"""Finite metric spaces with exact rational distances in [0,1].

Point identifiers are strings and equality is identifier equality; distance
tables are dense and symmetric.  Validation is an exhaustive check of the
range, symmetry, zero-diagonal and triangle conditions, and every operation
in the package returns spaces that pass it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, Mapping, Sequence, Tuple

from .rational import ONE, ZERO, in_unit


class MetricError(ValueError):
    """A candidate distance table violates a metric-space invariant."""


@dataclass(frozen=True)
class Violation:
    kind: str            # "range" | "diagonal" | "symmetry" | "triangle" | "missing"
    points: Tuple[str, ...]
    detail: str

    def __str__(self):
        return f"{self.kind} {' '.join(self.points)}: {self.detail}"


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: Tuple[Violation, ...]

    def __str__(self):
        if self.ok:
            return "ok"
        return "; ".join(str(v) for v in self.violations)


def validate_table(points: Sequence[str], dist: Mapping[Tuple[str, str], Fraction]) -> ValidationReport:
    """Exhaustively check a candidate distance table.

    Every violation is reported: range failures, asymmetry, nonzero diagonal
    and each violated triangle triple, each in its own category.
    """
    violations = []
    missing = False
    for p in points:
        d = dist.get((p, p))
        if d is None:
            violations.append(Violation("missing", (p, p), "no diagonal entry"))
            missing = True
        elif d != 0:
            violations.append(Violation("diagonal", (p, p), f"d(p,p) = {d}"))
    for p, q in combinations(points, 2):
        dpq, dqp = dist.get((p, q)), dist.get((q, p))
        if dpq is None or dqp is None:
            violations.append(Violation("missing", (p, q), "pair not in table"))
            missing = True
            continue
        if dpq != dqp:
            violations.append(Violation("symmetry", (p, q), f"{dpq} != {dqp}"))
        if not in_unit(dpq):
            violations.append(Violation("range", (p, q), f"{dpq} outside [0,1]"))
    if missing:
        return ValidationReport(False, tuple(violations))
    for a, b, c in combinations(points, 3):
        ab, bc, ac = dist[(a, b)], dist[(b, c)], dist[(a, c)]
        if ac > ab + bc or ab > ac + bc or bc > ab + ac:
            violations.append(Violation("triangle", (a, b, c),
                                        f"d={ab},{bc},{ac} fails a triangle inequality"))
    return ValidationReport(not violations, tuple(violations))


@dataclass(frozen=True)
class RationalMetricSpace:
    points: Tuple[str, ...]
    dist: Mapping[Tuple[str, str], Fraction] = field(hash=False)

    @staticmethod
    def build(points: Sequence[str], pair_dists: Mapping[Tuple[str, str], Fraction]) -> "RationalMetricSpace":
        """Assemble a space from distances on unordered pairs and validate it."""
        points = tuple(points)
        if len(set(points)) != len(points):
            raise MetricError("duplicate point identifiers")
        dist: Dict[Tuple[str, str], Fraction] = {(p, p): ZERO for p in points}
        for (p, q), d in pair_dists.items():
            d = Fraction(d)
            dist[(p, q)] = d
            dist[(q, p)] = d
        report = validate_table(points, dist)
        if not report.ok:
            raise MetricError(str(report))
        return RationalMetricSpace(points, dist)

    def d(self, p: str, q: str) -> Fraction:
        return self.dist[(p, q)]

    def has_point(self, p: str) -> bool:
        return p in self.point_index

    @property
    def point_index(self) -> Dict[str, int]:
        return {p: i for i, p in enumerate(self.points)}

    def validate(self) -> ValidationReport:
        return validate_table(self.points, self.dist)

    def restrict(self, subset: Sequence[str]) -> "RationalMetricSpace":
        subset = tuple(subset)
        return RationalMetricSpace.build(
            subset, {(p, q): self.dist[(p, q)] for p, q in combinations(subset, 2)})

    def with_point(self, name: str, dists: Mapping[str, Fraction]) -> "RationalMetricSpace":
        """Extension by one point; admissibility is the caller's business."""
        if name in self.points:
            raise MetricError(f"point {name!r} already present")
        pair = {(p, q): self.dist[(p, q)] for p, q in combinations(self.points, 2)}
        pair.update({(p, name): Fraction(dists[p]) for p in self.points})
        return RationalMetricSpace.build(self.points + (name,), pair)


@dataclass(frozen=True)
class KatetovFunction:
    """Candidate distances from one new point to every point of a base space."""
    base: RationalMetricSpace
    values: Mapping[str, Fraction]

    def admissibility_violations(self) -> Tuple[Violation, ...]:
        out = []
        for p in self.base.points:
            v = self.values.get(p)
            if v is None:
                out.append(Violation("missing", (p,), "no value at point"))
            elif not in_unit(v):
                out.append(Violation("range", (p,), f"{v} outside [0,1]"))
        if out:
            return tuple(out)
        for p, q in combinations(self.base.points, 2):
            fp, fq, d = self.values[p], self.values[q], self.base.d(p, q)
            if abs(fp - fq) > d or d > fp + fq:
                out.append(Violation("triangle", (p, q),
                                     f"|{fp}-{fq}| <= {d} <= {fp}+{fq} fails"))
        return tuple(out)

    @property
    def admissible(self) -> bool:
        return not self.admissibility_violations()


def one_point_extend(space: RationalMetricSpace, f: KatetovFunction,
                     name: str = "") -> RationalMetricSpace:
    """Adjoin one point at the distances prescribed by an admissible f."""
    if f.base is not space and f.base.points != space.points:
        raise MetricError("Katetov function defined over a different space")
    bad = f.admissibility_violations()
    if bad:
        raise MetricError(f"inadmissible extension: {bad[0]}")
    name = name or fresh_point_name(space.points)
    return space.with_point(name, f.values)


def fresh_point_name(taken: Sequence[str], stem: str = "p") -> str:
    used = set(taken)
    k = len(used)
    while f"{stem}{k}" in used:
        k += 1
    return f"{stem}{k}"


@dataclass(frozen=True)
class EmbeddingWitness:
    source: RationalMetricSpace
    target: RationalMetricSpace
    map: Mapping[str, str]

    def check(self) -> ValidationReport:
        """Exact distance preservation of the recorded point map."""
        out = []
        for p in self.source.points:
            if p not in self.map or self.map[p] not in self.target.points:
                out.append(Violation("missing", (p,), "unmapped point"))
        if not out:
            images = [self.map[p] for p in self.source.points]
            if len(set(images)) != len(images):
                out.append(Violation("symmetry", tuple(images), "map not injective"))
            for p, q in combinations(self.source.points, 2):
                ds = self.source.d(p, q)
                dt = self.target.d(self.map[p], self.map[q])
                if ds != dt:
                    out.append(Violation("triangle", (p, q), f"{ds} != {dt}"))
        return ValidationReport(not out, tuple(out))


def katetov_spread(space: RationalMetricSpace, on: Mapping[str, Fraction]) -> Dict[str, Fraction]:
    """Extend an admissible vector on a subset to the whole space.

    Uses the shortest-path value min_a (f(a) + d(a, x)) capped at 1, which
    stays admissible because the diameter is at most 1.
    """
    out: Dict[str, Fraction] = {}
    for x in space.points:
        if x in on:
            out[x] = Fraction(on[x])
        else:
            out[x] = min(ONE, min(Fraction(on[a]) + space.d(a, x) for a in on))
    return out
