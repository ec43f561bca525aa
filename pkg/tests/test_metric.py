import random
from fractions import Fraction as F
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from metriclogic.metric import (EmbeddingWitness, KatetovFunction, MetricError,
                                RationalMetricSpace, katetov_spread,
                                one_point_extend, validate_table)

from helpers import metric_ok, random_far_space


def space(pairs, pts=None):
    if pts is None:
        pts = sorted({p for pq in pairs for p in pq})
    return RationalMetricSpace.build(pts, {k: F(v) for k, v in pairs.items()})


def test_singleton_validates():
    report = validate_table(("a",), {("a", "a"): F(0)})
    assert report.ok


def test_equilateral_validates():
    s = space({("a", "b"): F(1, 2), ("a", "c"): F(1, 2), ("b", "c"): F(1, 2)})
    assert s.validate().ok


def test_triangle_violation_reported():
    table = {("a", "a"): F(0), ("b", "b"): F(0), ("c", "c"): F(0)}
    for (p, q), v in {("a", "b"): F(1, 10), ("b", "c"): F(1, 10),
                      ("a", "c"): F(9, 10)}.items():
        table[(p, q)] = table[(q, p)] = v
    report = validate_table(("a", "b", "c"), table)
    assert not report.ok
    assert [v.kind for v in report.violations] == ["triangle"]
    assert set(report.violations[0].points) == {"a", "b", "c"}


def test_range_and_asymmetry_reported_separately():
    table = {("a", "a"): F(0), ("b", "b"): F(0),
             ("a", "b"): F(3, 2), ("b", "a"): F(1, 2)}
    report = validate_table(("a", "b"), table)
    kinds = {v.kind for v in report.violations}
    assert kinds == {"range", "symmetry"}


def test_one_point_extend_singleton():
    s = space({}, pts=["a"])
    out = one_point_extend(s, KatetovFunction(s, {"a": F(1, 3)}), "p")
    assert out.d("a", "p") == F(1, 3)
    assert metric_ok(out)


def test_one_point_extend_midpoint():
    s = space({("a", "b"): F(3, 5)})
    f = KatetovFunction(s, {"a": F(3, 10), "b": F(3, 10)})
    assert f.admissible
    out = one_point_extend(s, f, "m")
    assert metric_ok(out)


def test_one_point_extend_rejects_inadmissible():
    s = space({("a", "b"): F(3, 5)})
    f = KatetovFunction(s, {"a": F(1, 10), "b": F(1, 10)})
    violations = f.admissibility_violations()
    assert violations and violations[0].kind == "triangle"
    assert set(violations[0].points) == {"a", "b"}
    with pytest.raises(MetricError):
        one_point_extend(s, f)


@st.composite
def katetov_candidates(draw):
    n = draw(st.integers(2, 5))
    rng = random.Random(draw(st.integers(0, 10 ** 6)))
    s = random_far_space(rng, n, lo=F(1, 4))
    values = {p: F(draw(st.integers(0, 16)), 16) for p in s.points}
    return s, values


@given(katetov_candidates())
@settings(max_examples=120, deadline=None)
def test_extension_validates_iff_admissible(case):
    s, values = case
    f = KatetovFunction(s, values)
    if f.admissible:
        assert metric_ok(one_point_extend(s, f))
    else:
        with pytest.raises(MetricError):
            one_point_extend(s, f)


@given(katetov_candidates())
@settings(max_examples=60, deadline=None)
def test_katetov_spread_is_admissible(case):
    s, values = case
    sub = dict(list(values.items())[:2])
    f = KatetovFunction(s, sub)
    if not all(abs(a - b) <= s.d(p, q) <= a + b
               for (p, a), (q, b) in combinations(sub.items(), 2)):
        return
    full = katetov_spread(s, sub)
    assert KatetovFunction(s, full).admissible
    for p, v in sub.items():
        assert full[p] == v


def test_embedding_witness_checks_distances():
    s = space({("a", "b"): F(1, 2)})
    t = space({("x", "y"): F(1, 2), ("x", "z"): F(1, 2), ("y", "z"): F(1, 2)})
    ok = EmbeddingWitness(s, t, {"a": "x", "b": "y"})
    assert ok.check().ok
    bad = EmbeddingWitness(s, t, {"a": "x", "b": "x"})
    assert not bad.check().ok


def test_restrict_keeps_distances():
    rng = random.Random(5)
    s = random_far_space(rng, 5)
    sub = s.restrict(s.points[:3])
    for p, q in combinations(sub.points, 2):
        assert sub.d(p, q) == s.d(p, q)
