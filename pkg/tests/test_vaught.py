import random
from fractions import Fraction as F

import pytest

from metriclogic.rational import dot_add, dot_sub
from metriclogic.suite import (check_conjugates, check_duality, check_invariance,
                               check_order, check_set_correspondence,
                               check_translate_closure, random_gspace,
                               random_subgroup_table, random_table, run_suite,
                               SuiteReport)
from metriclogic.vaught import (FiniteGSpace, GSpaceError, characteristic,
                                is_invariant, is_subgroup_table, nice_closure,
                                translate_table, vaught_delta, vaught_sets,
                                vaught_star)


def swap_space():
    return FiniteGSpace.from_permutations(
        ("x", "y"), {"e": {"x": "x", "y": "y"}, "s": {"x": "y", "y": "x"}})


def trivial_space():
    return FiniteGSpace.from_permutations(("x", "y"), {"e": {"x": "x", "y": "y"}})


def test_gspace_validation():
    with pytest.raises(GSpaceError):
        FiniteGSpace.from_permutations(("x", "y"), {"s": {"x": "y", "y": "x"}})
    with pytest.raises(GSpaceError):
        # not closed: a 3-cycle without its square
        FiniteGSpace.from_permutations(
            ("a", "b", "c"),
            {"e": {"a": "a", "b": "b", "c": "c"},
             "r": {"a": "b", "b": "c", "c": "a"}})


def test_delta_swap_example():
    X = swap_space()
    phi = characteristic(X.points, ["x"])
    J = {g: F(0) for g in X.elements}
    out = vaught_delta(X, phi, J)
    assert out == {"x": F(0), "y": F(0)}


def test_delta_trivial_group():
    X = trivial_space()
    phi = {"x": F(1, 4), "y": F(3, 4)}
    J = {"e": F(1, 8)}
    out = vaught_delta(X, phi, J)
    assert out == {"x": dot_add(F(1, 4), F(1, 8)), "y": dot_add(F(3, 4), F(1, 8))}
    star = vaught_star(X, phi, J)
    assert star == {"x": dot_sub(F(1, 4), F(1, 8)), "y": dot_sub(F(3, 4), F(1, 8))}


def test_delta_saturates_at_one():
    X = swap_space()
    phi = {"x": F(1), "y": F(1)}
    J = random_table(random.Random(0), X.elements)
    out = vaught_delta(X, phi, J)
    assert all(v == 1 for v in out.values())


def test_star_constant_table():
    X = swap_space()
    phi = {"x": F(2, 5), "y": F(2, 5)}
    J = {g: F(0) for g in X.elements}
    assert vaught_star(X, phi, J) == phi


def test_duality_instance():
    X = swap_space()
    phi = {"x": F(1, 8), "y": F(5, 8)}
    J = {"e": F(0), "s": F(1, 4)}
    star = vaught_star(X, phi, J)
    co = vaught_delta(X, {x: 1 - v for x, v in phi.items()}, J)
    assert all(star[x] == 1 - co[x] for x in X.points)


def test_vaught_sets_examples():
    X = swap_space()
    star, delta = vaught_sets(X, ["x"], list(X.elements))
    assert delta == {"x", "y"} and star == frozenset()
    star1, delta1 = vaught_sets(X, ["x"], [X.identity])
    assert star1 == delta1 == {"x"}
    both = vaught_sets(X, ["x", "y"], list(X.elements))
    assert both[0] == both[1] == {"x", "y"}          # invariant set is fixed
    with pytest.raises(GSpaceError):
        vaught_sets(X, ["x"], [])


def test_nice_closure_constants_fixed_point():
    X = swap_space()
    zero = {p: F(0) for p in X.points}
    one = {p: F(1) for p in X.points}
    coset = {g: F(0) for g in X.elements}
    res = nice_closure(X, [zero, one], [coset], budget=500, scales=[F(2)])
    assert res.fixed_point
    assert len(res.family) == 2


def test_nice_closure_contains_transform():
    X = swap_space()
    o_a = characteristic(X.points, ["x"])
    o_g = {g: F(0) for g in X.elements}
    res = nice_closure(X, [o_a], [o_g], budget=2000, scales=[])
    vec = tuple(vaught_delta(X, o_a, o_g)[p] for p in X.points)
    assert vec in res.family


def test_nice_closure_budget_zero():
    X = swap_space()
    o_a = characteristic(X.points, ["x"])
    res = nice_closure(X, [o_a], [], budget=0)
    assert res.family == (tuple(o_a[p] for p in X.points),)
    assert not res.fixed_point


def test_subgroup_table_repair():
    rng = random.Random(5)
    for _ in range(10):
        X = random_gspace(rng, max_points=6, max_group=12)
        H = random_subgroup_table(rng, X)
        assert is_subgroup_table(X, H)


def test_invariant_table_is_fixed_point():
    rng = random.Random(6)
    X = random_gspace(rng, max_points=6, max_group=12)
    H = random_subgroup_table(rng, X)
    phi = random_table(rng, X.points)
    inv = vaught_delta(X, phi, H)
    assert is_invariant(X, inv, H)
    assert vaught_delta(X, inv, H) == inv
    assert vaught_star(X, inv, H) == inv


def test_lemma_checks_pass_on_random_data():
    rng = random.Random(99)
    report = SuiteReport()
    for _ in range(8):
        X = random_gspace(rng, max_points=8, max_group=12)
        phi = random_table(rng, X.points)
        psi = random_table(rng, X.points)
        J = random_table(rng, X.elements)
        H = random_subgroup_table(rng, X)
        g = rng.choice(X.elements)
        u = sorted(rng.sample(list(X.elements), 1 + rng.randrange(len(X.elements))))
        check_duality(X, phi, J, report)
        check_order(X, phi, H, report)
        check_invariance(X, phi, H, report)
        check_conjugates(X, phi, H, g, report)
        check_set_correspondence(X, phi, u, report)
        check_translate_closure(X, phi, psi, H, report)
    assert report.ok, report.violations


def test_run_suite_deterministic():
    a = run_suite(seed=3, instances=4)
    b = run_suite(seed=3, instances=4)
    assert a.checks == b.checks and a.per_lemma == b.per_lemma
    assert a.ok and b.ok


def test_conjugate_and_translate_tables():
    X = swap_space()
    H = {"e": F(0), "s": F(1, 2)}
    coset = translate_table(X, H, "s")
    assert coset == {"e": F(1, 2), "s": F(0)}
    from metriclogic.vaught import conjugate_table
    conj = conjugate_table(X, H, "s")
    assert conj == H                                  # abelian group
