"""Nonnegative-integer linear systems: solve, bounds, homogeneous support."""

import random

from vassreach import intlin
from vassreach.intlin import EQ, GE, LE, NatLinearSystem


def sys_of(variables, rows):
    s = NatLinearSystem(variables)
    for row in rows:
        s.add(*row)
    return s


def test_solve_examples():
    s1 = sys_of(["x", "y"], [({"x": 1, "y": -1}, EQ, 1)])
    assert intlin.solve(s1) == {"x": 1, "y": 0}

    s2 = sys_of(["x", "y"], [({"x": 1, "y": 1}, EQ, 0), ({"x": 1}, GE, 1)])
    assert intlin.solve(s2) is None

    s3 = sys_of(["x", "y"], [({"x": 2, "y": -3}, EQ, 0), ({"x": 1}, GE, 1)])
    assert intlin.solve(s3) == {"x": 3, "y": 2}


def test_solve_is_lexicographically_least():
    rng = random.Random(21)
    for _ in range(120):
        n = rng.randint(1, 3)
        m = rng.randint(1, 2)
        variables = [f"x{i}" for i in range(n)]
        s = NatLinearSystem(variables)
        for _ in range(m):
            coeffs = {v: rng.randint(-2, 2) for v in variables}
            s.add(coeffs, rng.choice([LE, GE, EQ]), rng.randint(-2, 2))
        got = intlin.solve(s)
        models = intlin.enumerate_models(s, 6)
        if models:
            least = min(models, key=lambda mdl: [mdl[v] for v in variables])
            if got is not None and max(got.values()) <= 6:
                assert got == least
            assert got is not None
        elif got is not None:
            assert s.check(got)  # a model above the enumeration window


def test_pottier_bound_examples():
    s = sys_of(["x", "y"], [({"x": 1, "y": -1}, LE, 0)])
    assert intlin.pottier_bound(s) == 5
    # homogeneous variant of the same shape
    assert intlin.pottier_bound(s, homogeneous=True) == 4

    s2 = sys_of(["x"], [({"x": 1}, LE, 3)])
    assert intlin.pottier_bound(s2) == 7


def test_homogeneous_support_examples():
    s1 = sys_of(["x", "y"], [({"x": 1, "y": -1}, EQ, 0)])
    assert intlin.homogeneous_support(s1) == {"x", "y"}

    s2 = sys_of(["x", "y"], [({"x": 1, "y": 1}, EQ, 0)])
    assert intlin.homogeneous_support(s2) == set()

    s3 = sys_of(
        ["x", "y", "z"],
        [({"x": 1, "y": -2}, EQ, 0), ({"y": 1, "z": -2}, GE, 0)],
    )
    assert intlin.homogeneous_support(s3) == {"x", "y", "z"}


def test_homogeneous_support_matches_bounded_enumeration():
    rng = random.Random(33)
    for _ in range(60):
        n = rng.randint(1, 3)
        variables = [f"x{i}" for i in range(n)]
        s = NatLinearSystem(variables)
        for _ in range(rng.randint(1, 2)):
            coeffs = {v: rng.randint(-2, 2) for v in variables}
            s.add(coeffs, rng.choice([LE, GE, EQ]), 0)
        support = intlin.homogeneous_support(s)
        bound = intlin.pottier_bound(s, homogeneous=True)
        enum_support = set()
        for m in intlin.enumerate_models(s, min(bound, 8)):
            enum_support |= {v for v, val in m.items() if val > 0}
        assert enum_support <= support
        if bound <= 8:
            assert enum_support == support


def test_feasible_model_agrees_with_solve():
    rng = random.Random(55)
    for _ in range(120):
        n = rng.randint(1, 3)
        variables = [f"x{i}" for i in range(n)]
        s = NatLinearSystem(variables)
        for _ in range(rng.randint(1, 3)):
            coeffs = {v: rng.randint(-2, 2) for v in variables}
            s.add(coeffs, rng.choice([LE, GE, EQ]), rng.randint(-3, 3))
        model = intlin.feasible_model(s)
        assert (model is not None) == (intlin.solve(s) is not None)
        if model is not None:
            assert s.check(model)


def test_pottier_decomposition_check_examples():
    s = sys_of(["x", "y"], [({"x": 1, "y": -1}, EQ, 0)])
    assert intlin.pottier_decomposition_check(s, {"x": 2, "y": 2})
    assert intlin.pottier_decomposition_check(s, {"x": 7, "y": 7})
    # non-model input is rejected outright
    assert not intlin.pottier_decomposition_check(s, {"x": 1, "y": 2})


def test_lp_extremum():
    s = sys_of(["x", "y"], [({"x": 1, "y": 1}, LE, 5)])
    status, val = intlin.lp_extremum(s, 0, "max")
    assert status == "optimal" and val == 5
    status, _ = intlin.lp_extremum(
        sys_of(["x"], [({"x": 1}, GE, 1)]), 0, "max"
    )
    assert status == "unbounded"
