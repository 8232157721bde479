"""Sign-reflecting projections and VASS projection with back-mapping."""

import random
from fractions import Fraction

import pytest

from conftest import fig1_vass
from vassreach import projection, ratlin

PLANE = [(1, 0, -1), (0, 1, 1)]


def test_projection_running_example():
    proj = projection.sign_reflecting_projection(
        ratlin.span_basis(PLANE), (1, 1, 1)
    )
    assert proj.indices == (0, 2)  # coordinates 1 and 3, one-based


def test_projection_identity_plane():
    proj = projection.sign_reflecting_projection(
        ratlin.span_basis([(1, 0), (0, 1)]), (1, 1)
    )
    assert proj.indices == (0, 1)


def test_projection_support_difference():
    proj = projection.sign_reflecting_projection(
        ratlin.span_basis([(1, 1, 0), (0, 0, 1)]), (1, 1, 1)
    )
    assert proj.indices == (0, 2)


def test_projection_rejects_thin_cone():
    with pytest.raises(ValueError):
        projection.sign_reflecting_projection(
            ratlin.span_basis([(1, 0)]), (1, 1)
        )


def test_orthant_containing_examples():
    assert projection.orthant_containing(
        ratlin.span_basis([(1, 0), (0, 1)]), (1, 1)
    ) == (1, 1)

    signs = projection.orthant_containing(ratlin.span_basis(PLANE), (1, 1, 0))
    assert ratlin.in_orthant((1, 1, 0), signs)
    gens = ratlin.plane_orthant_cone(ratlin.span_basis(PLANE), signs)
    assert len(gens) == 2

    # full-support vector: the orthant is its sign pattern
    assert projection.orthant_containing(
        ratlin.span_basis([(1, -2), (0, 1)]), (2, -1)
    ) == (1, -1)


def test_orthant_containing_rejects_bad_input():
    basis = ratlin.span_basis(PLANE)
    with pytest.raises(ValueError):
        projection.orthant_containing(basis, (0, 0, 0))
    with pytest.raises(ValueError):
        projection.orthant_containing(basis, (1, 0, 0))


def test_project_vass_running_example():
    g = fig1_vass()
    p13 = projection.project_vass(g, (0, 2))
    assert sorted(t.effect for t in p13.base.transitions) == [(0, 1), (1, -1)]
    p12 = projection.project_vass(g, (0, 1))
    assert sorted(t.effect for t in p12.base.transitions) == [(0, 1), (1, 0)]
    # back-map soundness
    for pv in (p13, p12):
        for pt, orig in pv.back.items():
            assert orig.tid == pt.tid


def test_orthant_containing_postcondition_random():
    rng = random.Random(13)
    done = 0
    while done < 40:
        d = rng.randint(2, 5)
        b1 = tuple(rng.randint(-3, 3) for _ in range(d))
        b2 = tuple(rng.randint(-3, 3) for _ in range(d))
        basis = ratlin.span_basis([b1, b2])
        if len(basis) != 2:
            continue
        a, b = rng.randint(-4, 4), rng.randint(-4, 4)
        v = tuple(a * x + b * y for x, y in zip(basis[0], basis[1]))
        if all(x == 0 for x in v):
            continue
        signs = projection.orthant_containing(basis, v)
        assert ratlin.in_orthant(v, signs)
        assert len(ratlin.plane_orthant_cone(basis, signs)) == 2
        done += 1
