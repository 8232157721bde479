"""SCCs, cycle spaces, geometric dimension, ranks, fixed coordinates."""

import itertools
import random

from conftest import fig1_vass, make_vass, random_instance
from vassreach import cycles as cyc
from vassreach import ratlin
from vassreach.vass import effect


def test_scc_examples():
    g = fig1_vass()
    assert len(cyc.scc(g).components) == 1

    g2 = make_vass(1, ["p", "q"], [("t", "p", "q", (0,))])
    dec = cyc.scc(g2)
    assert len(dec.components) == 2
    assert len(dec.bridges) == 1

    g3 = make_vass(
        1,
        ["p", "q", "r"],
        [("t1", "p", "q", (0,)), ("t2", "q", "r", (0,)),
         ("t3", "r", "p", (0,))],
    )
    assert len(cyc.scc(g3).components) == 1
    assert cyc.is_strongly_connected(g3)


def test_cyc_space_examples():
    g = fig1_vass()
    basis = cyc.cyc_space(g)
    assert len(basis) == 2
    assert ratlin.member_of_span((1, 0, -1), basis)
    assert ratlin.member_of_span((0, 1, 1), basis)

    acyclic = make_vass(2, ["p", "q"], [("t", "p", "q", (1, 1))])
    assert cyc.cyc_space(acyclic) == []

    one_loop = make_vass(2, ["p"], [("t", "p", "p", (2, 0))])
    assert len(cyc.cyc_space(one_loop)) == 1


def test_cyc_space_through_examples():
    g = fig1_vass()
    a = g.transitions[0]
    assert len(cyc.cyc_space_through(g, a)) == 2

    g2 = make_vass(1, ["p", "q"],
                   [("loop", "p", "p", (1,)), ("b", "p", "q", (0,))])
    bridge = g2.transitions[1]
    assert cyc.cyc_space_through(g2, bridge) == []
    loop = g2.transitions[0]
    assert len(cyc.cyc_space_through(g2, loop)) == 1


def test_rank_examples():
    g = fig1_vass()
    assert cyc.rank(g) == (0,)
    assert cyc.rank_full(g) == (0, 2, 0, 0)
    assert cyc.geometric_dimension(g) == 2

    acyclic = make_vass(3, ["p", "q"], [("t", "p", "q", (1, 0, 0))])
    assert cyc.rank_full(acyclic) == (0, 0, 0, 1)


def test_fixed_coordinates_examples():
    g = make_vass(2, ["p"], [("t", "p", "p", (1, 0))])
    fixed = cyc.fixed_coordinates(g)
    assert set(fixed) == {1}

    g2 = make_vass(1, ["p", "q"],
                   [("t1", "p", "q", (3,)), ("t2", "q", "p", (-3,))])
    fixed2 = cyc.fixed_coordinates(g2)
    assert set(fixed2) == {0}
    assert fixed2[0] == {"p": 0, "q": 3}

    assert cyc.fixed_coordinates(fig1_vass()) == {}


def test_fixed_coordinate_potentials_are_sound():
    rng = random.Random(11)
    for _ in range(60):
        g, _, _ = random_instance(rng, max_states=4, max_trans=5, max_norm=2)
        for j, pot in cyc.fixed_coordinates(g).items():
            assert all(v >= 0 for v in pot.values())
            for t in g.transitions:
                assert pot[t.target] - pot[t.source] == t.effect[j]


def _simple_cycle_effects(g):
    """Effects of all simple cycles, by brute-force enumeration."""
    out = []
    for start in g.states:
        def rec(cur, path, seen):
            for t in g.outgoing(cur):
                if t.target == start:
                    out.append(effect(path + [t]))
                elif t.target not in seen and g.state_order(
                        t.target) > g.state_order(start):
                    rec(t.target, path + [t], seen | {t.target})
        rec(start, [], {start})
    return out


def test_cyc_space_matches_simple_cycle_enumeration():
    rng = random.Random(3)
    for _ in range(80):
        g, _, _ = random_instance(rng, d=rng.choice([1, 2, 3]),
                                  max_states=4, max_trans=5, max_norm=2)
        via_cycles = ratlin.span_basis(_simple_cycle_effects(g))
        basis = cyc.cyc_space(g)
        assert len(basis) == len(via_cycles)
        for v in via_cycles:
            assert ratlin.member_of_span(v, basis)


def test_cyc_space_through_equals_cyc_space_when_strongly_connected():
    rng = random.Random(5)
    seen = 0
    for _ in range(120):
        g, _, _ = random_instance(rng, max_states=3, max_trans=5, max_norm=2)
        if not cyc.is_strongly_connected(g):
            continue
        seen += 1
        full = cyc.cyc_space(g)
        for t in g.transitions:
            through = cyc.cyc_space_through(g, t)
            assert len(through) == len(full)
    assert seen > 10


def test_rank_zero_iff_geometrically_2dim_when_strongly_connected():
    rng = random.Random(9)
    for _ in range(120):
        g, _, _ = random_instance(rng, d=3, max_states=3, max_trans=5,
                                  max_norm=2)
        if not cyc.is_strongly_connected(g):
            continue
        assert cyc.rank_is_zero(g) == (cyc.geometric_dimension(g) <= 2)
