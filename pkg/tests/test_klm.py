"""KLM tuples and sequences: sizes, ranks, Kirchhoff, characteristic systems."""

import itertools
import types

import pytest

from conftest import fig1_vass, make_vass
from vassreach import hierarchy, intlin, klm
from vassreach import lps as lpsmod
from vassreach.vass import OMEGA, Transition


def rows_as_set(system):
    return {
        (tuple(sorted(c.items())), rel, rhs) for c, rel, rhs in system.rows
    }


def test_kirchhoff_examples():
    # single state with loops: every flow is a model
    g = make_vass(1, ["p"], [("a", "p", "p", (1,)), ("b", "p", "p", (-1,))])
    sys = klm.kirchhoff_system(g, "p", "p")
    for fa, fb in itertools.product(range(3), repeat=2):
        assert sys.check({"a": fa, "b": fb})

    # p -> q single transition: phi(t) = 1 exactly
    g2 = make_vass(1, ["p", "q"], [("t", "p", "q", (0,))])
    sys2 = klm.kirchhoff_system(g2, "p", "q")
    assert intlin.solve(sys2) == {"t": 1}
    assert not sys2.check({"t": 0})
    assert not sys2.check({"t": 2})

    # homogeneous variant of the same: phi(t) = 0 only
    hom = klm.kirchhoff_homogeneous(g2, "p", "q")
    assert intlin.solve(hom) == {"t": 0}
    assert not hom.check({"t": 1})


def test_tuple_sizes():
    assert klm.trivial_tuple("p", (2,)).size() == 6  # 1 + 1*(2+2+1)
    z = klm.KlmTuple("p", (0, 0, 0), fig1_vass(), "p", (1, 1, 0))
    assert z.size() == 15  # 9 + 3*(0+1+1)
    # omega coordinates contribute zero to the endpoint norms
    zw = klm.KlmTuple("p", (OMEGA, 0, 0), fig1_vass(), "p", (1, 1, 0))
    assert zw.size() == 15


def test_sequence_size_and_serialization():
    z0 = klm.trivial_tuple("p", (0,))
    z1 = klm.trivial_tuple("q", (0,))
    lam = lpsmod.Lps(((Transition("s", "p", "q", (1,)),),), (), positive=True)
    xi = klm.LinearKlmSequence((z0, z1), (lam,))
    assert xi.k == 1
    assert klm.klm_size(xi) == 6  # 2 + 2 + 1*1*(1+1)

    assert klm.canonical_serialization(klm.single(z0)) == "T0[p(0)|p||p(0)]"
    s = klm.canonical_serialization(xi)
    assert s.startswith("T0[p(0)|p||p(0)]L1[")
    assert s.endswith("T1[q(0)|q||q(0)]")


def test_char_system_trivial_tuple():
    # single trivial tuple p(2), d = 1: forces m0 = n0 = 2, no flow vars
    xi = klm.single(klm.trivial_tuple("p", (2,)))
    sys = klm.char_system(xi)
    assert rows_as_set(sys) == {
        ((("m0[0]", 1),), intlin.EQ, 2),
        ((("n0[0]", 1),), intlin.EQ, 2),
        ((), intlin.EQ, 0),
        ((("m0[0]", -1), ("n0[0]", 1)), intlin.EQ, 0),
    }
    assert intlin.solve(sys) == {"m0[0]": 2, "n0[0]": 2}


def test_char_system_omega_exit():
    # p(0) G q(omega) with t: p -> q of effect (1)
    g = make_vass(1, ["p", "q"], [("t", "p", "q", (1,))])
    xi = klm.single(klm.KlmTuple("p", (0,), g, "q", (OMEGA,)))
    model = intlin.solve(klm.char_system(xi))
    assert model == {"m0[0]": 0, "f0[t]": 1, "n0[0]": 1}
    hom = intlin.solve(klm.char_system_homogeneous(xi))
    assert hom == {"m0[0]": 0, "f0[t]": 0, "n0[0]": 0}


def test_is_satisfiable_examples():
    sat, model = klm.is_satisfiable(klm.single(klm.trivial_tuple("p", (2,))))
    assert sat and model["m0[0]"] == 2

    zero_loop = make_vass(1, ["p"], [("l", "p", "p", (0,))])
    xi = klm.single(klm.KlmTuple("p", (0,), zero_loop, "p", (5,)))
    sat, model = klm.is_satisfiable(xi)
    assert not sat and model is None

    fig = klm.single(
        klm.KlmTuple("p", (0, 0, 0), fig1_vass(), "p", (1, 1, 0))
    )
    sat, model = klm.is_satisfiable(fig)
    assert sat
    assert model["f0[a]"] == 1 and model["f0[b]"] == 1


def test_admits_examples():
    triv = klm.single(klm.trivial_tuple("p", (2,)))
    assert klm.admits(triv, [], (2,))
    assert not klm.admits(triv, [], (3,))

    g = fig1_vass()
    b, a = g.transitions[1], g.transitions[0]
    fig = klm.single(klm.KlmTuple("p", (0, 0, 0), g, "p", (1, 1, 0)))
    assert klm.admits(fig, [b, a], (0, 0, 0))
    # replay goes negative at the first step
    assert not klm.admits(fig, [a, b], (0, 0, 0))

    # omega entry/exit coordinates accept any value there
    loose = klm.single(
        klm.KlmTuple("p", (OMEGA, 0, 0), g, "p", (OMEGA, 1, 1))
    )
    for first in (0, 3, 9):
        assert klm.admits(loose, [b], (first, 0, 0))


def test_admits_model_correspondence():
    # every admitted one-tuple path induces a characteristic-system model
    g = fig1_vass()
    by_tid = {t.tid: t for t in g.transitions}
    xi = klm.single(klm.KlmTuple("p", (0, 0, 0), g, "p", (1, 1, 0)))
    sys = klm.char_system(xi)
    found = 0
    for n in range(5):
        for word in itertools.product("ab", repeat=n):
            path = [by_tid[c] for c in word]
            if not klm.admits(xi, path, (0, 0, 0)):
                continue
            found += 1
            model = {f"m0[{j}]": 0 for j in range(3)}
            model.update({f"n0[{j}]": v for j, v in enumerate((1, 1, 0))})
            model["f0[a]"] = word.count("a")
            model["f0[b]"] = word.count("b")
            assert sys.check(model)
    assert found > 0


def test_unsatisfiable_admits_nothing_short():
    # desk-scale contrapositive: unsatisfiable => no admitted path <= 8
    zero_loop = make_vass(1, ["p"], [("l", "p", "p", (0,))])
    l = zero_loop.transitions[0]
    xi = klm.single(klm.KlmTuple("p", (0,), zero_loop, "p", (5,)))
    assert not klm.is_satisfiable(xi)[0]
    for n in range(9):
        assert not klm.admits(xi, [l] * n, (0,))

    g = make_vass(1, ["p"], [("up", "p", "p", (2,))])
    up = g.transitions[0]
    odd = klm.single(klm.KlmTuple("p", (0,), g, "p", (5,)))
    assert not klm.is_satisfiable(odd)[0]
    for n in range(9):
        assert not klm.admits(odd, [up] * n, (0,))


def test_ordinal_rank_examples():
    # dimension 5, rank (1, 0, 2) -> w^2 + 2 (pure substitution)
    fake = types.SimpleNamespace(dimension=5, rank=lambda: (1, 0, 2))
    assert klm.ordinal_rank(fake) == hierarchy.ordinal(1, 0, 2)
    assert hierarchy.ordinal(1, 0, 0) == hierarchy.omega_power(2, 1)

    # dimension 3, four loops spanning all of Q^3 -> rank (4) -> ordinal 4
    g = make_vass(
        3,
        ["p"],
        [("a", "p", "p", (1, 0, 0)), ("b", "p", "p", (0, 1, 0)),
         ("c", "p", "p", (0, 0, 1)), ("d", "p", "p", (1, 1, 0))],
    )
    xi = klm.single(klm.KlmTuple("p", (0,) * 3, g, "p", (0,) * 3))
    assert xi.rank() == (4,)
    assert klm.ordinal_rank(xi) == hierarchy.ordinal(4)

    # all-zero rank -> ordinal 0
    fig = klm.single(klm.KlmTuple("p", (0,) * 3, fig1_vass(), "p", (0,) * 3))
    assert klm.ordinal_rank(fig) == hierarchy.ordinal()

    with pytest.raises(ValueError):
        klm.ordinal_rank(klm.single(klm.trivial_tuple("p", (0, 0))))


def test_rank_comparison_matches_ordinal_comparison():
    vecs = list(itertools.product(range(3), repeat=3))
    for u in vecs:
        for v in vecs:
            assert (u < v) == (hierarchy.ordinal(*u) < hierarchy.ordinal(*v))
            assert (u == v) == (hierarchy.ordinal(*u) == hierarchy.ordinal(*v))
