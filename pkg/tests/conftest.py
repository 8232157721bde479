"""Shared builders: the running example VASS and the seeded random family."""

import random

import pytest

from vassreach.vass import Configuration, Transition, Vass


def make_vass(d, states, trans):
    """trans: iterable of (tid, src, tgt, effect)."""
    return Vass(
        d,
        tuple(states),
        tuple(Transition(tid, s, t, tuple(e)) for tid, s, t, e in trans),
    )


@pytest.fixture
def fig1():
    """One state p with loops a = (1,0,-1) and b = (0,1,1)."""
    return make_vass(
        3,
        ["p"],
        [("a", "p", "p", (1, 0, -1)), ("b", "p", "p", (0, 1, 1))],
    )


def fig1_vass():
    return make_vass(
        3,
        ["p"],
        [("a", "p", "p", (1, 0, -1)), ("b", "p", "p", (0, 1, 1))],
    )


def random_instance(rng, d=None, max_states=4, max_trans=6, max_norm=2,
                    max_entry=4):
    """One random (Vass, src Configuration, tgt Configuration)."""
    if d is None:
        d = rng.choice([2, 3])
    nq = rng.randint(1, max_states)
    states = [f"q{i}" for i in range(nq)]
    nt = rng.randint(1, max_trans)
    trans = []
    for i in range(nt):
        src = rng.choice(states)
        tgt = rng.choice(states)
        eff = tuple(rng.randint(-max_norm, max_norm) for _ in range(d))
        trans.append((f"t{i}", src, tgt, eff))
    g = make_vass(d, states, trans)
    u = tuple(rng.randint(0, max_entry) for _ in range(d))
    v = tuple(rng.randint(0, max_entry) for _ in range(d))
    return g, Configuration(rng.choice(states), u), Configuration(
        rng.choice(states), v
    )


def random_family(seed, count, **kwargs):
    rng = random.Random(seed)
    return [random_instance(rng, **kwargs) for _ in range(count)]
