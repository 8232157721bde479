"""Core VASS data model and run semantics.

A VASS (vector addition system with states) is a finite directed multigraph
whose transitions carry integer effect vectors of a fixed dimension d.
Configurations pair a state with a d-vector over the naturals, the integers,
or the naturals extended with the absorbing element omega, depending on the
chosen semantics domain.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class _Omega:
    """The infinite element: larger than every natural, absorbs addition."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "w"

    def __reduce__(self):
        return (_Omega, ())


OMEGA = _Omega()

# Semantics domains.
NAT = "nat"
INT = "int"
NAT_OMEGA = "nat_omega"


def is_omega(x):
    return x is OMEGA


def omega_add(x, k):
    """x + k where x is a natural/integer or OMEGA; OMEGA absorbs addition."""
    if x is OMEGA:
        return OMEGA
    return x + k


def omega_leq(x, y):
    """x <= y in the order where every natural is below OMEGA."""
    if y is OMEGA:
        return True
    if x is OMEGA:
        return False
    return x <= y


def refines(x, y):
    """The refinement order on naturals-with-omega: x = y or y = OMEGA."""
    return x == y or y is OMEGA


def vec_refines(u, v):
    """Componentwise refinement of vectors (u may fill in OMEGA slots of v)."""
    return len(u) == len(v) and all(refines(a, b) for a, b in zip(u, v))


def vec_leq(u, v):
    return len(u) == len(v) and all(omega_leq(a, b) for a, b in zip(u, v))


def vec_add(u, delta):
    """u + delta with OMEGA entries of u absorbing."""
    return tuple(omega_add(a, b) for a, b in zip(u, delta))


def norm(v):
    """Maximum norm; OMEGA entries contribute 0 (finite-size convention)."""
    m = 0
    for x in v:
        if x is not OMEGA and abs(x) > m:
            m = abs(x)
    return m


@dataclass(frozen=True)
class Transition:
    tid: str
    source: str
    target: str
    effect: tuple

    def __repr__(self):
        return f"{self.tid}:{self.source}->{self.target}{self.effect}"


@dataclass(frozen=True)
class Vass:
    """A d-dimensional VASS: states in declaration order, transitions listed."""

    dimension: int
    states: tuple
    transitions: tuple = ()
    _state_index: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        for t in self.transitions:
            if t.source not in self.states or t.target not in self.states:
                raise ValueError(f"transition {t} has undeclared endpoint")
            if len(t.effect) != self.dimension:
                raise ValueError(f"transition {t} has wrong dimension")
        object.__setattr__(
            self, "_state_index", {s: i for i, s in enumerate(self.states)}
        )

    def state_order(self, s):
        return self._state_index[s]

    def outgoing(self, s):
        return [t for t in self.transitions if t.source == s]

    def incoming(self, s):
        return [t for t in self.transitions if t.target == s]

    def transition_norm(self):
        """Max norm over all effects (0 for the transition-free VASS)."""
        return max((norm(t.effect) for t in self.transitions), default=0)

    def reversed(self):
        """The VASS with every transition reversed and its effect negated.

        A run from u to v in the reversed VASS visits, in reverse order,
        exactly the vectors of a run from v to u in the original.
        """
        rts = tuple(
            Transition(t.tid, t.target, t.source, tuple(-x for x in t.effect))
            for t in self.transitions
        )
        return Vass(self.dimension, self.states, rts)


def vass_size(g):
    """|Q| + |T| + d * |T| * max-transition-norm."""
    return (
        len(g.states)
        + len(g.transitions)
        + g.dimension * len(g.transitions) * g.transition_norm()
    )


@dataclass(frozen=True)
class Configuration:
    state: str
    vector: tuple

    def __repr__(self):
        return f"{self.state}{self.vector}"


def _in_domain(vec, dom):
    if dom == INT:
        return True
    for x in vec:
        if x is OMEGA:
            if dom != NAT_OMEGA:
                return False
        elif x < 0:
            return False
    return True


def step(c, t, dom=NAT):
    """One step: apply t to c, or None if semantically blocked.

    Raises on structural mismatch (wrong state or dimension), which is
    distinct from being blocked by the domain constraint.
    """
    if c.state != t.source:
        raise ValueError(f"configuration {c} not at source of {t}")
    if len(c.vector) != len(t.effect):
        raise ValueError("dimension mismatch")
    nv = vec_add(c.vector, t.effect)
    if not _in_domain(nv, dom):
        return None
    return Configuration(t.target, nv)


def run(c, path, dom=NAT):
    """Fold `step` along a path; the full trace or None at the first block."""
    trace = [c]
    cur = c
    for t in path:
        if cur.state != t.source:
            raise ValueError(f"path not endpoint-compatible at {t}")
        cur = step(cur, t, dom)
        if cur is None:
            return None
        trace.append(cur)
    return trace


def effect(path):
    """Componentwise sum of step effects (the empty path sums to nothing)."""
    if not path:
        return ()
    d = len(path[0].effect)
    acc = [0] * d
    for t in path:
        for i, x in enumerate(t.effect):
            acc[i] += x
    return tuple(acc)


def path_effect(path, d):
    """Like effect() but with an explicit dimension for empty paths."""
    acc = [0] * d
    for t in path:
        for i, x in enumerate(t.effect):
            acc[i] += x
    return tuple(acc)


def parikh(path):
    """Occurrence counts of the transitions along a path."""
    counts = {}
    for t in path:
        counts[t] = counts.get(t, 0) + 1
    return counts


def parikh_effect(counts, d):
    """Effect of a Parikh image: the count-weighted sum of effects."""
    acc = [0] * d
    for t, c in counts.items():
        for i, x in enumerate(t.effect):
            acc[i] += c * x
    return tuple(acc)


def is_path(steps):
    """Consecutive steps endpoint-compatible (vacuously true when empty)."""
    return all(a.target == b.source for a, b in zip(steps, steps[1:]))


def is_cycle(steps):
    return bool(steps) and is_path(steps) and steps[0].source == steps[-1].target
