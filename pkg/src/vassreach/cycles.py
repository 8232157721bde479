"""SCC decomposition, cycle spaces, geometric dimension, ranks, potentials.

The cycle space Cyc(G) is the rational span of the effects of all cycles.
For a transition t, Cyc(G/t) is the span of effects of cycles through t; for
a strongly connected G this equals Cyc(G), and a bridge transition lies on
no cycle at all.  The rank of G counts transitions by dim Cyc(G/t) for
dimensions d down to 3 (most significant first).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import ratlin
from .vass import Vass


@dataclass(frozen=True)
class SccDecomposition:
    components: tuple  # sub-VASSes, ordered by smallest contained state
    comp_of: dict  # state -> component index
    bridges: tuple  # transitions whose endpoints lie in distinct components


def scc(g):
    """Tarjan's algorithm (iterative), components ordered deterministically."""
    index = {}
    low = {}
    onstack = {}
    stack = []
    comps = []
    counter = [0]
    adj = {s: [t.target for t in g.outgoing(s)] for s in g.states}

    for root in g.states:
        if root in index:
            continue
        work = [(root, iter(adj[root]))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        onstack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    onstack[w] = True
                    work.append((w, iter(adj[w])))
                    advanced = True
                    break
                elif onstack.get(w):
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    onstack[w] = False
                    comp.add(w)
                    if w == v:
                        break
                comps.append(comp)

    comps.sort(key=lambda c: min(g.state_order(s) for s in c))
    comp_of = {s: i for i, c in enumerate(comps) for s in c}
    subs = []
    for c in comps:
        states = tuple(s for s in g.states if s in c)
        trans = tuple(
            t for t in g.transitions if t.source in c and t.target in c
        )
        subs.append(Vass(g.dimension, states, trans))
    bridges = tuple(
        t for t in g.transitions if comp_of[t.source] != comp_of[t.target]
    )
    return SccDecomposition(tuple(subs), comp_of, bridges)


def is_strongly_connected(g):
    return len(g.states) <= 1 or len(scc(g).components) == 1


def _scc_cycle_generators(sub):
    """Spanning-arborescence generators of the cycle space of one SCC.

    With dist(s) the effect of a fixed tree path root -> s, every internal
    transition (u, a, v) yields the cycle-effect generator
    dist(u) + a - dist(v) (telescoping along the tree paths).
    """
    if not sub.states:
        return []
    root = sub.states[0]
    dist = {root: tuple(0 for _ in range(sub.dimension))}
    frontier = [root]
    while frontier:
        s = frontier.pop(0)
        for t in sub.transitions:
            if t.source == s and t.target not in dist:
                dist[t.target] = tuple(
                    a + b for a, b in zip(dist[s], t.effect)
                )
                frontier.append(t.target)
    gens = []
    for t in sub.transitions:
        gens.append(
            tuple(
                du + a - dv
                for du, a, dv in zip(dist[t.source], t.effect, dist[t.target])
            )
        )
    return gens


def cyc_space(g):
    """Basis of the span of all cycle effects of G."""
    gens = []
    for sub in scc(g).components:
        gens.extend(_scc_cycle_generators(sub))
    return ratlin.span_basis(gens)


def cyc_space_through(g, t):
    """Basis of the span of effects of cycles containing t."""
    if t not in g.transitions:
        raise ValueError(f"transition {t} not in the VASS")
    dec = scc(g)
    if dec.comp_of[t.source] != dec.comp_of[t.target]:
        return []
    sub = dec.components[dec.comp_of[t.source]]
    return ratlin.span_basis(_scc_cycle_generators(sub))


def geometric_dimension(g):
    return len(cyc_space(g))


def is_geometrically_2dim(g):
    return geometric_dimension(g) <= 2


def rank_full(g):
    """(r_d, ..., r_0): counts of transitions by dim Cyc(G/t)."""
    d = g.dimension
    counts = [0] * (d + 1)
    for t in g.transitions:
        counts[len(cyc_space_through(g, t))] += 1
    return tuple(reversed(counts))


def rank(g):
    """(r_d, ..., r_3); empty for d < 3.  Lexicographic, r_d most significant."""
    full = rank_full(g)
    d = g.dimension
    return full[: max(0, d - 2)]


def rank_is_zero(g):
    return all(r == 0 for r in rank(g))


def fixed_coordinates(g):
    """Coordinates admitting a potential, with the potential itself.

    Coordinate j is fixed iff there is f_j : states -> N with
    f_j(q) = f_j(p) + a(j) for every transition (p, a, q); the potential is
    computed per weakly connected part by propagation from the least state
    and shifted so its minimum is 0.  Returns {j: {state: value}}.
    """
    out = {}
    for j in range(g.dimension):
        pot = {}
        ok = True
        for root in g.states:
            if root in pot or not ok:
                continue
            pot[root] = 0
            frontier = [root]
            while frontier and ok:
                s = frontier.pop(0)
                for t in g.transitions:
                    if t.source == s:
                        val = pot[s] + t.effect[j]
                        if t.target in pot:
                            if pot[t.target] != val:
                                ok = False
                                break
                        else:
                            pot[t.target] = val
                            frontier.append(t.target)
                    if t.target == s:
                        val = pot[s] - t.effect[j]
                        if t.source in pot:
                            if pot[t.source] != val:
                                ok = False
                                break
                        else:
                            pot[t.source] = val
                            frontier.append(t.source)
        if not ok:
            continue
        # re-verify globally (propagation may have missed a conflicting edge)
        for t in g.transitions:
            if pot[t.target] != pot[t.source] + t.effect[j]:
                ok = False
                break
        if not ok:
            continue
        if pot:
            m = min(pot.values())
            pot = {s: v - m for s, v in pot.items()}
        out[j] = pot
    return out
