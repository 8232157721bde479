"""Independent ground truth: bounded BFS, run enumeration, Karp-Miller.

The BFS verdict is Yes (with a shortest replayable witness), No (only when
the bounded closure is exhaustion-complete: no explored configuration had a
successor escaping the cap), or Unknown.  The Karp-Miller tree is the
standard coverability tree with omega-acceleration against strictly
dominated ancestors; it serves the acceleration vectors of the engine.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .vass import (
    NAT,
    NAT_OMEGA,
    OMEGA,
    Configuration,
    run,
    step,
    vec_leq,
)

YES = "yes"
NO = "no"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class OracleVerdict:
    kind: str  # YES / NO / UNKNOWN
    witness: tuple = None  # transitions, for YES

    def definitive(self):
        return self.kind in (YES, NO)


def _closure(g, start, norm_cap, forward):
    """Capped BFS closure; returns (parent map, found-complete flag).

    Backward closure explores predecessors: c' is a predecessor of c under t
    iff c' >= 0 and c' + effect = c (then c >= 0 holds automatically).
    """
    parent = {start: None}
    queue = deque([start])
    escaped = False
    while queue:
        state, vec = queue.popleft()
        for t in g.transitions:
            if forward:
                if t.source != state:
                    continue
                nv = tuple(a + b for a, b in zip(vec, t.effect))
                nstate = t.target
            else:
                if t.target != state:
                    continue
                nv = tuple(a - b for a, b in zip(vec, t.effect))
                nstate = t.source
            if any(x < 0 for x in nv):
                continue
            if any(x > norm_cap for x in nv):
                escaped = True
                continue
            key = (nstate, nv)
            if key in parent:
                continue
            parent[key] = (state, vec, t)
            queue.append(key)
    return parent, not escaped


def bfs_reach(g, src, tgt, norm_cap=64):
    """Breadth-first reachability over configurations capped at norm_cap.

    Yes carries a shortest in-cap witness.  No is reported only when a
    closure is exhaustion-complete: either the forward closure from src
    never had a successor escaping the cap, or (failing that) the backward
    closure from tgt never had a predecessor escaping it.  Otherwise
    Unknown.
    """
    if src == tgt:
        return OracleVerdict(YES, ())
    start = (src.state, src.vector)
    goal = (tgt.state, tgt.vector)
    fwd, fwd_complete = _closure(g, start, norm_cap, forward=True)
    if goal in fwd:
        path = []
        cur = goal
        while fwd[cur] is not None:
            ps, pv, pt = fwd[cur]
            path.append(pt)
            cur = (ps, pv)
        path.reverse()
        return OracleVerdict(YES, tuple(path))
    if fwd_complete:
        return OracleVerdict(NO)
    bwd, bwd_complete = _closure(g, goal, norm_cap, forward=False)
    if bwd_complete and start not in bwd:
        return OracleVerdict(NO)
    return OracleVerdict(UNKNOWN)


def enumerate_runs(g, src, max_len):
    """All NAT-valid runs of length <= max_len, lexicographic in declaration
    order of the transitions; yields (path, trace) pairs."""

    def rec(c, path, trace):
        yield tuple(path), tuple(trace)
        if len(path) >= max_len:
            return
        for t in g.transitions:
            if t.source != c.state:
                continue
            nc = step(c, t, NAT)
            if nc is None:
                continue
            path.append(t)
            trace.append(nc)
            yield from rec(nc, path, trace)
            path.pop()
            trace.pop()

    yield from rec(src, [], [src])


class KmBudgetExceeded(Exception):
    """The Karp-Miller construction hit its node cap."""


@dataclass(frozen=True)
class KmNode:
    state: str
    label: tuple
    parent: int  # index into the tree's node list, -1 for the root
    via: object  # transition taken from the parent, None for the root
    accelerated: tuple  # coordinate indices accelerated at this node


@dataclass(frozen=True)
class KarpMillerTree:
    nodes: tuple

    def labels_at(self, state):
        return [n.label for n in self.nodes if n.state == state]


def _dominates_strictly(big, small):
    return vec_leq(small, big) and big != small


def karp_miller(g, src, node_cap=50000):
    """Standard coverability tree with acceleration, deterministic BFS order."""
    nodes = [KmNode(src.state, src.vector, -1, None, ())]
    queue = deque([0])
    while queue:
        idx = queue.popleft()
        node = nodes[idx]
        # leaf if an ancestor carries the same state and a covering label
        anc = node.parent
        is_leaf = False
        while anc != -1:
            a = nodes[anc]
            if a.state == node.state and vec_leq(node.label, a.label):
                is_leaf = True
                break
            anc = nodes[anc].parent
        if is_leaf:
            continue
        c = Configuration(node.state, node.label)
        for t in g.transitions:
            if t.source != node.state:
                continue
            nc = step(c, t, NAT_OMEGA)
            if nc is None:
                continue
            label = list(nc.vector)
            accelerated = []
            anc = idx
            while anc != -1:
                a = nodes[anc]
                if a.state == nc.state and vec_leq(a.label, tuple(label)):
                    for j in range(g.dimension):
                        if label[j] is not OMEGA and a.label[j] is not OMEGA:
                            if label[j] > a.label[j]:
                                label[j] = OMEGA
                                accelerated.append(j)
                anc = a.parent
            if len(nodes) >= node_cap:
                raise KmBudgetExceeded(node_cap)
            nodes.append(
                KmNode(nc.state, tuple(label), idx, t, tuple(accelerated))
            )
            queue.append(len(nodes) - 1)
    return KarpMillerTree(tuple(nodes))


def covers(g, src, tgt, node_cap=50000):
    """Is some configuration >= tgt (same state) reachable from src?"""
    tree = karp_miller(g, src, node_cap)
    for n in tree.nodes:
        if n.state == tgt.state and vec_leq(tgt.vector, n.label):
            return True
    return False


def replays(g, src, path, tgt=None):
    """Does the path replay in NAT from src (optionally ending at tgt)?"""
    trace = run(src, list(path), NAT)
    if trace is None:
        return False
    return tgt is None or trace[-1] == tgt
