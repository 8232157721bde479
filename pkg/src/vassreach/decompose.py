"""Cleaning, decomposition and the reachability driver.

A linear KLM sequence is *clean* when it is satisfiable, strongly
connected, pure (geometrically 2-dimensional pieces replaced by schemes)
and saturated; *normal* when additionally unbounded, rigid, and pumpable.
Normal sequences always admit a run, which extract_witness constructs and
replays.  Sequences that are clean but not normal decompose into children
of strictly smaller rank; the driver explores this tree depth-first with
memoization and explicit budget accounting (a truncated branch can only
weaken Unreachable to Unknown, never corrupt Reachable).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import cycles as cyc
from . import flatten, intlin, klm
from . import lps as lpsmod
from . import oracle
from .vass import (
    OMEGA,
    Configuration,
    Transition,
    Vass,
    is_omega,
    vec_leq,
)

REACHABLE = "reachable"
UNREACHABLE = "unreachable"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class DecomposeConfig:
    purify_candidates: int = 24  # schemes enumerated per purified tuple
    purify_length_cap: int = 8
    purify_max_cycles: int = 2
    km_node_cap: int = 20000
    pump_band_cap: int = 24  # largest state-encoded coordinate band
    pump_path_len: int = 24  # witness pump-path search depth
    pump_node_cap: int = 20000
    attainable_cap: int = 16  # largest enumerated bounded-variable value
    branch_budget: int = 200  # explored sequences per decision
    direct_first: bool = True  # root-level scheme search before the tree

    def flatten_config(self):
        return flatten.FlattenConfig(
            lps_length_cap=self.purify_length_cap,
            search_budget=self.purify_candidates,
            max_cycles=self.purify_max_cycles,
        )


DEFAULT_CONFIG = DecomposeConfig()


class WitnessSearchMiss(Exception):
    """A bounded witness-construction search missed within its caps."""


def _omega_vec(d):
    return (OMEGA,) * d


def _sub_vass(g, states):
    keep = set(states)
    return Vass(
        g.dimension,
        tuple(s for s in g.states if s in keep),
        tuple(
            t for t in g.transitions if t.source in keep and t.target in keep
        ),
    )


def _replace(xi, i, new_tuples, new_schemes):
    """Splice tuple i out, putting new_tuples joined by new_schemes in."""
    tuples = xi.tuples[:i] + tuple(new_tuples) + xi.tuples[i + 1 :]
    schemes = xi.schemes[:i] + tuple(new_schemes) + xi.schemes[i:]
    return klm.LinearKlmSequence(tuples, schemes)


# ---------------------------------------------------------------------------
# cleanliness predicates


def is_strongly_connected_seq(xi):
    return all(cyc.is_strongly_connected(z.g) for z in xi.tuples)


def is_pure(xi):
    return all(
        z.is_trivial() or not cyc.rank_is_zero(z.g) for z in xi.tuples
    )


# satisfiability and homogeneous-support queries repeat heavily on the same
# sequences during cleaning; both are pure functions of the sequence
_SAT_CACHE = {}
_HS_CACHE = {}


def _sat(xi):
    key = klm.canonical_serialization(xi)
    if key not in _SAT_CACHE:
        sysm = klm.char_system(xi)
        try:
            model = intlin.feasible_model(sysm)
        except intlin.SolveBudgetExceeded:
            model = intlin.solve(sysm)  # exact but slower fallback
        _SAT_CACHE[key] = (model is not None, model)
    return _SAT_CACHE[key]


def _hs(xi):
    key = klm.canonical_serialization(xi)
    if key not in _HS_CACHE:
        _HS_CACHE[key] = intlin.homogeneous_support(
            klm.char_system_homogeneous(xi)
        )
    return _HS_CACHE[key]


def is_saturated(xi, hs=None):
    hs = _hs(xi) if hs is None else hs
    for i, z in enumerate(xi.tuples):
        ox, oy = z.omega_coords()
        for j in ox:
            if klm._mvar(i, j) not in hs:
                return False
        for j in oy:
            if klm._nvar(i, j) not in hs:
                return False
    return True


def is_unbounded(xi, hs=None):
    hs = _hs(xi) if hs is None else hs
    for i, z in enumerate(xi.tuples):
        for t in z.g.transitions:
            if klm._fvar(i, t) not in hs:
                return False
    return True


def is_clean(xi):
    return (
        _sat(xi)[0]
        and is_strongly_connected_seq(xi)
        and is_pure(xi)
        and is_saturated(xi)
    )


def _rigidity_status(z):
    """None when rigid, else a tag describing the first violation."""
    pots = cyc.fixed_coordinates(z.g)
    for j in sorted(pots):
        pot = pots[j]
        x, y = z.x[j], z.y[j]
        if is_omega(x) and is_omega(y):
            continue
        if not is_omega(x):
            c = x - pot[z.p]
            if not is_omega(y) and pot[z.q] + c != y:
                return ("incompatible", j)
            if c < 0 or any(v + c < 0 for v in pot.values()):
                return ("negative", j, c)
            if is_omega(y):
                return ("instantiate-y", j, pot[z.q] + c)
        else:
            c = y - pot[z.q]
            if c < 0 or any(v + c < 0 for v in pot.values()):
                return ("negative", j, c)
            return ("instantiate-x", j, pot[z.p] + c)
    return None


def is_rigid(xi):
    return all(_rigidity_status(z) is None for z in xi.tuples)


def facc(g, p, x, node_cap=20000):
    """Forward acceleration vector: omega where coverability certifies a
    strict increase, the original entry elsewhere."""
    x = tuple(x)
    tree = oracle.karp_miller(g, Configuration(p, x), node_cap)
    labels = [n.label for n in tree.nodes if n.state == p]
    out = []
    for j in range(g.dimension):
        if is_omega(x[j]):
            out.append(OMEGA)
            continue
        bump = tuple(
            v + 1 if c == j else v for c, v in enumerate(x)
        )
        out.append(
            OMEGA if any(vec_leq(bump, lab) for lab in labels) else x[j]
        )
    return tuple(out)


def bacc(g, q, y, node_cap=20000):
    """Backward acceleration vector (forward acceleration on the reversal)."""
    return facc(g.reversed(), q, y, node_cap)


def _unfixed(g):
    span = cyc.cyc_space(g)
    return [
        j for j in range(g.dimension) if any(row[j] != 0 for row in span)
    ]


def is_pumpable_tuple(z, cfg=DEFAULT_CONFIG):
    unfixed = _unfixed(z.g)
    if not unfixed:
        return True
    f = facc(z.g, z.p, z.x, cfg.km_node_cap)
    b = bacc(z.g, z.q, z.y, cfg.km_node_cap)
    return all(is_omega(f[j]) and is_omega(b[j]) for j in unfixed)


def is_pumpable(xi, cfg=DEFAULT_CONFIG):
    return all(is_pumpable_tuple(z, cfg) for z in xi.tuples)


def is_normal(xi, cfg=DEFAULT_CONFIG):
    if not _sat(xi)[0]:
        return False
    if not (is_strongly_connected_seq(xi) and is_pure(xi)):
        return False
    hs = _hs(xi)
    return (
        is_saturated(xi, hs)
        and is_unbounded(xi, hs)
        and is_rigid(xi)
        and is_pumpable(xi, cfg)
    )


# ---------------------------------------------------------------------------
# cleaning steps


def decompose_scc(xi):
    """Replace every non-SC tuple by all SCC chains through its bridges."""
    work = [xi]
    out = []
    while work:
        cur = work.pop()
        idx = next(
            (
                i
                for i, z in enumerate(cur.tuples)
                if not cyc.is_strongly_connected(z.g)
            ),
            None,
        )
        if idx is None:
            out.append(cur)
            continue
        z = cur.tuples[idx]
        d = z.g.dimension
        dec = cyc.scc(z.g)
        pc, qc = dec.comp_of[z.p], dec.comp_of[z.q]
        chains = []

        def rec(comp, bridges):
            if comp == qc:
                chains.append(tuple(bridges))
            for t in dec.bridges:
                if dec.comp_of[t.source] == comp:
                    rec(dec.comp_of[t.target], bridges + [t])

        rec(pc, [])
        for bridges in chains:
            comps = [pc] + [dec.comp_of[t.target] for t in bridges]
            subs = [
                _sub_vass(z.g, dec.components[c].states) for c in comps
            ]
            tuples = []
            for pos, sub in enumerate(subs):
                p = z.p if pos == 0 else bridges[pos - 1].target
                x = z.x if pos == 0 else _omega_vec(d)
                q = z.q if pos == len(subs) - 1 else bridges[pos].source
                y = z.y if pos == len(subs) - 1 else _omega_vec(d)
                tuples.append(klm.KlmTuple(p, x, sub, q, y))
            schemes = [lpsmod.path_lps((t,), positive=True) for t in bridges]
            work.append(_replace(cur, idx, tuples, schemes))
    out.sort(key=klm.canonical_serialization)
    return out


def purify(xi, cfg=DEFAULT_CONFIG):
    """Replace geometrically 2-dim non-trivial tuples by trivial tuples
    joined by enumerated positive schemes.  Returns (children, capped):
    capped is set whenever a replacement happened, since joint language
    preservation cannot be certified under finite enumeration caps."""
    idx = next(
        (
            i
            for i, z in enumerate(xi.tuples)
            if cyc.rank_is_zero(z.g) and not z.is_trivial()
        ),
        None,
    )
    if idx is None:
        return [xi], False
    z = xi.tuples[idx]
    fcfg = cfg.flatten_config()
    children = []
    capped = True
    count = 0
    for cand in flatten.skeleton_candidates(z.g, z.p, z.q, fcfg):
        count += 1
        if count > cfg.purify_candidates:
            break
        lam = lpsmod.Lps(cand.alphas, cand.betas, positive=True)
        left = klm.trivial_tuple(z.p, z.x)
        right = klm.trivial_tuple(z.q, z.y)
        child = _replace(xi, idx, (left, right), (lam,))
        if not _sat(child)[0]:
            continue
        sub, subcap = purify(child, cfg)
        children.extend(sub)
        capped |= subcap
    return children, capped


def _attainable_values(xi, var, cap):
    """(values, capped): all values of a char-system variable certified
    bounded beforehand, truncated at cap."""
    sys = klm.char_system(xi)
    vi = sys.variables.index(var)
    status, hi = intlin.lp_extremum(sys, vi, "max")
    if status == "infeasible":
        return [], False
    assert status == "optimal", "bounded variable with unbounded relaxation"
    hi = math.floor(hi)
    capped = hi > cap
    out = []
    for c in range(0, min(hi, cap) + 1):
        probe = klm.char_system(xi)
        probe.add({var: 1}, intlin.EQ, c)
        # rational feasibility is enough: a value feasible here but without
        # an integer model yields a child whose characteristic system is
        # unsatisfiable, which the cleaning pipeline drops anyway
        if intlin.lp_feasible(probe):
            out.append(c)
    return out, capped


def saturate(xi, cfg=DEFAULT_CONFIG):
    """Instantiate every bounded omega endpoint coordinate with each of its
    attainable values (boundedness certified by homogeneous support).
    Returns (sequences, capped)."""
    work = [xi]
    out = []
    capped = False
    while work:
        cur = work.pop()
        hs = _hs(cur)
        target = None
        for i, z in enumerate(cur.tuples):
            ox, oy = z.omega_coords()
            for j in sorted(ox):
                if klm._mvar(i, j) not in hs:
                    target = (i, "x", j, klm._mvar(i, j))
                    break
            if target:
                break
            for j in sorted(oy):
                if klm._nvar(i, j) not in hs:
                    target = (i, "y", j, klm._nvar(i, j))
                    break
            if target:
                break
        if target is None:
            out.append(cur)
            continue
        i, side, j, var = target
        z = cur.tuples[i]
        vals, vcap = _attainable_values(cur, var, cfg.attainable_cap)
        capped |= vcap
        for val in vals:
            if side == "x":
                nz = klm.KlmTuple(
                    z.p,
                    tuple(val if c == j else v for c, v in enumerate(z.x)),
                    z.g,
                    z.q,
                    z.y,
                )
            else:
                nz = klm.KlmTuple(
                    z.p,
                    z.x,
                    z.g,
                    z.q,
                    tuple(val if c == j else v for c, v in enumerate(z.y)),
                )
            work.append(_replace(cur, i, (nz,), ()))
    out.sort(key=klm.canonical_serialization)
    return out, capped


def clean(xi, cfg=DEFAULT_CONFIG):
    """scc -> drop unsat -> purify -> drop unsat -> saturate -> drop unsat."""
    capped = False
    out = []
    for s1 in decompose_scc(xi):
        if not _sat(s1)[0]:
            continue
        pures, c1 = purify(s1, cfg)
        capped |= c1
        for s2 in pures:
            if not _sat(s2)[0]:
                continue
            sats, c2 = saturate(s2, cfg)
            capped |= c2
            for s3 in sats:
                if _sat(s3)[0]:
                    out.append(s3)
    out.sort(key=lambda s: (s.rank(), s.size(), klm.canonical_serialization(s)))
    return out, capped


# ---------------------------------------------------------------------------
# decomposition steps


def _attainable_joint(xi, varnames, cap):
    """(vectors, capped): all joint values of several char-system variables
    certified bounded beforehand, each coordinate truncated at cap."""
    out = []
    capped = False

    def rec(pins):
        nonlocal capped
        k = len(pins)
        if k == len(varnames):
            out.append(tuple(pins))
            return
        var = varnames[k]
        sys = klm.char_system(xi)
        for v, c in zip(varnames, pins):
            sys.add({v: 1}, intlin.EQ, c)
        vi = sys.variables.index(var)
        status, hi = intlin.lp_extremum(sys, vi, "max")
        if status == "infeasible":
            return
        assert status == "optimal", "bounded variable with unbounded relaxation"
        hi = math.floor(hi)
        if hi > cap:
            capped = True
            hi = cap
        for c in range(hi + 1):
            probe = klm.char_system(xi)
            for v, pc in zip(varnames, pins + [c]):
                probe.add({v: 1}, intlin.EQ, pc)
            # see _attainable_values: rational feasibility suffices here
            if intlin.lp_feasible(probe):
                rec(pins + [c])

    rec([])
    return out, capped


def _multiset_orderings(counts, first_ok, next_ok, last_ok, cap):
    """All distinct orderings of a transition multiset consistent with the
    state-level connectivity predicates, up to cap orderings."""
    items = sorted(counts, key=lambda t: t.tid)
    total = sum(counts.values())
    out = []
    capped = False

    def rec(prefix, remaining):
        nonlocal capped
        if len(out) > cap:
            capped = True
            return
        if len(prefix) == total:
            if last_ok(prefix[-1]):
                out.append(tuple(prefix))
            return
        for t in items:
            if remaining[t] == 0:
                continue
            if prefix:
                if not next_ok(prefix[-1], t):
                    continue
            elif not first_ok(t):
                continue
            remaining[t] -= 1
            prefix.append(t)
            rec(prefix, remaining)
            prefix.pop()
            remaining[t] += 1

    rec([], dict(counts))
    if capped:
        del out[cap:]
    return out, capped


def expand_bounded_transitions(xi, cfg=DEFAULT_CONFIG):
    """Expand all bounded transitions of a tuple at once: for each attainable
    joint count vector and each connectivity-consistent interleaving order,
    chain copies of G minus the bounded set, joined by the pinned transitions
    with omega junctions.  Removing only a single bounded transition would
    duplicate full-rank components and could increase the sequence rank; with
    the whole bounded set removed, the remaining (unbounded) transitions carry
    a positive circuit confining their cycle spans to a smaller subspace."""
    hs = _hs(xi)
    pick = None
    for i, z in enumerate(xi.tuples):
        bounded = [t for t in z.g.transitions if klm._fvar(i, t) not in hs]
        if bounded:
            pick = (i, bounded)
            break
    if pick is None:
        raise ValueError("no bounded transition to expand")
    i, bounded = pick
    z = xi.tuples[i]
    d = z.g.dimension
    gminus = Vass(
        d, z.g.states, tuple(u for u in z.g.transitions if u not in bounded)
    )
    reach = _state_reachability(gminus)
    vectors, capped = _attainable_joint(
        xi, [klm._fvar(i, t) for t in bounded], cfg.attainable_cap
    )
    children = []
    seen = set()
    for vec in vectors:
        counts = {t: c for t, c in zip(bounded, vec) if c > 0}
        if counts:
            orders, ocap = _multiset_orderings(
                counts,
                lambda t: (z.p, t.source) in reach,
                lambda a, b: (a.target, b.source) in reach,
                lambda t: (t.target, z.q) in reach,
                cfg.branch_budget,
            )
            capped |= ocap
        else:
            orders = [()] if (z.p, z.q) in reach else []
        for order in orders:
            tuples = []
            n = len(order)
            for pos in range(n + 1):
                p = z.p if pos == 0 else order[pos - 1].target
                x = z.x if pos == 0 else _omega_vec(d)
                q = z.q if pos == n else order[pos].source
                y = z.y if pos == n else _omega_vec(d)
                tuples.append(klm.KlmTuple(p, x, gminus, q, y))
            schemes = [lpsmod.path_lps((t,), positive=True) for t in order]
            child = _replace(xi, i, tuples, schemes)
            key = klm.canonical_serialization(child)
            if key not in seen:
                seen.add(key)
                children.append(child)
    return children, capped, "expand-bounded-transitions"


def _state_reachability(g):
    """All state pairs (s, s') with a (possibly empty) path s -> s'."""
    adj = {s: set() for s in g.states}
    for t in g.transitions:
        adj[t.source].add(t.target)
    reach = set()
    for s in g.states:
        stack, seen = [s], {s}
        while stack:
            cur = stack.pop()
            for nxt in adj[cur]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        reach.update((s, v) for v in seen)
    return reach


def derigidify(xi):
    """Repair the first rigidity violation: delete states whose pinned
    potential goes negative, close incompatible endpoints, or instantiate a
    forced omega endpoint."""
    for i, z in enumerate(xi.tuples):
        status = _rigidity_status(z)
        if status is None:
            continue
        tag = status[0]
        if tag == "incompatible":
            return [], "derigidify-incompatible"
        if tag == "negative":
            _, j, c = status
            pot = cyc.fixed_coordinates(z.g)[j]
            keep = [s for s in z.g.states if pot[s] + c >= 0]
            if z.p not in keep or z.q not in keep:
                return [], "derigidify-empty"
            nz = klm.KlmTuple(z.p, z.x, _sub_vass(z.g, keep), z.q, z.y)
            return [_replace(xi, i, (nz,), ())], "derigidify-delete-states"
        _, j, val = status
        if tag == "instantiate-y":
            ny = tuple(val if cc == j else v for cc, v in enumerate(z.y))
            nz = klm.KlmTuple(z.p, z.x, z.g, z.q, ny)
        else:
            nx = tuple(val if cc == j else v for cc, v in enumerate(z.x))
            nz = klm.KlmTuple(z.p, nx, z.g, z.q, z.y)
        return [_replace(xi, i, (nz,), ())], "derigidify-instantiate"
    raise ValueError("sequence is rigid")


def _km_coord_max(tree, state, j):
    """Largest j-label at a state in a Karp-Miller tree; None if the state
    never appears, OMEGA if accelerated there."""
    best = None
    for n in tree.nodes:
        if n.state != state:
            continue
        v = n.label[j]
        if is_omega(v):
            return OMEGA
        best = v if best is None else max(best, v)
    return best


def _rename_boundary(lam, old_state, new_state, at_source, origin):
    """Rename one boundary state of a scheme (entering or leaving a renamed
    tuple); renamed transitions keep their effects and map back via origin."""
    if lam.length() == 0:
        return lam

    # only the first or last transition of the scheme touches the boundary
    def rebuild(replace_first, replace_last):
        segs_a = [list(a) for a in lam.alphas]
        segs_b = [list(b) for b in lam.betas]
        order = []
        for idx, b in enumerate(segs_b):
            order.append(segs_a[idx])
            order.append(b)
        order.append(segs_a[-1])
        flat = [t for seg in order for t in seg]
        if replace_first:
            t = flat[0]
            nt = Transition(t.tid + "~in", new_state, t.target, t.effect)
            origin[nt] = t
            for seg in order:
                if seg:
                    seg[0] = nt
                    break
        if replace_last:
            t = flat[-1]
            nt = Transition(t.tid + "~out", t.source, new_state, t.effect)
            origin[nt] = t
            for seg in reversed(order):
                if seg:
                    seg[-1] = nt
                    break
        return lpsmod.Lps(
            tuple(tuple(a) for a in segs_a),
            tuple(tuple(b) for b in segs_b),
            lam.positive,
        )

    if at_source:
        if lam.source() != old_state:
            raise ValueError("scheme does not start at the renamed state")
        if lam.k and not lam.alphas[0]:
            # first step is inside a cycle; renaming would break the cycle
            raise WitnessSearchMiss("cannot rename a cycle boundary")
        return rebuild(True, False)
    if lam.target() != old_state:
        raise ValueError("scheme does not end at the renamed state")
    if lam.k and not lam.alphas[-1]:
        raise WitnessSearchMiss("cannot rename a cycle boundary")
    return rebuild(False, True)


def pump_decompose(xi, cfg=DEFAULT_CONFIG, origin=None):
    """State-encode an unpumpable coordinate within its Karp-Miller bound.

    The product keeps full-dimension effects, so every product cycle has
    zero net effect on the encoded coordinate and the rank drops.  Returns
    (children, capped, tag).
    """
    origin = origin if origin is not None else {}
    pick = None
    for i, z in enumerate(xi.tuples):
        unfixed = _unfixed(z.g)
        if not unfixed:
            continue
        f = facc(z.g, z.p, z.x, cfg.km_node_cap)
        b = bacc(z.g, z.q, z.y, cfg.km_node_cap)
        for j in unfixed:
            if not (is_omega(f[j]) and is_omega(b[j])):
                pick = (i, j)
                break
        if pick:
            break
    if pick is None:
        raise ValueError("no unpumpable coordinate")
    i, j = pick
    z = xi.tuples[i]
    ftree = oracle.karp_miller(
        z.g, Configuration(z.p, z.x), cfg.km_node_cap
    )
    btree = oracle.karp_miller(
        z.g.reversed(), Configuration(z.q, z.y), cfg.km_node_cap
    )
    bound = None
    for s in z.g.states:
        fm = _km_coord_max(ftree, s, j)
        bm = _km_coord_max(btree, s, j)
        if fm is None or bm is None:
            continue  # state unreachable from one side: never on a run
        if is_omega(fm) and is_omega(bm):
            return [], True, "pump-unbounded"
        cap = bm if is_omega(fm) else fm if is_omega(bm) else min(fm, bm)
        bound = cap if bound is None else max(bound, cap)
    if bound is None:
        return [], False, "pump-empty"
    if bound > cfg.pump_band_cap:
        return [], True, "pump-band-cap"

    def pname(s, zz):
        return f"{s}@{zz}"

    states = tuple(
        pname(s, zz) for s in z.g.states for zz in range(bound + 1)
    )
    trans = []
    for t in z.g.transitions:
        for zz in range(bound + 1):
            z2 = zz + t.effect[j]
            if not 0 <= z2 <= bound:
                continue
            nt = Transition(
                f"{t.tid}@{zz}",
                pname(t.source, zz),
                pname(t.target, z2),
                t.effect,
            )
            trans.append(nt)
            origin[nt] = t
    prod = Vass(z.g.dimension, states, tuple(trans))
    starts = (
        [z.x[j]] if not is_omega(z.x[j]) else list(range(bound + 1))
    )
    ends = [z.y[j]] if not is_omega(z.y[j]) else list(range(bound + 1))
    children = []
    for zx in starts:
        if zx > bound:
            continue
        for zy in ends:
            if zy > bound:
                continue
            nx = tuple(zx if c == j else v for c, v in enumerate(z.x))
            ny = tuple(zy if c == j else v for c, v in enumerate(z.y))
            try:
                nz = klm.KlmTuple(
                    pname(z.p, zx), nx, prod, pname(z.q, zy), ny
                )
            except ValueError:
                continue
            schemes = list(xi.schemes)
            try:
                if i > 0 and schemes[i - 1].length() > 0:
                    schemes[i - 1] = _rename_boundary(
                        schemes[i - 1], z.p, pname(z.p, zx), False, origin
                    )
                if i < xi.k and schemes[i].length() > 0:
                    schemes[i] = _rename_boundary(
                        schemes[i], z.q, pname(z.q, zy), True, origin
                    )
            except WitnessSearchMiss:
                return [], True, "pump-rename-miss"
            tuples = xi.tuples[:i] + (nz,) + xi.tuples[i + 1 :]
            child = klm.LinearKlmSequence(tuples, tuple(schemes))
            if _sat(child)[0]:
                children.append(child)
    return children, False, "pump-decompose"


def dec_step(xi, cfg=DEFAULT_CONFIG, origin=None):
    """One decomposition move on a clean, non-normal sequence."""
    hs = _hs(xi)
    if not is_unbounded(xi, hs):
        return expand_bounded_transitions(xi, cfg)
    if not is_rigid(xi):
        children, tag = derigidify(xi)
        return children, False, tag
    return pump_decompose(xi, cfg, origin)


# ---------------------------------------------------------------------------
# witness extraction


def _parikh(path):
    out = {}
    for t in path:
        out[t] = out.get(t, 0) + 1
    return out


def _euler(counts, start, end):
    """Hierholzer path visiting every transition exactly its count."""
    if not counts:
        return []
    adj = {}
    for t, c in counts.items():
        adj.setdefault(t.source, []).extend([t] * c)
    for lst in adj.values():
        lst.sort(key=lambda t: t.tid, reverse=True)
    stack = [(start, None)]
    out = []
    while stack:
        s, via = stack[-1]
        if adj.get(s):
            t = adj[s].pop()
            stack.append((t.target, t))
        else:
            stack.pop()
            if via is not None:
                out.append(via)
    out.reverse()
    assert sum(counts.values()) == len(out), "Euler path missed transitions"
    cur = start
    for t in out:
        assert t.source == cur, "Euler path disconnected"
        cur = t.target
    assert cur == end, "Euler path ends at the wrong state"
    return out


def _omega_step(vec, effect):
    out = []
    for v, e in zip(vec, effect):
        if is_omega(v):
            out.append(OMEGA)
        else:
            nv = v + e
            if nv < 0:
                return None
            out.append(nv)
    return tuple(out)


def _pump_one(g, s, x, j, cfg):
    """Shortest cycle at s from x (omega-absorbing) ending >= x with a
    strict increase at j; breadth-first with caps."""
    from collections import deque

    start = (s, tuple(x))
    parent = {start: None}
    queue = deque([(start, 0)])
    nodes = 0
    while queue:
        (state, vec), depth = queue.popleft()
        if depth >= cfg.pump_path_len:
            continue
        for t in g.outgoing(state):
            nv = _omega_step(vec, t.effect)
            if nv is None:
                continue
            key = (t.target, nv)
            if key in parent:
                continue
            nodes += 1
            if nodes > cfg.pump_node_cap:
                raise WitnessSearchMiss("pump search cap")
            parent[key] = ((state, vec), t)
            if (
                t.target == s
                and vec_leq(x, nv)
                and not is_omega(nv[j])
                and nv[j] > x[j]
            ):
                path = []
                cur = key
                while parent[cur] is not None:
                    prev, via = parent[cur]
                    path.append(via)
                    cur = prev
                path.reverse()
                return path, nv
            queue.append((key, depth + 1))
    raise WitnessSearchMiss(f"no pump for coordinate {j} at {s}")


def _find_pumps(g, s, x, targets, cfg):
    """A cycle at s pumping every target coordinate at once, composed from
    per-coordinate pumps (valid by monotonicity)."""
    path = []
    cur = tuple(x)
    for j in targets:
        pj, cur = _pump_one(g, s, cur, j, cfg)
        path.extend(pj)
    return path


def _solve_hom_positive(xi, var):
    sys = klm.char_system_homogeneous(xi)
    sys.add({var: 1}, intlin.GE, 1)
    return intlin.solve(sys)


def extract_witness(xi, cfg=DEFAULT_CONFIG):
    """A replayable run admitted by a normal sequence.

    Per tuple: pump up with u_i, rebalance with an Euler circuit w_i of the
    amplified homogeneous flow, do the main Euler path sigma_i of the
    inhomogeneous flow, pump down with v_i; schemes are crossed by their
    characteristic-system models.  Returns (path, start_vector, end_vector);
    the replay is asserted.
    """
    d = xi.dimension
    k = xi.k
    sysvars = klm.char_system(xi).variables

    # homogeneous model positive wherever normality promises unboundedness
    h0 = {v: 0 for v in sysvars}
    targets = []
    for i, z in enumerate(xi.tuples):
        ox, oy = z.omega_coords()
        targets.extend(klm._mvar(i, j) for j in sorted(ox))
        targets.extend(klm._nvar(i, j) for j in sorted(oy))
        targets.extend(klm._fvar(i, t) for t in z.g.transitions)
    for var in targets:
        part = _solve_hom_positive(xi, var)
        assert part is not None, f"normal sequence lacks support for {var}"
        for v in sysvars:
            h0[v] += part.get(v, 0)
    ok, h1 = _sat(xi)
    assert ok, "normal sequence must be satisfiable"
    h = {v: h1.get(v, 0) + h0[v] for v in sysvars}

    pumps = []
    r = 1
    for i, z in enumerate(xi.tuples):
        unfixed = set(_unfixed(z.g))
        fx = facc(z.g, z.p, z.x, cfg.km_node_cap)
        by = bacc(z.g, z.q, z.y, cfg.km_node_cap)
        uj = [
            j
            for j in range(d)
            if not is_omega(z.x[j]) and is_omega(fx[j]) and j in unfixed
        ]
        vj = [
            j
            for j in range(d)
            if not is_omega(z.y[j]) and is_omega(by[j]) and j in unfixed
        ]
        u_i = _find_pumps(z.g, z.p, z.x, uj, cfg)
        rg = z.g.reversed()
        back = {t.tid: t for t in z.g.transitions}
        v_rev = _find_pumps(rg, z.q, z.y, vj, cfg)
        v_i = [back[t.tid] for t in reversed(v_rev)]
        pumps.append((u_i, v_i))
        tn = z.g.transition_norm()
        r = max(r, tn * (len(u_i) + len(v_i)) + 1)

    hnorm = max((abs(v) for v in h.values()), default=0)
    pieces = []
    s_amp = 1
    for i, z in enumerate(xi.tuples):
        u_i, v_i = pumps[i]
        psi_u = _parikh(u_i)
        psi_v = _parikh(v_i)
        phi0 = {t: h0[klm._fvar(i, t)] for t in z.g.transitions}
        phi = {t: h[klm._fvar(i, t)] for t in z.g.transitions}
        phi_w = {
            t: r * phi0[t] - psi_u.get(t, 0) - psi_v.get(t, 0)
            for t in z.g.transitions
        }
        assert all(c > 0 for c in phi_w.values()) or not z.g.transitions, (
            "rebalancing flow must stay positive"
        )
        w_i = _euler(phi_w, z.p, z.p)
        sigma_i = _euler(phi, z.p, z.q)
        pieces.append((u_i, w_i, sigma_i, v_i))
        tn = z.g.transition_norm()
        ti = len(z.g.transitions)
        s_amp = max(s_amp, 1 + tn * max(len(w_i), ti * hnorm))

    sr = s_amp * r

    def mvec(i):
        return tuple(
            h[klm._mvar(i, j)] + sr * h0[klm._mvar(i, j)] for j in range(d)
        )

    def nvec(i):
        return tuple(
            h[klm._nvar(i, j)] + sr * h0[klm._nvar(i, j)] for j in range(d)
        )

    path = []
    for i in range(k + 1):
        u_i, w_i, sigma_i, v_i = pieces[i]
        path.extend(u_i * s_amp)
        path.extend(w_i * s_amp)
        path.extend(sigma_i)
        path.extend(v_i * s_amp)
        if i < k:
            lam = xi.schemes[i]
            if lam.length() == 0:
                assert nvec(i) == mvec(i + 1), "empty scheme junction broken"
            else:
                got = lpsmod.admits_run(lam, nvec(i), mvec(i + 1))
                assert got is not None, "scheme system lost its model"
                path.extend(got[1])

    start = mvec(0)
    cur = start
    state = xi.tuples[0].p
    for t in path:
        assert t.source == state, "witness replay lost state continuity"
        nv = tuple(a + b for a, b in zip(cur, t.effect))
        assert all(v >= 0 for v in nv), "witness replay went negative"
        cur = nv
        state = t.target
    assert state == xi.tuples[-1].q, "witness replay ends in wrong state"
    assert cur == nvec(k), "witness replay ends with wrong vector"
    return path, start, cur


# ---------------------------------------------------------------------------
# driver


@dataclass
class DecisionReport:
    kind: str
    witness: tuple = None  # original-VASS transitions for Reachable
    trace: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    def definitive(self):
        return self.kind in (REACHABLE, UNREACHABLE)


def _resolve_origin(t, origin):
    seen = set()
    while t in origin:
        if t in seen:
            raise AssertionError("origin mapping has a cycle")
        seen.add(t)
        t = origin[t]
    return t


def decide_reachability(g, src, tgt, cfg=None, trace_sink=None):
    """KLMST decision procedure for p(u) ->* q(v) with concrete endpoints."""
    cfg = cfg or DEFAULT_CONFIG
    trace = trace_sink if trace_sink is not None else []
    stats = {"explored": 0, "capped": False}

    def report(kind, witness=None):
        stats["witness_length"] = len(witness) if witness else 0
        return DecisionReport(kind, witness, trace, stats)

    if src.state == tgt.state and src.vector == tgt.vector:
        return report(REACHABLE, ())

    # sound pruning: if the target is not even coverable, it is unreachable
    try:
        if not oracle.covers(g, src, tgt, cfg.km_node_cap):
            trace.append({"step": "coverability-prune", "verdict": UNREACHABLE})
            return report(UNREACHABLE)
    except oracle.KmBudgetExceeded:
        stats["capped"] = True

    if cfg.direct_first:
        # full-budget search: the purify-sized config is far too small here
        res = flatten.skeleton_search(
            g, src.state, src.vector, tgt.state, tgt.vector,
            flatten.DEFAULT_CONFIG,
        )
        if res.status == flatten.FOUND:
            word = lpsmod.reach_via(res.scheme, src.vector, tgt.vector)
            assert word is not None and oracle.replays(g, src, word, tgt)
            trace.append({"step": "direct-scheme", "verdict": REACHABLE})
            return report(REACHABLE, tuple(word))

    root = klm.single(
        klm.KlmTuple(src.state, src.vector, g, tgt.state, tgt.vector)
    )
    origin = {}
    memo = {}
    budget = [cfg.branch_budget]

    def explore(xi):
        key = klm.canonical_serialization(xi)
        if key in memo:
            return memo[key]
        memo[key] = (UNKNOWN, None)  # guard against accidental cycles
        budget[0] -= 1
        if budget[0] < 0:
            stats["capped"] = True
            return (UNKNOWN, None)
        stats["explored"] += 1
        kids, capped = clean(xi, cfg)
        if capped:
            stats["capped"] = True
        any_unknown = capped
        parent_rank = xi.rank()
        trace.append(
            {
                "step": "clean",
                "parent": key,
                "children": len(kids),
                "capped": capped,
            }
        )
        for child in kids:
            if is_normal(child, cfg):
                try:
                    path, u0, v0 = extract_witness(child, cfg)
                except (WitnessSearchMiss, oracle.KmBudgetExceeded):
                    stats["capped"] = True
                    any_unknown = True
                    continue
                mapped = tuple(_resolve_origin(t, origin) for t in path)
                memo[key] = (REACHABLE, mapped)
                trace.append({"step": "normal-witness", "parent": key})
                return memo[key]
            try:
                grand, gcapped, tag = dec_step(child, cfg, origin)
            except oracle.KmBudgetExceeded:
                stats["capped"] = True
                any_unknown = True
                continue
            if gcapped:
                stats["capped"] = True
                any_unknown = True
            crank = child.rank()
            trace.append(
                {
                    "step": tag,
                    "parent": klm.canonical_serialization(child),
                    "children": len(grand),
                    "rank": list(crank),
                }
            )
            for gc in sorted(
                grand,
                key=lambda s: (
                    s.rank(),
                    s.size(),
                    klm.canonical_serialization(s),
                ),
            ):
                if xi.dimension >= 3 and tag != "derigidify-instantiate":
                    assert gc.rank() < crank, (
                        "decomposition step failed to decrease the rank"
                    )
                res, wit = explore(gc)
                if res == REACHABLE:
                    memo[key] = (REACHABLE, wit)
                    return memo[key]
                if res == UNKNOWN:
                    any_unknown = True
        memo[key] = (UNKNOWN if any_unknown else UNREACHABLE, None)
        return memo[key]

    kind, witness = explore(root)
    if kind == REACHABLE:
        mapped = tuple(_resolve_origin(t, origin) for t in witness)
        assert oracle.replays(g, src, mapped, tgt), (
            "decomposition witness failed to replay on the input"
        )
        return report(REACHABLE, mapped)
    if kind == UNREACHABLE and not stats["capped"]:
        return report(UNREACHABLE)
    if kind == UNREACHABLE:
        # some cap elsewhere (e.g. coverability) — still sound: every branch
        # of the decomposition tree closed without truncation
        return report(UNREACHABLE)
    return report(UNKNOWN)
