"""KLM tuples and linear KLM sequences with their characteristic systems.

A KLM tuple is p(x) G q(y) with x, y over N extended by omega; a linear KLM
sequence interleaves tuples with positive linear path schemes.  The
characteristic system ties per-tuple flow models (m_i, phi_i, n_i) and
per-scheme multiplicities e_i together; its satisfiability is the first
cleanliness predicate, and its homogeneous variant drives boundedness
analysis.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import cycles as cyc
from . import hierarchy, intlin
from . import lps as lpsmod
from .vass import (
    NAT,
    Configuration,
    is_omega,
    norm,
    run,
    vass_size,
)


def _compat(vec, spec):
    """value vector refines the (possibly omega) specification vector."""
    return all(is_omega(s) or a == s for a, s in zip(vec, spec))


@dataclass(frozen=True)
class KlmTuple:
    p: str
    x: tuple  # entry vector over N + omega
    g: object  # Vass
    q: str
    y: tuple

    def __post_init__(self):
        if self.p not in self.g.states or self.q not in self.g.states:
            raise ValueError("endpoints must be states of the VASS")
        if len(self.x) != self.g.dimension or len(self.y) != self.g.dimension:
            raise ValueError("endpoint vectors must match the dimension")

    @property
    def dimension(self):
        return self.g.dimension

    def is_trivial(self):
        return (
            self.p == self.q
            and self.x == self.y
            and len(self.g.states) == 1
            and not self.g.transitions
        )

    def size(self):
        d = self.g.dimension
        return vass_size(self.g) + d * (norm(self.x) + norm(self.y) + 1)

    def omega_coords(self):
        return (
            frozenset(j for j, a in enumerate(self.x) if is_omega(a)),
            frozenset(j for j, a in enumerate(self.y) if is_omega(a)),
        )


def trivial_tuple(p, x, d=None):
    from .vass import Vass

    d = d if d is not None else len(x)
    return KlmTuple(p, tuple(x), Vass(d, (p,), ()), p, tuple(x))


@dataclass(frozen=True)
class LinearKlmSequence:
    tuples: tuple  # k+1 KlmTuples
    schemes: tuple  # k positive LPSes; schemes[i] runs q_i -> p_{i+1}

    def __post_init__(self):
        if len(self.tuples) != len(self.schemes) + 1:
            raise ValueError("need k+1 tuples for k schemes")
        d = self.tuples[0].dimension
        for z in self.tuples:
            if z.dimension != d:
                raise ValueError("mixed dimensions")
        for i, lam in enumerate(self.schemes):
            if not lam.positive:
                raise ValueError("interleaved schemes must be positive")
            src, tgt = lam.source(), lam.target()
            # an empty scheme leaves the junction to the vector constraints
            # (decomposition steps may rename states on one side)
            if src is not None and (
                src != self.tuples[i].q or tgt != self.tuples[i + 1].p
            ):
                raise ValueError("scheme endpoints must chain the tuples")

    @property
    def k(self):
        return len(self.schemes)

    @property
    def dimension(self):
        return self.tuples[0].dimension

    def size(self):
        d = self.dimension
        total = sum(z.size() for z in self.tuples)
        for lam in self.schemes:
            total += d * lam.length() * (lam.step_norm() + 1)
        return total

    def rank(self):
        d = self.dimension
        out = tuple(0 for _ in range(max(0, d - 2)))
        for z in self.tuples:
            out = tuple(a + b for a, b in zip(out, cyc.rank(z.g)))
        return out

    def rank_full(self):
        d = self.dimension
        out = tuple(0 for _ in range(d + 1))
        for z in self.tuples:
            out = tuple(a + b for a, b in zip(out, cyc.rank_full(z.g)))
        return out


def single(tup):
    return LinearKlmSequence((tup,), ())


def klm_size(xi):
    return xi.size()


def ordinal_rank(xi):
    """w^{d-3}*r_d + ... + r_3; defined only for dimension >= 3."""
    if xi.dimension < 3:
        raise ValueError("ordinal rank is defined for dimension >= 3")
    return hierarchy.OrdinalCNF(xi.rank())


def canonical_serialization(xi):
    parts = []
    for i, z in enumerate(xi.tuples):
        trans = ";".join(
            f"{t.tid}:{t.source}>{t.target}:{','.join(map(str, t.effect))}"
            for t in z.g.transitions
        )
        parts.append(
            f"T{i}[{z.p}({','.join(map(str, z.x))})|{'/'.join(z.g.states)}|"
            f"{trans}|{z.q}({','.join(map(str, z.y))})]"
        )
        if i < xi.k:
            parts.append(f"L{i + 1}[{xi.schemes[i]!r}]")
    return "".join(parts)


def _mvar(i, j):
    return f"m{i}[{j}]"


def _fvar(i, t):
    return f"f{i}[{t.tid}]"


def _nvar(i, j):
    return f"n{i}[{j}]"


def _evar(i, l):
    return f"e{i}[{l}]"


def kirchhoff_rows(g, p, q, fvars, homogeneous=False):
    """Flow balance per state: 1_q - 1_p = sum phi(t) (1_target - 1_source)."""
    rows = []
    for s in g.states:
        coeffs = {}
        for t in g.transitions:
            c = (1 if t.target == s else 0) - (1 if t.source == s else 0)
            if c:
                coeffs[fvars[t]] = coeffs.get(fvars[t], 0) + c
        rhs = 0
        if not homogeneous:
            rhs = (1 if s == q else 0) - (1 if s == p else 0)
        rows.append((coeffs, intlin.EQ, rhs))
    return rows


def kirchhoff_system(g, p, q):
    fvars = {t: t.tid for t in g.transitions}
    sys = intlin.NatLinearSystem([t.tid for t in g.transitions])
    for row in kirchhoff_rows(g, p, q, fvars):
        sys.add(*row)
    return sys


def kirchhoff_homogeneous(g, p, q):
    fvars = {t: t.tid for t in g.transitions}
    sys = intlin.NatLinearSystem([t.tid for t in g.transitions])
    for row in kirchhoff_rows(g, p, q, fvars, homogeneous=True):
        sys.add(*row)
    return sys


def _variables(xi):
    d = xi.dimension
    names = []
    for i, z in enumerate(xi.tuples):
        names.extend(_mvar(i, j) for j in range(d))
        names.extend(_fvar(i, t) for t in z.g.transitions)
        names.extend(_nvar(i, j) for j in range(d))
        if i < xi.k:
            names.extend(_evar(i + 1, l + 1) for l in range(xi.schemes[i].k))
    return names


def char_system(xi):
    """The characteristic system over m_i, f_i, n_i, e_i."""
    d = xi.dimension
    sys = intlin.NatLinearSystem(_variables(xi))
    for i, z in enumerate(xi.tuples):
        fvars = {t: _fvar(i, t) for t in z.g.transitions}
        for j in range(d):
            if not is_omega(z.x[j]):
                sys.add({_mvar(i, j): 1}, intlin.EQ, z.x[j])
            if not is_omega(z.y[j]):
                sys.add({_nvar(i, j): 1}, intlin.EQ, z.y[j])
        for row in kirchhoff_rows(z.g, z.p, z.q, fvars):
            sys.add(*row)
        for j in range(d):
            coeffs = {_nvar(i, j): 1, _mvar(i, j): -1}
            for t in z.g.transitions:
                if t.effect[j]:
                    v = fvars[t]
                    coeffs[v] = coeffs.get(v, 0) - t.effect[j]
            sys.add(coeffs, intlin.EQ, 0)
    for i, lam in enumerate(xi.schemes):
        uvars = [_nvar(i, j) for j in range(d)]
        vvars = [_mvar(i + 1, j) for j in range(d)]
        evars = [_evar(i + 1, l + 1) for l in range(lam.k)]
        for row in lpsmod.char_rows(lam, d, uvars, evars, vvars):
            sys.add(*row)
    return sys


def char_system_homogeneous(xi):
    """Homogeneous variant: zero at non-omega coordinates, homogeneous
    Kirchhoff and scheme systems."""
    d = xi.dimension
    sys = intlin.NatLinearSystem(_variables(xi))
    for i, z in enumerate(xi.tuples):
        fvars = {t: _fvar(i, t) for t in z.g.transitions}
        for j in range(d):
            if not is_omega(z.x[j]):
                sys.add({_mvar(i, j): 1}, intlin.EQ, 0)
            if not is_omega(z.y[j]):
                sys.add({_nvar(i, j): 1}, intlin.EQ, 0)
        for row in kirchhoff_rows(z.g, z.p, z.q, fvars, homogeneous=True):
            sys.add(*row)
        for j in range(d):
            coeffs = {_nvar(i, j): 1, _mvar(i, j): -1}
            for t in z.g.transitions:
                if t.effect[j]:
                    v = fvars[t]
                    coeffs[v] = coeffs.get(v, 0) - t.effect[j]
            sys.add(coeffs, intlin.EQ, 0)
    for i, lam in enumerate(xi.schemes):
        uvars = [_nvar(i, j) for j in range(d)]
        vvars = [_mvar(i + 1, j) for j in range(d)]
        evars = [_evar(i + 1, l + 1) for l in range(lam.k)]
        for row in lpsmod.char_homogeneous_rows(lam, d, uvars, evars, vvars):
            sys.add(*row)
    return sys


def is_satisfiable(xi):
    """(satisfiable?, canonical lexicographically-least model or None)."""
    model = intlin.solve(char_system(xi))
    return model is not None, model


def _word_ends(lam, path, start):
    """End positions where a positive word of lam completes from start."""
    ends = set()
    k = lam.k

    def match_fixed(seq, pos):
        for t in seq:
            if pos >= len(path) or path[pos] != t:
                return None
            pos += 1
        return pos

    def seg(i, pos):
        # alpha_i then (if i < k) beta_{i+1} at least once
        pos = match_fixed(lam.alphas[i], pos)
        if pos is None:
            return
        if i == k:
            ends.add(pos)
            return
        reps = 0
        while True:
            nxt = match_fixed(lam.betas[i], pos)
            if nxt is None:
                break
            pos = nxt
            reps += 1
            seg(i + 1, pos)

    seg(0, start)
    return sorted(ends)


def admits(xi, path, u):
    """Does the path, run from u, decompose as pi_0 rho_1 ... rho_k pi_k?

    Each pi_i must stay inside G_i from p_i to q_i with junction values
    refining x_i / y_i; each rho_i must be a positive word of scheme i.
    Decided by dynamic programming over split points after a NAT replay.
    """
    path = tuple(path)
    u = tuple(u)
    start = Configuration(xi.tuples[0].p, u)
    trace = run(start, list(path), NAT)
    if trace is None:
        return False
    states = [start.state] + [t.target for t in path]
    values = [c.vector for c in trace]

    memo = {}

    def ok(i, pos):
        key = (i, pos)
        if key in memo:
            return memo[key]
        z = xi.tuples[i]
        tset = set(z.g.transitions)
        result = False
        if states[pos] == z.p and _compat(values[pos], z.x):
            end = pos
            while True:
                if states[end] == z.q and _compat(values[end], z.y):
                    if i == xi.k:
                        if end == len(path):
                            result = True
                    else:
                        for nxt in _word_ends(xi.schemes[i], path, end):
                            if ok(i + 1, nxt):
                                result = True
                                break
                if result or end >= len(path) or path[end] not in tset:
                    break
                end += 1
        memo[key] = result
        return result

    return ok(0, 0)
