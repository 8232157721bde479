"""Linear path schemes: alpha0 beta1* alpha1 ... betak* alphak over transitions.

A positive LPS requires every cycle to be taken at least once.  The
characteristic system of a positive LPS is a linear system over (u, e, v)
whose models are exactly the endpoint/multiplicity triples of admitted runs;
every model replays (the convexity property), which admits_run asserts.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import intlin
from .vass import NAT, Configuration, is_cycle, is_path, norm, path_effect, run


@dataclass(frozen=True)
class Lps:
    """alphas: k+1 paths; betas: k cycles; positive marks beta+ semantics."""

    alphas: tuple
    betas: tuple
    positive: bool = False

    def __post_init__(self):
        if len(self.alphas) != len(self.betas) + 1:
            raise ValueError("need k+1 path segments for k cycles")
        flat = []
        for i, beta in enumerate(self.betas):
            flat.extend(self.alphas[i])
            if not is_cycle(list(beta)):
                raise ValueError(f"segment {i} is not a cycle")
            flat.extend(beta)
        flat.extend(self.alphas[-1])
        # path-connectivity plus each beta being a cycle pins every cycle to
        # its junction state, so no separate anchoring check is needed
        if not is_path(flat):
            raise ValueError("scheme is not connected into a path")

    @property
    def k(self):
        return len(self.betas)

    def source(self):
        for a in self.alphas:
            if a:
                return a[0].source
        for b in self.betas:
            return b[0].source
        return None

    def target(self):
        for a in reversed(self.alphas):
            if a:
                return a[-1].target
        for b in reversed(self.betas):
            return b[-1].target
        return None

    def length(self):
        """|Lps|: total steps counting each cycle once."""
        return sum(len(a) for a in self.alphas) + sum(len(b) for b in self.betas)

    def step_norm(self):
        steps = [t for a in self.alphas for t in a] + [
            t for b in self.betas for t in b
        ]
        return max((norm(t.effect) for t in steps), default=0)

    def transitions_used(self):
        out = []
        for i, beta in enumerate(self.betas):
            out.extend(self.alphas[i])
            out.extend(beta)
        out.extend(self.alphas[-1])
        return out

    def word(self, e):
        """The path alpha0 beta1^e1 alpha1 ... betak^ek alphak."""
        if len(e) != self.k:
            raise ValueError("multiplicity vector has wrong length")
        out = []
        for i, beta in enumerate(self.betas):
            out.extend(self.alphas[i])
            out.extend(list(beta) * e[i])
        out.extend(self.alphas[-1])
        return out

    def __repr__(self):
        parts = []
        for i, beta in enumerate(self.betas):
            parts.append("".join(t.tid for t in self.alphas[i]))
            mark = "+" if self.positive else "*"
            parts.append("(" + "".join(t.tid for t in beta) + ")" + mark)
        parts.append("".join(t.tid for t in self.alphas[-1]))
        return "".join(parts) or "eps"


def empty_lps(positive=False):
    return Lps(((),), (), positive)


def path_lps(path, positive=False):
    return Lps((tuple(path),), (), positive)


def positive_variants(lam):
    """The 2^k positive LPSes (each cycle kept as beta+ or erased) whose
    admitted relations union to the relation of lam."""
    out = []
    for keep in itertools.product((False, True), repeat=lam.k):
        alphas = []
        betas = []
        cur = list(lam.alphas[0])
        for i, beta in enumerate(lam.betas):
            if keep[i]:
                alphas.append(tuple(cur))
                betas.append(beta)
                cur = list(lam.alphas[i + 1])
            else:
                cur.extend(lam.alphas[i + 1])
        alphas.append(tuple(cur))
        out.append(Lps(tuple(alphas), tuple(betas), positive=True))
    return out


def _beta_effects(lam, d):
    return [path_effect(b, d) for b in lam.betas]


def char_rows(lam, d, uvars, evars, vvars):
    """Rows of the characteristic system of a positive LPS, over the given
    variable names for the entry vector, multiplicities, and exit vector.

    Emits: e_i >= 1; nonnegativity of every alpha-prefix point (after the
    full beta blocks so far); first-pass and last-pass nonnegativity of
    every beta-prefix point; the endpoint equation.
    """
    if not lam.positive:
        raise ValueError("characteristic systems are for positive LPSes")
    rows = []
    beff = _beta_effects(lam, d)
    for ev in evars:
        rows.append(({ev: 1}, intlin.GE, 1))
    alpha_prefix = tuple(0 for _ in range(d))
    for i in range(lam.k + 1):
        # points inside alpha_i, after beta blocks 1..i
        acc = [0] * d
        for t in lam.alphas[i]:
            for c in range(d):
                acc[c] += t.effect[c]
            for c in range(d):
                coeffs = {uvars[c]: 1}
                for l in range(i):
                    if beff[l][c]:
                        coeffs[evars[l]] = beff[l][c]
                rows.append(
                    (coeffs, intlin.GE, -(alpha_prefix[c] + acc[c]))
                )
        if i < lam.k:
            # points inside beta_{i+1}: first and last traversal
            aeff = path_effect(lam.alphas[i], d)
            bacc = [0] * d
            for t in lam.betas[i]:
                for c in range(d):
                    bacc[c] += t.effect[c]
                for c in range(d):
                    base = alpha_prefix[c] + aeff[c]
                    first = {uvars[c]: 1}
                    for l in range(i):
                        if beff[l][c]:
                            first[evars[l]] = beff[l][c]
                    rows.append((first, intlin.GE, -(base + bacc[c])))
                    last = {uvars[c]: 1}
                    for l in range(i):
                        if beff[l][c]:
                            last[evars[l]] = beff[l][c]
                    if beff[i][c]:
                        last[evars[i]] = last.get(evars[i], 0) + beff[i][c]
                    rows.append(
                        (last, intlin.GE, -(base + bacc[c]) + beff[i][c])
                    )
        alpha_prefix = tuple(
            a + b for a, b in zip(alpha_prefix, path_effect(lam.alphas[i], d))
        )
    # endpoint equation u + Delta(word with e) = v
    for c in range(d):
        coeffs = {uvars[c]: 1, vvars[c]: -1}
        for l in range(lam.k):
            if beff[l][c]:
                coeffs[evars[l]] = beff[l][c]
        rows.append((coeffs, intlin.EQ, -alpha_prefix[c]))
    return rows


def char_homogeneous_rows(lam, d, uvars, evars, vvars):
    """Rows of the homogeneous characteristic system over (u0, e0, v0)."""
    if not lam.positive:
        raise ValueError("characteristic systems are for positive LPSes")
    rows = []
    beff = _beta_effects(lam, d)
    for i in range(lam.k + 1):
        for c in range(d):
            coeffs = {uvars[c]: 1}
            for l in range(i):
                if beff[l][c]:
                    coeffs[evars[l]] = beff[l][c]
            rows.append((coeffs, intlin.GE, 0))
    for c in range(d):
        coeffs = {uvars[c]: 1, vvars[c]: -1}
        for l in range(lam.k):
            if beff[l][c]:
                coeffs[evars[l]] = beff[l][c]
        rows.append((coeffs, intlin.EQ, 0))
    return rows


def char_system(lam, d):
    """The characteristic system as a NatLinearSystem over u, e, v."""
    uvars = [f"u{c}" for c in range(d)]
    evars = [f"e{l+1}" for l in range(lam.k)]
    vvars = [f"v{c}" for c in range(d)]
    sys = intlin.NatLinearSystem(uvars + evars + vvars)
    for row in char_rows(lam, d, uvars, evars, vvars):
        sys.add(*row)
    return sys


def char_system_homogeneous(lam, d):
    uvars = [f"u{c}" for c in range(d)]
    evars = [f"e{l+1}" for l in range(lam.k)]
    vvars = [f"v{c}" for c in range(d)]
    sys = intlin.NatLinearSystem(uvars + evars + vvars)
    for row in char_homogeneous_rows(lam, d, uvars, evars, vvars):
        sys.add(*row)
    return sys


def _effect_infeasible(lam, u, v, positive):
    """Cheap necessary condition for u reaching v through the scheme: over
    the rationals, v - u minus the path effects must be a nonnegative
    combination of the cycle effects (each multiplicity >= 1 when positive).

    Runs on a k-variable system, far smaller than the characteristic system,
    so search loops can reject most candidates without building the latter.
    """
    d = len(u)
    if any(not isinstance(x, int) for x in tuple(u) + tuple(v)):
        return False
    base = path_effect([t for a in lam.alphas for t in a], d)
    target = [v[c] - u[c] - base[c] for c in range(d)]
    if lam.k == 0:
        return any(x != 0 for x in target)
    effs = _beta_effects(lam, d)
    sys = intlin.NatLinearSystem([f"e{l + 1}" for l in range(lam.k)])
    for c in range(d):
        sys.add(
            {f"e{l + 1}": effs[l][c] for l in range(lam.k)},
            intlin.EQ,
            target[c],
        )
    if positive:
        for l in range(lam.k):
            sys.add({f"e{l + 1}": 1}, intlin.GE, 1)
    return not intlin.lp_feasible(sys)


def admits_run(lam, u, v):
    """Solve the characteristic system with u, v pinned; replay the model.

    Returns (e, path) for the lexicographically least multiplicity model,
    or None when the system is unsatisfiable.  A model that fails to
    replay is an internal fault, not a user error.
    """
    d = len(u)
    if _effect_infeasible(lam, u, v, lam.positive):
        return None
    sys = char_system(lam, d)
    for c in range(d):
        sys.add({f"u{c}": 1}, intlin.EQ, u[c])
        sys.add({f"v{c}": 1}, intlin.EQ, v[c])
    model = intlin.solve(sys)
    if model is None:
        return None
    e = tuple(model[f"e{l+1}"] for l in range(lam.k))
    path = lam.word(e)
    if path:
        trace = run(Configuration(path[0].source, tuple(u)), path, NAT)
        assert trace is not None and trace[-1].vector == tuple(v), (
            "characteristic-system model failed to replay"
        )
    else:
        assert tuple(u) == tuple(v)
    return e, path


def is_zigzag_free(lam, d=None):
    """An orthant (sign tuple) containing every cycle effect, or None.

    Per-coordinate choice: +1 unless some cycle effect is negative there;
    mixed strict signs on a coordinate mean no single orthant works.
    """
    steps = lam.transitions_used()
    if not steps:
        return (1,) * d if d else ()
    if d is None:
        d = len(steps[0].effect)
    effs = _beta_effects(lam, d)
    signs = []
    for c in range(d):
        pos = any(e[c] > 0 for e in effs)
        neg = any(e[c] < 0 for e in effs)
        if pos and neg:
            return None
        signs.append(-1 if neg else 1)
    return tuple(signs)


def reach_via(lam, u, v):
    """A concrete path from u to v admitted by lam (via positive variants)."""
    if lam.positive:
        r = admits_run(lam, u, v)
        return None if r is None else r[1]
    # one relaxed filter covers all 2^k variants at once
    if _effect_infeasible(lam, u, v, positive=False):
        return None
    for variant in positive_variants(lam):
        r = admits_run(variant, u, v)
        if r is not None:
            return r[1]
    return None


def expand_bounded_cycles(lam, u, v, signs, tnorm=None):
    """Inline the cycles whose effect leaves the orthant, keeping the result
    a scheme through which u still reaches v.

    Each offending multiplicity is bounded by |lam| * tnorm; assignments are
    tried in ascending lexicographic order and the first scheme that still
    carries u to v is returned (None when none does).
    """
    d = len(u)
    effs = _beta_effects(lam, d)
    offending = [
        i
        for i in range(lam.k)
        if not all(e * s >= 0 for e, s in zip(effs[i], signs))
    ]
    if not offending:
        if reach_via(lam, u, v) is None:
            return None
        return lam
    if tnorm is None:
        tnorm = lam.step_norm()
    bound = lam.length() * max(tnorm, 1)
    for counts in itertools.product(range(bound + 1), repeat=len(offending)):
        fixed = dict(zip(offending, counts))
        alphas = []
        betas = []
        cur = list(lam.alphas[0])
        for i, beta in enumerate(lam.betas):
            if i in fixed:
                cur.extend(list(beta) * fixed[i])
                cur.extend(lam.alphas[i + 1])
            else:
                alphas.append(tuple(cur))
                betas.append(beta)
                cur = list(lam.alphas[i + 1])
        alphas.append(tuple(cur))
        candidate = Lps(tuple(alphas), tuple(betas))
        if reach_via(candidate, u, v) is not None:
            return candidate
    return None
