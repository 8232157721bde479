"""Satisfiability of linear systems over nonnegative integer unknowns.

The decision procedure is bounded branch-and-bound with exact rational
relaxation pruning (two-phase simplex over fractions.Fraction, Bland's rule).
Termination is guaranteed by the minimal-solution norm bound on systems
Ax <= b over N^n; the returned model is lexicographically least in the
declared unknown order, so all downstream witnesses are reproducible.
"""

from __future__ import annotations

from fractions import Fraction
import math

LE = "<="
GE = ">="
EQ = "="


class NatLinearSystem:
    """Equalities/inequalities with integer coefficients over named unknowns.

    All unknowns are implicitly >= 0.  Rows are (coeffs: dict, rel, rhs).
    """

    def __init__(self, variables):
        self.variables = list(variables)
        self._index = {v: i for i, v in enumerate(self.variables)}
        self.rows = []

    def add(self, coeffs, rel, rhs):
        if rel not in (LE, GE, EQ):
            raise ValueError(f"bad relation {rel!r}")
        for v in coeffs:
            if v not in self._index:
                raise ValueError(f"unknown variable {v!r}")
        coeffs = {v: int(c) for v, c in coeffs.items() if c != 0}
        self.rows.append((coeffs, rel, int(rhs)))

    def is_homogeneous(self):
        return all(rhs == 0 for _, _, rhs in self.rows)

    def ineq_shape(self):
        """(n, m, normA, normB) with every row counted as Ax <= b rows."""
        n = len(self.variables)
        m = 0
        norm_a = 0
        norm_b = 0
        for coeffs, rel, rhs in self.rows:
            m += 2 if rel == EQ else 1
            for c in coeffs.values():
                norm_a = max(norm_a, abs(c))
            norm_b = max(norm_b, abs(rhs))
        return n, m, norm_a, norm_b

    def check(self, model):
        """Does the (complete, nonnegative integer) model satisfy every row?"""
        for v in self.variables:
            if model.get(v, 0) < 0:
                return False
        for coeffs, rel, rhs in self.rows:
            lhs = sum(c * model.get(v, 0) for v, c in coeffs.items())
            if rel == LE and not lhs <= rhs:
                return False
            if rel == GE and not lhs >= rhs:
                return False
            if rel == EQ and lhs != rhs:
                return False
        return True


def pottier_bound(system, homogeneous=False):
    """Norm bound on a minimal solution of the system, seen as Ax <= b.

    General systems: ((n+m+1)*normA + normB + 1)^m.  With homogeneous=True
    the bound ((n+m)*normA + 1)^m on the homogeneous summands is returned.
    """
    n, m, norm_a, norm_b = system.ineq_shape()
    if homogeneous:
        return ((n + m) * norm_a + 1) ** m
    return ((n + m + 1) * norm_a + norm_b + 1) ** m


# ---------------------------------------------------------------------------
# Exact two-phase simplex.
# ---------------------------------------------------------------------------


class _Simplex:
    """Minimize c.x subject to rows (a, rel, b), x >= 0, exact arithmetic.

    The tableau is kept sparse (dict column -> nonzero Fraction per row);
    the systems solved here are flow systems where each unknown touches
    only a few rows.
    """

    def __init__(self, nvars, rows):
        self.n = nvars
        self.rows = rows

    def _build(self):
        # Convert to equalities with slack/surplus columns, rhs >= 0.
        tab = []
        rhs = []
        specs = []
        for coeffs, rel, b in self.rows:
            a = {i: Fraction(c) for i, c in coeffs.items() if c}
            b = Fraction(b)
            if rel == EQ:
                s = 0
            elif rel == LE:
                s = 1
            else:
                s = -1
            if b < 0:
                a = {i: -x for i, x in a.items()}
                b = -b
                s = -s
            specs.append((a, b, s))
        si = self.n
        basis = []
        for a, b, s in specs:
            row = dict(a)
            if s != 0:
                row[si] = Fraction(s)
                col = si
                si += 1
            if s == 1:
                basis.append(col)
            else:
                basis.append(None)
            tab.append(row)
            rhs.append(b)
        # artificial basic columns for rows without one
        art_cols = []
        for i, bcol in enumerate(basis):
            if bcol is None:
                tab[i][si] = Fraction(1)
                basis[i] = si
                art_cols.append(si)
                si += 1
        self.tab = tab
        self.rhs = rhs
        self.basis = basis
        self.ncols = si
        self.art = set(art_cols)

    def _pivot(self, pr, pc):
        tab, rhs = self.tab, self.rhs
        prow = tab[pr]
        f = prow[pc]
        if f != 1:
            prow = {j: x / f for j, x in prow.items()}
            tab[pr] = prow
            rhs[pr] /= f
        for r in range(len(tab)):
            if r == pr:
                continue
            g = tab[r].get(pc)
            if not g:
                continue
            tr = tab[r]
            for j, y in prow.items():
                nv = tr.get(j, 0) - g * y
                if nv:
                    tr[j] = nv
                else:
                    tr.pop(j, None)
            rhs[r] -= g * rhs[pr]
        self.basis[pr] = pc

    def _value(self, costs):
        return sum(
            costs[b] * self.rhs[i]
            for i, b in enumerate(self.basis)
            if costs[b]
        )

    def _optimize(self, costs, allowed):
        """Bland-rule simplex; returns 'optimal' or 'unbounded'."""
        order = sorted(allowed)
        while True:
            # reduced costs for every column in one pass over the tableau
            red = list(costs)
            for i, b in enumerate(self.basis):
                cb = costs[b]
                if cb:
                    for j, t in self.tab[i].items():
                        red[j] -= cb * t
            pc = next((j for j in order if red[j] < 0), None)
            if pc is None:
                return "optimal"
            pr = None
            best = None
            for i in range(len(self.tab)):
                a = self.tab[i].get(pc)
                if a and a > 0:
                    ratio = self.rhs[i] / a
                    if best is None or ratio < best or (
                        ratio == best and self.basis[i] < self.basis[pr]
                    ):
                        best = ratio
                        pr = i
            if pr is None:
                return "unbounded"
            self._pivot(pr, pc)

    def solve(self, objective=None):
        """Returns (status, value, point) minimizing objective (dict i->coef).

        status in {'infeasible', 'unbounded', 'optimal'}; point maps
        structural variable index -> Fraction.
        """
        self._build()
        if not self.tab:
            if objective:
                # no constraints: min over x >= 0
                if any(Fraction(c) < 0 for c in objective.values()):
                    return "unbounded", None, None
            return "optimal", Fraction(0), {}
        phase1 = [Fraction(0)] * self.ncols
        for j in self.art:
            phase1[j] = Fraction(1)
        allowed = set(range(self.ncols))
        self._optimize(phase1, allowed)
        if self._value(phase1) != 0:
            return "infeasible", None, None
        # drive artificials out of the basis / drop redundant rows
        drop = []
        for i in range(len(self.tab)):
            if self.basis[i] in self.art:
                pc = next(
                    (
                        j
                        for j in sorted(self.tab[i])
                        if j not in self.art and self.tab[i][j] != 0
                    ),
                    None,
                )
                if pc is None:
                    drop.append(i)
                else:
                    self._pivot(i, pc)
        for i in reversed(drop):
            del self.tab[i]
            del self.rhs[i]
            del self.basis[i]
        allowed = set(j for j in range(self.ncols) if j not in self.art)
        costs = [Fraction(0)] * self.ncols
        if objective:
            for i, c in objective.items():
                costs[i] = Fraction(c)
        status = self._optimize(costs, allowed)
        if status == "unbounded":
            return "unbounded", None, None
        val = self._value(costs)
        point = {i: Fraction(0) for i in range(self.n)}
        for i, b in enumerate(self.basis):
            if b < self.n:
                point[b] = self.rhs[i]
        return "optimal", val, point


def _frac_rows(system, fixed=None):
    """System rows over variable *indices*, with a prefix substituted out.

    fixed maps variable index -> value; remaining indices are kept as-is.
    """
    fixed = fixed or {}
    out = []
    for coeffs, rel, rhs in system.rows:
        row = {}
        b = Fraction(rhs)
        for v, c in coeffs.items():
            i = system._index[v]
            if i in fixed:
                b -= c * fixed[i]
            else:
                row[i] = row.get(i, 0) + c
        out.append((row, rel, b))
    return out


def _lp(system, fixed, objective):
    rows = _frac_rows(system, fixed)
    # drop the substituted columns; the simplex only sees live unknowns
    keep = [i for i in range(len(system.variables)) if i not in fixed]
    remap = {i: k for k, i in enumerate(keep)}
    rows = [
        ({remap[i]: c for i, c in row.items()}, rel, b)
        for row, rel, b in rows
    ]
    base = Fraction(0)
    obj = None
    if objective:
        obj = {}
        for i, c in objective.items():
            if i in fixed:
                base += Fraction(c) * fixed[i]
            else:
                obj[remap[i]] = c
    status, val, point = _Simplex(len(keep), rows).solve(obj)
    if status != "optimal":
        return status, None, None
    point = {keep[i]: v for i, v in point.items()}
    return status, val + base, point


def lp_feasible(system, fixed=None):
    status, _, _ = _lp(system, fixed or {}, None)
    return status != "infeasible"


def lp_extremum(system, var_index, sense, fixed=None):
    """('optimal', Fraction) | ('unbounded', None) | ('infeasible', None)."""
    sign = 1 if sense == "min" else -1
    status, val, _ = _lp(system, fixed or {}, {var_index: Fraction(sign)})
    if status != "optimal":
        return status, None
    return "optimal", sign * val


def _sub_pottier_cap(system, fixed):
    """Minimal-solution bound for the system with a prefix substituted in."""
    rows = _frac_rows(system, fixed)
    n = len(system.variables) - len(fixed)
    m = 0
    norm_a = 0
    norm_b = 0
    for coeffs, rel, rhs in rows:
        m += 2 if rel == EQ else 1
        for c in coeffs.values():
            norm_a = max(norm_a, abs(int(c)))
        norm_b = max(norm_b, abs(math.ceil(rhs)) if rhs >= 0 else abs(math.floor(rhs)))
    return ((n + m + 1) * norm_a + norm_b + 1) ** m


def _forced_values(system):
    """Variable index -> value forced by iterated singleton-equality
    propagation; None when propagation derives a contradiction (negative or
    fractional forced value, or an exhausted equality with nonzero rest)."""
    pinned = {}
    changed = True
    while changed:
        changed = False
        for coeffs, rel, rhs in system.rows:
            if rel != EQ:
                continue
            b = Fraction(rhs)
            free = []
            for v, c in coeffs.items():
                i = system._index[v]
                if i in pinned:
                    b -= c * pinned[i]
                else:
                    free.append((i, c))
            if len(free) == 1:
                i, c = free[0]
                val = b / c
                if val < 0 or val.denominator != 1:
                    return None
                pinned[i] = val
                changed = True
            elif not free and b != 0:
                return None
    return pinned


def _equality_rows(system):
    """All equality rows, including ones implied by opposite inequality
    pairs (a.x <= b together with -a.x <= -b), as (coeffs, rhs) pairs."""
    eqs = []
    les = []
    for coeffs, rel, rhs in system.rows:
        if rel == EQ:
            eqs.append((coeffs, rhs))
        elif rel == LE:
            les.append((coeffs, rhs))
        else:
            les.append(({v: -c for v, c in coeffs.items()}, -rhs))
    seen = {
        (tuple(sorted(c.items())), b) for c, b in les
    }
    for coeffs, rhs in les:
        neg = (tuple(sorted((v, -c) for v, c in coeffs.items())), -rhs)
        if neg in seen:
            eqs.append((coeffs, rhs))
    return eqs


def _gcd_prune(eqs, index, fixed):
    """Is some equality row integer-infeasible given the fixed values?

    For each row, the gcd of the unfixed coefficients must divide the
    residual right-hand side (all fixed values here are integers).
    """
    for coeffs, rhs in eqs:
        b = Fraction(rhs)
        g = 0
        for v, c in coeffs.items():
            i = index[v]
            if i in fixed:
                b -= c * fixed[i]
            else:
                g = math.gcd(g, abs(c))
        if b.denominator != 1:
            return True
        if g == 0:
            if b != 0:
                return True
        elif int(b) % g != 0:
            return True
    return False


def solve(system):
    """Lexicographically least nonnegative-integer model, or None.

    Depth-first search in variable order, trying values in increasing order,
    pruning with the exact rational relaxation; value ranges come from the
    relaxation extrema, capped by the minimal-solution bound when unbounded.
    Variables forced by singleton-equality propagation skip the relaxation;
    a gcd divisibility test on (implied) equality rows cuts the
    integer-infeasible subtrees the relaxation cannot see.
    """
    n = len(system.variables)
    zeros = {v: 0 for v in system.variables}
    if system.check(zeros):
        return zeros  # the global lexicographic minimum of N^n
    forced = _forced_values(system)
    if forced is None:
        return None
    eqs = _equality_rows(system)

    def rec(fixed):
        i = len(fixed)
        if _gcd_prune(eqs, system._index, fixed):
            return None
        if i in forced:
            fixed[i] = forced[i]
            r = rec(fixed)
            if r is None:
                del fixed[i]
            return r
        if i == n:
            return dict(fixed) if lp_feasible(system, fixed) else None
        st_lo, lo = lp_extremum(system, i, "min", fixed)
        if st_lo == "infeasible":
            return None
        st_hi, hi = lp_extremum(system, i, "max", fixed)
        lo = max(0, math.ceil(lo)) if st_lo == "optimal" else 0
        if st_hi == "optimal":
            hi = math.floor(hi)
        else:
            hi = max(lo, _sub_pottier_cap(system, fixed))
        for c in range(lo, hi + 1):
            fixed[i] = Fraction(c)
            r = rec(fixed)
            if r is not None:
                return r
            del fixed[i]
        return None

    r = rec({})
    if r is None:
        return None
    model = {system.variables[i]: int(v) for i, v in r.items()}
    assert system.check(model)
    return model


def is_satisfiable(system):
    return solve(system) is not None


class SolveBudgetExceeded(Exception):
    """Branch-and-bound ran out of its LP-node budget."""


def feasible_model(system, lp_budget=4000):
    """Some nonnegative-integer model, or None when there is none.

    Deterministic but not necessarily lexicographically least: branch and
    bound on the exact rational relaxation, splitting the first unknown
    with a fractional vertex value.  Much faster than solve on the large
    systems where only satisfiability matters.
    """
    forced = _forced_values(system)
    if forced is None:
        return None
    if _gcd_prune(_equality_rows(system), system._index, forced):
        return None
    n = len(system.variables)
    count = [0]

    def dfs(extra, fixed):
        count[0] += 1
        if count[0] > lp_budget:
            raise SolveBudgetExceeded()
        probe = NatLinearSystem(system.variables)
        probe.rows = system.rows + extra
        status, _, point = _lp(probe, fixed, None)
        if status == "infeasible":
            return None
        frac = None
        for i in range(n):
            if i in fixed:
                continue
            v = point.get(i, Fraction(0))
            if v.denominator != 1:
                frac = (i, v)
                break
        if frac is None:
            model = {
                system.variables[i]: int(
                    fixed[i] if i in fixed else point.get(i, 0)
                )
                for i in range(n)
            }
            assert system.check(model)
            return model
        i, v = frac
        var = system.variables[i]
        for row in (
            ({var: 1}, LE, math.floor(v)),
            ({var: 1}, GE, math.ceil(v)),
        ):
            r = dfs(extra + [row], fixed)
            if r is not None:
                return r
        return None

    return dfs([], dict(forced))


def homogeneous_support(system):
    """Unknowns that take a positive value in some model (homogeneous case).

    A rational model of a homogeneous system scales to an integer one, so
    exact LP feasibility of {system, x >= 1} decides membership.
    """
    if not system.is_homogeneous():
        raise ValueError("homogeneous_support needs a homogeneous system")
    out = set()
    todo = set(system.variables)
    while todo:
        # some variable of todo is positive in a model iff their sum can be;
        # each round settles at least one variable, so |support|+1 rounds do
        probe = NatLinearSystem(system.variables)
        probe.rows = list(system.rows)
        probe.add({v: 1 for v in todo}, GE, 1)
        status, _, point = _lp(probe, {}, None)
        if status == "infeasible":
            break
        hit = {
            system.variables[i] for i, val in point.items() if val > 0
        }
        assert hit & todo, "support probe returned a zero point"
        out |= hit
        todo -= hit
    return out


def enumerate_models(system, max_entry):
    """All models with entries <= max_entry, in lexicographic order (tests)."""
    import itertools

    out = []
    for combo in itertools.product(range(max_entry + 1), repeat=len(system.variables)):
        model = dict(zip(system.variables, combo))
        if system.check(model):
            out.append(model)
    return out


def _homogeneous_copy(system):
    hom = NatLinearSystem(system.variables)
    for coeffs, rel, _ in system.rows:
        hom.add(coeffs, rel, 0)
    return hom


def pottier_decomposition_check(system, model):
    """Verify model = x' + sum of homogeneous models within the norm bounds.

    Test utility: bounded enumeration of a base model x' (within the
    inhomogeneous bound, componentwise below model) plus a cone membership
    check over the homogeneous models within the homogeneous bound.
    """
    if not system.check(model):
        return False
    bound = pottier_bound(system)
    hom = _homogeneous_copy(system)
    hbound = pottier_bound(hom, homogeneous=True)
    hmodels = [
        m for m in enumerate_models(hom, min(hbound, max(model.values(), default=0)))
        if any(v > 0 for v in m.values())
    ]
    for base in enumerate_models(system, min(bound, max(model.values(), default=0))):
        if any(base[v] > model[v] for v in system.variables):
            continue
        rest = {v: model[v] - base[v] for v in system.variables}
        if all(v == 0 for v in rest.values()):
            return True
        # cone membership: rest = sum over hmodels with nonneg multiplicities
        cone = NatLinearSystem([f"k{i}" for i in range(len(hmodels))])
        for v in system.variables:
            cone.add({f"k{i}": hmodels[i][v] for i in range(len(hmodels))}, EQ, rest[v])
        if hmodels and solve(cone) is not None:
            return True
    return False
