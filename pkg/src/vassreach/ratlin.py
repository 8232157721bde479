"""Exact rational vectors, spans, and cone generators for plane/orthant cuts.

Everything here is over fractions.Fraction; no floating point anywhere.
Orthants are sign tuples in {+1, -1}; the orthant of t contains every u with
u(i) * t(i) >= 0 for all i, so orthants overlap on coordinate hyperplanes.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def frac_vec(v):
    return tuple(Fraction(x) for x in v)


def vec_scale(v, c):
    return tuple(Fraction(c) * x for x in v)


def vec_sum(u, v):
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def is_zero(v):
    return all(x == 0 for x in v)


def support(v):
    """Indices (0-based) of the nonzero coordinates."""
    return frozenset(i for i, x in enumerate(v) if x != 0)


def primitive(v):
    """Scale a nonzero rational vector to coprime integers, first nonzero > 0."""
    denom_lcm = 1
    for x in v:
        f = Fraction(x)
        denom_lcm = denom_lcm * f.denominator // gcd(denom_lcm, f.denominator)
    ints = [int(Fraction(x) * denom_lcm) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g == 0:
        return tuple(0 for _ in v)
    ints = [x // g for x in ints]
    for x in ints:
        if x != 0:
            if x < 0:
                ints = [-y for y in ints]
            break
    return tuple(ints)


def span_basis(vectors):
    """A reduced-row-echelon basis of the span of the given vectors."""
    rows = [list(frac_vec(v)) for v in vectors if not is_zero(v)]
    if not rows:
        return []
    d = len(rows[0])
    basis = []
    pivots = []
    for row in rows:
        row = list(row)
        for b, p in zip(basis, pivots):
            if row[p] != 0:
                f = row[p]
                row = [x - f * y for x, y in zip(row, b)]
        piv = next((i for i, x in enumerate(row) if x != 0), None)
        if piv is None:
            continue
        f = row[piv]
        row = [x / f for x in row]
        basis.append(row)
        pivots.append(piv)
    # back-substitute for a canonical reduced form
    order = sorted(range(len(basis)), key=lambda i: pivots[i])
    basis = [basis[i] for i in order]
    pivots = [pivots[i] for i in order]
    for i in range(len(basis) - 1, -1, -1):
        for j in range(i):
            f = basis[j][pivots[i]]
            if f != 0:
                basis[j] = [x - f * y for x, y in zip(basis[j], basis[i])]
    return [tuple(row) for row in basis]


def solve_combination(basis, v):
    """Coefficients expressing v over the basis vectors, or None."""
    v = frac_vec(v)
    if not basis:
        return [] if is_zero(v) else None
    d = len(v)
    n = len(basis)
    # Solve (basis^T) c = v by elimination on the augmented d x (n+1) system.
    aug = [[Fraction(basis[j][i]) for j in range(n)] + [v[i]] for i in range(d)]
    row = 0
    piv_cols = []
    for col in range(n):
        sel = next((r for r in range(row, d) if aug[r][col] != 0), None)
        if sel is None:
            continue
        aug[row], aug[sel] = aug[sel], aug[row]
        f = aug[row][col]
        aug[row] = [x / f for x in aug[row]]
        for r in range(d):
            if r != row and aug[r][col] != 0:
                g = aug[r][col]
                aug[r] = [x - g * y for x, y in zip(aug[r], aug[row])]
        piv_cols.append(col)
        row += 1
    for r in range(row, d):
        if aug[r][n] != 0:
            return None
    coeffs = [Fraction(0)] * n
    for r, col in enumerate(piv_cols):
        coeffs[col] = aug[r][n]
    return coeffs


def member_of_span(v, basis):
    return solve_combination(basis, v) is not None


def in_orthant(v, signs):
    return all(Fraction(x) * s >= 0 for x, s in zip(v, signs))


def orthant_of(v):
    """The lexicographically smallest sign tuple whose orthant contains v."""
    return tuple(1 if Fraction(x) >= 0 else -1 for x in v)


def _cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


def plane_orthant_cone(basis, signs):
    """Generators V (<= 2, primitive integer vectors) with cone(V) = P cap Z.

    Works in the parameter plane of P: for v = a*b1 + b*b2 the orthant
    constraints become half-planes through the origin in (a, b); the (at
    most two) extreme rays of that planar cone are read off the constraint
    boundaries.  For dim(P) <= 1 the cases are immediate.
    """
    if not basis:
        return []
    if len(basis) == 1:
        b = basis[0]
        out = []
        if in_orthant(b, signs):
            out.append(primitive(b))
        nb = vec_scale(b, -1)
        if in_orthant(nb, signs):
            out.append(primitive(nb))
        # a line inside a (salient) orthant collapses to the zero cone
        if len(out) == 2:
            return []
        return out
    if len(basis) != 2:
        raise ValueError("plane_orthant_cone needs dim(P) <= 2")
    b1, b2 = basis
    constraints = []
    for i, s in enumerate(signs):
        a = (Fraction(s) * Fraction(b1[i]), Fraction(s) * Fraction(b2[i]))
        if a != (0, 0):
            constraints.append(a)
    if not constraints:
        raise ValueError("plane degenerate: every plane vector is on the axes")
    candidates = []
    for a in constraints:
        for r in ((-a[1], a[0]), (a[1], -a[0])):
            if all(c[0] * r[0] + c[1] * r[1] >= 0 for c in constraints):
                p = primitive_ray(r)
                if p not in candidates:
                    candidates.append(p)
    if not candidates:
        return []
    # The cone is salient (orthants contain no line), so the candidate rays
    # pairwise span angles < pi and cross-product comparison totally orders
    # them; the extreme rays are the minimum and maximum.
    lo = hi = candidates[0]
    for r in candidates[1:]:
        if _cross(lo, r) < 0:
            lo = r
        if _cross(hi, r) > 0:
            hi = r
    rays = [lo] if lo == hi else [lo, hi]
    out = []
    for r in rays:
        v = vec_sum(vec_scale(b1, r[0]), vec_scale(b2, r[1]))
        if not is_zero(v):
            out.append(primitive_ray(v))
    out = list(dict.fromkeys(out))
    out.sort(key=lambda v: (min(support(v), default=len(v)), v))
    return out


def primitive_ray(v):
    """Primitive integer vector that is a *positive* multiple of v."""
    p = primitive(v)
    # primitive() normalizes the first nonzero entry to be positive, which
    # may flip the ray; undo that if so.
    for a, b in zip(p, v):
        if b != 0:
            if (a > 0) != (Fraction(b) > 0):
                p = tuple(-x for x in p)
            break
    return p
