"""Ordinals below omega^omega, Hardy and Cichon hierarchies, bound formulas.

Ordinals are kept in Cantor normal form as coefficient tuples
(c_n, ..., c_0) meaning w^n*c_n + ... + c_0.  The Hardy hierarchy h^alpha
iterates a control function along an ordinal (limits taken through the
standard fundamental sequences); the Cichon hierarchy h_alpha counts the
successor steps of the same descent.  Evaluation budgets are unfolding
counts, never wall time.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True, order=False)
class OrdinalCNF:
    """w^n*c_n + ... + w*c_1 + c_0 as coefficients (c_n, ..., c_0)."""

    coeffs: tuple = ()

    def __post_init__(self):
        c = tuple(self.coeffs)
        while c and c[0] == 0:
            c = c[1:]
        object.__setattr__(self, "coeffs", c)
        if any(x < 0 for x in c):
            raise ValueError("coefficients must be naturals")

    @property
    def is_zero(self):
        return not self.coeffs

    @property
    def is_successor(self):
        return bool(self.coeffs) and self.coeffs[-1] > 0

    @property
    def is_limit(self):
        return bool(self.coeffs) and self.coeffs[-1] == 0

    def size(self):
        """N(alpha) = max of the degree and the coefficients."""
        if not self.coeffs:
            return 0
        return max(len(self.coeffs) - 1, max(self.coeffs))

    def predecessor(self):
        if not self.is_successor:
            raise ValueError("predecessor of a non-successor ordinal")
        c = list(self.coeffs)
        c[-1] -= 1
        return OrdinalCNF(tuple(c))

    def _key(self):
        return (len(self.coeffs), self.coeffs)

    def __lt__(self, other):
        return self._key() < other._key()

    def __le__(self, other):
        return self._key() <= other._key()

    def __repr__(self):
        if not self.coeffs:
            return "0"
        n = len(self.coeffs) - 1
        parts = []
        for k, c in enumerate(self.coeffs):
            deg = n - k
            if c == 0:
                continue
            if deg == 0:
                parts.append(str(c))
            elif deg == 1:
                parts.append("w" if c == 1 else f"w*{c}")
            else:
                parts.append(f"w^{deg}" if c == 1 else f"w^{deg}*{c}")
        return "+".join(parts)


def ordinal(*coeffs):
    return OrdinalCNF(tuple(coeffs))


def omega_power(k, c=1):
    """w^k * c."""
    return OrdinalCNF((c,) + (0,) * k)


def fundamental_sequence(lam, x):
    """(beta + w^{k+1})(x) := beta + w^k*(x+1) for limit ordinals."""
    if not lam.is_limit:
        raise ValueError("fundamental sequences are for limit ordinals")
    c = list(lam.coeffs)
    # lowest nonzero term w^m*c_m with m >= 1
    m = next(
        i for i in range(len(c) - 1, -1, -1) if c[len(c) - 1 - i] > 0
    )
    c[len(c) - 1 - m] -= 1
    c[len(c) - 1 - (m - 1)] += x + 1
    return OrdinalCNF(tuple(c))


@dataclass(frozen=True)
class BudgetExceeded:
    """Explicit marker for an evaluation cut off by its unfolding budget."""

    expression: str
    steps: int

    def __bool__(self):
        return False


@dataclass(frozen=True)
class ControlFunction:
    """A monotone inflationary function handle with an optional certificate
    (b, c, x0) asserting fn(x) <= H^{w^b * c}(x) for x >= x0."""

    fn: object
    name: str = "h"
    certificate: tuple = None

    def __call__(self, x):
        y = self.fn(x)
        if y < x:
            raise ValueError(f"{self.name} is not inflationary at {x}")
        return y


SUCCESSOR = ControlFunction(lambda x: x + 1, "H", certificate=(1, 1, 0))
DOUBLING = ControlFunction(lambda x: 2 * x, "double")


def _short_int(x):
    """Render a natural without materializing millions of digits."""
    if x.bit_length() <= 64:
        return str(x)
    return f"~2^{x.bit_length()}"


def hardy(h, alpha, x, budget=10 ** 6):
    """h^alpha(x): iterate h along alpha; limits via fundamental sequences."""
    steps = 0
    while not alpha.is_zero:
        steps += 1
        if steps > budget:
            return BudgetExceeded(
                f"{getattr(h, 'name', 'h')}^{alpha}({_short_int(x)})", steps
            )
        if alpha.is_successor:
            alpha = alpha.predecessor()
            x = h(x)
        else:
            alpha = fundamental_sequence(alpha, x)
    return x


def cichon(h, alpha, x, budget=10 ** 6):
    """h_alpha(x): the number of successor steps in the same descent."""
    steps = 0
    count = 0
    while not alpha.is_zero:
        steps += 1
        if steps > budget:
            return BudgetExceeded(
                f"{getattr(h, 'name', 'h')}_{alpha}({_short_int(x)})", steps
            )
        if alpha.is_successor:
            alpha = alpha.predecessor()
            x = h(x)
            count += 1
        else:
            alpha = fundamental_sequence(alpha, x)
    return count


def controlled_descents(alpha, n0, h, budget=10 ** 5):
    """All maximal (n0, h)-controlled strictly decreasing sequences from
    alpha: element i must satisfy N(alpha_i) <= h^i(n0).  Returns the list
    of maximal sequence lengths found by exhaustive search (element count,
    including alpha itself)."""

    def smaller_ordinals(a, cap):
        # all ordinals < a with size <= cap
        out = []
        deg = len(a.coeffs) - 1 if a.coeffs else 0
        def rec(prefix, k):
            if k < 0:
                o = OrdinalCNF(tuple(prefix))
                if o < a and o.size() <= cap:
                    out.append(o)
                return
            for c in range(cap + 1):
                rec(prefix + [c], k - 1)
        for d2 in range(min(deg, cap) + 1):
            rec([], d2)
        return out

    best = [0]
    calls = [0]

    def rec(a, i, bound):
        calls[0] += 1
        if calls[0] > budget:
            raise BudgetExceededError()
        best[0] = max(best[0], i + 1)
        nb = h(bound)
        for o in smaller_ordinals(a, nb):
            rec(o, i + 1, nb)

    class BudgetExceededError(Exception):
        pass

    try:
        rec(alpha, 0, n0)
    except BudgetExceededError:
        return BudgetExceeded(f"descents from {alpha}", calls[0])
    return best[0]


def default_g(x, k1=1):
    return x ** (x ** k1)


def default_h(x, k2=1):
    return x ** (x ** (x ** k2))


def default_ell(x, k3=1):
    return x ** (k3 * x)


def witness_bound(n, d, budget=10 ** 5, g=None, h=None, ell=None,
                  value_cap=10 ** 8):
    """ell(h^{w^{d-2}}(g(n))): the witness-length bound skeleton.

    The real callbacks make this astronomical for any nontrivial input, so
    the usual outcome is a BudgetExceeded marker carrying the symbolic
    expression.  Any intermediate value above value_cap counts as a budget
    cut (the callbacks would otherwise materialize unboundedly large
    integers before the unfolding budget could fire).
    """
    if d < 3:
        raise ValueError("bound is defined for dimension >= 3")
    g = g or default_g
    h = h or default_h
    ell = ell or default_ell
    expr = f"ell(h^w^{d - 2}(g({n})))"

    class _Cut(Exception):
        pass

    def guarded(x):
        if x > value_cap:
            raise _Cut()
        y = h(x)
        if y > value_cap:
            raise _Cut()
        return y

    try:
        start = g(n)
        if start > value_cap:
            raise _Cut()
        inner = hardy(ControlFunction(guarded, "h"), omega_power(d - 2),
                      start, budget)
        if isinstance(inner, BudgetExceeded):
            return BudgetExceeded(expr, inner.steps)
        if inner > 10 ** 4:
            # ell would materialize an integer with millions of digits
            return BudgetExceeded(expr, budget)
        return ell(inner)
    except _Cut:
        return BudgetExceeded(expr, budget)


def check_rel_fastgrow(a, b, c, x0, h, xs, budget=10 ** 6):
    """Sampled check of: h(x) <= H^{w^b * c}(x) for x >= x0 implies
    h^{w^a}(x) <= H^{w^{b+a}}((c+1)x) for x >= max(2c, x0).

    Also checks the proof's inner chain H^{w^{b+a}}((c+1)x) >= (c+1)G^{w^a}(x)
    with G = H^{w^b * c}.  Returns a per-point report list.
    """
    if not (a >= 1 and b >= 1 and c >= 1):
        raise ValueError("need a, b, c >= 1")
    if not isinstance(h, ControlFunction) or h.certificate is None:
        raise ValueError("control function must carry a certificate")
    cb, cc, cx0 = h.certificate
    if (cb, cc) != (b, c) or cx0 > x0:
        raise ValueError("certificate does not match (b, c, x0)")

    def G(x):
        r = hardy(SUCCESSOR, omega_power(b, c), x, budget)
        if isinstance(r, BudgetExceeded):
            raise _Cut(r)
        return r

    class _Cut(Exception):
        def __init__(self, marker):
            self.marker = marker

    report = []
    for x in xs:
        if x < max(2 * c, x0):
            report.append({"x": x, "status": "skipped", "reason": "below max(2c, x0)"})
            continue
        try:
            cert_ok = h(x) <= G(x)
            lhs = hardy(h, omega_power(a), x, budget)
            rhs = hardy(SUCCESSOR, omega_power(b + a), (c + 1) * x, budget)
            inner = (c + 1) * hardy(
                ControlFunction(G, "G"), omega_power(a), x, budget
            )
            if any(isinstance(v, BudgetExceeded) for v in (lhs, rhs, inner)):
                report.append({"x": x, "status": "budget"})
                continue
            ok = cert_ok and lhs <= rhs and rhs >= inner and lhs <= inner
            report.append(
                {
                    "x": x,
                    "status": "pass" if ok else "fail",
                    "lhs": lhs,
                    "rhs": rhs,
                    "inner": inner,
                    "certificate": cert_ok,
                }
            )
        except _Cut as cut:
            report.append({"x": x, "status": "budget"})
    return report
