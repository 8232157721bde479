"""Sign-reflecting projections of planes onto two coordinates.

For a plane P and orthant Z whose intersection has two independent
directions, there is an index pair I with: for every v in P, nonnegativity
of v|_I relative to Z|_I already implies v in Z, and v|_I determines v on
P cap Z.  The pair is read off the supports of the two cone generators.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import ratlin
from .vass import Transition, Vass


@dataclass(frozen=True)
class SignReflectingProjection:
    indices: tuple  # (i, j), 0-based, sorted
    plane: tuple  # basis of P
    orthant: tuple
    generators: tuple  # the two cone generators used


def sign_reflecting_projection(basis, signs):
    """The defining index pair for plane `basis` and orthant `signs`.

    With generators u, v of P cap Z, picks the smallest i in supp(u)\\supp(v)
    and the smallest j in supp(v)\\supp(u).  Errors out when the cone has
    fewer than two generators (caller should pick another orthant via
    orthant_containing).
    """
    gens = ratlin.plane_orthant_cone(basis, signs)
    if len(gens) != 2:
        raise ValueError(
            f"plane/orthant cone has {len(gens)} generators, need 2; "
            "choose the orthant with orthant_containing"
        )
    gu, gv = gens
    su = ratlin.support(gu)
    sv = ratlin.support(gv)
    only_u = sorted(su - sv)
    only_v = sorted(sv - su)
    if not only_u or not only_v:
        raise ValueError("generator supports do not separate; degenerate cone")
    i, j = only_u[0], only_v[0]
    return SignReflectingProjection(
        tuple(sorted((i, j))), tuple(basis), tuple(signs), (gu, gv)
    )


def orthant_containing(basis, v):
    """An orthant containing v != 0 whose cut with the plane is 2-dimensional.

    Completes v to a basis of P with some u, takes the smallest integer t
    with t*|v(i)| > |u(i)| on supp(v), and returns the common orthant of v
    and t*v + u (coordinates zero in both default to +1).
    """
    v = ratlin.frac_vec(v)
    if ratlin.is_zero(v):
        raise ValueError("need a nonzero vector")
    if ratlin.solve_combination(basis, v) is None:
        raise ValueError("vector not in the plane")
    u = None
    for b in basis:
        if ratlin.solve_combination([v], b) is None:
            u = ratlin.frac_vec(b)
            break
    if u is None:
        raise ValueError("plane is not 2-dimensional around v")
    t = 1
    while any(t * abs(v[i]) <= abs(u[i]) for i in ratlin.support(v)):
        t += 1
    w = tuple(Fraction(t) * a + b for a, b in zip(v, u))
    signs = []
    for a, b in zip(v, w):
        if a != 0:
            signs.append(1 if a > 0 else -1)
        elif b != 0:
            signs.append(1 if b > 0 else -1)
        else:
            signs.append(1)
    return tuple(signs)


@dataclass(frozen=True)
class ProjectedVass:
    base: Vass  # the 2-dimensional projection
    back: dict  # projected transition -> chosen original transition


def project_vass(g, indices):
    """Project every effect onto the index pair; the back-map picks, per
    projected transition, the original with lexicographically smallest
    effect."""
    i, j = indices
    chosen = {}
    for t in g.transitions:
        key = (t.source, t.target, (t.effect[i], t.effect[j]))
        if key not in chosen or t.effect < chosen[key].effect:
            chosen[key] = t
    trans = []
    back = {}
    for t in g.transitions:
        key = (t.source, t.target, (t.effect[i], t.effect[j]))
        if chosen[key] is not t:
            continue
        pt = Transition(t.tid, t.source, t.target, key[2])
        trans.append(pt)
        back[pt] = t
    return ProjectedVass(Vass(2, g.states, tuple(trans)), back)


PAD_STATE = "_pad"


def pad_to_plane(g):
    """Add an isolated state with two standard-basis self-loops so the cycle
    space has dimension >= 2 (requires d >= 2); padding is unreachable from
    the real states and is stripped from all outputs by the callers."""
    if g.dimension < 2:
        raise ValueError("cannot pad below dimension 2")
    e1 = tuple(1 if c == 0 else 0 for c in range(g.dimension))
    e2 = tuple(1 if c == 1 else 0 for c in range(g.dimension))
    loops = (
        Transition("_pad1", PAD_STATE, PAD_STATE, e1),
        Transition("_pad2", PAD_STATE, PAD_STATE, e2),
    )
    return Vass(g.dimension, g.states + (PAD_STATE,), g.transitions + loops)
