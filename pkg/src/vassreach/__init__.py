"""Fixed-dimension VASS reachability via KLMST decomposition.

Submodules:
    vass        core model: transitions, configurations, semantics, runs
    ratlin      rational linear algebra (spans, cones, orthants)
    intlin      nonnegative-integer linear systems, exact simplex, bounds
    cycles      SCCs, cycle spaces, geometric dimension, ranks, potentials
    lps         linear path schemes and their characteristic systems
    projection  sign-reflecting 2D projections of geometric planes
    flatten     flattening searches producing replayable path schemes
    klm         KLM tuples, linear KLM sequences, characteristic systems
    decompose   cleaning/decomposition steps and the reachability driver
    hierarchy   ordinals, Hardy/Cichon hierarchies, bound calculators
    oracle      independent brute-force reachability and coverability
    cli         instance files, command surface, JSON output
"""

from .vass import OMEGA, Configuration, Transition, Vass
from .decompose import (
    REACHABLE,
    UNREACHABLE,
    UNKNOWN,
    DecomposeConfig,
    decide_reachability,
)

__all__ = [
    "OMEGA",
    "Configuration",
    "Transition",
    "Vass",
    "REACHABLE",
    "UNREACHABLE",
    "UNKNOWN",
    "DecomposeConfig",
    "decide_reachability",
]
