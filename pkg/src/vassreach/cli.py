"""Command surface: instance parsing, JSON results, trace files.

Instance grammar (line oriented, LF, `#` starts a comment):

    dim <d>
    state <id>
    trans <id> <src> <tgt> <d integers>
    query <srcState> <d naturals> -> <tgtState> <d naturals>

Subcommands: reach (engine klmst|oracle|both), analyze, flatten, bound,
oracle.  Output is always JSON on standard output; exit code 0 means a
definitive result, 2 means Unknown, 1 means a usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import cycles as cyc
from . import decompose, flatten, hierarchy, oracle
from .vass import Configuration, Vass, Transition, vass_size


class ParseError(Exception):
    """Instance-file syntax or consistency error with a line diagnostic."""


def _fail(lineno, msg):
    raise ParseError(f"line {lineno}: {msg}")


def parse(text):
    """(Vass, (source Configuration, target Configuration)) from a document."""
    dim = None
    states = []
    state_set = set()
    transitions = []
    tids = set()
    query = None
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "dim":
            if dim is not None:
                _fail(lineno, "duplicate dim")
            if len(parts) != 2 or not parts[1].isdigit() or int(parts[1]) < 1:
                _fail(lineno, "dim needs one positive integer")
            dim = int(parts[1])
        elif kind == "state":
            if len(parts) != 2:
                _fail(lineno, "state needs one identifier")
            if parts[1] in state_set:
                _fail(lineno, f"duplicate state {parts[1]!r}")
            states.append(parts[1])
            state_set.add(parts[1])
        elif kind == "trans":
            if dim is None:
                _fail(lineno, "missing dim")
            if len(parts) != 4 + dim:
                _fail(
                    lineno,
                    f"trans needs id, source, target and {dim} integers",
                )
            tid, src, tgt = parts[1:4]
            if tid in tids:
                _fail(lineno, f"duplicate transition id {tid!r}")
            if src not in state_set:
                _fail(lineno, f"unknown state {src!r}")
            if tgt not in state_set:
                _fail(lineno, f"unknown state {tgt!r}")
            try:
                effect = tuple(int(x) for x in parts[4:])
            except ValueError:
                _fail(lineno, "transition effect must be integers")
            transitions.append(Transition(tid, src, tgt, effect))
            tids.add(tid)
        elif kind == "query":
            if dim is None:
                _fail(lineno, "missing dim")
            if query is not None:
                _fail(lineno, "duplicate query")
            if len(parts) != 4 + 2 * dim or parts[2 + dim] != "->":
                _fail(
                    lineno,
                    f"query needs srcState, {dim} naturals, '->', "
                    f"tgtState, {dim} naturals",
                )
            sp, tp = parts[1], parts[3 + dim]
            if sp not in state_set:
                _fail(lineno, f"unknown state {sp!r}")
            if tp not in state_set:
                _fail(lineno, f"unknown state {tp!r}")
            try:
                u = tuple(int(x) for x in parts[2 : 2 + dim])
                v = tuple(int(x) for x in parts[4 + dim :])
            except ValueError:
                _fail(lineno, "query vectors must be naturals")
            if any(x < 0 for x in u) or any(x < 0 for x in v):
                _fail(lineno, "query coordinates must be nonnegative")
            query = (Configuration(sp, u), Configuration(tp, v))
        else:
            _fail(lineno, f"unknown directive {kind!r}")
    if dim is None:
        raise ParseError("missing dim")
    if query is None:
        raise ParseError("missing query")
    return Vass(dim, tuple(states), tuple(transitions)), query


def render(g, query):
    """Canonical document text; parse(render(...)) is the identity."""
    src, tgt = query
    lines = [f"dim {g.dimension}"]
    lines.extend(f"state {s}" for s in g.states)
    for t in g.transitions:
        lines.append(
            f"trans {t.tid} {t.source} {t.target} "
            + " ".join(str(x) for x in t.effect)
        )
    lines.append(
        f"query {src.state} " + " ".join(str(x) for x in src.vector)
        + f" -> {tgt.state} " + " ".join(str(x) for x in tgt.vector)
    )
    return "\n".join(lines) + "\n"


def _read_instance(path):
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _emit(payload, compact):
    if compact:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(json.dumps(payload, indent=2, sort_keys=True))


def _verdict_json(kind, witness):
    if kind == decompose.REACHABLE:
        return True, [t.tid for t in witness or ()]
    if kind == decompose.UNREACHABLE:
        return False, None
    return "unknown", None


def _cmd_reach(args, g, query):
    src, tgt = query
    payload = {}
    trace = []
    kinds = {}
    witness = None
    if args.engine in ("klmst", "both"):
        cfg = decompose.DecomposeConfig(branch_budget=args.branch_budget)
        rep = decompose.decide_reachability(g, src, tgt, cfg, trace)
        kinds["klmst"] = rep.kind
        if rep.witness is not None:
            witness = [t.tid for t in rep.witness]
    if args.engine in ("oracle", "both"):
        v = oracle.bfs_reach(g, src, tgt, norm_cap=args.norm_cap)
        kinds["oracle"] = {
            oracle.YES: decompose.REACHABLE,
            oracle.NO: decompose.UNREACHABLE,
            oracle.UNKNOWN: decompose.UNKNOWN,
        }[v.kind]
        if v.witness is not None and witness is None:
            witness = [t.tid for t in v.witness]
    definitive = [k for k in kinds.values() if k != decompose.UNKNOWN]
    overall = definitive[0] if definitive else decompose.UNKNOWN
    reachable, _ = _verdict_json(overall, None)
    payload["reachable"] = reachable
    if reachable is True:
        payload["witness"] = witness
    if args.engine == "both":
        payload["agree"] = len(set(definitive)) <= 1
        payload["engines"] = kinds
    if args.trace:
        with open(args.trace, "w") as fh:
            for rec in trace:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
    _emit(payload, args.json)
    return 0 if overall != decompose.UNKNOWN else 2


def _cmd_analyze(args, g, query):
    dec = cyc.scc(g)
    payload = {
        "dimension": g.dimension,
        "size": vass_size(g),
        "geometric_dimension": cyc.geometric_dimension(g),
        "rank": list(cyc.rank(g)),
        "rank_full": list(cyc.rank_full(g)),
        "fixed_coordinates": sorted(cyc.fixed_coordinates(g)),
        "strongly_connected": cyc.is_strongly_connected(g),
        "sccs": [list(c.states) for c in dec.components],
    }
    _emit(payload, args.json)
    return 0


def _cmd_flatten(args, g, query):
    src, tgt = query
    cfg = flatten.FlattenConfig(lps_length_cap=args.lps_cap)
    res = flatten.flatten_geo2(g, src.state, src.vector, tgt.state,
                               tgt.vector, cfg)
    payload = {"status": res.status}
    if res.scheme is not None:
        payload["scheme"] = repr(res.scheme)
        word = None
        from . import lps as lpsmod

        word = lpsmod.reach_via(res.scheme, src.vector, tgt.vector)
        payload["witness"] = [t.tid for t in word] if word else None
    _emit(payload, args.json)
    return 0 if res.status != flatten.BUDGET else 2


def _cmd_bound(args, g, query):
    src, tgt = query
    n = vass_size(g) + sum(src.vector) + sum(tgt.vector)
    if g.dimension < 3:
        payload = {"error": "bound is defined for dimension >= 3"}
        _emit(payload, args.json)
        return 1
    res = hierarchy.witness_bound(n, g.dimension, budget=args.unfold_budget)
    if isinstance(res, hierarchy.BudgetExceeded):
        payload = {
            "bound": "budget-exceeded",
            "expression": res.expression,
            "steps": res.steps,
        }
        _emit(payload, args.json)
        return 2
    payload = {"bound": res, "input_size": n}
    _emit(payload, args.json)
    return 0


def _cmd_oracle(args, g, query):
    src, tgt = query
    if args.replay is not None:
        by_id = {t.tid: t for t in g.transitions}
        tids = [x for x in args.replay.split(",") if x]
        missing = [tid for tid in tids if tid not in by_id]
        if missing:
            _emit({"error": f"unknown transition ids {missing}"}, args.json)
            return 1
        path = [by_id[tid] for tid in tids]
        ok = oracle.replays(g, src, path, tgt)
        _emit({"replayed": ok}, args.json)
        return 0
    v = oracle.bfs_reach(g, src, tgt, norm_cap=args.norm_cap)
    payload = {"verdict": v.kind.lower()}
    if v.witness is not None:
        payload["witness"] = [t.tid for t in v.witness]
    try:
        payload["coverable"] = oracle.covers(g, src, tgt)
    except oracle.KmBudgetExceeded:
        payload["coverable"] = "unknown"
    _emit(payload, args.json)
    return 0 if v.definitive() else 2


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="vassreach",
        description="VASS reachability via KLMST decomposition",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("instance", help="instance file path, or - for stdin")
    common.add_argument("--json", action="store_true",
                        help="compact one-line JSON output")
    common.add_argument("--seed", type=int, default=0,
                        help="seed for randomized tooling")
    common.add_argument("--norm-cap", type=int, default=64)
    common.add_argument("--lps-cap", type=int, default=64)
    common.add_argument("--branch-budget", type=int, default=200)
    common.add_argument("--unfold-budget", type=int, default=10 ** 5)
    common.add_argument("--trace", default=None,
                        help="write JSON-lines step records to this file")
    r = sub.add_parser("reach", parents=[common])
    r.add_argument("--engine", choices=("klmst", "oracle", "both"),
                   default="klmst")
    sub.add_parser("analyze", parents=[common])
    sub.add_parser("flatten", parents=[common])
    sub.add_parser("bound", parents=[common])
    o = sub.add_parser("oracle", parents=[common])
    o.add_argument("--replay", default=None, metavar="TIDS",
                   help="comma-separated transition ids to replay "
                        "instead of searching (empty for the empty path)")
    return ap


def run_command(argv):
    """Exit code; JSON result on standard output."""
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 1
    try:
        text = _read_instance(args.instance)
    except OSError as e:
        print(json.dumps({"error": str(e)}))
        return 1
    try:
        g, query = parse(text)
    except ParseError as e:
        print(json.dumps({"error": str(e)}))
        return 1
    handler = {
        "reach": _cmd_reach,
        "analyze": _cmd_analyze,
        "flatten": _cmd_flatten,
        "bound": _cmd_bound,
        "oracle": _cmd_oracle,
    }[args.command]
    return handler(args, g, query)


def main():
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
