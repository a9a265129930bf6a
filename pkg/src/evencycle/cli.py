"""Command-line interface.

Every command prints one JSON document (``"schema": 1``, sorted keys)
except ``gen``, which prints an edge list, and ``bounds`` without
``--json``. Exit codes: 0 found/success, 1 sound "not found",
2 precondition error, 3 budget exceeded or shortfall, 4 I/O error.
"""

from __future__ import annotations

import argparse
import inspect
import json
import sys
from fractions import Fraction

from . import bounds as bnd
from . import generators as gen
from .checks import Check
from .embed import ContractError, EmbedParams, embed_or_theta
from .explorer import CycleFound, expansion_audit, find_c2k, is_c2k, layer_theta_audit
from .fixtures import BUILDERS, parse_fixture_comments
from .graph import BipartiteView, GraphFormatError, TrilayeredView, bfs_layers, load_edge_list, trilayer
from .oracle import BudgetExceeded, SearchBudget, find_theta_exact
from .reduction import ReductionCollapse, ReductionHypothesisError, ReductionParams, reduce
from .theta import (
    ThetaCertificate,
    ThetaPreconditionError,
    find_theta_avg_degree,
    find_theta_min_degree,
    verify_theta,
    verify_well_placed,
)
from .trilayer_search import PreconditionError, iterate_chain

OK, NOT_FOUND, PRECONDITION, BUDGET, IO_ERROR = 0, 1, 2, 3, 4


class InputError(Exception):
    pass


def emit(obj: dict) -> None:
    out = {"schema": 1}
    out.update(obj)
    sys.stdout.write(json.dumps(out, sort_keys=True, indent=2) + "\n")


def fail(code: int, message: str, **extra) -> int:
    emit({"error": message, "exit": code, **extra})
    return code


def read_text(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def read_graph(path: str):
    text = read_text(path)
    try:
        return load_edge_list(text), text
    except GraphFormatError as exc:
        raise InputError(str(exc)) from None


def read_trilayer(args) -> TrilayeredView:
    """Layers from ``# V1/V2/V3`` comments, or BFS levels from ``--root``/``--level``."""
    g, text = read_graph(args.input)
    if args.root is not None:
        layers = bfs_layers(g, args.root, args.level + 1)
        return trilayer(g, layers, args.level)
    _, lay = parse_fixture_comments(text)
    if lay is None:
        raise InputError("no '# V1/V2/V3' layer comments in the input; pass --root and --level")
    return TrilayeredView.of(g, *lay)


def frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def budget_of(args) -> SearchBudget:
    return SearchBudget(max_vertices=args.max_vertices, max_steps=args.budget)


# gen


def parse_params(text: str | None) -> dict:
    out = {}
    for part in (text or "").split(","):
        if not part.strip():
            continue
        key, _, value = part.partition("=")
        try:
            out[key.strip()] = int(value)
        except ValueError:
            try:
                out[key.strip()] = Fraction(value) if "/" in value else float(value)
            except ValueError:
                raise InputError(f"bad parameter {part!r}") from None
    return out


def cmd_gen(args) -> int:
    if args.family == "random":
        g = gen.gnp(args.n, args.p, args.seed)
    elif args.family == "bipartite":
        g = gen.random_bipartite(args.n // 2, args.n - args.n // 2, args.p, args.seed)
    elif args.family == "cycle":
        g = gen.cycle(args.n)
    else:
        if args.name not in BUILDERS:
            return fail(PRECONDITION, f"unknown fixture {args.name!r}", known=sorted(BUILDERS))
        build = BUILDERS[args.name]
        params = parse_params(args.params)
        if "seed" in inspect.signature(build).parameters:
            params.setdefault("seed", args.seed)
        try:
            fixture = build(**params)
        except (TypeError, ValueError) as exc:
            return fail(PRECONDITION, str(exc))
        sys.stdout.write(fixture.to_edge_list())
        return OK
    sys.stdout.write(g.to_edge_list())
    return OK


# searches


def cmd_reduce(args) -> int:
    g, _ = read_graph(args.input)
    try:
        res = reduce(g, ReductionParams(args.alpha, args.c))
    except ReductionHypothesisError as exc:
        return fail(PRECONDITION, str(exc), edges=exc.edges, threshold=exc.threshold)
    except ReductionCollapse as exc:
        return fail(PRECONDITION, str(exc), transcript=[s.to_json() for s in exc.transcript])
    out = res.to_json()
    if not args.trace:
        out.pop("transcript")
    out["shrink_steps"] = res.shrink_steps
    emit(out)
    return OK


def cmd_find(args) -> int:
    g, _ = read_graph(args.input)
    roots = [args.root] if args.root is not None else None
    rep = find_c2k(
        g, args.k, budget_of(args), d=args.d, Delta=args.delta, roots=roots,
        enforce_window=not args.no_window, variant=args.variant,
    )
    emit(rep.to_json())
    return {"cycle": OK, "certificate": OK, "none": NOT_FOUND, "precondition": PRECONDITION}.get(rep.outcome, BUDGET)


def cmd_theta(args) -> int:
    g, _ = read_graph(args.input)
    try:
        if args.method == "exact":
            cert = find_theta_exact(g, args.k, budget_of(args))
        else:
            b = BipartiteView.from_graph(g)
            find = find_theta_min_degree if args.method == "min-degree" else find_theta_avg_degree
            cert = find(b, args.k)
    except BudgetExceeded as exc:
        return fail(BUDGET, str(exc))
    except (ThetaPreconditionError, ValueError) as exc:
        return fail(PRECONDITION, str(exc))
    if cert is None:
        emit({"outcome": "none", "k": args.k})
        return NOT_FOUND
    emit({"outcome": "theta", "k": args.k, "certificate": cert.to_json()})
    return OK


def cmd_audit(args) -> int:
    g, _ = read_graph(args.input)
    if args.kind == "expansion":
        if args.d is None:
            return fail(PRECONDITION, "audit expansion needs --d")
        emit(expansion_audit(g, args.root or 0, args.k, args.d).to_json())
        return OK
    roots = [args.root] if args.root is not None else None
    try:
        audit = layer_theta_audit(g, args.k, budget_of(args), roots)
    except CycleFound as exc:
        return fail(PRECONDITION, str(exc), cycle=list(exc.cycle))
    except BudgetExceeded as exc:
        return fail(BUDGET, str(exc))
    emit(audit.to_json())
    return OK if audit.passed else NOT_FOUND


def cmd_chain(args) -> int:
    t = read_trilayer(args)
    try:
        res = iterate_chain(t, args.d, args.k, args.delta, args.C, steps=args.steps)
    except PreconditionError as exc:
        return fail(PRECONDITION, str(exc), check=Check(exc.name, float(exc.lhs), float(exc.rhs), False).to_json())
    out = res.to_json()
    if not args.trace:
        out.pop("steps")
    emit(out)
    return OK if res.kind in ("theta", "subgraph") else BUDGET


def cmd_embed(args) -> int:
    t = read_trilayer(args)
    p = parse_params(args.params)
    try:
        params = EmbedParams(p["A"], p["B"], p["D"], p["Delta"], p["d"], p["k"])
    except KeyError as exc:
        return fail(PRECONDITION, f"--params is missing {exc.args[0]}")
    except ValueError as exc:
        return fail(PRECONDITION, str(exc))
    try:
        res = embed_or_theta(t, params)
    except PreconditionError as exc:
        return fail(PRECONDITION, str(exc), check=Check(exc.name, float(exc.lhs), float(exc.rhs), False).to_json())
    except ContractError as exc:
        return fail(PRECONDITION, str(exc), vertex=exc.vertex)
    out = res.to_json()
    out["params"] = params.to_json()
    if not args.trace:
        out.pop("rounds")
    emit(out)
    return BUDGET if res.outcome.kind == "budget" else OK


def cmd_bounds(args) -> int:
    if args.what == "crossover":
        res = bnd.crossover(args.max_k, args.variant)
        data = res.to_json()
    elif args.what == "thresholds":
        data = bnd.thresholds(args.k).to_json()
    else:
        if args.n is None:
            return fail(PRECONDITION, "bounds needs --n")
        data = bnd.eval_bounds(args.n, args.k).to_json()
    if args.json:
        emit(data)
        return OK
    if "bounds" in data:
        for b in data["bounds"]:
            value = "" if b["value"] is None else f"  = {b['value']:.6g}"
            sys.stdout.write(f"{b['name']:<28} log10 {b['log10']:.9f}{value}\n")
    else:
        for key in sorted(data):
            sys.stdout.write(f"{key:<16} {data[key]}\n")
    return OK


# verify


def _certificates(obj):
    """Every dict inside ``obj`` that looks like a certificate or a cycle report."""
    if isinstance(obj, dict):
        if "cycle" in obj and isinstance(obj["cycle"], list):
            yield obj
        for v in obj.values():
            yield from _certificates(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from _certificates(v)


def cmd_verify(args) -> int:
    g, text = read_graph(args.input)
    try:
        doc = json.loads(read_text(args.certificate))
    except json.JSONDecodeError as exc:
        raise InputError(f"certificate file is not JSON: {exc}") from None
    _, lay = parse_fixture_comments(text)
    t = TrilayeredView.of(g, *lay) if lay else None
    results = []
    for obj in _certificates(doc):
        if "chord" not in obj:
            kind, ok = "cycle", is_c2k(g, obj["cycle"], args.k)
        else:
            cert, witness = ThetaCertificate.from_json(obj)
            if witness is None:
                kind, ok = "theta", verify_theta(g, cert, args.k)
            elif t is None:
                kind, ok = "well_placed", False
            else:
                kind, ok = "well_placed", verify_well_placed(t, cert, witness, args.k)
        results.append({"kind": kind, "valid": ok, "cycle": obj["cycle"]})
    emit({"checked": len(results), "results": results, "valid": all(r["valid"] for r in results)})
    if not results:
        return NOT_FOUND
    return OK if all(r["valid"] for r in results) else NOT_FOUND


# parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="evencycle", description="Even-cycle extremal machinery at desk scale.")
    sub = ap.add_subparsers(dest="command", required=True)

    def graph_input(p):
        p.add_argument("-i", "--input", default="-", help="edge-list file ('-' for stdin)")

    def oracle_budget(p):
        p.add_argument("--budget", type=int, default=SearchBudget().max_steps, help="exhaustive search step cap")
        p.add_argument("--max-vertices", type=int, default=SearchBudget().max_vertices)

    def layered(p):
        p.add_argument("--root", type=int, help="take layers from BFS at this root instead of file comments")
        p.add_argument("--level", type=int, default=1, help="trilayer index i with --root")

    p = sub.add_parser("gen", help="generate a graph as an edge list")
    p.add_argument("family", choices=["random", "bipartite", "cycle", "trilayer-fixture"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--p", type=float, default=0.3)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--name", default="base-theta", help="fixture name for trilayer-fixture")
    p.add_argument("--params", help="fixture keyword arguments, e.g. k=3,n2=20")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("reduce", help="run the degree-controlled reduction")
    graph_input(p)
    p.add_argument("--alpha", type=frac, required=True)
    p.add_argument("--c", required=True, help="constant, e.g. 2 or 400*40^-3/2")
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("find", help="look for a 2k-cycle")
    graph_input(p)
    oracle_budget(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=frac)
    p.add_argument("--delta", type=frac)
    p.add_argument("--root", type=int)
    p.add_argument("--no-window", action="store_true", help="report the degree window without enforcing it")
    p.add_argument("--variant", choices=["sqrt5", "sqrt10"], default="sqrt5")
    p.set_defaults(func=cmd_find)

    p = sub.add_parser("theta", help="find a theta graph")
    graph_input(p)
    oracle_budget(p)
    p.add_argument("method", choices=["exact", "min-degree", "avg-degree"])
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_theta)

    p = sub.add_parser("audit", help="BFS level audits")
    graph_input(p)
    oracle_budget(p)
    p.add_argument("kind", choices=["layers", "expansion"])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=float)
    p.add_argument("--root", type=int)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("chain", help="iterate the subset chain on a trilayered graph")
    graph_input(p)
    layered(p)
    p.add_argument("--d", type=frac, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--delta", type=frac, required=True)
    p.add_argument("--C", type=frac, required=True)
    p.add_argument("--steps", type=int)
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("embed", help="grow a good path or extract a theta")
    graph_input(p)
    layered(p)
    p.add_argument("--params", required=True, help="A=..,B=..,D=..,Delta=..,d=..,k=..")
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("bounds", help="evaluate the bound formulas")
    p.add_argument("what", nargs="?", choices=["eval", "crossover", "thresholds"], default="eval")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--max-k", type=int, default=100)
    p.add_argument("--variant", choices=["sqrt5", "sqrt10"], default="sqrt5")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("verify", help="re-check certificates from a JSON report")
    graph_input(p)
    p.add_argument("--certificate", required=True, help="JSON output of another command")
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_verify)
    return ap


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        return fail(IO_ERROR, str(exc))
    except BudgetExceeded as exc:
        return fail(BUDGET, str(exc))


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
