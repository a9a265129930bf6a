"""BFS exploration of a graph: expansion audits, layer theta audits, and the
full search pipeline that hands trilayered levels to the chain and the
path embedder.

Levels are BFS layers from a root. At each level the pipeline evaluates
the three edge-count conditions; where they hold it runs the subset
chain with ``C = d + k`` and, on a minimum-degree subgraph, the path
embedder. Whatever certificate comes out is reported as a certificate.
A cycle is only reported when the exhaustive search found it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .checks import Check, first_failure
from .embed import ContractError, EmbedParams, embed_or_theta
from .graph import Graph, TrilayeredView, bfs_layers, edges_between, trilayer
from .oracle import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    SearchBudget,
    find_c2k_exact,
    find_theta_exact,
    find_well_placed_theta_exact,
)
from .theta import ThetaCertificate, ThetaInvariantError, verify_theta, verify_well_placed
from .trilayer_search import PreconditionError, check_conditions, iterate_chain


def default_d(n: int, k: int, variant: str = "sqrt5") -> float:
    """``2*sqrt(5)*sqrt(k ln k)*n^(1/k)``; ``variant="sqrt10"`` uses 2*sqrt(10)."""
    c = {"sqrt5": 5, "sqrt10": 10}[variant]
    return 2 * math.sqrt(c) * math.sqrt(k * math.log(k)) * n ** (1 / k)


def default_delta(k: int) -> float:
    return math.sqrt(k) * (20 * k) ** (2 * k)


# expansion audit


@dataclass
class LevelExpansion:
    i: int
    size: int
    next_size: int
    e_next: int
    checks: dict[str, Check] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "i": self.i,
            "size": self.size,
            "next_size": self.next_size,
            "e_next": self.e_next,
            "checks": {name: c.to_json() for name, c in self.checks.items()},
        }


@dataclass
class ExpansionAudit:
    root: int
    k: int
    d: float
    levels: list[LevelExpansion]

    def to_json(self) -> dict:
        return {"root": self.root, "k": self.k, "d": self.d, "levels": [lv.to_json() for lv in self.levels]}


def expansion_audit(g: Graph, root: int, k: int, d: float) -> ExpansionAudit:
    """Evaluate the four expansion inequalities at every level ``0 <= i < k``.

    ``eq12``: e(V_i, V_i+1) >= 2d|V_i|; ``eq13``: e(V_i, V_i+1) <= 2k|V_i+1|;
    ``eq14``: |V_i+1| >= d|V_i|/k; ``eq15`` (i >= 1):
    |V_i+1| >= d^2/(20 k ln k) |V_i-1|. Natural log.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    L = bfs_layers(g, root, k).layers
    d = float(d)
    out = []
    for i in range(k):
        e = edges_between(g, L[i], L[i + 1])
        n_i, n_next = len(L[i]), len(L[i + 1])
        lv = LevelExpansion(i, n_i, n_next, e)
        lv.checks["eq12"] = Check("eq12", e, 2 * d * n_i, e >= 2 * d * n_i)
        lv.checks["eq13"] = Check("eq13", e, 2 * k * n_next, e <= 2 * k * n_next)
        lv.checks["eq14"] = Check("eq14", n_next, d * n_i / k, n_next >= d * n_i / k)
        if i >= 1:
            rhs = d * d / (20 * k * math.log(k)) * len(L[i - 1])
            lv.checks["eq15"] = Check("eq15", n_next, rhs, n_next >= rhs)
        out.append(lv)
    return ExpansionAudit(root, k, d, out)


# layer theta audit


class CycleFound(ValueError):
    """The audit needs a graph without a 2k-cycle; this one has one."""

    def __init__(self, cycle: tuple[int, ...]):
        super().__init__(f"graph contains the {len(cycle)}-cycle {list(cycle)}")
        self.cycle = cycle


def pair_graph(g: Graph, a, b) -> Graph:
    """G[a, b]: the edges of ``g`` with one end in each set."""
    a, b = set(a), set(b)
    return g.spanning((u, v) for u, v in g.edges() if (u in a and v in b) or (u in b and v in a))


@dataclass
class LayerThetaLevel:
    root: int
    i: int
    pair_theta: ThetaCertificate | None = None
    trilayer_theta: tuple[ThetaCertificate, dict] | None = None

    @property
    def passed(self) -> bool:
        return self.pair_theta is None and self.trilayer_theta is None

    def to_json(self) -> dict:
        out = {"root": self.root, "i": self.i, "passed": self.passed}
        if self.pair_theta is not None:
            out["pair_theta"] = self.pair_theta.to_json()
        if self.trilayer_theta is not None:
            out["trilayer_theta"] = self.trilayer_theta[0].to_json(self.trilayer_theta[1])
        return out


@dataclass
class LayerThetaAudit:
    k: int
    levels: list[LayerThetaLevel]

    @property
    def passed(self) -> bool:
        return all(lv.passed for lv in self.levels)

    @property
    def counterexamples(self) -> list[LayerThetaLevel]:
        return [lv for lv in self.levels if not lv.passed]

    def to_json(self) -> dict:
        return {"k": self.k, "passed": self.passed, "levels": [lv.to_json() for lv in self.levels]}


def layer_theta_audit(
    g: Graph, k: int, budget: SearchBudget = DEFAULT_BUDGET, roots=None
) -> LayerThetaAudit:
    """From every root, look for a theta in each G[V_i, V_i+1] and a well-placed
    theta in each G[V_i-1, V_i, V_i+1], for 1 <= i <= k-1.

    Raises :class:`CycleFound` if ``g`` has a 2k-cycle. The intra-level
    G[V_i] case is not audited.
    """
    cycle = find_c2k_exact(g, k, budget)
    if cycle is not None:
        raise CycleFound(cycle)
    roots = range(g.n) if roots is None else roots
    out = []
    for root in roots:
        layers = bfs_layers(g, root, k)
        L = layers.layers
        for i in range(1, k):
            lv = LayerThetaLevel(root, i)
            lv.pair_theta = find_theta_exact(pair_graph(g, L[i], L[i + 1]), k, budget)
            lv.trilayer_theta = find_well_placed_theta_exact(trilayer(g, layers, i), k, budget)
            out.append(lv)
    return LayerThetaAudit(k, out)


# the pipeline


@dataclass
class CertificateLink:
    """One certificate found by the pipeline, with where it came from."""

    root: int
    level: int
    stage: str  # "chain" or "embed"
    kind: str
    certificate: ThetaCertificate
    witness: dict | None = None
    verified: bool = False

    def to_json(self) -> dict:
        return {
            "root": self.root,
            "level": self.level,
            "stage": self.stage,
            "kind": self.kind,
            "verified": self.verified,
            "certificate": self.certificate.to_json(self.witness),
        }


@dataclass
class FindReport:
    """``outcome`` is one of "cycle", "none", "certificate", "shortfall",
    "precondition" or "budget"."""

    outcome: str
    method: str
    k: int
    cycle: tuple[int, ...] | None = None
    failing: Check | None = None
    certificates: list[CertificateLink] = field(default_factory=list)
    roots: list[int] = field(default_factory=list)
    levels: list[dict] = field(default_factory=list)
    window: list[Check] = field(default_factory=list)

    def _root_json(self):
        if not self.roots:
            return None
        return self.roots[0] if len(self.roots) == 1 else self.roots

    def to_json(self) -> dict:
        out = {
            "outcome": self.outcome,
            "method": self.method,
            "k": self.k,
            "root": self._root_json(),
            "levels": self.levels,
            "certificates": [c.to_json() for c in self.certificates],
        }
        if self.cycle is not None:
            out["cycle"] = list(self.cycle)
        if self.failing is not None:
            out["failing"] = self.failing.to_json()
        if self.window:
            out["window"] = [c.to_json() for c in self.window]
        return out


def is_c2k(g: Graph, cycle, k: int) -> bool:
    L = len(cycle)
    return (
        L == 2 * k
        and len(set(cycle)) == L
        and all(0 <= v < g.n for v in cycle)
        and all(g.has_edge(cycle[i], cycle[(i + 1) % L]) for i in range(L))
    )


def default_roots(g: Graph) -> list[int]:
    """The ceil(log2 n) smallest-id vertices of minimum degree."""
    if g.n == 0:
        return []
    low = min(g.degree(v) for v in range(g.n))
    count = max(1, math.ceil(math.log2(g.n))) if g.n > 1 else 1
    return [v for v in range(g.n) if g.degree(v) == low][:count]


def degree_window(g: Graph, d: float, Delta: float, k: int) -> list[Check]:
    """d_min >= 2d + 5k^2 and d_max <= Delta*d, each naming its extreme vertex."""
    if g.n == 0:
        return []
    lo = min(range(g.n), key=lambda v: (g.degree(v), v))
    hi = max(range(g.n), key=lambda v: (g.degree(v), -v))
    need, cap = 2 * d + 5 * k * k, Delta * d
    return [
        Check(f"min_degree_at_vertex_{lo}", g.degree(lo), need, g.degree(lo) >= need),
        Check(f"max_degree_at_vertex_{hi}", g.degree(hi), cap, g.degree(hi) <= cap),
    ]


def _link(t: TrilayeredView, root: int, i: int, stage: str, kind: str, cert, witness, k: int) -> CertificateLink:
    if witness is None:
        ok = verify_theta(t.base, cert, k)
    else:
        ok = verify_well_placed(t, cert, witness, k)
    if not ok:
        raise ThetaInvariantError(f"{stage} certificate at root {root}, level {i} fails verification", cert.cycle)
    return CertificateLink(root, i, stage, kind, cert, witness, ok)


def run_level(t: TrilayeredView, root: int, i: int, d, k: int, Delta) -> tuple[dict, list[CertificateLink], Check | None]:
    """Conditions, chain and embedder on one trilayered level."""
    conds = check_conditions(t, d, k, Delta)
    rec = {"i": i, "sizes": [len(t.V1), len(t.V2), len(t.V3)], "conditions": {n: c.to_json() for n, c in conds.items()}}
    bad = first_failure(conds.values())
    if bad is not None:
        rec["stage"] = "conditions"
        return rec, [], bad
    try:
        chain = iterate_chain(t, d, k, Delta, d + k)
    except PreconditionError as exc:
        rec["stage"] = "chain"
        return rec, [], Check(exc.name, float(exc.lhs), float(exc.rhs), False)
    rec["chain"] = chain.to_json()
    if chain.kind == "theta":
        rec["stage"] = "chain"
        return rec, [_link(t, root, i, "chain", "theta_v1v2", chain.certificate, None, k)], None
    if chain.kind != "subgraph":
        rec["stage"] = "chain"
        return rec, [], chain.failure
    last = chain.steps[-1]
    sub = chain.subgraph.view
    rec["stage"] = "embed"
    try:
        p = EmbedParams(max(last.A, 0), last.B, math.ceil(last.D), Delta, d, k)
        res = embed_or_theta(sub, p)
    except (PreconditionError, ContractError) as exc:
        name = getattr(exc, "name", None) or f"max_v3_degree_at_vertex_{exc.vertex}"
        lhs = getattr(exc, "lhs", getattr(exc, "degree", 0))
        rhs = getattr(exc, "rhs", getattr(exc, "cap", 0))
        return rec, [], Check(name, float(lhs), float(rhs), False)
    rec["embed"] = res.to_json()
    o = res.outcome
    if o.kind == "budget":
        return rec, [], o.shortfall
    witness = getattr(o, "witness", None)
    return rec, [_link(sub, root, i, "embed", o.kind, o.certificate, witness, k)], None


def find_c2k(
    g: Graph,
    k: int,
    budget: SearchBudget = DEFAULT_BUDGET,
    d: float | None = None,
    Delta: float | None = None,
    roots=None,
    enforce_window: bool = True,
    variant: str = "sqrt5",
) -> FindReport:
    """Exhaustive search when ``g`` fits the budget, otherwise the pipeline.

    The pipeline never claims a cycle: its output is the certificates it
    found (each verified) or the first inequality that stopped it. With
    ``enforce_window=False`` the degree window is evaluated and reported
    but does not stop the run.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if g.n <= budget.max_vertices:
        try:
            cycle = find_c2k_exact(g, k, budget)
        except BudgetExceeded as exc:
            return FindReport("budget", "oracle", k, failing=Check("search_steps", exc.steps, budget.max_steps, False))
        if cycle is None:
            return FindReport("none", "oracle", k)
        if not is_c2k(g, cycle, k):
            raise AssertionError(f"oracle returned a non-cycle {cycle}")
        return FindReport("cycle", "oracle", k, cycle=cycle)

    d = default_d(g.n, k, variant) if d is None else d
    Delta = default_delta(k) if Delta is None else Delta
    window = degree_window(g, float(d), float(Delta), k)
    report = FindReport("shortfall", "pipeline", k, window=window)
    bad = first_failure(window)
    if bad is not None and enforce_window:
        report.outcome, report.failing = "precondition", bad
        return report
    report.roots = list(default_roots(g) if roots is None else roots)
    first_bad = None
    for root in report.roots:
        layers = bfs_layers(g, root, k)
        for i in range(1, k):
            if not all(layers.layers[j] for j in (i - 1, i, i + 1)):
                continue
            t = trilayer(g, layers, i)
            rec, links, fail = run_level(t, root, i, d, k, Delta)
            rec["root"] = root
            report.levels.append(rec)
            report.certificates.extend(links)
            if fail is not None and first_bad is None:
                first_bad = fail
    if any(c.verified for c in report.certificates):
        report.outcome = "certificate"
    else:
        report.failing = first_bad or Check("levels_examined", len(report.levels), 1, False)
    return report
