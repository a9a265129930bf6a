"""Degree-controlled reduction of a dense graph.

Turns the existential "take the subgraph maximising e/v^(1+alpha/2)"
argument into a local-improvement loop. Each round looks at the
``ceil(gamma*v)`` highest-degree vertices ``S``:

* if they touch at least a quarter of the edges, move to the subgraph
  induced on ``S`` plus the ``ceil(eta*v)`` vertices with most edges into
  ``S`` (kept only if the ratio strictly grows);
* otherwise drop every edge at ``S`` and peel vertices of degree below
  ``e/(2v)``; that is the output.

The guaranteed conclusions are then evaluated on the output, exactly, and
reported one by one rather than assumed.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .checks import Check
from .exact import PowerProduct, to_fraction
from .graph import Graph


class ReductionHypothesisError(ValueError):
    def __init__(self, edges: int, threshold: float):
        super().__init__(f"e(G) = {edges} is below c*n^(1+alpha) = {threshold:.6g}")
        self.edges = edges
        self.threshold = threshold


class ReductionCollapse(RuntimeError):
    def __init__(self, message: str, transcript: list):
        super().__init__(message)
        self.transcript = transcript


@dataclass(frozen=True)
class ReductionParams:
    alpha: Fraction
    c: PowerProduct

    def __init__(self, alpha, c):
        alpha = to_fraction(alpha)
        if not 0 < alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        c = PowerProduct.parse(c) if isinstance(c, str) else PowerProduct.of(c)
        if c.coef <= 0:
            raise ValueError("c must be positive")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "c", c)

    @property
    def gamma(self) -> PowerProduct:
        """``(20/alpha)^(-2/alpha)``, exact."""
        return PowerProduct.power(20 / self.alpha, -2 / self.alpha)

    @property
    def eta(self) -> PowerProduct:
        return self.gamma * (2 / self.alpha)


@dataclass(frozen=True)
class Step:
    branch: str  # "shrink", "shrink-rejected" or "final"
    v: int
    e: int
    s_size: int
    t_size: int
    ratio_before: float
    ratio_after: float | None

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class ReductionResult:
    subgraph: Graph
    checks: dict[str, Check]
    transcript: list[Step] = field(default_factory=list)
    # e(H), v(H) of the last improving subgraph; the peeling floor is e(H)/(2 v(H))
    final_e: int = 0
    final_v: int = 0

    @property
    def shrink_steps(self) -> int:
        return sum(1 for s in self.transcript if s.branch == "shrink")

    def to_json(self) -> dict:
        g = self.subgraph
        return {
            "vertices": list(g.labels),
            "edges": [[g.labels[u], g.labels[v]] for u, v in g.edges()],
            "checks": [c.to_json() for c in self.checks.values()],
            "transcript": [s.to_json() for s in self.transcript],
        }


def ratio(h: Graph, beta) -> float:
    """``e(h) / v(h)^(1+beta)``, correctly rounded to a double."""
    if h.n == 0:
        raise ValueError("ratio of the empty graph")
    beta = to_fraction(beta)
    return _ratio(h.m, h.n, beta)


def _ratio(e: int, v: int, beta: Fraction) -> float:
    with mpmath.workdps(60):
        return float(mpmath.mpf(e) / mpmath.power(v, 1 + mpmath.mpf(beta.numerator) / beta.denominator))


def _ratio_exact(e: int, v: int, beta: Fraction) -> PowerProduct:
    return PowerProduct.of(e) / PowerProduct.power(v, 1 + beta)


def reduce(g: Graph, p: ReductionParams) -> ReductionResult:
    alpha = p.alpha
    half = alpha / 2
    n = g.n
    threshold = p.c * PowerProduct.power(n, 1 + alpha) if n else PowerProduct.of(0)
    if n == 0 or PowerProduct.of(g.m) < threshold:
        raise ReductionHypothesisError(g.m, float(threshold))

    adj = {v: set(g.adj[v]) for v in range(n)}
    e = g.m
    transcript: list[Step] = []
    gamma, eta = p.gamma, p.eta

    while True:
        v = len(adj)
        s_size = min(v, (gamma * v).ceil())
        by_degree = sorted(adj, key=lambda x: (-len(adj[x]), x))
        S = set(by_degree[:s_size])
        inner = sum(1 for x in S for y in adj[x] if y in S) // 2
        touching = sum(len(adj[x]) for x in S) - inner
        before = _ratio(e, v, half)
        if 4 * touching >= e:
            t_size = min(v - s_size, (eta * v).ceil())
            into_s = sorted((x for x in adj if x not in S), key=lambda x: (-len(adj[x] & S), x))
            keep = S | set(into_s[:t_size])
            e_new = sum(1 for x in keep for y in adj[x] if y in keep) // 2
            if len(keep) < v and e_new and _ratio_exact(e_new, len(keep), half) > _ratio_exact(e, v, half):
                adj = {x: adj[x] & keep for x in keep}
                transcript.append(Step("shrink", v, e, s_size, t_size, before, _ratio(e_new, len(keep), half)))
                e = e_new
                continue
            transcript.append(Step("shrink-rejected", v, e, s_size, t_size, before, None))
        break

    # drop every edge touching S, then peel below e(H)/(2 v(H)) with the floor fixed from H
    final_e, final_v = e, v
    work = {x: (set() if x in S else adj[x] - S) for x in adj}
    heap = [x for x in work if 2 * final_v * len(work[x]) < final_e]
    heapq.heapify(heap)
    alive = set(work)
    while heap:
        x = heapq.heappop(heap)
        if x not in alive:
            continue
        alive.discard(x)
        for y in work[x]:
            if y in alive:
                work[y].discard(x)
                if 2 * final_v * len(work[y]) < final_e:
                    heapq.heappush(heap, y)
        work[x] = set()
    transcript.append(Step("final", final_v, final_e, len(S), 0, _ratio(final_e, final_v, half), None))
    if not alive:
        raise ReductionCollapse("peeling emptied the graph", transcript)
    order = sorted(alive)
    index = {x: i for i, x in enumerate(order)}
    edges = [(index[x], index[y]) for x in order for y in work[x] if x < y]
    sub = Graph(len(order), edges, [g.labels[x] for x in order])
    return ReductionResult(sub, evaluate_checks(sub, p, n, final_e, final_v), transcript, final_e, final_v)


def evaluate_checks(sub: Graph, p: ReductionParams, n: int, final_e: int, final_v: int) -> dict[str, Check]:
    """The guaranteed conclusions for ``sub`` (taken from an ``n``-vertex graph), each with both sides.

    Two readings are evaluated where the statement is ambiguous: the edge
    bound with exponent 1+alpha and 1+alpha/2, and the minimum degree
    against (c/2) v^alpha and against the peeling floor e(H)/(2v(H)).
    """
    alpha, c = p.alpha, p.c
    v, e = sub.n, sub.m
    degs = [sub.degree(x) for x in range(v)]
    dmin, dmax = min(degs), max(degs)

    def check(name, lhs, rhs):
        lhs, rhs = PowerProduct.of(lhs), PowerProduct.of(rhs)
        return Check(name, float(lhs), float(rhs), lhs >= rhs)

    checks = [
        check("vertex_count", v, c * p.gamma * PowerProduct.power(n, alpha / 2)),
        check("edge_count", e, c / 4 * PowerProduct.power(v, 1 + alpha)),
        check("edge_count_half_exponent", e, c / 4 * PowerProduct.power(v, 1 + alpha / 2)),
        check("min_degree", dmin, c / 2 * PowerProduct.power(v, alpha)),
        check("min_degree_floor", dmin, PowerProduct.of(Fraction(final_e, 2 * final_v))),
        # d_max/d_min <= 1/gamma, rearranged to stay exact
        check("degree_ratio", dmin, p.gamma * dmax),
    ]
    return {ch.name: ch for ch in checks}
