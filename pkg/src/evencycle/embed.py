"""Growing a good path through a trilayered graph, or extracting a theta.

A path is *good* when each of its V2 vertices keeps a V1 neighbour off
the path. The path runs anchor to anchor (anchors in V1), each segment
alternating V2/V3 for ``2D`` edges. One extension grows a family of
vertex-disjoint partial segments from the last anchor, round by round:

* Procedure 1 reserves ``ceil(d/(2k+1))`` fresh V3 neighbours per frontier
  vertex;
* Procedure 2 steps from a reserved V3 vertex back to a new V2 vertex,
  keeping endpoints distinct;
* a greedy filter keeps pairwise disjoint partial segments.

Every obstruction the argument turns into a theta graph is handed to a
single extractor that closes cycles along the current walk and returns
only what the checkers accept. Shortfalls the argument rules out only at
large parameters are logged and, if they stop the walk, reported.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .checks import Check, first_failure
from .exact import to_fraction
from .graph import Graph, TrilayeredView
from .theta import (
    ThetaCertificate,
    ThetaInvariantError,
    bipartite_theta_from_sets,
    chords_of,
    verify_theta,
    verify_well_placed,
    well_placed_witness,
)
from .trilayer_search import MinDegSpec, PreconditionError, eq4_eq5, violations


class ContractError(ValueError):
    """A V2 vertex has more than ``Delta*d`` neighbours in V3."""

    def __init__(self, vertex: int, degree: int, cap: float):
        super().__init__(f"vertex {vertex} has {degree} neighbours in V3, above Delta*d = {cap:.6g}")
        self.vertex = vertex
        self.degree = degree
        self.cap = cap


@dataclass(frozen=True)
class EmbedParams:
    A: Fraction
    B: Fraction
    D: int
    Delta: Fraction
    d: Fraction
    k: int

    def __init__(self, A, B, D, Delta, d, k):
        if int(D) != D or D < 1:
            raise ValueError("D must be a positive integer (segment length is 2D)")
        object.__setattr__(self, "A", to_fraction(A))
        object.__setattr__(self, "B", to_fraction(B))
        object.__setattr__(self, "D", int(D))
        object.__setattr__(self, "Delta", to_fraction(Delta))
        object.__setattr__(self, "d", to_fraction(d))
        object.__setattr__(self, "k", int(k))

    @property
    def C(self) -> Fraction:
        return self.d + self.k

    @property
    def spec(self) -> MinDegSpec:
        return MinDegSpec(self.A, self.B, self.C, self.D)

    @property
    def t_small(self) -> int:
        """Anchor-count threshold ``ceil(B/2)``."""
        return math.ceil(self.B / 2)

    @property
    def reserve(self) -> int:
        """``ceil(d/(2k+1))`` V3 vertices reserved per frontier vertex."""
        return math.ceil(self.d / (2 * self.k + 1))

    def to_json(self) -> dict:
        return {"A": float(self.A), "B": float(self.B), "D": self.D, "Delta": float(self.Delta), "d": float(self.d), "k": self.k}


@dataclass(frozen=True)
class GoodPath:
    vertices: tuple[int, ...]
    anchors: tuple[int, ...]
    witness: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "anchors": list(self.anchors),
            "witness": {str(v): w for v, w in sorted(self.witness.items())},
        }


def goodness_map(t: TrilayeredView, seq: Sequence[int]) -> dict[int, int] | None:
    """Smallest off-path V1 neighbour for each V2 vertex of ``seq``, or None."""
    on = set(seq)
    out = {}
    for v in seq:
        if v in t.V2:
            off = t.nbrs(v, 1) - on
            if not off:
                return None
            out[v] = min(off)
    return out


def check_good(t: TrilayeredView, p: GoodPath) -> bool:
    seq = p.vertices
    if not seq or len(set(seq)) != len(seq) or not set(seq) <= t.vertices:
        return False
    if any(not t.has_edge(a, b) for a, b in zip(seq, seq[1:])):
        return False
    if not p.anchors or p.anchors[0] != seq[0] or p.anchors[-1] != seq[-1]:
        return False
    if any(a not in t.V1 for a in p.anchors) or not set(p.anchors) <= set(seq):
        return False
    on = set(seq)
    if set(p.witness) != set(seq) & t.V2:
        return False
    return all(w in t.V1 and w not in on and t.base.has_edge(v, w) for v, w in p.witness.items())


@dataclass(frozen=True)
class ThetaInV2V3:
    certificate: ThetaCertificate
    source: str = ""
    kind: str = "theta_v2v3"

    def to_json(self) -> dict:
        return {"outcome": self.kind, "source": self.source, "certificate": self.certificate.to_json()}


@dataclass(frozen=True)
class WellPlaced:
    certificate: ThetaCertificate
    witness: dict
    source: str = ""
    kind: str = "well_placed"

    def to_json(self) -> dict:
        return {"outcome": self.kind, "source": self.source, "certificate": self.certificate.to_json(self.witness)}


@dataclass(frozen=True)
class BudgetReport:
    path: GoodPath
    shortfall: Check
    kind: str = "budget"

    def to_json(self) -> dict:
        return {"outcome": self.kind, "path": self.path.to_json(), "shortfall": self.shortfall.to_json()}


EmbedOutcome = ThetaInV2V3 | WellPlaced | BudgetReport


def _accept(t: TrilayeredView, view: Graph, cert: ThetaCertificate, k: int, source: str):
    inside = cert.vertices
    if inside <= t.V2 | t.V3:
        if not verify_theta(view, cert, k):
            raise ThetaInvariantError(f"{source}: {cert} fails verification", cert.cycle)
        return ThetaInV2V3(cert, source)
    witness = well_placed_witness(t, cert)
    if witness is None:
        return None
    if not verify_well_placed(t, cert, witness, k):
        raise ThetaInvariantError(f"{source}: {cert} fails verification", cert.cycle)
    return WellPlaced(cert, witness, source)


def extract_theta(
    t: TrilayeredView, seq: Sequence[int], k: int, extra: Iterable[int] = (), source: str = "walk", view: Graph | None = None
):
    """A checked theta closed along the walk ``seq``, or None.

    Tries every cycle made of a stretch of ``seq`` closed by one edge, then
    every cycle made of a stretch plus one vertex (from ``extra`` or from
    ``seq`` outside the stretch) adjacent to both ends. A cycle with a
    chord is kept if it lies in V2 and V3, or is well placed.
    """
    view = view or t.graph()
    seq = list(seq)
    pos = {v: i for i, v in enumerate(seq)}
    L = max(2 * k, 3)
    for j, y in enumerate(seq):
        for x in sorted(view.adj[y]):
            i = pos.get(x)
            if i is None or j - i + 1 < L:
                continue
            cycle = tuple(seq[i : j + 1])
            chords = chords_of(view.adj, cycle)
            if chords:
                got = _accept(t, view, ThetaCertificate(cycle, chords[0]), k, source)
                if got is not None:
                    return got
    outside = [x for x in extra if x not in pos]
    for x in outside + seq:
        hits = sorted(pos[y] for y in view.adj[x] if y in pos)
        px = pos.get(x)
        for ai, a in enumerate(hits):
            for b in reversed(hits[ai + 1 :]):
                if b - a + 2 < L:
                    break
                if px is not None and a <= px <= b:
                    continue
                cycle = (x,) + tuple(seq[a : b + 1])
                chords = chords_of(view.adj, cycle)
                if chords:
                    got = _accept(t, view, ThetaCertificate(cycle, chords[0]), k, source)
                    if got is not None:
                        return got
    return None


def eps(D, i: int, k: int, Delta) -> Fraction:
    """``(D-i) / (4(2k+1)Delta)``."""
    return Fraction(to_fraction(D) - i) / (4 * (2 * k + 1) * to_fraction(Delta))


def disjoint_bound(A, k: int, Delta, D: int, i: int) -> float:
    """The displayed closed-form lower bound on ``|U_i|`` (informational)."""
    prod = 1.0
    for j in range(1, D):
        prod *= (D - j) / (j + 1)
    return -3 * k + float(A) * (1 / (8 * (2 * k + 1) * float(Delta))) ** i * prod


@dataclass
class ExtensionState:
    """Frontier after ``i`` rounds: ``Q[u]`` is the partial segment from U_0 to ``u``."""

    i: int
    P: tuple[int, ...]
    Q: dict[int, tuple[int, ...]]
    S1: list[int] = field(default_factory=list)
    F1: list[int] = field(default_factory=list)
    T: dict[int, tuple[int, ...]] = field(default_factory=dict)
    S2: list[int] = field(default_factory=list)
    F2: list[int] = field(default_factory=list)
    Dset: dict[int, tuple[int, int]] = field(default_factory=dict)

    @property
    def U(self) -> list[int]:
        return sorted(self.Q)

    def path_to(self, u: int) -> tuple[int, ...]:
        return self.P + self.Q[u]


def procedure_one(t: TrilayeredView, state: ExtensionState, d, k: int, rng: random.Random | None = None):
    """Reserve ``ceil(d/(2k+1))`` fresh V3 neighbours for as many frontier vertices as possible.

    Returns ``(S1, F1, T)``, or a ``ThetaInV2V3`` when fewer than half the
    frontier succeeded and the failures pack into a dense G[F1, T].
    """
    d = to_fraction(d)
    size = math.ceil(d / (2 * k + 1))
    for u in state.U:
        off = t.nbrs(u, 3) - set(state.path_to(u))
        if len(off) < d:
            raise PreconditionError(f"off-path V3 degree of {u}", len(off), d)
    order = state.U
    if rng is not None:
        order = order[:]
        rng.shuffle(order)
    taken: set[int] = set()
    S1, F1, T = [], [], {}
    for u in order:
        M = sorted(t.nbrs(u, 3) - taken - set(state.path_to(u)))
        if len(M) >= d / (2 * k + 1):
            pick = tuple(M[:size]) if rng is None else tuple(sorted(rng.sample(M, size)))
            T[u] = pick
            taken.update(pick)
            S1.append(u)
        else:
            F1.append(u)
    state.S1, state.F1, state.T = sorted(S1), sorted(F1), T
    if 2 * len(S1) < len(state.Q) and F1:
        cert = bipartite_theta_from_sets(t.base, F1, taken, k)
        if cert is not None:
            return ThetaInV2V3(cert, "procedure_one")
    return state.S1, state.F1, state.T


def max_v3_degree(t: TrilayeredView) -> tuple[int, int]:
    """(degree, vertex) of the V2 vertex with most V3 neighbours; smallest id on ties."""
    return max(((len(t.nbrs(v, 3)), -v) for v in t.V2), default=(0, 0))


def procedure_two(t: TrilayeredView, state: ExtensionState, Delta, d, k: int, i: int, Dparam: int):
    """Two-step extensions ``u -> v -> w`` with distinct endpoints ``w``.

    Returns ``(S2, F2, Dset, guarantee)``; ``guarantee`` compares ``|S2|``
    against ``eps*|S1| - 2k``.
    """
    cap = to_fraction(Delta) * to_fraction(d)
    deg, neg = max_v3_degree(t)
    if deg > cap:
        raise ContractError(-neg, deg, float(cap))
    Dset: dict[int, tuple[int, int]] = {}
    S2, F2 = [], []
    for u in state.S1:
        on = set(state.path_to(u))
        done = False
        for v in state.T[u]:
            for w in sorted(t.nbrs(v, 2) - on - set(Dset)):
                Dset[w] = (u, v)
                done = True
                break
            if done:
                break
        (S2 if done else F2).append(u)
    state.S2, state.F2, state.Dset = S2, F2, Dset
    need = eps(Dparam, i, k, Delta) * len(state.S1) - 2 * k
    guarantee = Check(f"procedure_two[{i}]", len(S2), float(need), len(S2) >= need)
    return S2, F2, Dset, guarantee


def disjoint_filter(paths: dict[int, tuple[int, ...]]) -> dict[int, tuple[int, ...]]:
    """Greedy maximal family of pairwise vertex-disjoint paths, by endpoint id."""
    used: set[int] = set()
    out = {}
    for w in sorted(paths):
        p = paths[w]
        if used.isdisjoint(p):
            out[w] = p
            used.update(p)
    return out


def assert_disjoint(paths: dict[int, tuple[int, ...]]) -> None:
    seen: set[int] = set()
    for w in sorted(paths):
        if not seen.isdisjoint(paths[w]):
            raise ThetaInvariantError(f"frontier paths overlap at endpoint {w}", paths[w])
        seen.update(paths[w])


@dataclass
class RoundTrace:
    """One frontier round; ``stage`` is "U0" for the initial filter, else "round"."""

    stage: str
    i: int
    U: int
    S1: int = 0
    F1: int = 0
    T: int = 0
    S2: int = 0
    survivors: int = 0
    checks: list[Check] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {k: v for k, v in self.__dict__.items() if k != "checks"}
        out["checks"] = [c.to_json() for c in self.checks]
        return out


def check_preconditions(t: TrilayeredView, p: EmbedParams) -> list[Check]:
    checks = []
    bad = violations(t, p.spec)
    checks.append(Check("min_degree", -len(bad), 0, not bad))
    checks.append(Check("B_at_least_5", float(p.B), 5, p.B >= 5))
    checks.extend(eq4_eq5(p.A, p.B, p.D, p.Delta, p.k))
    deg, _ = max_v3_degree(t)
    cap = p.Delta * p.d
    checks.append(Check("max_v3_degree", deg, float(cap), deg <= cap))
    return checks


def _require(t: TrilayeredView, p: EmbedParams) -> None:
    bad = first_failure(check_preconditions(t, p))
    if bad is None:
        return
    if bad.name == "min_degree":
        v, side, deg = violations(t, p.spec)[0]
        raise PreconditionError(f"min_degree side {side} at vertex {v}", deg, float(getattr(p.spec, side)))
    if bad.name == "max_v3_degree":
        deg, neg = max_v3_degree(t)
        raise ContractError(-neg, deg, bad.rhs)
    raise PreconditionError(bad.name, bad.lhs, bad.rhs)


def _anchor_check(t: TrilayeredView, path: GoodPath, k: int, view: Graph):
    """Any anchor with k or more V2 neighbours on the path closes a theta."""
    on2 = set(path.vertices) & t.V2
    for a in path.anchors:
        if len(t.nbrs(a, 2) & on2) >= k:
            return a, extract_theta(t, path.vertices, k, source="anchor", view=view)
    return None, None


def extend_once(t: TrilayeredView, path: GoodPath, p: EmbedParams, trace: list | None = None, rng=None, check=True):
    """One more anchor on a good path, or an outcome."""
    if check:
        _require(t, p)
    k = p.k
    view = t.graph()
    trace = trace if trace is not None else []
    anchor, got = _anchor_check(t, path, k, view)
    if got is not None:
        return got
    if anchor is not None:
        return BudgetReport(path, Check(f"anchor {anchor} closes no theta", k, k - 1, False))

    P = path.vertices
    last = P[-1]
    on = set(P)
    first_short: Check | None = None

    def note(c: Check):
        nonlocal first_short
        r.checks.append(c)
        if not c.passed and first_short is None:
            first_short = c

    # U_0 with the anchor-count filter
    Q: dict[int, tuple[int, ...]] = {}
    r = RoundTrace("U0", 0, 0)
    for u in sorted(t.nbrs(last, 2) - on):
        if len(t.nbrs(u, 1) & set(path.anchors)) >= p.t_small:
            got = extract_theta(t, P + (u,), k, source="anchor_count", view=view)
            if got is not None:
                return got
            continue
        Q[u] = (u,)
    r.U = len(Q)
    note(Check("U0_size", len(Q), float(p.A - k), len(Q) >= p.A - k))
    trace.append(r)

    for i in range(p.D - 1):
        assert_disjoint(Q)
        state = ExtensionState(i, P, Q)
        # a frontier vertex with more than k V3 neighbours on its own walk closes a theta
        for u in state.U:
            walk = state.path_to(u)
            if len(t.nbrs(u, 3) & set(walk)) > k:
                got = extract_theta(t, walk, k, source="frontier_v3", view=view)
                if got is not None:
                    return got
                del Q[u]
        if not Q:
            break
        r = RoundTrace("round", i, len(Q))
        trace.append(r)
        try:
            res = procedure_one(t, state, p.d, k, rng=rng)
        except PreconditionError as exc:
            return BudgetReport(path, Check(exc.name, float(exc.lhs), float(exc.rhs), False))
        if isinstance(res, ThetaInV2V3):
            return res
        r.S1, r.F1, r.T = len(state.S1), len(state.F1), sum(len(x) for x in state.T.values())
        note(Check(f"procedure_one[{i}]", 2 * r.S1, r.U, 2 * r.S1 >= r.U))
        # every reserved vertex needs D-i ways back into V2, or it closes a theta
        tail = set(P[-2 * k :])
        for u in state.S1:
            for v in state.T[u]:
                walk = state.path_to(u) + (v,)
                usable = t.nbrs(v, 2) - set(walk) | (t.nbrs(v, 2) & tail)
                if len(usable) < p.D - i:
                    got = extract_theta(t, walk, k, source="reserved_v3", view=view)
                    if got is not None:
                        return got
                    note(Check(f"targets_of_{v}", len(usable), p.D - i, False))
        S2, _, Dset, guarantee = procedure_two(t, state, p.Delta, p.d, k, i, p.D)
        r.S2 = len(S2)
        note(guarantee)
        # endpoints that already see t_small anchors would break goodness
        paths = {}
        for w, (u, v) in Dset.items():
            walk = state.path_to(u) + (v, w)
            if len(t.nbrs(w, 1) & set(path.anchors)) >= p.t_small:
                got = extract_theta(t, walk, k, source="anchor_count", view=view)
                if got is not None:
                    return got
                continue
            paths[w] = Q[u] + (v, w)
        kept = disjoint_filter(paths)
        r.survivors = len(kept)
        floor = math.ceil(len(paths) / (2 * i + 2)) if paths else 0
        note(Check(f"disjoint_filter[{i}]", len(kept), floor, len(kept) >= floor))
        bound = float(eps(p.D, i, k, p.Delta)) / (2 * (i + 1)) * len(Q) - 2 * k
        note(Check(f"U_{i + 1}_recurrence", len(kept), bound, len(kept) >= bound))
        Q = kept
        if not Q:
            break

    if not Q:
        short = first_short or Check("frontier_empty", 0, 1, False)
        return BudgetReport(path, short)

    # close the segment on a fresh anchor, keeping the path good
    for u in sorted(Q):
        walk = P + Q[u]
        for v in sorted(t.nbrs(u, 1) - set(walk)):
            seq = walk + (v,)
            good = goodness_map(t, seq)
            if good is not None:
                out = GoodPath(seq, path.anchors + (v,), good)
                if not check_good(t, out):
                    raise ThetaInvariantError("extended path fails the goodness check", seq)
                return out
            got = extract_theta(t, seq, k, source="final_anchor", view=view)
            if got is not None:
                return got
    return BudgetReport(path, first_short or Check("final_anchor", 0, 1, False))


@dataclass
class EmbedResult:
    outcome: EmbedOutcome
    path: GoodPath
    rounds: list[RoundTrace] = field(default_factory=list)
    extensions: int = 0

    def to_json(self) -> dict:
        out = self.outcome.to_json()
        out["extensions"] = self.extensions
        out["final_path"] = self.path.to_json()
        out["rounds"] = [r.to_json() for r in self.rounds]
        return out


def embed_or_theta(t: TrilayeredView, p: EmbedParams, rng: random.Random | None = None) -> EmbedResult:
    """Extend from the smallest V1 vertex until a theta or a shortfall stops the walk."""
    if not t.V1 or not t.V2:
        empty = GoodPath((min(t.V1),), (min(t.V1),), {}) if t.V1 else GoodPath((), (), {})
        return EmbedResult(BudgetReport(empty, Check("V2_nonempty", len(t.V2), 1, False)), empty)
    _require(t, p)
    v0 = min(t.V1)
    path = GoodPath((v0,), (v0,), {})
    rounds: list[RoundTrace] = []
    steps = 0
    while True:
        got = extend_once(t, path, p, rounds, rng=rng, check=False)
        if not isinstance(got, GoodPath):
            return EmbedResult(got, path, rounds, steps)
        path = got
        steps += 1
        if steps > len(t.V1):
            raise ThetaInvariantError("more anchors than V1 vertices", path.vertices)
