"""Theta-graph certificates, their checkers, and the constructive finders.

A theta certificate is a cycle of length at least ``2k`` plus one chord.
The finders never return an unchecked certificate: each output goes
through :func:`verify_theta` first and a failure there is raised as a bug.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .graph import BipartiteView, Graph, TrilayeredView, induced


class ThetaPreconditionError(ValueError):
    pass


class ThetaInvariantError(RuntimeError):
    """A finder produced something its own checker rejects. Always a bug."""

    def __init__(self, message: str, path: Sequence[int] = ()):
        super().__init__(message)
        self.path = tuple(path)


@dataclass(frozen=True)
class ThetaCertificate:
    cycle: tuple[int, ...]
    chord: tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, "cycle", tuple(self.cycle))
        u, v = self.chord
        object.__setattr__(self, "chord", (min(u, v), max(u, v)))

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(self.cycle)

    def to_json(self, witness: Mapping[int, int] | None = None) -> dict:
        out = {"cycle": list(self.cycle), "chord": list(self.chord)}
        if witness is not None:
            out["witness"] = {str(v): w for v, w in sorted(witness.items())}
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> tuple[ThetaCertificate, dict[int, int] | None]:
        cert = cls(tuple(int(v) for v in obj["cycle"]), tuple(int(v) for v in obj["chord"]))
        witness = obj.get("witness")
        if witness is not None:
            witness = {int(v): int(w) for v, w in witness.items()}
        return cert, witness

    def lift(self, labels: Sequence[int]) -> ThetaCertificate:
        """Rename vertices through a subgraph's label map."""
        return ThetaCertificate(tuple(labels[v] for v in self.cycle), (labels[self.chord[0]], labels[self.chord[1]]))


def chords_of(adj: Sequence[frozenset[int]], cycle: Sequence[int]) -> list[tuple[int, int]]:
    """All chords of ``cycle`` in ``adj``, sorted."""
    pos = {v: i for i, v in enumerate(cycle)}
    L = len(cycle)
    out = []
    for i, u in enumerate(cycle):
        for v in adj[u]:
            j = pos.get(v)
            if j is not None and j > i and 2 <= j - i <= L - 2:
                out.append((min(u, v), max(u, v)))
    return sorted(out)


def _is_theta(has_edge, cycle: Sequence[int], chord: tuple[int, int], k: int) -> bool:
    L = len(cycle)
    if L < max(2 * k, 3) or len(set(cycle)) != L:
        return False
    if not all(has_edge(cycle[i], cycle[(i + 1) % L]) for i in range(L)):
        return False
    u, v = chord
    pos = {w: i for i, w in enumerate(cycle)}
    if u not in pos or v not in pos:
        return False
    gap = abs(pos[u] - pos[v])
    return min(gap, L - gap) >= 2 and has_edge(u, v)


def verify_theta(g: Graph, cert: ThetaCertificate, k: int) -> bool:
    return _is_theta(g.has_edge, cert.cycle, cert.chord, k)


def well_placed_witness(t: TrilayeredView, cert: ThetaCertificate) -> dict[int, int] | None:
    """Smallest outside V1 neighbour for every V2 vertex of ``cert``, or None if one has none."""
    inside = cert.vertices
    witness = {}
    for v in sorted(inside & t.V2):
        outside = t.nbrs(v, 1) - inside
        if not outside:
            return None
        witness[v] = min(outside)
    return witness


def verify_well_placed(t: TrilayeredView, cert: ThetaCertificate, witness: Mapping[int, int], k: int) -> bool:
    """Theta inside the view, and ``witness`` covers exactly its V2 vertices with valid outside V1 neighbours."""
    inside = cert.vertices
    if not inside <= t.vertices:
        return False
    if not _is_theta(t.has_edge, cert.cycle, cert.chord, k):
        return False
    if set(witness) != set(inside & t.V2):
        return False
    return all(w in t.V1 and w not in inside and t.base.has_edge(v, w) for v, w in witness.items())


@dataclass(frozen=True)
class Peeling:
    kept: frozenset[int]
    order: tuple[int, ...]

    @property
    def empty(self) -> bool:
        return not self.kept


def peel(g: Graph, delta: int, within: Iterable[int] | None = None, rng: random.Random | None = None) -> Peeling:
    """Repeatedly delete vertices of degree ``< delta`` inside ``within``.

    Deletes the smallest violating id first, or a random violator when
    ``rng`` is given; the surviving set does not depend on the choice.
    """
    alive = set(range(g.n) if within is None else within)
    deg = {v: len(g.adj[v] & alive) for v in alive}
    order = []
    if rng is None:
        heap = [v for v in alive if deg[v] < delta]
        heapq.heapify(heap)
        while heap:
            v = heapq.heappop(heap)
            if v not in alive:
                continue
            alive.discard(v)
            order.append(v)
            for u in g.adj[v]:
                if u in alive:
                    deg[u] -= 1
                    if deg[u] == delta - 1:
                        heapq.heappush(heap, u)
    else:
        bad = sorted(v for v in alive if deg[v] < delta)
        pending = set(bad)
        while bad:
            v = bad.pop(rng.randrange(len(bad)))
            pending.discard(v)
            alive.discard(v)
            order.append(v)
            for u in sorted(g.adj[v]):
                if u in alive:
                    deg[u] -= 1
                    if deg[u] < delta and u not in pending:
                        pending.add(u)
                        bad.append(u)
    return Peeling(frozenset(alive), tuple(order))


def peel_min_degree(g: Graph, delta: int, rng: random.Random | None = None) -> tuple[Graph, tuple[int, ...]]:
    """Maximal induced subgraph of minimum degree ``>= delta`` and the deletion order.

    The subgraph is relabelled; its ``labels`` map back to ``g``.
    """
    if delta < 0:
        raise ValueError("delta must be non-negative")
    p = peel(g, delta, rng=rng)
    return induced(g, p.kept), p.order


def _maximal_path(adj: Sequence[frozenset[int]], start: int) -> list[int]:
    path = [start]
    on = {start}
    while True:
        nxt = [v for v in adj[path[-1]] if v not in on]
        if not nxt:
            return path
        v = min(nxt)
        path.append(v)
        on.add(v)


def find_theta_min_degree(b: BipartiteView, k: int) -> ThetaCertificate:
    """Theta in a bipartite view of minimum degree ``>= k`` (``k >= 3``).

    Grows a path greedily until its endpoint has no fresh neighbour. All
    of the endpoint's ``>= k`` neighbours then sit on the path at
    positions of alternating parity, so the farthest one closes a cycle
    of length ``>= 2k`` and any neighbour strictly between gives a chord.
    """
    if k < 3:
        raise ThetaPreconditionError("k must be at least 3")
    verts = b.vertices
    if not verts:
        raise ThetaPreconditionError("empty view")
    view = b.graph()
    for v in sorted(verts):
        if view.degree(v) < k:
            raise ThetaPreconditionError(f"vertex {v} has degree {view.degree(v)} < {k}")
    path = _maximal_path(view.adj, min(verts))
    pos = sorted(i for i, v in enumerate(path) if v in view.adj[path[-1]])
    if len(pos) < 3:
        raise ThetaInvariantError("endpoint has fewer than three neighbours on a maximal path", path)
    first = pos[0]
    cycle = tuple(path[first:])
    cert = ThetaCertificate(cycle, (path[-1], path[pos[1]]))
    if not verify_theta(view, cert, k):
        raise ThetaInvariantError(f"constructed certificate {cert} fails verification", path)
    return cert


def average_degree(b: BipartiteView) -> float:
    n = len(b.vertices)
    return 2 * b.m / n if n else 0.0


def find_theta_avg_degree(b: BipartiteView, k: int) -> ThetaCertificate:
    """Theta in a bipartite view of average degree ``>= 2k``.

    Peels to minimum degree ``k`` first: each deletion drops fewer than
    ``k`` edges, so at most ``k*n <= e`` edges go and something survives.
    """
    n = len(b.vertices)
    e = b.m
    if n == 0 or 2 * e < 2 * k * n:
        raise ThetaPreconditionError(f"average degree {average_degree(b):.6g} < {2 * k}")
    view = b.graph()
    p = peel(view, k, within=b.vertices)
    if p.empty:
        raise ThetaInvariantError("peeling exhausted a graph of average degree >= 2k", p.order)
    core = BipartiteView(b.base, b.left & p.kept, b.right & p.kept)
    return find_theta_min_degree(core, k)


def bipartite_theta_from_sets(base: Graph, left: Iterable[int], right: Iterable[int], k: int) -> ThetaCertificate | None:
    """Theta in ``base[left, right]`` if peeling to minimum degree ``k`` leaves anything."""
    view = BipartiteView(base, frozenset(left), frozenset(right))
    if not view.vertices:
        return None
    p = peel(view.graph(), k, within=view.vertices)
    if p.empty:
        return None
    return find_theta_min_degree(BipartiteView(base, view.left & p.kept, view.right & p.kept), k)

