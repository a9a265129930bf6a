"""Engineered trilayered instances that drive the searches into chosen outcomes.

Each builder returns a :class:`Fixture`: the view plus the parameters it
was designed for. Builders are deterministic given ``seed``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .graph import Graph, TrilayeredView


@dataclass
class Fixture:
    name: str
    view: TrilayeredView
    params: dict = field(default_factory=dict)

    @property
    def graph(self) -> Graph:
        return self.view.base

    def to_edge_list(self) -> str:
        """Edge list with the layers and parameters as leading comments."""
        v = self.view
        head = [f"# fixture {self.name}"]
        for key in sorted(self.params):
            head.append(f"# param {key} {self.params[key]}")
        for i, layer in enumerate((v.V1, v.V2, v.V3), 1):
            head.append(f"# V{i} " + " ".join(map(str, sorted(layer))))
        return "\n".join(head) + "\n" + v.base.to_edge_list()


def parse_fixture_comments(text: str) -> tuple[dict, list[list[int]] | None]:
    """Parameters and layers written by :meth:`Fixture.to_edge_list`."""
    params, layers = {}, {}
    for line in text.splitlines():
        parts = line.split()
        if len(parts) >= 3 and parts[0] == "#" and parts[1] == "param":
            params[parts[2]] = " ".join(parts[3:])
        elif len(parts) >= 2 and parts[0] == "#" and parts[1] in ("V1", "V2", "V3"):
            layers[parts[1]] = [int(x) for x in parts[2:]]
    if not layers:
        return params, None
    return params, [layers.get(f"V{i}", []) for i in (1, 2, 3)]


class _Builder:
    def __init__(self):
        self.n = 0
        self.edges: list[tuple[int, int]] = []

    def block(self, size: int) -> list[int]:
        out = list(range(self.n, self.n + size))
        self.n += size
        return out

    def join(self, a, b):
        self.edges.extend((u, v) for u in a for v in b)

    def view(self, V1, V2, V3) -> TrilayeredView:
        return TrilayeredView.of(Graph(self.n, self.edges), V1, V2, V3)


def complete_trilayer(n1: int, n2: int, n3: int) -> TrilayeredView:
    b = _Builder()
    V1, V2, V3 = b.block(n1), b.block(n2), b.block(n3)
    b.join(V1, V2)
    b.join(V2, V3)
    return b.view(V1, V2, V3)


def base_subgraph(k: int = 3) -> Fixture:
    """Complete layers: every vertex clears its floor, the peel keeps everything."""
    n = 4 * k
    view = complete_trilayer(n, n, 4 * n)
    return Fixture("base-subgraph", view, {"k": k, "a": 1, "A": 2, "B": 2, "C": 1, "D": 1, "d": 1})


def base_shrunk(k: int = 3, n1: int | None = None, n2: int = 10, d: int = 1) -> Fixture:
    """V1-V2 complete with V2 degree below 4k^2; each V2 vertex has private V3 leaves.

    The leaves fall to the D floor, then every V2 vertex falls to the C
    floor, so all of V2 ends in R minus S and carries every V1-V2 edge.
    """
    n1 = n1 if n1 is not None else 2 * k
    if n1 >= 4 * k * k:
        raise ValueError("V2 vertices must have fewer than 4k^2 neighbours in V1")
    b = _Builder()
    V1, V2 = b.block(n1), b.block(n2)
    b.join(V1, V2)
    private = d + 4 * k * k + 1 - n1
    V3 = []
    for u in V2:
        leaves = b.block(private)
        V3.extend(leaves)
        b.join([u], leaves)
    return Fixture("base-shrunk", b.view(V1, V2, V3), {"k": k, "a": 1, "A": 1, "B": 1, "C": 1, "D": 2, "d": d})


def base_theta(k: int = 3, n1: int | None = None, n2: int = 20) -> Fixture:
    """V2 vertices with at least 4k^2 neighbours in V1 and two V3 leaves each.

    The peel empties the view with all of V2 inside S, so nothing is left
    to shrink to and the theta comes out of G[V1, S].
    """
    n1 = n1 if n1 is not None else 4 * k * k + 4
    b = _Builder()
    V1, V2 = b.block(n1), b.block(n2)
    b.join(V1, V2)
    V3 = []
    for u in V2:
        leaves = b.block(2)
        V3.extend(leaves)
        b.join([u], leaves)
    return Fixture("base-theta", b.view(V1, V2, V3), {"k": k, "a": Fraction(1, 2), "A": 1, "B": 1, "C": 1, "D": 2, "d": 1})


def chain_subgraph(k: int = 3) -> Fixture:
    """Complete layers meeting the three edge-count conditions; the chain stops at step 0."""
    view = complete_trilayer(70, 100, 50)
    return Fixture("chain-subgraph", view, {"k": k, "d": 10, "Delta": Fraction(1, 2 * k), "C": 20})


def chain_shrink(
    k: int = 8,
    high_degree: int = 252,
    low_degree: int = 1,
    n_high: int = 320,
    n_low: int = 640,
    d: int = 40,
    Delta: Fraction = Fraction(1, 24),
    C: int = 1,
    seed: int = 0,
) -> Fixture:
    """A chain that shrinks once and then stops in a valid subgraph.

    V1 has ``high_degree`` vertices. "High" V2 vertices see all of V1 but
    stay below 4k^2; "low" ones see ``low_degree`` random V1 vertices and
    fall to the B floor first. Every V3 vertex touches at most
    ``ceil(D0) - 1`` high vertices, so once the low ones are gone V3 falls
    to the D floor and the high vertices follow on the C floor: all of
    them land in the shrunk set. On the shrunk set the peel keeps
    everything. The default sizes come from a search over the constraint
    system and are close to the smallest that satisfy all of it.
    """
    rng = random.Random(seed)
    t = max(1, math.ceil(math.log(k)))
    a0 = Fraction(1, t + 1)
    e = n_high * high_degree + n_low * low_degree
    d0 = Fraction(e, n_high + n_low)
    D0 = min(Fraction(2 * k), 8 * k / (a0 * d0))
    per_v3 = math.ceil(D0) - 1
    if per_v3 < 1:
        raise ValueError("D0 too small for any V3 sharing")
    need_high = d + 4 * k * k + C - high_degree
    need_low = d + 4 * k * k + C - low_degree
    n3 = max(math.ceil(n_high * need_high / per_v3), need_low, math.ceil(n_high * d / D0))

    b = _Builder()
    V1, high, low, V3 = b.block(high_degree), b.block(n_high), b.block(n_low), b.block(n3)
    b.join(V1, high)
    for u in low:
        b.join([u], rng.sample(V1, low_degree))
    slot = 0
    for u in high:
        for _ in range(need_high):
            b.edges.append((u, V3[slot % n3]))
            slot += 1
    for u in low:
        b.join([u], rng.sample(V3, need_low))
    params = {"k": k, "d": d, "Delta": Delta, "C": C, "seed": seed}
    return Fixture("chain-shrink", b.view(V1, high + low, V3), params)


def embed_generous(
    k: int = 3,
    D: int = 1,
    n1: int = 14,
    n2: int = 14,
    d: int = 1,
    Delta=None,
    p12: float = 1.0,
    floor1: int = 0,
    floor2: int = 0,
    v3_degree: int | None = None,
    seed: int = 0,
) -> Fixture:
    """Dense V1-V2 with exactly ``d+k`` V3 neighbours per V2 vertex.

    V1-V2 edges are kept with probability ``p12`` and then topped up so
    V1 vertices see at least ``floor1`` and V2 vertices ``floor2`` of the
    other side. V3 is a cover in which every vertex has exactly
    ``v3_degree`` (default ``D``) V2 neighbours, which must divide
    ``n2*(d+k)``. ``Delta`` defaults to
    ``(d+k)/d``, making the V3-degree cap tight.
    """
    rng = random.Random(seed)
    Delta = Fraction(d + k, d) if Delta is None else Fraction(Delta)
    per = d + k
    share = D if v3_degree is None else v3_degree
    if (n2 * per) % share or n2 * per // share < per:
        raise ValueError("need v3_degree | n2*(d+k) and n2 >= v3_degree")
    b = _Builder()
    V1, V2 = b.block(n1), b.block(n2)
    adj = {u: set() for u in V1 + V2}
    for u in V1:
        for v in V2:
            if p12 >= 1 or rng.random() < p12:
                adj[u].add(v)
                adj[v].add(u)
    for side, other, floor in ((V1, V2, floor1), (V2, V1, floor2)):
        for u in side:
            spare = [v for v in other if v not in adj[u]]
            rng.shuffle(spare)
            while len(adj[u]) < floor and spare:
                v = spare.pop()
                adj[u].add(v)
                adj[v].add(u)
    b.edges.extend((u, v) for u in V1 for v in sorted(adj[u]))
    n3 = n2 * per // share
    V3 = b.block(n3)
    order2 = V2[:]
    rng.shuffle(order2)
    order3 = V3[:]
    rng.shuffle(order3)
    # slot i of the (vertex-major) slot list goes to V3 index i mod n3
    for i in range(n2 * per):
        b.edges.append((order2[i // per], order3[i % n3]))
    params = {"k": k, "D": D, "d": d, "Delta": Delta, "seed": seed, "n1": n1, "n2": n2, "p12": p12, "v3_degree": share}
    return Fixture("embed-generous", b.view(V1, V2, V3), params)


def embed_shared_v3(k: int = 3, n1: int = 20, n2: int = 20, d: int = 10) -> Fixture:
    """Every V2 vertex sees the same ``d+k`` V3 vertices.

    Reservations run out after a few frontier vertices, so most of the
    frontier fails and the failures form a dense G[F1, T].
    """
    view = complete_trilayer(n1, n2, d + k)
    return Fixture("embed-shared-v3", view, {"k": k, "D": 2, "d": d, "Delta": Fraction(d + k, d)})


def pipeline_theta(k: int = 3, n1: int = 64, n2: int = 80) -> Fixture:
    """A rooted graph whose BFS levels 1-3 from vertex 0 meet the three edge-count
    conditions (with d=10, Delta=1/(2k)) and make the chain find a theta.

    Root 0 sees all of V1, V1-V2 is complete, and each V2 vertex has two
    private leaves. The leaves fall to the D floor, V2 to the C floor, and
    all of V2 has at least 4k^2 V1 neighbours, so the chain's first step
    finds the theta in G[V1, V2].
    """
    b = _Builder()
    root = b.block(1)
    V1, V2 = b.block(n1), b.block(n2)
    b.join(root, V1)
    b.join(V1, V2)
    V3 = []
    for u in V2:
        leaves = b.block(2)
        V3.extend(leaves)
        b.join([u], leaves)
    params = {"k": k, "d": 10, "Delta": Fraction(1, 2 * k), "root": 0}
    return Fixture("pipeline-theta", b.view(V1, V2, V3), params)


BUILDERS = {
    "base-subgraph": base_subgraph,
    "base-shrunk": base_shrunk,
    "base-theta": base_theta,
    "chain-subgraph": chain_subgraph,
    "chain-shrink": chain_shrink,
    "embed-generous": embed_generous,
    "embed-shared-v3": embed_shared_v3,
    "pipeline-theta": pipeline_theta,
}
