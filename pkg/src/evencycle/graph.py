"""Immutable simple graphs and the layered views built on top of them."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence


class GraphFormatError(ValueError):
    """Malformed edge-list input. ``line`` is 1-based, or None for global errors."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class Graph:
    """Simple undirected graph on vertices ``0..n-1``.

    ``labels[v]`` is the id of ``v`` in the graph this one was cut from
    (identity for graphs built directly).
    """

    __slots__ = ("n", "adj", "m", "labels")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = (), labels: Sequence[int] | None = None):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        nbrs: list[set[int]] = [set() for _ in range(n)]
        m = 0
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if v in nbrs[u]:
                raise ValueError(f"duplicate edge ({u}, {v})")
            nbrs[u].add(v)
            nbrs[v].add(u)
            m += 1
        self.n = n
        self.adj: tuple[frozenset[int], ...] = tuple(frozenset(s) for s in nbrs)
        self.m = m
        if labels is None:
            labels = range(n)
        self.labels: tuple[int, ...] = tuple(labels)
        if len(self.labels) != n:
            raise ValueError("label map must cover every vertex")

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.adj == other.adj and self.labels == other.labels

    def __hash__(self) -> int:
        return hash((self.n, self.adj))

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return 0 <= u < self.n and v in self.adj[u]

    def neighbors(self, v: int) -> list[int]:
        return sorted(self.adj[v])

    def edges(self) -> Iterator[tuple[int, int]]:
        """Edges as ``(u, v)`` with ``u < v``, in lexicographic order."""
        for u in range(self.n):
            for v in sorted(self.adj[u]):
                if u < v:
                    yield u, v

    def vertices(self) -> range:
        return range(self.n)

    def spanning(self, edges: Iterable[tuple[int, int]]) -> Graph:
        """Same vertex set and labels, only the given edges (which must exist)."""
        edges = list(edges)
        for u, v in edges:
            if not self.has_edge(u, v):
                raise ValueError(f"({u}, {v}) is not an edge")
        return Graph(self.n, edges, self.labels)

    def to_edge_list(self) -> str:
        lines = [f"p {self.n} {self.m}"]
        lines.extend(f"{u} {v}" for u, v in self.edges())
        return "\n".join(lines) + "\n"


def load_edge_list(text: str | bytes) -> Graph:
    """Parse the whitespace edge-list format.

    Lines hold ``u v`` pairs; ``#`` starts a comment; an optional first
    data line ``p <n> <m>`` fixes the vertex count (and the edge count,
    which is then checked).
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise GraphFormatError(f"input is not UTF-8: {exc}") from None
    declared_n = declared_m = None
    edges: list[tuple[int, int]] = []
    seen: dict[tuple[int, int], int] = {}
    saw_data = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] == "p":
            if saw_data:
                raise GraphFormatError("header must precede edges", lineno)
            if len(tokens) != 3:
                raise GraphFormatError("header must be 'p <n> <m>'", lineno)
            declared_n, declared_m = (_parse_int(t, lineno) for t in tokens[1:])
            saw_data = True
            continue
        saw_data = True
        if len(tokens) != 2:
            raise GraphFormatError(f"expected 2 tokens, got {len(tokens)}", lineno)
        u, v = (_parse_int(t, lineno) for t in tokens)
        if u == v:
            raise GraphFormatError(f"self-loop at vertex {u}", lineno)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphFormatError(f"duplicate edge {key[0]}-{key[1]} (first seen at line {seen[key]})", lineno)
        seen[key] = lineno
        if declared_n is not None and max(key) >= declared_n:
            raise GraphFormatError(f"vertex {max(key)} exceeds declared n={declared_n}", lineno)
        edges.append(key)
    n = declared_n if declared_n is not None else 1 + max((v for e in edges for v in e), default=-1)
    if declared_m is not None and declared_m != len(edges):
        raise GraphFormatError(f"header declares m={declared_m} but {len(edges)} edges were read")
    return Graph(n, edges)


def _parse_int(token: str, lineno: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise GraphFormatError(f"malformed token {token!r}", lineno) from None
    if value < 0:
        raise GraphFormatError(f"negative vertex id {value}", lineno)
    return value


def induced(g: Graph, s: Iterable[int]) -> Graph:
    """Induced subgraph on ``s``, relabelled densely in increasing id order.

    ``labels`` of the result point back to ``g``'s own labels, so
    repeated cuts still resolve to the original graph.
    """
    keep = sorted(set(s))
    for v in keep:
        if not 0 <= v < g.n:
            raise ValueError(f"vertex {v} out of range for n={g.n}")
    index = {v: i for i, v in enumerate(keep)}
    edges = [(index[u], index[v]) for u in keep for v in g.adj[u] if v in index and u < v]
    return Graph(len(keep), edges, [g.labels[v] for v in keep])


def degree_stats(g: Graph) -> tuple[int, int, int]:
    """``(d_min, d_max, m)``; degrees of an empty graph are reported as 0."""
    if g.n == 0:
        return 0, 0, 0
    degs = [len(a) for a in g.adj]
    return min(degs), max(degs), g.m


def edges_between(g: Graph, a: Iterable[int], b: Iterable[int]) -> int:
    """Number of edges with one end in ``a`` and the other in ``b`` (disjoint sets)."""
    b = b if isinstance(b, (set, frozenset)) else frozenset(b)
    return sum(1 for u in a for v in g.adj[u] if v in b)


@dataclass(frozen=True)
class BipartiteView:
    base: Graph
    left: frozenset[int]
    right: frozenset[int]

    def __post_init__(self):
        if self.left & self.right:
            raise ValueError("bipartite sides must be disjoint")

    @classmethod
    def from_graph(cls, g: Graph) -> BipartiteView:
        """Two-colour ``g`` (every vertex is placed); raise if it has an odd cycle."""
        side = [-1] * g.n
        for s in range(g.n):
            if side[s] >= 0:
                continue
            side[s] = 0
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for v in g.adj[u]:
                    if side[v] < 0:
                        side[v] = 1 - side[u]
                        queue.append(v)
                    elif side[v] == side[u]:
                        raise ValueError(f"graph is not bipartite (edge {u}-{v})")
        left = frozenset(v for v in range(g.n) if side[v] == 0)
        return cls(g, left, frozenset(range(g.n)) - left)

    @property
    def vertices(self) -> frozenset[int]:
        return self.left | self.right

    def edge_list(self) -> list[tuple[int, int]]:
        return [(u, v) for u, v in self.base.edges()
                if (u in self.left and v in self.right) or (u in self.right and v in self.left)]

    def graph(self) -> Graph:
        """Spanning subgraph of ``base`` keeping only cross edges."""
        return self.base.spanning(self.edge_list())

    @property
    def m(self) -> int:
        return edges_between(self.base, self.left, self.right)


def bipartite_half(g: Graph) -> BipartiteView:
    """Deterministic cut keeping at least half the edges.

    Vertices are placed greedily in id order opposite the majority of
    their placed neighbours, then any vertex with more same-side than
    cross neighbours is switched (smallest id first) until none is left.
    Each switch strictly grows the cut, so this terminates, and at the
    fixpoint every vertex has at least half its edges crossing.
    """
    if g.n == 0:
        raise ValueError("graph must be nonempty")
    side = [0] * g.n
    for v in range(g.n):
        placed = [side[u] for u in g.adj[v] if u < v]
        ones = sum(placed)
        side[v] = 1 if len(placed) - ones > ones else 0
    changed = True
    while changed:
        changed = False
        for v in range(g.n):
            same = sum(1 for u in g.adj[v] if side[u] == side[v])
            if same > len(g.adj[v]) - same:
                side[v] ^= 1
                changed = True
                break
    left = frozenset(v for v in range(g.n) if side[v] == 0)
    return BipartiteView(g, left, frozenset(range(g.n)) - left)


@dataclass(frozen=True)
class LayerDecomposition:
    root: int
    layers: tuple[frozenset[int], ...]
    depth: Mapping[int, int] = field(repr=False)

    @property
    def k(self) -> int:
        return len(self.layers) - 1


def bfs_layers(g: Graph, root: int, k: int) -> LayerDecomposition:
    """Vertices at exact distance ``0..k`` from ``root``; deeper vertices are dropped."""
    if not 0 <= root < g.n:
        raise ValueError(f"root {root} out of range for n={g.n}")
    if k < 0:
        raise ValueError("k must be non-negative")
    depth = {root: 0}
    layers: list[set[int]] = [{root}] + [set() for _ in range(k)]
    queue = deque([root])
    while queue:
        u = queue.popleft()
        if depth[u] == k:
            continue
        for v in g.adj[u]:
            if v not in depth:
                depth[v] = depth[u] + 1
                layers[depth[v]].add(v)
                queue.append(v)
    return LayerDecomposition(root, tuple(frozenset(s) for s in layers), depth)


@dataclass(frozen=True)
class TrilayeredView:
    """Three disjoint layers; only V1-V2 and V2-V3 edges of ``base`` are kept."""

    base: Graph
    V1: frozenset[int]
    V2: frozenset[int]
    V3: frozenset[int]

    def __post_init__(self):
        if self.V1 & self.V2 or self.V1 & self.V3 or self.V2 & self.V3:
            raise ValueError("layers must be pairwise disjoint")

    @classmethod
    def of(cls, base: Graph, V1: Iterable[int], V2: Iterable[int], V3: Iterable[int]) -> TrilayeredView:
        return cls(base, frozenset(V1), frozenset(V2), frozenset(V3))

    @property
    def vertices(self) -> frozenset[int]:
        return self.V1 | self.V2 | self.V3

    def layer(self, v: int) -> int:
        """1, 2 or 3; 0 if ``v`` is in no layer."""
        if v in self.V1:
            return 1
        if v in self.V2:
            return 2
        if v in self.V3:
            return 3
        return 0

    def nbrs(self, v: int, layer: int) -> frozenset[int]:
        """Neighbours of ``v`` inside the given layer, along retained edges only."""
        own = self.layer(v)
        if own == 0 or abs(own - layer) != 1:
            return frozenset()
        target = (self.V1, self.V2, self.V3)[layer - 1]
        return self.base.adj[v] & target

    def has_edge(self, u: int, v: int) -> bool:
        lu, lv = self.layer(u), self.layer(v)
        return bool(lu and lv and abs(lu - lv) == 1 and self.base.has_edge(u, v))

    def edge_list(self) -> list[tuple[int, int]]:
        return [(u, v) for u, v in self.base.edges() if self.has_edge(u, v)]

    def graph(self) -> Graph:
        return self.base.spanning(self.edge_list())

    def e12(self, V2: Iterable[int] | None = None) -> int:
        return edges_between(self.base, self.V1, self.V2 if V2 is None else V2)

    def e23(self) -> int:
        return edges_between(self.base, self.V2, self.V3)

    def restrict(self, V1=None, V2=None, V3=None) -> TrilayeredView:
        return TrilayeredView(
            self.base,
            self.V1 if V1 is None else frozenset(V1),
            self.V2 if V2 is None else frozenset(V2),
            self.V3 if V3 is None else frozenset(V3),
        )


def trilayer(g: Graph, layers: LayerDecomposition, i: int) -> TrilayeredView:
    """``G[V_{i-1}, V_i, V_{i+1}]`` from a BFS layering, ``1 <= i <= k-1``."""
    if not 1 <= i <= layers.k - 1:
        raise ValueError(f"trilayer index {i} outside 1..{layers.k - 1}")
    L = layers.layers
    return TrilayeredView(g, L[i - 1], L[i], L[i + 1])
