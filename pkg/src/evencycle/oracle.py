"""Exhaustive ground-truth searches for cycles and theta graphs.

Exponential time; meant for graphs of a few dozen vertices. Every search
is deterministic: cycles are written canonically (smallest vertex first,
then the direction whose second vertex is smaller) and ties are broken
lexicographically, so results double as golden data.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Callable, Sequence

from .graph import Graph, TrilayeredView
from .theta import ThetaCertificate, chords_of, well_placed_witness


class BudgetExceeded(RuntimeError):
    """The search hit its budget; the answer is unknown (distinct from "none")."""

    def __init__(self, message: str, steps: int = 0):
        super().__init__(message)
        self.steps = steps


@dataclass(frozen=True)
class SearchBudget:
    max_vertices: int = 40
    max_steps: int = 5_000_000

    def __post_init__(self):
        if self.max_vertices <= 0 or self.max_steps <= 0:
            raise ValueError("budget limits must be positive")

    def admit(self, n: int) -> None:
        if n > self.max_vertices:
            raise BudgetExceeded(f"{n} vertices exceeds exhaustive cap {self.max_vertices}")


DEFAULT_BUDGET = SearchBudget()


def _search_cycles(
    adj: Sequence[frozenset[int]],
    active: Sequence[int],
    min_len: int,
    max_len: int,
    budget: SearchBudget,
    on_cycle: Callable[[tuple[int, ...]], int | None],
) -> None:
    """Enumerate canonical simple cycles with ``min_len <= L <= max_len``.

    Anchors are visited in increasing order and paths grow through larger
    vertices only, in increasing neighbour order, so cycles of a fixed
    length arrive in lexicographic order. ``on_cycle`` may return a new
    (smaller) ``max_len`` to prune the rest of the search; returning 0
    stops it.
    """
    steps = 0
    limit = [max_len]
    nbrs = {v: sorted(adj[v]) for v in active}

    def extend(path: list[int], on_path: set[int]) -> bool:
        nonlocal steps
        steps += 1
        if steps > budget.max_steps:
            raise BudgetExceeded(f"exceeded {budget.max_steps} search steps", steps)
        s, u = path[0], path[-1]
        L = len(path)
        if L >= 3 and L >= min_len and s in adj[u] and path[1] < u:
            new = on_cycle(tuple(path))
            if new is not None:
                limit[0] = new
                if new == 0:
                    return False
        if L >= limit[0]:
            return True
        for v in nbrs[u]:
            if v > s and v not in on_path:
                path.append(v)
                on_path.add(v)
                go = extend(path, on_path)
                path.pop()
                on_path.discard(v)
                if not go:
                    return False
                if len(path) >= limit[0]:
                    break
        return True

    for s in sorted(active):
        if not extend([s], {s}):
            return


def find_c2k_exact(g: Graph, k: int, budget: SearchBudget = DEFAULT_BUDGET) -> tuple[int, ...] | None:
    """Lexicographically smallest simple cycle of length exactly ``2k``, or None."""
    if k < 2:
        raise ValueError("k must be at least 2")
    budget.admit(g.n)
    found: list[tuple[int, ...]] = []

    def take(cycle):
        if len(cycle) == 2 * k:
            found.append(cycle)
            return 0
        return None

    _search_cycles(g.adj, range(g.n), 2 * k, 2 * k, budget, take)
    return found[0] if found else None


def _best_theta(adj, active, k, budget, accept) -> tuple[ThetaCertificate, tuple[int, ...]] | None:
    best: list = []

    def take(cycle):
        if best and len(cycle) >= len(best[0].cycle):
            return None
        chords = chords_of(adj, cycle)
        if not chords:
            return None
        cert = ThetaCertificate(cycle, chords[0])
        if not accept(cert):
            return None
        best[:] = [cert]
        # only strictly shorter cycles can still win
        return len(cycle) - 1

    _search_cycles(adj, active, max(2 * k, 3), len(active), budget, take)
    return best[0] if best else None


def find_theta_exact(g: Graph, k: int, budget: SearchBudget = DEFAULT_BUDGET) -> ThetaCertificate | None:
    """Smallest theta certificate under (cycle length, cycle sequence, chord)."""
    budget.admit(g.n)
    return _best_theta(g.adj, range(g.n), k, budget, lambda cert: True)


def find_well_placed_theta_exact(
    t: TrilayeredView, k: int, budget: SearchBudget = DEFAULT_BUDGET
) -> tuple[ThetaCertificate, dict[int, int]] | None:
    """Smallest theta in the trilayered view whose V2 vertices all keep a V1 neighbour outside it."""
    active = sorted(t.vertices)
    budget.admit(len(active))
    view = t.graph()

    def accept(cert):
        return well_placed_witness(t, cert) is not None

    cert = _best_theta(view.adj, active, k, budget, accept)
    if cert is None:
        return None
    return cert, well_placed_witness(t, cert)


def girth(g: Graph) -> float:
    """Length of a shortest cycle, ``math.inf`` for forests."""
    best = math.inf
    for root in range(g.n):
        dist = {root: 0}
        parent = {root: -1}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] + 1 >= best:
                break
            for v in g.adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    parent[v] = u
                    queue.append(v)
                elif parent[u] != v:
                    best = min(best, dist[u] + dist[v] + 1)
    return best
