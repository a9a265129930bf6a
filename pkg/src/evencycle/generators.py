"""Named and seeded random graph families."""

from __future__ import annotations

import random

from .graph import Graph


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def complete(n: int) -> Graph:
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def complete_bipartite(a: int, b: int) -> Graph:
    """Left side ``0..a-1``, right side ``a..a+b-1``."""
    return Graph(a + b, [(u, a + v) for u in range(a) for v in range(b)])


def star(leaves: int) -> Graph:
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, outer + spokes + inner)


def gnp(n: int, p: float, seed: int) -> Graph:
    rng = random.Random(seed)
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p])


def random_bipartite(a: int, b: int, p: float, seed: int) -> Graph:
    rng = random.Random(seed)
    return Graph(a + b, [(u, a + v) for u in range(a) for v in range(b) if rng.random() < p])


def random_regular(n: int, d: int, seed: int, tries: int = 1000) -> Graph:
    """Uniform-ish d-regular graph by the pairing model with restarts."""
    if (n * d) % 2 or d >= n:
        raise ValueError("no d-regular graph with these parameters")
    rng = random.Random(seed)
    for _ in range(tries):
        stubs = [v for v in range(n) for _ in range(d)]
        rng.shuffle(stubs)
        edges = set()
        ok = True
        for i in range(0, len(stubs), 2):
            u, v = stubs[i], stubs[i + 1]
            key = (min(u, v), max(u, v))
            if u == v or key in edges:
                ok = False
                break
            edges.add(key)
        if ok:
            return Graph(n, sorted(edges))
    raise RuntimeError(f"pairing model failed {tries} times")


def c2k_free_corpus(k: int, count: int, n_max: int = 14, seed: int = 0) -> list[tuple[str, Graph]]:
    """Named graphs on at most ``n_max`` vertices with no 2k-cycle, checked exhaustively.

    Structured families first (paths, stars, cycles of other lengths,
    complete graphs on fewer than 2k vertices, K_{2,m}), then seeded
    G(n, p) samples with the 2k-cycle ones rejected.
    """
    from .oracle import find_c2k_exact

    structured = [(f"path{n}", path(n)) for n in (4, 9, n_max)]
    structured += [(f"star{m}", star(m)) for m in (5, n_max - 1)]
    structured += [(f"cycle{n}", cycle(n)) for n in range(3, n_max + 1) if n != 2 * k]
    structured += [(f"complete{n}", complete(n)) for n in range(3, min(2 * k, n_max + 1))]
    structured += [(f"k2_{m}", complete_bipartite(2, m)) for m in (3, 6, n_max - 2)]
    out = []
    for name, g in structured:
        if g.n <= n_max and find_c2k_exact(g, k) is None:
            out.append((name, g))
    rng = random.Random(seed)
    while len(out) < count:
        n = rng.randint(6, n_max)
        p = rng.uniform(0.15, 0.4)
        s = rng.randrange(2**32)
        g = gnp(n, p, s)
        if find_c2k_exact(g, k) is None:
            out.append((f"gnp_{n}_{p:.3f}_{s}", g))
    return out[:count] if len(out) > count else out
