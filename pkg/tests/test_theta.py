import json
import random

import pytest

from evencycle import generators as gen
from evencycle.graph import BipartiteView, Graph, TrilayeredView, induced
from evencycle.oracle import find_theta_exact
from evencycle.theta import (
    ThetaCertificate,
    ThetaPreconditionError,
    find_theta_avg_degree,
    find_theta_min_degree,
    peel,
    peel_min_degree,
    verify_theta,
    verify_well_placed,
)

from test_oracle import planted_well_placed


def c6_chord():
    return Graph(6, [(i, (i + 1) % 6) for i in range(6)] + [(0, 3)])


def test_verify_theta_examples():
    g = c6_chord()
    cert = ThetaCertificate((0, 1, 2, 3, 4, 5), (0, 3))
    assert verify_theta(g, cert, 3)
    assert not verify_theta(g, cert, 4)
    assert not verify_theta(g, ThetaCertificate((0, 1, 2, 3, 4, 5), (0, 1)), 3)
    assert not verify_theta(g, ThetaCertificate((0, 1, 2, 3, 4, 5), (1, 4)), 3)
    assert not verify_theta(g, ThetaCertificate((0, 1, 2, 3, 5, 4), (0, 3)), 3)


def test_verify_well_placed_examples():
    g, t = planted_well_placed()
    cert = ThetaCertificate((2, 3, 4, 5, 6, 7), (2, 5))
    witness = {2: 0, 4: 0, 6: 1}
    assert verify_well_placed(t, cert, witness, 3)
    assert not verify_well_placed(t, cert, {2: 0, 4: 0}, 3)
    assert not verify_well_placed(t, cert, {2: 0, 4: 3, 6: 1}, 3)
    assert not verify_well_placed(t, cert, {2: 0, 4: 0, 6: 1}, 4)


def test_certificate_json_round_trip():
    cert = ThetaCertificate((2, 3, 4, 5, 6, 7), (5, 2))
    obj = json.loads(json.dumps(cert.to_json({6: 1, 2: 0})))
    assert obj == {"cycle": [2, 3, 4, 5, 6, 7], "chord": [2, 5], "witness": {"2": 0, "6": 1}}
    assert ThetaCertificate.from_json(obj) == (cert, {2: 0, 6: 1})


def test_peel_examples():
    assert peel_min_degree(gen.path(5), 2)[0].n == 0
    h, order = peel_min_degree(gen.cycle(8), 2)
    assert h.n == 8 and order == ()
    k4_minus = Graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])
    h, order = peel_min_degree(k4_minus, 3)
    assert h.n == 0 and order[0] == 2 and sorted(order) == [0, 1, 2, 3]


def brute_max_core(g, delta):
    """Largest vertex set whose induced subgraph has min degree >= delta (exhaustive)."""
    best = frozenset()
    for mask in range(1 << g.n):
        s = frozenset(v for v in range(g.n) if mask >> v & 1)
        if all(len(g.adj[v] & s) >= delta for v in s) and len(s) > len(best):
            best = s
    return best


@pytest.mark.parametrize("seed", range(30))
def test_peel_is_maximal_core(seed):
    g = gen.gnp(10, 0.4, seed)
    for delta in (1, 2, 3):
        assert peel(g, delta).kept == brute_max_core(g, delta)


@pytest.mark.parametrize("seed", range(50))
def test_peel_idempotent_and_order_free(seed):
    g = gen.gnp(40, 0.12, seed)
    for delta in (2, 3, 4):
        h, _ = peel_min_degree(g, delta)
        again, order = peel_min_degree(h, delta)
        assert again == induced(h, range(h.n)) and order == ()
        rand = peel(g, delta, rng=random.Random(seed))
        assert rand.kept == peel(g, delta).kept


def test_min_degree_k33():
    g = gen.complete_bipartite(3, 3)
    cert = find_theta_min_degree(BipartiteView.from_graph(g), 3)
    assert verify_theta(g, cert, 3)
    assert find_theta_exact(g, 3) is not None


def test_min_degree_rejects_low_degree():
    with pytest.raises(ThetaPreconditionError, match="vertex 0 has degree 2 < 3"):
        find_theta_min_degree(BipartiteView.from_graph(gen.cycle(8)), 3)


def test_min_degree_k44():
    g = gen.complete_bipartite(4, 4)
    cert = find_theta_min_degree(BipartiteView.from_graph(g), 4)
    assert verify_theta(g, cert, 4) and len(cert.cycle) >= 8
    assert find_theta_exact(g, 4) is not None


def test_avg_degree_precondition():
    with pytest.raises(ThetaPreconditionError, match="average degree 3 < 6"):
        find_theta_avg_degree(BipartiteView.from_graph(gen.complete_bipartite(3, 3)), 3)


@pytest.mark.parametrize("a, k", [(6, 3), (8, 4)])
def test_avg_degree_complete(a, k):
    g = gen.complete_bipartite(a, a)
    cert = find_theta_avg_degree(BipartiteView.from_graph(g), k)
    assert verify_theta(g, cert, k) and len(cert.cycle) >= 2 * k


def test_finder_soundness_fuzz():
    done = 0
    seed = 0
    while done < 1000:
        seed += 1
        rng = random.Random(seed)
        k = (3, 4, 5)[seed % 3]
        a = rng.randint(k, 30)
        b = rng.randint(k, 60 - a)
        g = gen.random_bipartite(a, b, rng.uniform(0.2, 0.9), seed)
        core = peel(g, k)
        if core.empty:
            continue
        left = frozenset(v for v in core.kept if v < a)
        view = BipartiteView(g, left, core.kept - left)
        cert = find_theta_min_degree(view, k)
        assert verify_theta(g, cert, k)
        whole = BipartiteView.from_graph(g)
        if 2 * whole.m >= 2 * k * g.n:
            assert verify_theta(g, find_theta_avg_degree(whole, k), k)
        done += 1


def test_avg_degree_subgraph_outside_vertices():
    g = gen.complete_bipartite(6, 6)
    bigger = Graph(14, list(g.edges()) + [(12, 13)])
    view = BipartiteView(bigger, frozenset(range(6)), frozenset(range(6, 12)))
    cert = find_theta_avg_degree(view, 3)
    assert cert.vertices <= view.vertices
