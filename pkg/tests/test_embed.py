import itertools
import json
import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from evencycle.embed import (
    BudgetReport,
    ContractError,
    EmbedParams,
    ExtensionState,
    GoodPath,
    ThetaInV2V3,
    WellPlaced,
    assert_disjoint,
    check_good,
    disjoint_bound,
    disjoint_filter,
    embed_or_theta,
    eps,
    extend_once,
    extract_theta,
    goodness_map,
    procedure_one,
    procedure_two,
)
from evencycle.fixtures import embed_generous, embed_shared_v3
from evencycle.graph import Graph, TrilayeredView
from evencycle.theta import ThetaInvariantError
from evencycle.trilayer_search import PreconditionError


def independent_theta_ok(g_has_edge, cycle, chord, k):
    """Recheck a theta certificate from scratch."""
    L = len(cycle)
    if L < 2 * k or len(set(cycle)) != L:
        return False
    if not all(g_has_edge(cycle[i], cycle[(i + 1) % L]) for i in range(L)):
        return False
    i, j = sorted((cycle.index(chord[0]), cycle.index(chord[1])))
    return g_has_edge(*chord) and 2 <= j - i <= L - 2


def outcome_sound(t, outcome, k):
    cert = outcome.certificate
    if not independent_theta_ok(t.has_edge, list(cert.cycle), cert.chord, k):
        return False
    inside = set(cert.cycle)
    if isinstance(outcome, ThetaInV2V3):
        return inside <= t.V2 | t.V3
    # well placed: every V2 vertex keeps a V1 neighbour outside
    return all(
        outcome.witness[v] in t.V1 and outcome.witness[v] not in inside and t.base.has_edge(v, outcome.witness[v])
        for v in inside & t.V2
    ) and set(outcome.witness) == inside & t.V2


def d2_params(f):
    return EmbedParams(16, 7, 2, f.params["Delta"], 10, 3)


D2_CONFIGS = [(20, 20, 1.0, 4), (28, 28, 0.7, 4), (30, 30, 0.6, 2), (40, 40, 0.5, 5)]


def d2_fixture(cfg, seed):
    n1, n2, p12, share = cfg
    return embed_generous(k=3, D=2, d=10, n1=n1, n2=n2, p12=p12, floor1=16, floor2=7, v3_degree=share, seed=seed)


# goodness


def small_view():
    # V1 = {0, 1, 5}, V2 = {2, 3}, V3 = {4}
    g = Graph(6, [(0, 2), (2, 4), (4, 3), (3, 1), (2, 5), (3, 5)])
    return TrilayeredView.of(g, [0, 1, 5], [2, 3], [4])


def test_single_anchor_is_good():
    t = small_view()
    assert check_good(t, GoodPath((0,), (0,), {}))


def test_v2_vertex_without_outside_v1_neighbour_is_not_good():
    t = TrilayeredView.of(Graph(3, [(0, 1), (1, 2)]), [0, 2], [1], [])
    seq = (0, 1, 2)
    assert goodness_map(t, seq) is None
    assert not check_good(t, GoodPath(seq, (0, 2), {1: 0}))


def test_two_anchor_path_with_witnesses():
    t = small_view()
    seq = (0, 2, 4, 3, 1)
    wit = goodness_map(t, seq)
    assert wit == {2: 5, 3: 5}
    assert check_good(t, GoodPath(seq, (0, 1), wit))
    # wrong witness, non-edge, anchor not at the end
    assert not check_good(t, GoodPath(seq, (0, 1), {2: 1, 3: 5}))
    assert not check_good(t, GoodPath((0, 3, 4, 2, 1), (0, 1), {2: 5, 3: 5}))
    assert not check_good(t, GoodPath(seq, (0,), wit))


# formulas


def test_eps_example():
    assert eps(8, 0, 4, 2) == Fraction(1, 9)


def test_disjoint_bound_example():
    # A=100, k=4, Delta=1, D=2: -3k + A (1/72)^i * 1/2
    assert disjoint_bound(100, 4, 1, 2, 0) == pytest.approx(-12 + 50)
    assert disjoint_bound(100, 4, 1, 2, 1) == pytest.approx(-12 + 50 / 72)


def test_params_need_integer_D():
    with pytest.raises(ValueError):
        EmbedParams(10, 10, Fraction(3, 2), 1, 1, 3)
    p = EmbedParams(16, 7, 2, Fraction(13, 10), 10, 3)
    assert p.C == 13 and p.t_small == 4 and p.reserve == 2


# procedure one


def disjoint_nbhd_view(nU=4, d=3):
    """Frontier vertices 1..nU with private V3 neighbourhoods of size d; anchor 0."""
    edges, V3 = [], []
    nxt = nU + 1
    for u in range(1, nU + 1):
        edges.append((0, u))
        for _ in range(d):
            edges.append((u, nxt))
            V3.append(nxt)
            nxt += 1
    return TrilayeredView.of(Graph(nxt, edges), [0], range(1, nU + 1), V3)


def test_procedure_one_disjoint_neighbourhoods():
    k, d = 2, 3
    t = disjoint_nbhd_view(4, d)
    state = ExtensionState(0, (0,), {u: (u,) for u in range(1, 5)})
    S1, F1, T = procedure_one(t, state, d, k)
    assert F1 == [] and S1 == [1, 2, 3, 4]
    per = -(-d // (2 * k + 1))
    assert sum(len(x) for x in T.values()) == 4 * per
    # smallest ids are reserved
    assert T[1] == (5,)


def test_procedure_one_empty_frontier():
    t = disjoint_nbhd_view(2, 3)
    state = ExtensionState(0, (0,), {})
    assert procedure_one(t, state, 3, 2) == ([], [], {})


def test_procedure_one_precondition_names_vertex():
    t = disjoint_nbhd_view(2, 3)
    state = ExtensionState(0, (0,), {1: (1,)})
    with pytest.raises(PreconditionError) as exc:
        procedure_one(t, state, 5, 2)
    assert "1" in exc.value.name and exc.value.lhs == 3


def test_procedure_one_shared_neighbourhood_gives_theta():
    f = embed_shared_v3()
    t = f.view
    V1 = sorted(t.V1)
    U = sorted(t.nbrs(V1[0], 2))
    state = ExtensionState(0, (V1[0],), {u: (u,) for u in U})
    res = procedure_one(t, state, 10, 3)
    assert isinstance(res, ThetaInV2V3)
    assert 2 * len(state.S1) < len(U)
    assert outcome_sound(t, res, 3)


def test_procedure_one_seeded_mode():
    t = disjoint_nbhd_view(4, 3)
    a = ExtensionState(0, (0,), {u: (u,) for u in range(1, 5)})
    b = ExtensionState(0, (0,), {u: (u,) for u in range(1, 5)})
    procedure_one(t, a, 3, 2, rng=random.Random(1))
    procedure_one(t, b, 3, 2, rng=random.Random(1))
    assert a.T == b.T and a.F1 == []


# procedure two


def two_step_view():
    """Anchor 0; frontier 1, 2; each reserves a private V3 vertex leading to a private V2 vertex."""
    # V1 {0}, V2 {1, 2, 5, 6}, V3 {3, 4}
    g = Graph(7, [(0, 1), (0, 2), (1, 3), (2, 4), (3, 5), (4, 6)])
    return TrilayeredView.of(g, [0], [1, 2, 5, 6], [3, 4])


def test_procedure_two_disjoint_case():
    t = two_step_view()
    state = ExtensionState(0, (0,), {1: (1,), 2: (2,)})
    procedure_one(t, state, 1, 1)
    S2, F2, Dset, guarantee = procedure_two(t, state, 2, 1, 1, 0, 2)
    assert S2 == state.S1 == [1, 2] and F2 == []
    assert Dset == {5: (1, 3), 6: (2, 4)}
    assert guarantee.passed


def test_procedure_two_collisions_share_endpoint():
    # both reserved V3 vertices lead only to V2 vertex 5
    g = Graph(6, [(0, 1), (0, 2), (1, 3), (2, 4), (3, 5), (4, 5)])
    t = TrilayeredView.of(g, [0], [1, 2, 5], [3, 4])
    state = ExtensionState(0, (0,), {1: (1,), 2: (2,)})
    procedure_one(t, state, 1, 1)
    S2, F2, Dset, _ = procedure_two(t, state, 2, 1, 1, 0, 2)
    assert S2 == [1] and F2 == [2] and list(Dset) == [5]


def test_procedure_two_bottleneck_names_over_degree_vertex():
    # V2 vertex 1 sees every V3 vertex: with Delta*d = 2 it breaks the contract
    edges = [(0, 1), (0, 2)] + [(1, v) for v in range(3, 8)] + [(2, 3), (2, 4)]
    t = TrilayeredView.of(Graph(8, edges), [0], [1, 2], range(3, 8))
    state = ExtensionState(0, (0,), {1: (1,), 2: (2,)})
    procedure_one(t, state, 2, 1)
    with pytest.raises(ContractError) as exc:
        procedure_two(t, state, 1, 2, 1, 0, 2)
    assert exc.value.vertex == 1 and exc.value.degree == 5


# disjoint filter


def test_disjoint_filter_greedy():
    paths = {5: (1, 3, 5), 6: (2, 3, 6), 7: (4, 8, 7)}
    kept = disjoint_filter(paths)
    assert kept == {5: (1, 3, 5), 7: (4, 8, 7)}
    assert_disjoint(kept)
    with pytest.raises(ThetaInvariantError):
        assert_disjoint(paths)


@given(st.dictionaries(st.integers(0, 30), st.lists(st.integers(0, 30), min_size=1, max_size=4).map(tuple), max_size=10))
def test_disjoint_filter_is_maximal(paths):
    kept = disjoint_filter(paths)
    assert_disjoint(kept)
    used = set().union(*kept.values()) if kept else set()
    for w, p in paths.items():
        assert w in kept or not used.isdisjoint(p)


# extraction


def test_extract_theta_on_cycle_with_chord_across_layers():
    # 6-cycle 0-1-2-3-4-5 with chord 1-4; every V2 vertex also sees the outside V1 vertex 6
    g = Graph(7, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (1, 4), (1, 6), (3, 6), (5, 6)])
    t = TrilayeredView.of(g, [0, 2, 6], [1, 3, 5], [4])
    got = extract_theta(t, [0, 1, 2, 3, 4, 5], 3)
    assert got is not None and outcome_sound(t, got, 3)


def test_extract_theta_none_on_tree_walk():
    t = TrilayeredView.of(Graph(4, [(0, 1), (1, 2), (2, 3)]), [0], [1, 3], [2])
    assert extract_theta(t, [0, 1, 2, 3], 2) is None


# extend / embed


def test_extend_once_generous_instance_stays_good():
    f = d2_fixture((40, 40, 0.5, 5), 0)
    t, p = f.view, d2_params(f)
    v0 = min(t.V1)
    trace = []
    got = extend_once(t, GoodPath((v0,), (v0,), {}), p, trace)
    if isinstance(got, GoodPath):
        assert check_good(t, got) and len(got.anchors) == 2
        # a segment is 2D edges long between anchors
        assert len(got.vertices) == 2 * p.D + 1
    else:
        assert outcome_sound(t, got, 3)
    stages = [r.stage for r in trace]
    assert stages[0] == "U0" and "round" in stages


def test_anchor_with_k_path_neighbours_is_well_placed():
    f = embed_generous(k=3)
    t = f.view
    p = EmbedParams(6, 10, 1, f.params["Delta"], 1, 3)
    res = embed_or_theta(t, p)
    assert isinstance(res.outcome, WellPlaced)
    assert outcome_sound(t, res.outcome, 3)


@pytest.mark.parametrize("cfg", D2_CONFIGS)
@pytest.mark.parametrize("seed", range(6))
def test_embed_d2_fixtures_certified(cfg, seed):
    f = d2_fixture(cfg, seed)
    t = f.view
    res = embed_or_theta(t, d2_params(f))
    assert res.outcome.kind in ("theta_v2v3", "well_placed")
    assert outcome_sound(t, res.outcome, 3)
    json.dumps(res.to_json())


def test_embed_shared_v3_gives_theta_in_v2v3():
    f = embed_shared_v3()
    res = embed_or_theta(f.view, d2_params(f))
    assert isinstance(res.outcome, ThetaInV2V3) and res.outcome.source == "procedure_one"
    assert outcome_sound(f.view, res.outcome, 3)


def test_embed_rounds_run_both_procedures():
    f = d2_fixture((20, 20, 1.0, 4), 0)
    res = embed_or_theta(f.view, d2_params(f))
    rounds = [r for r in res.rounds if r.stage == "round"]
    assert rounds and rounds[0].S1 > 0 and rounds[0].S2 > 0 and rounds[0].survivors > 0


def test_empty_v2_is_budget_report():
    t = TrilayeredView.of(Graph(3, []), [0, 1], [], [2])
    res = embed_or_theta(t, EmbedParams(6, 10, 1, 1, 1, 3))
    assert isinstance(res.outcome, BudgetReport)
    assert res.outcome.shortfall.name == "V2_nonempty" and not res.outcome.shortfall.passed
    assert res.extensions == 0


def test_embed_precondition_names_inequality():
    f = embed_generous(k=3)
    # A = 5 < 2k for D = 1
    with pytest.raises(PreconditionError) as exc:
        embed_or_theta(f.view, EmbedParams(5, 10, 1, f.params["Delta"], 1, 3))
    assert exc.value.name == "eq4"


def test_embed_contract_violation():
    f = embed_generous(k=3)
    with pytest.raises(ContractError):
        embed_or_theta(f.view, EmbedParams(6, 10, 1, 1, 1, 3))


def budget_recomputes(res, p):
    """The reported first shortfall is a real failed inequality."""
    s = res.outcome.shortfall
    assert not s.passed
    if s.name.startswith("procedure_two") or s.name.startswith("U_") or s.name.startswith("disjoint_filter"):
        assert s.lhs < s.rhs
    return True


# certificate soundness fuzz


@settings(max_examples=500, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(
    n=st.integers(8, 30),
    p12=st.floats(0.3, 1.0),
    share=st.sampled_from([1, 2, 4]),
    seed=st.integers(0, 10**6),
)
def test_embed_certificates_sound_fuzz(n, p12, share, seed):
    k = 3
    if (n * 4) % share:
        return
    f = embed_generous(k=k, D=1, n1=n, n2=n, p12=p12, floor1=6, floor2=10, v3_degree=share, seed=seed)
    t = f.view
    p = EmbedParams(6, 10, 1, f.params["Delta"], 1, k)
    try:
        res = embed_or_theta(t, p)
    except PreconditionError:
        return
    if isinstance(res.outcome, BudgetReport):
        assert budget_recomputes(res, p)
        assert check_good(t, res.path)
    else:
        assert outcome_sound(t, res.outcome, k)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(3, 8), p=st.floats(0.2, 0.9), k=st.integers(2, 3))
def test_extract_theta_returns_only_verified(seed, n, p, k):
    rng = random.Random(seed)
    V1, V2, V3 = range(n), range(n, 2 * n), range(2 * n, 3 * n)
    edges = [(u, v) for u, v in itertools.product(V1, V2) if rng.random() < p]
    edges += [(u, v) for u, v in itertools.product(V2, V3) if rng.random() < p]
    t = TrilayeredView.of(Graph(3 * n, edges), V1, V2, V3)
    # a random walk without repeats
    v = rng.choice(list(V1))
    walk = [v]
    while True:
        nxt = [w for w in t.base.adj[v] if w not in walk and t.has_edge(v, w)]
        if not nxt:
            break
        v = rng.choice(sorted(nxt))
        walk.append(v)
    got = extract_theta(t, walk, k, extra=V1)
    if got is not None:
        assert outcome_sound(t, got, k)
