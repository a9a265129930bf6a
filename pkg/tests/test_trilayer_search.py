import itertools
import json
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from evencycle.fixtures import base_shrunk, base_subgraph, base_theta, chain_shrink, chain_subgraph
from evencycle.graph import Graph, TrilayeredView, edges_between
from evencycle.theta import verify_theta
from evencycle.trilayer_search import (
    MinDegSpec,
    PreconditionError,
    Shrunk,
    Subgraph,
    ThetaFound,
    base_step,
    chain_length,
    chain_parameters,
    check_conditions,
    eq4_eq5,
    iterate_chain,
    peel_to_min_deg,
    violations,
)


def path_view():
    return TrilayeredView.of(Graph(3, [(0, 1), (1, 2)]), [0], [1], [2])


def random_trilayer(rng, n1, n2, n3, p):
    V1 = list(range(n1))
    V2 = list(range(n1, n1 + n2))
    V3 = list(range(n1 + n2, n1 + n2 + n3))
    edges = [(u, v) for u in V1 for v in V2 if rng.random() < p]
    edges += [(u, v) for u in V2 for v in V3 if rng.random() < p]
    return TrilayeredView.of(Graph(n1 + n2 + n3, edges), V1, V2, V3)


def meets(t, keep, spec):
    """Does the trilayered graph induced on ``keep`` meet ``spec`` at every vertex?"""
    sub = t.restrict(t.V1 & keep, t.V2 & keep, t.V3 & keep)
    return not violations(sub, spec)


def brute_maximal(t, spec):
    """Union of every vertex subset meeting the spec (the family is closed under union)."""
    verts = sorted(t.vertices)
    best = frozenset()
    for r in range(len(verts), 0, -1):
        for keep in itertools.combinations(verts, r):
            keep = frozenset(keep)
            if not keep <= best and meets(t, keep, spec):
                best |= keep
    return best


def kept(t, transcript):
    return t.vertices - {r.vertex for r in transcript.removals}


# peel_to_min_deg


def test_peel_all_degree_one_survives():
    t = path_view()
    out, tr = peel_to_min_deg(t, MinDegSpec(1, 1, 1, 1), 3)
    assert out == t
    assert tr.removals == []


def test_peel_cascade_empties_starting_from_v1():
    out, tr = peel_to_min_deg(path_view(), MinDegSpec(2, 1, 1, 1), 3)
    assert out is None
    assert [(r.vertex, r.side) for r in tr.removals] == [(0, "A"), (1, "B"), (2, "D")]
    assert tr.removals[0].degree == 1


def test_peel_records_c_side_removals_in_r():
    # V3 leaf falls on D, then its V2 vertex on C
    g = Graph(4, [(0, 1), (1, 2), (1, 3)])
    t = TrilayeredView.of(g, [0], [1], [2, 3])
    out, tr = peel_to_min_deg(t, MinDegSpec(0, 0, 1, 2), 3)
    assert out is None
    assert tr.R == {1}
    assert tr.Eprime == {(1, 2), (1, 3)}


def test_peel_requires_all_layers_to_survive():
    # V1 keeps its floor of 0 but V2 and V3 are gone
    out, tr = peel_to_min_deg(path_view(), MinDegSpec(0, 1, 1, 2), 3)
    assert out is None
    assert kept(path_view(), tr) == {0}


def test_grid_half_of_v2_survives():
    # V2 vertices 4..7 see both V1 vertices, 8..11 see only one
    V1, V2, V3 = [0, 1], list(range(4, 12)), [2, 3]
    edges = [(v, u) for u in V2[:4] for v in V1] + [(0, u) for u in V2[4:]]
    edges += [(u, w) for u in V2 for w in V3]
    t = TrilayeredView.of(Graph(12, edges), V1, V2, V3)
    spec = MinDegSpec(1, 2, 1, 1)
    out, tr = peel_to_min_deg(t, spec, 3)
    assert out.V2 == frozenset(V2[:4])
    assert kept(t, tr) == brute_maximal(t, spec)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4), st.integers(1, 4), st.integers(1, 4))
def test_peel_matches_exhaustive_fixpoint(seed, n1, n2, n3):
    rng = random.Random(seed)
    t = random_trilayer(rng, n1, n2, n3, 0.6)
    spec = MinDegSpec(*(rng.randint(0, 3) for _ in range(4)))
    _, tr = peel_to_min_deg(t, spec, 3)
    assert kept(t, tr) == brute_maximal(t, spec)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_peel_order_independent(seed):
    rng = random.Random(seed)
    t = random_trilayer(rng, 5, 5, 5, 0.5)
    spec = MinDegSpec(*(rng.randint(0, 3) for _ in range(4)))
    _, ref = peel_to_min_deg(t, spec, 3)
    for i in range(5):
        _, tr = peel_to_min_deg(t, spec, 3, rng=random.Random(seed * 7 + i))
        assert kept(t, tr) == kept(t, ref)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_transcript_sets_consistent(seed):
    rng = random.Random(seed)
    t = random_trilayer(rng, 4, 6, 8, 0.5)
    k = 2
    spec = MinDegSpec(*(rng.randint(0, 3) for _ in range(4)))
    out, tr = peel_to_min_deg(t, spec, k)
    when = {r.vertex: i for i, r in enumerate(tr.removals)}
    assert len(when) == len(tr.removals)
    assert tr.R == {r.vertex for r in tr.removals if r.side == "C"}
    assert tr.S == {v for v in t.V2 if len(t.nbrs(v, 1)) >= 4 * k * k}
    for u, w in tr.Eprime:
        assert u in t.V2 and w in t.V3 and w in when
        assert when[w] < when.get(u, math.inf)
    assert tr.V2tilde == tr.R - tr.S
    if out is None and not kept(t, tr) & t.V3:
        # every V3 vertex left with fewer than D live V2 neighbours
        assert len(tr.Eprime) <= spec.D * len(t.V3)


# base_step


def spec_of(p):
    return MinDegSpec(p["A"], p["B"], p["C"], p["D"])


def test_base_step_subgraph_fixture():
    f = base_subgraph()
    p = f.params
    out = base_step(f.view, p["a"], spec_of(p), p["d"], p["k"])
    assert isinstance(out, Subgraph)
    assert violations(out.view, spec_of(p)) == []
    assert out.view.V1 and out.view.V2 and out.view.V3


def test_base_step_shrunk_fixture():
    f = base_shrunk()
    p = f.params
    t = f.view
    out = base_step(t, p["a"], spec_of(p), p["d"], p["k"])
    assert isinstance(out, Shrunk)
    assert out.V2tilde == t.V2
    assert edges_between(t.base, t.V1, out.V2tilde) >= (1 - Fraction(p["a"])) * t.e12()
    assert len(out.V2tilde) * p["d"] <= p["D"] * len(t.V3)


def test_base_step_theta_fixture():
    f = base_theta()
    p = f.params
    out = base_step(f.view, p["a"], spec_of(p), p["d"], p["k"])
    assert isinstance(out, ThetaFound)
    cert = out.certificate
    assert verify_theta(f.view.graph(), cert, p["k"])
    assert cert.vertices <= f.view.V1 | f.view.V2


def test_base_step_eq6_violation_reports_both_sides():
    t = complete_bipartite_view(3, 3)
    with pytest.raises(PreconditionError) as exc:
        base_step(t, Fraction(1, 10), MinDegSpec(1, 1, 0, 0), 1, 3)
    assert exc.value.name == "eq6"
    assert float(exc.value.lhs) == pytest.approx(0.9)
    assert float(exc.value.rhs) == pytest.approx(5 * 3 + 3)


def complete_bipartite_view(a, b):
    edges = [(u, a + v) for u in range(a) for v in range(b)]
    return TrilayeredView.of(Graph(a + b, edges), range(a), range(a, a + b), [])


def test_base_step_degree_precondition():
    f = base_shrunk()
    p = f.params
    with pytest.raises(PreconditionError) as exc:
        base_step(f.view, p["a"], spec_of(p), p["d"] + 5, p["k"])
    assert exc.value.name == "v2_degree"


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_base_step_outcomes_always_verify(seed):
    # whenever the preconditions hold, one of the three outcomes comes back and checks out
    rng = random.Random(seed)
    k = 3
    t = random_trilayer(rng, rng.randint(2, 12), rng.randint(2, 30), rng.randint(1, 60), rng.choice([0.3, 0.6, 0.9]))
    spec = MinDegSpec(rng.randint(0, 4), rng.randint(0, 4), rng.randint(0, 4), rng.randint(1, 4))
    a = Fraction(rng.randint(1, 4), 4)
    d = rng.randint(1, 6)
    try:
        out = base_step(t, a, spec, d, k)
    except PreconditionError:
        return
    if isinstance(out, Subgraph):
        assert violations(out.view, spec) == []
    elif isinstance(out, Shrunk):
        assert edges_between(t.base, t.V1, out.V2tilde) >= (1 - a) * t.e12()
        assert len(out.V2tilde) * d <= spec.D * len(t.V3)
    else:
        assert verify_theta(t.graph(), out.certificate, k)
        assert out.certificate.vertices <= t.V1 | t.V2


# check_conditions and chain formulas


def test_condition_one_trivial_without_v3():
    t = complete_bipartite_view(2, 2)
    c = check_conditions(t, 1, 4, 1)["condition_1"]
    assert c.rhs == 0 and c.passed


def test_condition_three_example():
    # k=4, e(V1,V2)=100, |V2|=10
    t = complete_bipartite_view(10, 10)
    c = check_conditions(t, 1, 4, 1)["condition_3"]
    assert c.lhs == 100
    assert c.rhs == pytest.approx(20 * (math.log(4) + 1) * 10)
    assert c.rhs == pytest.approx(477.2588722239781, rel=1e-12)
    assert not c.passed


def test_condition_two_example():
    t = complete_bipartite_view(1, 1)
    c = check_conditions(t, 1, 4, 1)["condition_2"]
    assert c.rhs == pytest.approx(6 * 4 * (math.log(4) + 1) ** 2 * 8**7, rel=1e-12)
    assert c.rhs == pytest.approx(2.866e8, rel=1e-3)


def test_condition_two_overflow_is_inf():
    t = complete_bipartite_view(1, 1)
    c = check_conditions(t, 1, 200, 10**6)["condition_2"]
    assert c.rhs == math.inf and not c.passed


def test_a_sequence():
    t = 3
    assert [Fraction(1, t - i + 1) for i in range(t)] == [Fraction(1, 4), Fraction(1, 3), Fraction(1, 2)]


def test_d_i_formula():
    # k=4, a_i d_i = 32 gives min(8, 1)
    _, _, _, D = chain_parameters(Fraction(1, 2), 64, 1, 1, 4)
    assert D == 1


def test_b_i_formula():
    _, _, B, _ = chain_parameters(Fraction(1, 2), 64, 1, 1, 4)
    assert B == Fraction(1, 2) * 64 / 4 + 5


def test_chain_length():
    assert [chain_length(k) for k in (2, 3, 4, 8, 20)] == [1, 2, 2, 3, 3]


def test_eq4_eq5_exact():
    c4, c5 = eq4_eq5(12, 7, 2, 3, 4)
    # 2k (Delta D)^(D-1) = 8 * 6 = 48
    assert c4.rhs == 48 and not c4.passed
    assert c5.lhs == 6 and not c5.passed
    c4, c5 = eq4_eq5(48, 8, 2, 3, 4)
    assert c4.passed and c5.passed


# iterate_chain


def test_chain_stops_in_subgraph():
    f = chain_subgraph()
    p = f.params
    r = iterate_chain(f.view, p["d"], p["k"], p["Delta"], p["C"])
    assert r.kind == "subgraph"
    assert len(r.steps) == 1
    assert all(c.passed for c in r.steps[0].checks)
    step = r.steps[0]
    c4, c5 = eq4_eq5(step.A, step.B, step.D, p["Delta"], p["k"])
    assert c4.passed and c5.passed


def test_chain_shrinks_then_stops():
    f = chain_shrink()
    p = f.params
    t = f.view
    r = iterate_chain(t, p["d"], p["k"], p["Delta"], p["C"])
    assert r.kind == "subgraph"
    assert [s.outcome for s in r.steps] == ["shrunk", "subgraph"]
    for s in r.steps:
        assert all(c.passed for c in s.checks), [str(c) for c in s.checks]
    first, second = r.steps
    # recompute invariant (7) and the shrink bound
    assert second.e12 >= (1 - first.a) * first.e12
    assert second.v2_size * p["d"] <= first.D * len(t.V3)
    # invariant (9) at step 1
    assert second.e12 * (r.t + 1) >= r.t * first.e12


def test_chain_rejects_failed_conditions():
    f = base_shrunk()
    with pytest.raises(PreconditionError) as exc:
        iterate_chain(f.view, 1, 3, 1, 1)
    assert exc.value.name.startswith("condition_")


def test_chain_trace_json():
    f = chain_subgraph()
    p = f.params
    r = iterate_chain(f.view, p["d"], p["k"], p["Delta"], p["C"])
    out = json.loads(json.dumps(r.to_json()))
    assert out["outcome"] == "subgraph"
    assert set(out["steps"][0]) >= {"a_i", "d_i", "A_i", "B_i", "D_i", "v2_size", "checks"}


def test_chain_step_override():
    f = chain_subgraph()
    p = f.params
    r = iterate_chain(f.view, p["d"], p["k"], p["Delta"], p["C"], steps=5)
    assert r.t == 5
    assert r.steps[0].a == Fraction(1, 6)
