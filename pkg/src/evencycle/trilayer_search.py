"""Minimum-degree search in trilayered graphs and the iterated subset chain.

``base_step`` peels a trilayered view down to minimum degree ``[A:B,C:D]``
and ends in one of three ways: the peel survives (``Subgraph``), or a small
part of V2 still carries most V1-V2 edges (``Shrunk``), or a theta graph
sits between V1 and the V2 vertices of large V1-degree (``ThetaFound``).
``iterate_chain`` applies it repeatedly with shrinking V2 and checks every
invariant the argument relies on.

Chain arithmetic is exact: inputs are converted to fractions, and the few
irrational quantities (logarithms, the base of the natural log, powers
with fractional exponent) are compared through ``PowerProduct`` or 50-digit
mpmath.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import mpmath

from .checks import Check, first_failure
from .exact import PowerProduct, to_fraction
from .graph import BipartiteView, TrilayeredView, edges_between
from .theta import (
    ThetaCertificate,
    ThetaInvariantError,
    ThetaPreconditionError,
    bipartite_theta_from_sets,
    find_theta_avg_degree,
    verify_theta,
)

SIDES = "ABCD"


class PreconditionError(ValueError):
    """An input inequality does not hold; carries both sides."""

    def __init__(self, name: str, lhs, rhs):
        super().__init__(f"{name} fails: {float(lhs):.6g} < {float(rhs):.6g}")
        self.name = name
        self.lhs = lhs
        self.rhs = rhs


@dataclass(frozen=True)
class MinDegSpec:
    A: Fraction
    B: Fraction
    C: Fraction
    D: Fraction

    def __init__(self, A, B, C, D):
        for name, x in zip(SIDES, (A, B, C, D)):
            x = to_fraction(x)
            if x < 0:
                raise ValueError(f"{name} must be non-negative")
            object.__setattr__(self, name, x)

    def floors(self) -> tuple[int, int, int, int]:
        """Integer floors: a degree count meets ``X`` iff it is at least ``ceil(X)``."""
        return tuple(math.ceil(x) for x in (self.A, self.B, self.C, self.D))

    def to_json(self) -> dict:
        return {s: float(getattr(self, s)) for s in SIDES}


@dataclass(frozen=True)
class Removal:
    vertex: int
    layer: int
    side: str
    degree: int


@dataclass
class PeelTranscript:
    removals: list[Removal] = field(default_factory=list)
    R: frozenset[int] = frozenset()
    S: frozenset[int] = frozenset()
    Eprime: frozenset[tuple[int, int]] = frozenset()

    @property
    def V2tilde(self) -> frozenset[int]:
        return self.R - self.S

    def to_json(self) -> dict:
        return {
            "removals": [[r.vertex, r.layer, r.side, r.degree] for r in self.removals],
            "R": sorted(self.R),
            "S": sorted(self.S),
            "Eprime": [list(e) for e in sorted(self.Eprime)],
        }


def _side_degrees(t: TrilayeredView, alive: set[int]) -> dict[int, dict[str, int]]:
    out = {}
    for v in alive:
        lay = t.layer(v)
        if lay == 1:
            out[v] = {"A": len(t.nbrs(v, 2) & alive)}
        elif lay == 2:
            out[v] = {"B": len(t.nbrs(v, 1) & alive), "C": len(t.nbrs(v, 3) & alive)}
        else:
            out[v] = {"D": len(t.nbrs(v, 2) & alive)}
    return out


def violations(t: TrilayeredView, spec: MinDegSpec) -> list[tuple[int, str, int]]:
    """Every (vertex, side, degree) below its floor; empty iff ``t`` meets ``spec``."""
    floors = dict(zip(SIDES, spec.floors()))
    degs = _side_degrees(t, set(t.vertices))
    return sorted((v, s, d) for v, sd in degs.items() for s, d in sd.items() if d < floors[s])


def peel_to_min_deg(
    t: TrilayeredView, spec: MinDegSpec, k: int, rng: random.Random | None = None
) -> tuple[TrilayeredView | None, PeelTranscript]:
    """Remove violators until none are left.

    The deterministic rule scans sides in the order A, B, C, D and removes
    the smallest violating id on the first side that has one. With ``rng``
    a random violator goes instead; the survivors are the same either way.
    """
    floors = dict(zip(SIDES, spec.floors()))
    layer_of_side = {"A": 1, "B": 2, "C": 2, "D": 3}
    alive = set(t.vertices)
    degs = _side_degrees(t, alive)
    heaps: dict[str, list[int]] = {s: [] for s in SIDES}
    for v, sd in degs.items():
        for s, d in sd.items():
            if d < floors[s]:
                heaps[s].append(v)
    for h in heaps.values():
        heapq.heapify(h)
    removed_at: dict[int, int] = {}
    removals: list[Removal] = []

    def pick() -> tuple[int, str] | None:
        if rng is not None:
            bad = sorted({(v, s) for s in SIDES for v in heaps[s] if v in alive})
            if not bad:
                return None
            v, _ = bad[rng.randrange(len(bad))]
            # record the first violated side in A,B,C,D order
            s = next(s for s in SIDES if s in degs[v] and degs[v][s] < floors[s])
            return v, s
        for s in SIDES:
            h = heaps[s]
            while h and h[0] not in alive:
                heapq.heappop(h)
            if h:
                return heapq.heappop(h), s
        return None

    while True:
        got = pick()
        if got is None:
            break
        v, s = got
        lay = layer_of_side[s]
        # a B-violator that is also a C-violator is recorded as B
        if lay == 2 and s == "C" and degs[v]["B"] < floors["B"]:
            s = "B"
        removals.append(Removal(v, lay, s, degs[v][s]))
        removed_at[v] = len(removals)
        alive.discard(v)
        for u in t.base.adj[v]:
            if u not in alive:
                continue
            lu = t.layer(u)
            if abs(lu - lay) != 1:
                continue
            side = {1: "A", 3: "D"}.get(lu) or ("B" if lay == 1 else "C")
            degs[u][side] -= 1
            if degs[u][side] == floors[side] - 1:
                heapq.heappush(heaps[side], u)

    big = 4 * k * k
    S = frozenset(v for v in t.V2 if len(t.nbrs(v, 1)) >= big)
    R = frozenset(r.vertex for r in removals if r.side == "C")
    never = len(removals) + 1
    Eprime = frozenset(
        (u, w)
        for u in t.V2
        for w in t.nbrs(u, 3)
        if w in removed_at and removed_at[w] < removed_at.get(u, never)
    )
    transcript = PeelTranscript(removals, R, S, Eprime)
    # a survivor must keep all three layers
    if not (alive & t.V1 and alive & t.V2 and alive & t.V3):
        return None, transcript
    out = t.restrict(t.V1 & alive, t.V2 & alive, t.V3 & alive)
    if violations(out, spec):
        raise AssertionError("peeling left a violator behind")
    return out, transcript


@dataclass(frozen=True)
class ThetaFound:
    certificate: ThetaCertificate
    kind: str = "theta"

    def to_json(self) -> dict:
        return {"outcome": self.kind, "certificate": self.certificate.to_json()}


@dataclass(frozen=True)
class Subgraph:
    view: TrilayeredView
    spec: MinDegSpec
    kind: str = "subgraph"

    def to_json(self) -> dict:
        v = self.view
        return {
            "outcome": self.kind,
            "V1": sorted(v.V1),
            "V2": sorted(v.V2),
            "V3": sorted(v.V3),
            "spec": self.spec.to_json(),
        }


@dataclass(frozen=True)
class Shrunk:
    V2tilde: frozenset[int]
    checks: tuple[Check, ...]
    kind: str = "shrunk"

    def to_json(self) -> dict:
        return {"outcome": self.kind, "V2tilde": sorted(self.V2tilde), "checks": [c.to_json() for c in self.checks]}


BaseOutcome = ThetaFound | Subgraph | Shrunk


def eq6(t: TrilayeredView, a, spec: MinDegSpec, k: int) -> Check:
    a = to_fraction(a)
    lhs = a * t.e12()
    rhs = (spec.A + k + 1) * len(t.V1) + spec.B * len(t.V2)
    return Check("eq6", float(lhs), float(rhs), lhs >= rhs)


def v2_degree_check(t: TrilayeredView, d, C, k: int) -> Check:
    """Smallest degree of a V2 vertex inside the view against ``d + 4k^2 + C``."""
    need = to_fraction(d) + 4 * k * k + to_fraction(C)
    low = min((len(t.nbrs(v, 1)) + len(t.nbrs(v, 3)) for v in t.V2), default=math.inf)
    return Check("v2_degree", float(low), float(need), low >= need)


def shrink_checks(t: TrilayeredView, V2tilde: Iterable[int], a, D, d) -> tuple[Check, Check]:
    a, D, d = to_fraction(a), to_fraction(D), to_fraction(d)
    V2tilde = frozenset(V2tilde)
    kept = edges_between(t.base, t.V1, V2tilde)
    need = (1 - a) * t.e12()
    cap = D * len(t.V3) / d
    return (
        Check("edge_retention", kept, float(need), kept >= need),
        Check("size_bound", len(V2tilde), float(cap), len(V2tilde) <= cap),
    )


def base_step(t: TrilayeredView, a, spec: MinDegSpec, d, k: int) -> BaseOutcome:
    a, d = to_fraction(a), to_fraction(d)
    if not 0 < a <= 1:
        raise ValueError("a must lie in (0, 1]")
    if d <= 0:
        raise ValueError("d must be positive")
    for c in (eq6(t, a, spec, k), v2_degree_check(t, d, spec.C, k)):
        if not c.passed:
            raise PreconditionError(c.name, c.lhs, c.rhs)

    survivor, tr = peel_to_min_deg(t, spec, k)
    if survivor is not None:
        return Subgraph(survivor, spec)
    checks = shrink_checks(t, tr.V2tilde, a, spec.D, d)
    if all(c.passed for c in checks):
        return Shrunk(tr.V2tilde, checks)
    # the edge count forces average degree >= 2k between V1 and S
    attempts = [(t.V1, tr.S), (frozenset().union(*(t.nbrs(v, 1) for v in tr.S)), tr.S)]
    view = t.graph()
    for left, right in attempts:
        b = BipartiteView(t.base, frozenset(left), frozenset(right))
        try:
            cert = find_theta_avg_degree(b, k)
        except ThetaPreconditionError:
            continue
        if not verify_theta(view, cert, k):
            raise ThetaInvariantError(f"certificate {cert} not a theta in G[V1,V2]")
        return ThetaFound(cert)
    failed = first_failure(checks)
    raise ThetaInvariantError(
        f"peeling emptied the view, {failed} and G[V1,S] has average degree below {2 * k}"
    )


def check_conditions(t: TrilayeredView, d, k: int, Delta, dps: int = 50) -> dict[str, Check]:
    """The three edge-count conditions with both sides, natural logs, at ``dps`` digits."""
    e = t.e12()
    with mpmath.workdps(dps):
        lnk = mpmath.log(k)
        d_, D_ = mpmath.mpf(to_fraction(d).numerator) / to_fraction(d).denominator, _mpf(Delta)
        sides = {
            "condition_1": (d_ * e, 40 * k * lnk * len(t.V3)),
            "condition_2": (mpmath.mpf(e), 6 * k * (lnk + 1) ** 2 * (2 * D_ * k) ** (2 * k - 1) * len(t.V1)),
            "condition_3": (mpmath.mpf(e), 20 * (lnk + 1) * len(t.V2)),
        }
        return {name: Check(name, _float(l), _float(r), l >= r) for name, (l, r) in sides.items()}


def _mpf(x) -> mpmath.mpf:
    x = to_fraction(x)
    return mpmath.mpf(x.numerator) / x.denominator


def _float(x) -> float:
    try:
        return float(x)
    except OverflowError:
        return math.inf


def chain_length(k: int) -> int:
    return max(1, math.ceil(math.log(k)))


@dataclass
class ChainStep:
    i: int
    a: Fraction
    d_i: Fraction
    A: Fraction
    B: Fraction
    D: Fraction
    v2_size: int
    e12: int
    outcome: str = ""
    checks: list[Check] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "i": self.i,
            "a_i": float(self.a),
            "d_i": float(self.d_i),
            "A_i": float(self.A),
            "B_i": float(self.B),
            "D_i": float(self.D),
            "v2_size": self.v2_size,
            "e12": self.e12,
            "outcome": self.outcome,
            "checks": [c.to_json() for c in self.checks],
        }


@dataclass
class ChainResult:
    """``kind`` is ``"theta"``, ``"subgraph"`` or ``"failure"``."""

    kind: str
    steps: list[ChainStep]
    t: int
    certificate: ThetaCertificate | None = None
    subgraph: Subgraph | None = None
    final_checks: list[Check] = field(default_factory=list)
    failure: Check | None = None

    def to_json(self) -> dict:
        out = {"outcome": self.kind, "t": self.t, "steps": [s.to_json() for s in self.steps]}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        if self.subgraph is not None:
            out["subgraph"] = self.subgraph.to_json()
        if self.final_checks:
            out["final_checks"] = [c.to_json() for c in self.final_checks]
        if self.failure is not None:
            out["failure"] = self.failure.to_json()
        return out


def chain_parameters(a: Fraction, e_i: int, v2_size: int, v1_size: int, k: int) -> tuple[Fraction, ...]:
    """``(d_i, A_i, B_i, D_i)`` for the current V2 subset."""
    d_i = Fraction(e_i, v2_size)
    A = a * e_i / (2 * v1_size) - k - 1
    B = a * d_i / 4 + 5
    D = Fraction(2 * k) if a * d_i == 0 else min(Fraction(2 * k), 8 * k / (a * d_i))
    return d_i, A, B, D


def eq4_eq5(A, B, D, Delta, k: int) -> tuple[Check, Check]:
    A, B, D, Delta = (to_fraction(x) for x in (A, B, D, Delta))
    rhs4 = 2 * k * PowerProduct.power(Delta * D, D - 1)
    lhs5 = (B - 4) * D
    return (
        Check("eq4", float(A), float(rhs4), A >= 0 and PowerProduct.of(A) >= rhs4),
        Check("eq5", float(lhs5), 2 * k, lhs5 >= 2 * k),
    )


def _deg_ratio_check(i: int, t: int, d0: Fraction, d_i: Fraction) -> Check:
    # d0/d_i <= e(t+1) / (5^i (t-i+1))
    with mpmath.workdps(50):
        lhs = _mpf(d0) / _mpf(d_i)
        rhs = mpmath.e * (t + 1) / (mpmath.mpf(5) ** i * (t - i + 1))
        return Check(f"invariant_10[{i}]", float(lhs), float(rhs), lhs <= rhs)


def iterate_chain(t: TrilayeredView, d, k: int, Delta, C, steps: int | None = None) -> ChainResult:
    d, Delta, C = to_fraction(d), to_fraction(Delta), to_fraction(C)
    for c in check_conditions(t, d, k, Delta).values():
        if not c.passed:
            raise PreconditionError(c.name, c.lhs, c.rhs)
    deg = v2_degree_check(t, d, C, k)
    if not deg.passed:
        raise PreconditionError(deg.name, deg.lhs, deg.rhs)

    T = chain_length(k) if steps is None else steps
    if T < 1:
        raise ValueError("the chain needs at least one step")
    e0 = t.e12()
    n1, n3 = len(t.V1), len(t.V3)
    F = d * e0 / (8 * k * n3) if n3 else None
    d0 = Fraction(e0, len(t.V2))
    V2i = t.V2
    trace: list[ChainStep] = []

    for i in range(T):
        a = Fraction(1, T - i + 1)
        e_i = edges_between(t.base, t.V1, V2i)
        d_i, A, B, D = chain_parameters(a, e_i, len(V2i), n1, k)
        step = ChainStep(i, a, d_i, A, B, D, len(V2i), e_i)
        trace.append(step)
        lhs9, rhs9 = e_i, Fraction(T - i + 1, T + 1) * e0
        step.checks.append(Check(f"invariant_9[{i}]", lhs9, float(rhs9), lhs9 >= rhs9))
        step.checks.append(_deg_ratio_check(i, T, d0, d_i))
        bad = first_failure(step.checks)
        if bad:
            step.outcome = "failure"
            return ChainResult("failure", trace, T, failure=bad)

        view = t.restrict(V2=V2i)
        spec = MinDegSpec(max(A, Fraction(0)), B, C, D)
        try:
            out = base_step(view, a, spec, d, k)
        except PreconditionError as exc:
            step.outcome = "failure"
            fail = Check(exc.name, float(exc.lhs), float(exc.rhs), False)
            step.checks.append(fail)
            return ChainResult("failure", trace, T, failure=fail)
        step.outcome = out.kind
        if isinstance(out, ThetaFound):
            return ChainResult("theta", trace, T, certificate=out.certificate)
        if isinstance(out, Subgraph):
            step.checks.extend(eq4_eq5(A, B, D, Delta, k))
            bad = first_failure(step.checks)
            if bad:
                return ChainResult("failure", trace, T, subgraph=out, failure=bad)
            return ChainResult("subgraph", trace, T, subgraph=out)

        nxt = out.V2tilde
        e_next = edges_between(t.base, t.V1, nxt)
        need7 = (1 - a) * e_i
        step.checks.append(Check(f"invariant_7[{i}]", e_next, float(need7), e_next >= need7))
        cap = D * n3 / d
        step.checks.append(Check(f"shrink_bound[{i}]", len(nxt), float(cap), len(nxt) <= cap))
        if nxt:
            d_next = Fraction(e_next, len(nxt))
            need8 = a * d_i * Fraction(T - i, T + 1) * F
            step.checks.append(Check(f"invariant_8[{i}]", float(d_next), float(need8), d_next >= need8))
        else:
            step.checks.append(Check(f"nonempty[{i + 1}]", 0, 1, False))
        bad = first_failure(step.checks)
        if bad:
            return ChainResult("failure", trace, T, failure=bad)
        V2i = nxt

    # after T shrinking steps: dense enough for a theta, or report
    e_t = edges_between(t.base, t.V1, V2i)
    d_t = Fraction(e_t, len(V2i))
    final = [
        Check("v2t_at_most_v1", len(V2i), n1, len(V2i) <= n1),
        Check("d_t_at_least_2k", float(d_t), 2 * k, d_t >= 2 * k),
        Check(f"invariant_9[{T}]", e_t, float(Fraction(1, T + 1) * e0), e_t * (T + 1) >= e0),
        _deg_ratio_check(T, T, d0, d_t),
    ]
    if final[0].passed or final[1].passed:
        cert = bipartite_theta_from_sets(t.base, t.V1, V2i, k)
        if cert is not None:
            return ChainResult("theta", trace, T, certificate=cert, final_checks=final)
    conds = check_conditions(t, d, k, Delta)
    final.append(Check("d0_at_least_20(t+1)", float(d0), 20 * (T + 1), d0 >= 20 * (T + 1)))
    final.extend([conds["condition_1"], conds["condition_3"]])
    bad = first_failure(final) or Check("final_theta_search", 0, 1, False)
    return ChainResult("failure", trace, T, final_checks=final, failure=bad)
