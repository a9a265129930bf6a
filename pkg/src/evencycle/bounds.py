"""Closed-form extremal bounds for even cycles and the threshold constants.

Everything uses natural logarithms. Quantities that overflow a double
(the thresholds grow like ``(20k)^(4k^3)``) are carried as base-10
logarithms, with exact integers alongside where they are integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath

LOG10_E = math.log10(math.e)
EXACT_LIMIT = 1e15


def main_coefficient(k: int, variant: str = "sqrt5") -> float:
    """Leading coefficient ``16*sqrt(5)*sqrt(k ln k)``; ``variant="sqrt10"`` uses 16*sqrt(10)."""
    root = {"sqrt5": 5, "sqrt10": 10}[variant]
    return 16 * math.sqrt(root) * math.sqrt(k * math.log(k))


def bukh_jiang_coefficient(k: int) -> float:
    return 80 * math.sqrt(k) * math.log(k)


def improvement_factor(k: int) -> float:
    """Ratio of the Bukh-Jiang coefficient to the sqrt5 main coefficient."""
    return bukh_jiang_coefficient(k) / main_coefficient(k)


@dataclass(frozen=True)
class BoundValue:
    name: str
    log10: float
    value: float | None

    def to_json(self) -> dict:
        return {"name": self.name, "log10": self.log10, "value": self.value}


@dataclass(frozen=True)
class BoundReport:
    n: int
    k: int
    bounds: tuple[BoundValue, ...] = field(default=())

    def __getitem__(self, name: str) -> BoundValue:
        for b in self.bounds:
            if b.name == name:
                return b
        raise KeyError(name)

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "bounds": [b.to_json() for b in self.bounds]}


def _terms(n: int, k: int) -> dict[str, list[tuple[float, float]]]:
    """Each bound as a sum of ``coef * n^exp`` terms, given as (log10 coef, exp)."""
    lead = 1 + 1 / k
    second = 1 + (2 * k - 1) / (2 * k * k)
    tail = (math.log10(8000) + 4 * math.log10(k), second)
    return {
        "main": [(math.log10(main_coefficient(k)), lead), tail],
        "main_sqrt10": [(math.log10(main_coefficient(k, "sqrt10")), lead), tail],
        "bondy_simonovits": [(math.log10(20 * k), lead)],
        "pikhurko": [(math.log10(k - 1), lead)] if k > 1 else [],
        "bukh_jiang": [(math.log10(bukh_jiang_coefficient(k)), lead)],
    }


def _exact_terms(n: int, k: int) -> dict[str, mpmath.mpf]:
    K, N = mpmath.mpf(k), mpmath.mpf(n)
    lead = N ** (1 + 1 / K)
    tail = 8000 * K**4 * N ** (1 + (2 * K - 1) / (2 * K * K))
    lnk = mpmath.log(K)
    return {
        "main": 16 * mpmath.sqrt(5) * mpmath.sqrt(K * lnk) * lead + tail,
        "main_sqrt10": 16 * mpmath.sqrt(10) * mpmath.sqrt(K * lnk) * lead + tail,
        "bondy_simonovits": 20 * K * lead,
        "pikhurko": (K - 1) * lead,
        "bukh_jiang": 80 * mpmath.sqrt(K) * lnk * lead,
    }


def _log10_sum(terms: list[tuple[float, float]], n: int) -> float:
    logs = [c + e * math.log10(n) for c, e in terms]
    top = max(logs)
    return top + math.log10(sum(10 ** (x - top) for x in logs))


def eval_bounds(n: int, k: int) -> BoundReport:
    """Every bound at ``(n, k)``: log10 from log-space arithmetic, value from 50-digit arithmetic."""
    if n < 2 or k < 2:
        raise ValueError("need n >= 2 and k >= 2")
    exact = None
    with mpmath.workdps(50):
        exact = _exact_terms(n, k)
    out = []
    for name, terms in _terms(n, k).items():
        log10 = _log10_sum(terms, n)
        value = float(exact[name]) if log10 < math.log10(EXACT_LIMIT) else None
        out.append(BoundValue(name, log10, value))
    return BoundReport(n, k, tuple(out))


def exact_log10_bounds(n: int, k: int, dps: int = 50) -> dict[str, float]:
    """log10 of each bound computed directly at ``dps`` digits (independent of the log-space path)."""
    with mpmath.workdps(dps):
        return {name: float(mpmath.log10(v)) for name, v in _exact_terms(n, k).items()}


@dataclass(frozen=True)
class Thresholds:
    k: int
    log10_delta: float
    log10_d_floor: float
    log10_n_floor: float

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "log10_delta": self.log10_delta,
            "log10_d_floor": self.log10_d_floor,
            "log10_n_floor": self.log10_n_floor,
        }


def thresholds(k: int) -> Thresholds:
    """``Delta = sqrt(k)(20k)^(2k)``, ``d_floor = (20k)^(4k^2+2k)``, ``n_floor = (20k)^(4k^3+2k^2)`` as log10."""
    if k < 2:
        raise ValueError("k must be at least 2")
    base = math.log10(20 * k)
    return Thresholds(
        k,
        0.5 * math.log10(k) + 2 * k * base,
        (4 * k * k + 2 * k) * base,
        (4 * k**3 + 2 * k * k) * base,
    )


def exact_thresholds(k: int) -> tuple[int, int, int]:
    """``(Delta^2, d_floor, n_floor)`` as exact integers (Delta itself is irrational for non-square k)."""
    return k * (20 * k) ** (4 * k), (20 * k) ** (4 * k * k + 2 * k), (20 * k) ** (4 * k**3 + 2 * k * k)


def int_log10(x: int, dps: int = 40) -> float:
    """log10 of a positive integer of any size, without going through a double."""
    with mpmath.workdps(dps):
        return float(mpmath.log10(mpmath.mpf(x)))


@dataclass(frozen=True)
class Crossover:
    k_max: int
    pikhurko: int | None
    bukh_jiang: int | None
    variant: str

    def to_json(self) -> dict:
        return {"k_max": self.k_max, "variant": self.variant, "pikhurko": self.pikhurko, "bukh_jiang": self.bukh_jiang}


def crossover(k_max: int, variant: str = "sqrt5", dps: int | None = None) -> Crossover:
    """Smallest ``k`` in ``2..k_max`` where the main coefficient drops below (k-1), and below 80 sqrt(k) ln k.

    With ``dps`` set the comparisons run in mpmath at that precision,
    otherwise in doubles.
    """
    if k_max < 3:
        raise ValueError("k_max must be at least 3")
    root = {"sqrt5": 5, "sqrt10": 10}[variant]
    if dps is None:
        def main(k):
            return 16 * math.sqrt(root) * math.sqrt(k * math.log(k))

        def bj(k):
            return 80 * math.sqrt(k) * math.log(k)
    else:
        def main(k):
            with mpmath.workdps(dps):
                return 16 * mpmath.sqrt(root) * mpmath.sqrt(k * mpmath.log(k))

        def bj(k):
            with mpmath.workdps(dps):
                return 80 * mpmath.sqrt(k) * mpmath.log(k)

    pik = bjk = None
    for k in range(2, k_max + 1):
        c = main(k)
        if bjk is None and c < bj(k):
            bjk = k
        if pik is None and c < k - 1:
            pik = k
        if pik is not None and bjk is not None:
            break
    return Crossover(k_max, pik, bjk, variant)
