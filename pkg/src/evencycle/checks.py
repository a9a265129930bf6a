"""A named inequality with both sides kept for reporting."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Check:
    name: str
    lhs: float
    rhs: float
    passed: bool

    def to_json(self) -> dict:
        return {"name": self.name, "lhs": _finite(self.lhs), "rhs": _finite(self.rhs), "passed": self.passed}

    def __str__(self) -> str:
        mark = "ok" if self.passed else "FAILED"
        return f"{self.name}: {self.lhs:.6g} vs {self.rhs:.6g} [{mark}]"


def _finite(x: float):
    # JSON has no infinities
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def first_failure(checks) -> Check | None:
    for c in checks:
        if not c.passed:
            return c
    return None
