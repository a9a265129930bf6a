"""Exact comparisons between products of rational powers of rationals.

Thresholds such as ``c * n^(1+alpha)`` or ``(20/alpha)^(-2/alpha)`` are
irrational in general but are products ``prod b_i^(e_i)`` with rational
``b_i > 0`` and rational ``e_i``. Two such products compare exactly after
raising both to the common denominator of all exponents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"cannot treat {x!r} as a rational")


@dataclass(frozen=True)
class PowerProduct:
    """``coef * prod(base ** exp)``; ``coef`` is a non-negative rational, bases positive rationals."""

    coef: Fraction
    factors: tuple[tuple[Fraction, Fraction], ...] = ()

    @classmethod
    def of(cls, x) -> PowerProduct:
        if isinstance(x, PowerProduct):
            return x
        f = to_fraction(x)
        if f < 0:
            raise ValueError("negative values are not supported")
        return cls(f)

    @classmethod
    def power(cls, base, exp) -> PowerProduct:
        base, exp = to_fraction(base), to_fraction(exp)
        if base < 0:
            raise ValueError("negative base")
        if base == 0:
            if exp <= 0:
                raise ZeroDivisionError("0 to a non-positive power")
            return cls(Fraction(0))
        if exp.denominator == 1:
            return cls(base ** int(exp))
        return cls(Fraction(1), ((base, exp),))

    @classmethod
    def parse(cls, text: str) -> PowerProduct:
        """Parse ``"400*40^-3/2"``: factors joined by ``*``, each ``base`` or ``base^exp``."""
        out = cls(Fraction(1))
        for part in text.replace(" ", "").split("*"):
            if not part:
                raise ValueError(f"empty factor in {text!r}")
            base, _, exp = part.partition("^")
            out = out * cls.power(Fraction(base), Fraction(exp) if exp else 1)
        return out

    def __mul__(self, other) -> PowerProduct:
        other = PowerProduct.of(other)
        return PowerProduct(self.coef * other.coef, _merge(self.factors + other.factors))

    __rmul__ = __mul__

    def __truediv__(self, other) -> PowerProduct:
        other = PowerProduct.of(other)
        if other.coef == 0:
            raise ZeroDivisionError("division by zero")
        inv = tuple((b, -e) for b, e in other.factors)
        return PowerProduct(self.coef / other.coef, _merge(self.factors + inv))

    def __rtruediv__(self, other) -> PowerProduct:
        return PowerProduct.of(other) / self

    def __pow__(self, exp) -> PowerProduct:
        exp = to_fraction(exp)
        out = PowerProduct.power(self.coef, exp)
        if self.coef == 0:
            return out
        return out * PowerProduct(Fraction(1), _merge(tuple((b, e * exp) for b, e in self.factors)))

    def log(self) -> float:
        if self.coef == 0:
            return -math.inf
        return _flog(self.coef) + sum(float(e) * _flog(b) for b, e in self.factors)

    def __float__(self) -> float:
        if self.coef == 0:
            return 0.0
        if not self.factors:
            return float(self.coef)
        try:
            return math.exp(self.log())
        except OverflowError:
            return math.inf

    def __ge__(self, other) -> bool:
        return compare(self, other) >= 0

    def __gt__(self, other) -> bool:
        return compare(self, other) > 0

    def __le__(self, other) -> bool:
        return compare(self, other) <= 0

    def __lt__(self, other) -> bool:
        return compare(self, other) < 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, (PowerProduct, int, Fraction)):
            return NotImplemented
        return compare(self, other) == 0

    def __hash__(self):
        return hash((self.coef, self.factors))

    def ceil(self) -> int:
        """Exact ceiling."""
        guess = math.ceil(float(self))
        while guess > 0 and compare(self, guess - 1) <= 0:
            guess -= 1
        while compare(self, guess) > 0:
            guess += 1
        return guess

    def __repr__(self) -> str:
        parts = [str(self.coef)] + [f"{b}^({e})" for b, e in self.factors]
        return "*".join(parts)


def _flog(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


def _merge(factors: Iterable[tuple[Fraction, Fraction]]) -> tuple[tuple[Fraction, Fraction], ...]:
    acc: dict[Fraction, Fraction] = {}
    for b, e in factors:
        acc[b] = acc.get(b, Fraction(0)) + e
    return tuple(sorted((b, e) for b, e in acc.items() if e != 0 and b != 1))


def compare(a, b) -> int:
    """Sign of ``a - b`` for non-negative power products, computed exactly."""
    a, b = PowerProduct.of(a), PowerProduct.of(b)
    if a.coef == 0 or b.coef == 0:
        return (a.coef != 0) - (b.coef != 0)
    # cheap float screen, exact fallback when close
    la, lb = a.log(), b.log()
    if abs(la - lb) > 1e-6 * max(1.0, abs(la), abs(lb)):
        return 1 if la > lb else -1
    q = PowerProduct(a.coef / b.coef, _merge(a.factors + tuple((x, -e) for x, e in b.factors)))
    den = 1
    for _, e in q.factors:
        den = den * e.denominator // math.gcd(den, e.denominator)
    lhs, rhs = q.coef**den, Fraction(1)
    for base, e in q.factors:
        p = int(e * den)
        if p > 0:
            lhs *= base**p
        else:
            rhs *= base ** (-p)
    return (lhs > rhs) - (lhs < rhs)
