"""Exact sums of roots of unity.

A :class:`RootSum` is an integer combination of powers of
``w = exp(2*pi*i/N)``.  Equality, zero tests and rationality are decided
exactly by reducing modulo the N-th cyclotomic polynomial, whose residues
``1, w, ..., w^(phi(N)-1)`` form a basis of Q(w) over Q.
"""

from __future__ import annotations

import cmath
import math
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

__all__ = ["RootSum", "cyclotomic_polynomial", "reduce_terms"]


def _poly_divexact(a: list[int], b: list[int]) -> list[int]:
    # exact division of integer polynomials, b monic, lowest degree first
    a = list(a)
    out = [0] * (len(a) - len(b) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = a[i + len(b) - 1]
        out[i] = c
        if c:
            for j, bc in enumerate(b):
                a[i + j] -= c * bc
    if any(a[: len(b) - 1]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, lowest degree first."""
    if n < 1:
        raise ValueError(n)
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divexact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


def reduce_terms(terms: Mapping[int, int], n: int) -> tuple[int, ...]:
    """Canonical coordinates of ``sum c * w^e`` in the power basis of Q(w)."""
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    acc = [0] * max(n, deg)
    for e, c in terms.items():
        acc[e % n] += c
    for i in range(len(acc) - 1, deg - 1, -1):
        c = acc[i]
        if c:
            base = i - deg
            for j, pc in enumerate(phi):
                acc[base + j] -= c * pc
    out = acc[:deg]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


class RootSum:
    """Immutable integer combination of N-th roots of unity."""

    __slots__ = ("n", "terms", "_reduced")

    def __init__(self, n: int, terms: Mapping[int, int] | Iterable[tuple[int, int]] = ()) -> None:
        acc: dict[int, int] = defaultdict(int)
        items = terms.items() if isinstance(terms, Mapping) else terms
        for e, c in items:
            acc[e % n] += c
        self.n = n
        self.terms = tuple(sorted((e, c) for e, c in acc.items() if c))
        self._reduced: tuple[int, ...] | None = None

    @classmethod
    def from_exponents(cls, n: int, exponents: Iterable[int]) -> RootSum:
        return cls(n, ((e, 1) for e in exponents))

    @classmethod
    def root(cls, num: int, den: int, n: int | None = None) -> RootSum:
        """``exp(2*pi*i*num/den)`` expressed over the N-th roots, N a multiple of den."""
        n = den if n is None else n
        if n % den:
            raise ValueError(f"{den} does not divide {n}")
        return cls(n, [(num * (n // den), 1)])

    @classmethod
    def integer(cls, value: int, n: int = 1) -> RootSum:
        return cls(n, [(0, value)])

    def lift(self, n: int) -> RootSum:
        if n == self.n:
            return self
        if n % self.n:
            raise ValueError(f"{self.n} does not divide {n}")
        m = n // self.n
        return RootSum(n, [(e * m, c) for e, c in self.terms])

    def _common(self, other: RootSum) -> tuple[RootSum, RootSum]:
        if self.n == other.n:
            return self, other
        n = math.lcm(self.n, other.n)
        return self.lift(n), other.lift(n)

    def __add__(self, other: RootSum) -> RootSum:
        a, b = self._common(other)
        return RootSum(a.n, list(a.terms) + list(b.terms))

    def __neg__(self) -> RootSum:
        return RootSum(self.n, [(e, -c) for e, c in self.terms])

    def __sub__(self, other: RootSum) -> RootSum:
        return self + (-other)

    def __mul__(self, other: RootSum | int) -> RootSum:
        if isinstance(other, int):
            return RootSum(self.n, [(e, c * other) for e, c in self.terms])
        a, b = self._common(other)
        acc: dict[int, int] = defaultdict(int)
        for ea, ca in a.terms:
            for eb, cb in b.terms:
                acc[(ea + eb) % a.n] += ca * cb
        return RootSum(a.n, acc)

    __rmul__ = __mul__

    def conj(self) -> RootSum:
        return RootSum(self.n, [(-e, c) for e, c in self.terms])

    def abs_sq(self) -> RootSum:
        return self * self.conj()

    @property
    def reduced(self) -> tuple[int, ...]:
        if self._reduced is None:
            self._reduced = reduce_terms(dict(self.terms), self.n)
        return self._reduced

    def is_zero(self) -> bool:
        return not self.terms or not self.reduced

    def rational(self) -> Fraction | None:
        """The value as a rational number, or None if it is irrational."""
        r = self.reduced
        if len(r) > 1:
            return None
        return Fraction(r[0] if r else 0)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1 and self.terms[0][1] == 1

    def __complex__(self) -> complex:
        return sum((c * cmath.exp(2j * math.pi * e / self.n) for e, c in self.terms), 0j)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = RootSum.integer(other, 1)
        if not isinstance(other, RootSum):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None  # value equality spans different N

    def __repr__(self) -> str:
        body = " + ".join(f"{c}*w^{e}" for e, c in self.terms) or "0"
        return f"RootSum(N={self.n}: {body})"
