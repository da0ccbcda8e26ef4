"""Arithmetic in GF(p^n).

Elements are polynomials over GF(p) reduced modulo a monic irreducible
polynomial of degree n.  Each element carries a canonical integer index,
the base-p evaluation of its coefficient vector (lowest degree first), so
that element 0 has index 0 and element 1 has index 1.  The modulus is the
lexicographically smallest monic irreducible polynomial when coefficient
lists are compared from the constant term upward.

>>> F = field_new(3, 2)
>>> F.modulus
(1, 0, 1)
>>> a = F.element(5)
>>> (a * a.inverse()).index
1
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import (
    DivisionByZero,
    DomainViolation,
    FieldMismatch,
    InternalInvariantBroken,
    NotPrime,
    UnsupportedCharacteristic,
)

__all__ = [
    "FieldSpec",
    "FieldElement",
    "field_new",
    "elements",
    "add",
    "mul",
    "neg",
    "inv",
    "quadratic_character",
    "is_prime",
    "factorize",
    "prime_power",
    "MAX_ORDER",
]

MAX_ORDER = 2**20


# ---------------------------------------------------------------------------
# integer helpers
# ---------------------------------------------------------------------------


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of ``n >= 1`` as ``{prime: exponent}``, primes ascending."""
    if n < 1:
        raise DomainViolation(f"cannot factorize {n}")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, n)`` with ``q = p**n`` or None if q is not a prime power."""
    if q < 2:
        return None
    f = factorize(q)
    if len(f) != 1:
        return None
    ((p, n),) = f.items()
    return p, n


# ---------------------------------------------------------------------------
# polynomials over GF(p), coefficient tuples lowest degree first
# ---------------------------------------------------------------------------


def _trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mod(a: list[int], m: tuple[int, ...], p: int) -> list[int]:
    # m is monic
    a = _trim(list(a))
    dm = len(m) - 1
    while len(a) - 1 >= dm:
        lead = a[-1]
        shift = len(a) - 1 - dm
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - lead * mc) % p
        _trim(a)
    return a


def _monic(degree: int, p: int):
    for low in itertools.product(range(p), repeat=degree):
        yield low + (1,)


def _is_irreducible(m: tuple[int, ...], p: int) -> bool:
    n = len(m) - 1
    if n == 1:
        return True
    if m[0] == 0:
        return False
    for deg in range(1, n // 2 + 1):
        for g in _monic(deg, p):
            if not _poly_mod(list(m), g, p):
                return False
    return True


@lru_cache(maxsize=None)
def _smallest_irreducible(p: int, n: int) -> tuple[int, ...]:
    for cand in sorted(_monic(n, p)):
        if _is_irreducible(cand, p):
            return cand
    raise InternalInvariantBroken(f"no irreducible polynomial of degree {n} over GF({p})")


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldSpec:
    """The field GF(p^n) with a fixed modulus."""

    p: int
    n: int
    modulus: tuple[int, ...]
    _tables: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    @property
    def order(self) -> int:
        return self.p**self.n

    @property
    def q(self) -> int:
        return self.order

    def __str__(self) -> str:
        return f"GF({self.order})" if self.n == 1 else f"GF({self.p}^{self.n})"

    def coeffs(self, index: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.n):
            index, c = divmod(index, self.p)
            out.append(c)
        return tuple(out)

    def index_of(self, coeffs) -> int:
        idx = 0
        for c in reversed(coeffs):
            idx = idx * self.p + c
        return idx

    def element(self, index: int) -> FieldElement:
        if not 0 <= index < self.order:
            raise DomainViolation(f"index {index} outside {self}")
        return FieldElement(self, index)

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, 0)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, 1)

    # raw index arithmetic; the element methods below delegate here

    def _add(self, a: int, b: int) -> int:
        if self.n == 1:
            return (a + b) % self.p
        ca, cb = self.coeffs(a), self.coeffs(b)
        return self.index_of([(x + y) % self.p for x, y in zip(ca, cb)])

    def _neg(self, a: int) -> int:
        if self.n == 1:
            return (-a) % self.p
        return self.index_of([(-x) % self.p for x in self.coeffs(a)])

    def _mul(self, a: int, b: int) -> int:
        if self.n == 1:
            return (a * b) % self.p
        table = self._tables.get("mul")
        if table is not None:
            return table[a * self.order + b]
        ca, cb = self.coeffs(a), self.coeffs(b)
        prod = [0] * (2 * self.n - 1)
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    prod[i + j] = (prod[i + j] + x * y) % self.p
        r = _poly_mod(prod, self.modulus, self.p)
        return self.index_of(r + [0] * (self.n - len(r)))

    def _inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero(f"inverse of 0 in {self}")
        return self._pow(a, self.order - 2)

    def _pow(self, a: int, e: int) -> int:
        result, base = 1, a
        if e < 0:
            base, e = self._inv(a), -e
        while e:
            if e & 1:
                result = self._mul(result, base)
            base = self._mul(base, base)
            e >>= 1
        return result

    def precompute(self) -> FieldSpec:
        """Cache a multiplication table (worthwhile for small extension fields)."""
        if self.n > 1 and "mul" not in self._tables and self.order <= 1024:
            q = self.order
            self._tables["mul"] = [self._mul(a, b) for a in range(q) for b in range(q)]
        return self


@dataclass(frozen=True)
class FieldElement:
    spec: FieldSpec
    index: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.spec.coeffs(self.index)

    def _check(self, other: FieldElement) -> None:
        if not isinstance(other, FieldElement) or other.spec != self.spec:
            raise FieldMismatch(f"{self.spec} vs {getattr(other, 'spec', other)}")

    def __add__(self, other: FieldElement) -> FieldElement:
        self._check(other)
        return FieldElement(self.spec, self.spec._add(self.index, other.index))

    def __sub__(self, other: FieldElement) -> FieldElement:
        self._check(other)
        return FieldElement(self.spec, self.spec._add(self.index, self.spec._neg(other.index)))

    def __mul__(self, other: FieldElement) -> FieldElement:
        self._check(other)
        return FieldElement(self.spec, self.spec._mul(self.index, other.index))

    def __truediv__(self, other: FieldElement) -> FieldElement:
        self._check(other)
        return FieldElement(self.spec, self.spec._mul(self.index, self.spec._inv(other.index)))

    def __neg__(self) -> FieldElement:
        return FieldElement(self.spec, self.spec._neg(self.index))

    def __pow__(self, e: int) -> FieldElement:
        return FieldElement(self.spec, self.spec._pow(self.index, e))

    def inverse(self) -> FieldElement:
        return FieldElement(self.spec, self.spec._inv(self.index))

    def __bool__(self) -> bool:
        return self.index != 0

    def __int__(self) -> int:
        return self.index

    def __repr__(self) -> str:
        return f"{self.spec}[{self.index}]"


@lru_cache(maxsize=None)
def field_new(p: int, n: int = 1) -> FieldSpec:
    if not is_prime(p):
        raise NotPrime(p)
    if n < 1:
        raise DomainViolation(f"extension degree must be >= 1, got {n}")
    if p**n > MAX_ORDER:
        raise DomainViolation(f"field order {p}^{n} exceeds the desk-scale cap {MAX_ORDER}")
    modulus = (0, 1) if n == 1 else _smallest_irreducible(p, n)
    return FieldSpec(p, n, modulus).precompute()


def field_of_order(q: int) -> FieldSpec:
    pp = prime_power(q)
    if pp is None:
        raise DomainViolation(f"{q} is not a prime power")
    return field_new(*pp)


def elements(spec: FieldSpec) -> list[FieldElement]:
    return [FieldElement(spec, i) for i in range(spec.order)]


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def neg(a: FieldElement) -> FieldElement:
    return -a


def inv(a: FieldElement) -> FieldElement:
    return a.inverse()


def quadratic_character(spec: FieldSpec, a: FieldElement) -> int:
    """Legendre-type character: 0 at zero, +1 on nonzero squares, -1 otherwise."""
    if spec.p == 2:
        raise UnsupportedCharacteristic("quadratic character needs odd characteristic")
    if a.spec != spec:
        raise FieldMismatch(f"{a.spec} vs {spec}")
    if a.index == 0:
        return 0
    v = spec._pow(a.index, (spec.order - 1) // 2)
    return 1 if v == 1 else -1
