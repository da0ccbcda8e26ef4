"""Hadamard scaffolds: k x k matrices of unimodular entries with H H^dagger = k I.

Entries are exact phases ``exp(2*pi*i*num/den)`` so that orthogonality can be
checked symbolically; real matrices only use den 1 (+1) and den 2 (-1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cyclotomic import RootSum
from .errors import CongruenceViolation, DomainViolation, Unavailable
from .finite_field import FieldSpec, elements, field_new, prime_power, quadratic_character

__all__ = [
    "PhaseEntry",
    "UnitaryScaffold",
    "dft",
    "sylvester",
    "paley_i",
    "paley_ii",
    "tensor",
    "real_hadamard",
    "real_hadamard_available",
    "verify_scaffold",
    "scaffold_by_name",
]


@dataclass(frozen=True)
class PhaseEntry:
    zero: bool = False
    num: int = 0
    den: int = 1

    def __post_init__(self) -> None:
        if self.zero:
            object.__setattr__(self, "num", 0)
            object.__setattr__(self, "den", 1)
            return
        if self.den < 1:
            raise DomainViolation(f"phase denominator must be positive, got {self.den}")
        num = self.num % self.den
        g = math.gcd(num, self.den)
        object.__setattr__(self, "num", num // g)
        object.__setattr__(self, "den", self.den // g)

    @classmethod
    def phase(cls, num: int, den: int) -> PhaseEntry:
        return cls(False, num, den)

    @classmethod
    def sign(cls, s: int) -> PhaseEntry:
        if s not in (1, -1):
            raise DomainViolation(f"sign must be +1 or -1, got {s}")
        return cls(False, 0 if s == 1 else 1, 2 if s == -1 else 1)

    def __mul__(self, other: PhaseEntry) -> PhaseEntry:
        if self.zero or other.zero:
            return ZERO
        den = math.lcm(self.den, other.den)
        return PhaseEntry(False, self.num * (den // self.den) + other.num * (den // other.den), den)

    def conj(self) -> PhaseEntry:
        return self if self.zero else PhaseEntry(False, -self.num, self.den)

    def __complex__(self) -> complex:
        if self.zero:
            return 0j
        if self.den == 1:
            return 1 + 0j
        if self.den == 2:
            return -1 + 0j
        return complex(np.exp(2j * np.pi * self.num / self.den))

    @property
    def is_real(self) -> bool:
        return self.zero or self.den in (1, 2)

    def to_json(self) -> dict:
        return {"zero": self.zero, "num": self.num, "den": self.den}

    @classmethod
    def from_json(cls, data: dict) -> PhaseEntry:
        return cls(bool(data.get("zero", False)), int(data["num"]), int(data["den"]))


ZERO = PhaseEntry(True)
ONE = PhaseEntry.sign(1)
MINUS = PhaseEntry.sign(-1)


@dataclass(frozen=True)
class UnitaryScaffold:
    k: int
    entries: tuple[tuple[PhaseEntry, ...], ...]
    name: str = ""

    def __post_init__(self) -> None:
        entries = tuple(tuple(row) for row in self.entries)
        object.__setattr__(self, "entries", entries)
        if len(entries) != self.k or any(len(row) != self.k for row in entries):
            raise DomainViolation(f"scaffold entries are not {self.k} x {self.k}")

    @property
    def kind(self) -> str:
        return "real" if all(x.is_real for row in self.entries for x in row) else "complex"

    @property
    def conductor(self) -> int:
        """Least N such that every entry is an N-th root of unity."""
        return math.lcm(*(x.den for row in self.entries for x in row)) if self.k else 1

    def to_array(self) -> np.ndarray:
        return np.array([[complex(x) for x in row] for row in self.entries], dtype=complex)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "kind": self.kind,
            "entries": [[x.to_json() for x in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, data: dict, name: str = "file") -> UnitaryScaffold:
        entries = tuple(tuple(PhaseEntry.from_json(x) for x in row) for row in data["entries"])
        sc = cls(int(data["k"]), entries, name)
        if "kind" in data and data["kind"] != sc.kind:
            raise DomainViolation(f"declared kind {data['kind']!r} but entries are {sc.kind}")
        return sc


def _signs(name: str, rows) -> UnitaryScaffold:
    return UnitaryScaffold(len(rows), tuple(tuple(PhaseEntry.sign(x) for x in r) for r in rows), name)


def dft(k: int) -> UnitaryScaffold:
    if k < 1:
        raise DomainViolation(f"order must be positive, got {k}")
    rows = tuple(tuple(PhaseEntry.phase(u * v, k) for v in range(k)) for u in range(k))
    return UnitaryScaffold(k, rows, f"dft({k})")


def sylvester(m: int) -> UnitaryScaffold:
    """Real Hadamard matrix of order 2**m."""
    if m < 0:
        raise DomainViolation(f"m must be non-negative, got {m}")
    h = [[1]]
    for _ in range(m):
        h = [row + row for row in h] + [row + [-x for x in row] for row in h]
    return _signs(f"sylvester({m})", h)


def _jacobsthal(spec: FieldSpec) -> list[list[int]]:
    els = elements(spec)
    return [[quadratic_character(spec, a - b) for b in els] for a in els]


def paley_i(spec: FieldSpec) -> UnitaryScaffold:
    """Order q + 1 for q = 3 mod 4: H = I + S with S the skew conference matrix."""
    q = spec.order
    if q % 4 != 3:
        raise CongruenceViolation(f"Paley I needs q = 3 mod 4, got q={q}")
    Q = _jacobsthal(spec)
    n = q + 1
    S = [[0] * n for _ in range(n)]
    for j in range(1, n):
        S[0][j] = 1
        S[j][0] = -1
    for a in range(q):
        for b in range(q):
            S[a + 1][b + 1] = Q[a][b]
    H = [[S[i][j] + (1 if i == j else 0) for j in range(n)] for i in range(n)]
    return _signs(f"paley_i({spec})", H)


def paley_ii(spec: FieldSpec) -> UnitaryScaffold:
    """Order 2(q + 1) for q = 1 mod 4, from the symmetric conference matrix."""
    q = spec.order
    if q % 4 != 1:
        raise CongruenceViolation(f"Paley II needs q = 1 mod 4, got q={q}")
    Q = _jacobsthal(spec)
    n = q + 1
    C = [[0] * n for _ in range(n)]
    for j in range(1, n):
        C[0][j] = C[j][0] = 1
    for a in range(q):
        for b in range(q):
            C[a + 1][b + 1] = Q[a][b]
    A = ((1, 1), (1, -1))
    B = ((1, -1), (-1, -1))
    H = [[0] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            for x in range(2):
                for y in range(2):
                    H[2 * i + x][2 * j + y] = C[i][j] * A[x][y] + (B[x][y] if i == j else 0)
    return _signs(f"paley_ii({spec})", H)


def tensor(a: UnitaryScaffold, b: UnitaryScaffold) -> UnitaryScaffold:
    rows = tuple(
        tuple(a.entries[i1][j1] * b.entries[i2][j2] for j1 in range(a.k) for j2 in range(b.k))
        for i1 in range(a.k)
        for i2 in range(b.k)
    )
    return UnitaryScaffold(a.k * b.k, rows, f"{a.name} x {b.name}")


@lru_cache(maxsize=None)
def real_hadamard(k: int) -> UnitaryScaffold:
    """Best-effort real Hadamard matrix of order k.

    Tries Sylvester, Paley I, Paley II and then tensor products of smaller
    available orders.  Raises :class:`Unavailable` when nothing applies,
    which does not prove that no such matrix exists (except for k > 2 with
    k not divisible by 4).
    """
    if k < 1:
        raise DomainViolation(f"order must be positive, got {k}")
    if k <= 2:
        return sylvester(k - 1)
    if k % 4:
        raise Unavailable(f"no real Hadamard matrix of order {k} exists")
    if k & (k - 1) == 0:
        return sylvester(k.bit_length() - 1)
    pp = prime_power(k - 1)
    if pp is not None and (k - 1) % 4 == 3:
        return paley_i(field_new(*pp))
    pp = prime_power(k // 2 - 1)
    if pp is not None and (k // 2 - 1) % 4 == 1:
        return paley_ii(field_new(*pp))
    for a in range(2, math.isqrt(k) + 1):
        if k % a == 0:
            try:
                return tensor(real_hadamard(a), real_hadamard(k // a))
            except Unavailable:
                continue
    raise Unavailable(f"no real Hadamard construction found for order {k}")


def real_hadamard_available(k: int) -> bool:
    try:
        real_hadamard(k)
    except Unavailable:
        return False
    return True


def verify_scaffold(h: UnitaryScaffold, tol: float = 1e-12) -> bool:
    """Exact and floating-point check of H H^dagger = k I with no zero entries."""
    if any(x.zero for row in h.entries for x in row):
        return False
    n = h.conductor
    exps = [[x.num * (n // x.den) for x in row] for row in h.entries]
    for u in range(h.k):
        for v in range(u, h.k):
            s = RootSum.from_exponents(n, (a - b for a, b in zip(exps[u], exps[v])))
            if u == v:
                if s.rational() != h.k:
                    return False
            elif not s.is_zero():
                return False
    m = h.to_array()
    err = np.abs(m @ m.conj().T - h.k * np.eye(h.k)).max() if h.k else 0.0
    return bool(err < tol)


def scaffold_by_name(kind: str, k: int) -> UnitaryScaffold:
    """``auto`` prefers a real matrix and falls back to the DFT."""
    if kind == "real":
        return real_hadamard(k)
    if kind == "dft":
        return dft(k)
    if kind == "auto":
        try:
            return real_hadamard(k)
        except Unavailable:
            return dft(k)
    raise DomainViolation(f"unknown scaffold kind {kind!r}")
