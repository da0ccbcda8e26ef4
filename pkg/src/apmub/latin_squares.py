"""Latin squares and mutually orthogonal sets (MOLS).

Symbols run over 1..s.  Complete sets come from finite fields; composite
orders use the MacNeish direct product over the prime-power factorization,
which is only a constructive lower bound on the true maximum N(s).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .errors import EmptyInput, NotLatin, OrderMismatch, OrderTooSmall
from .finite_field import FieldSpec, factorize, field_new, prime_power

__all__ = [
    "LatinSquare",
    "MolsSet",
    "mols_prime_power",
    "are_orthogonal",
    "macneish_product",
    "mols_for_order",
    "constructive_mols_count",
]


@dataclass(frozen=True)
class LatinSquare:
    cells: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        cells = tuple(tuple(int(x) for x in row) for row in self.cells)
        object.__setattr__(self, "cells", cells)
        s = len(cells)
        symbols = set(range(1, s + 1))
        for i, row in enumerate(cells):
            if len(row) != s or set(row) != symbols:
                raise NotLatin(f"row {i} is not a permutation of 1..{s}")
        for j in range(s):
            if {cells[i][j] for i in range(s)} != symbols:
                raise NotLatin(f"column {j} is not a permutation of 1..{s}")

    @property
    def order(self) -> int:
        return len(self.cells)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.cells[i][j]


@dataclass(frozen=True)
class MolsSet:
    """A family of pairwise orthogonal Latin squares of a common order."""

    order: int
    squares: tuple[LatinSquare, ...]
    lower_bound: bool = False  # True when built by MacNeish for a composite order

    def __post_init__(self) -> None:
        object.__setattr__(self, "squares", tuple(self.squares))
        for sq in self.squares:
            if sq.order != self.order:
                raise OrderMismatch(f"square of order {sq.order} in a set of order {self.order}")

    @property
    def count(self) -> int:
        return len(self.squares)

    def is_mutually_orthogonal(self) -> bool:
        return all(are_orthogonal(a, b) for a, b in itertools.combinations(self.squares, 2))

    def truncate(self, w: int) -> MolsSet:
        """The first ``w`` squares."""
        return MolsSet(self.order, self.squares[:w], self.lower_bound)

    @property
    def note(self) -> str:
        if self.lower_bound:
            return "MacNeish product: constructive lower bound, may be below N(s)"
        return "complete set" if self.count == self.order - 1 else ""

    def to_json(self) -> dict:
        return {"order": self.order, "squares": [[list(r) for r in sq.cells] for sq in self.squares]}

    @classmethod
    def from_json(cls, data: dict) -> MolsSet:
        return cls(int(data["order"]), tuple(LatinSquare(sq) for sq in data["squares"]))

    @classmethod
    def from_cells(cls, squares: Sequence[Sequence[Sequence[int]]]) -> MolsSet:
        sqs = tuple(LatinSquare(sq) for sq in squares)
        if not sqs:
            raise EmptyInput("no squares given")
        return cls(sqs[0].order, sqs)


def are_orthogonal(a: LatinSquare, b: LatinSquare) -> bool:
    if a.order != b.order:
        raise OrderMismatch(f"orders {a.order} and {b.order}")
    s = a.order
    pairs = {(a.cells[i][j], b.cells[i][j]) for i in range(s) for j in range(s)}
    return len(pairs) == s * s


def mols_prime_power(spec: FieldSpec) -> MolsSet:
    """The complete set of q-1 MOLS over GF(q).

    The square for the nonzero element ``a`` has cell ``(i, j)`` equal to the
    index of ``e_j - a*e_i`` plus one, with rows, columns and ``a`` taken in
    canonical element order.
    """
    q = spec.order
    squares = []
    for a in range(1, q):
        rows = []
        for i in range(q):
            t = spec._neg(spec._mul(a, i))
            rows.append(tuple(spec._add(j, t) + 1 for j in range(q)))
        squares.append(LatinSquare(tuple(rows)))
    return MolsSet(q, tuple(squares))


def macneish_product(a: MolsSet, b: MolsSet) -> MolsSet:
    w = min(a.count, b.count)
    if w == 0:
        raise EmptyInput("MacNeish product needs at least one square in each factor")
    sa, sb = a.order, b.order
    squares = []
    for x, y in zip(a.squares[:w], b.squares[:w]):
        rows = []
        for i1 in range(sa):
            for i2 in range(sb):
                rows.append(
                    tuple(
                        (x.cells[i1][j1] - 1) * sb + y.cells[i2][j2]
                        for j1 in range(sa)
                        for j2 in range(sb)
                    )
                )
        squares.append(LatinSquare(tuple(rows)))
    return MolsSet(sa * sb, tuple(squares), lower_bound=True)


def constructive_mols_count(s: int) -> int:
    """Number of squares :func:`mols_for_order` builds, without building them."""
    if s < 2:
        raise OrderTooSmall(s)
    f = factorize(s)
    return min(p**n for p, n in f.items()) - 1


def mols_for_order(s: int) -> MolsSet:
    if s < 2:
        raise OrderTooSmall(s)
    if prime_power(s) is not None:
        return mols_prime_power(field_new(*prime_power(s)))
    parts = [mols_prime_power(field_new(p, n)) for p, n in factorize(s).items()]
    out = parts[0]
    for part in parts[1:]:
        out = macneish_product(out, part)
    return out
