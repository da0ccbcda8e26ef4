"""Resolvable block designs.

A design on the points 1..d is a list of parallel classes; each class is a
list of blocks partitioning the points, and every block is a sorted tuple.
The central statistic is ``mu``, the largest intersection between blocks of
different classes.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .errors import DomainViolation, PreconditionViolated, SingleClass
from .finite_field import FieldSpec
from .latin_squares import LatinSquare, MolsSet, mols_prime_power

__all__ = [
    "Block",
    "ParallelClass",
    "ResolvableDesign",
    "ValidationReport",
    "IntersectionProfile",
    "OracleResult",
    "ClassCountBound",
    "validate",
    "mu",
    "t_bound",
    "t_oracle",
    "class_count_bound",
    "mols_to_rbd",
    "rbd_to_mols",
    "arbibd",
]

Block = tuple[int, ...]
ParallelClass = tuple[Block, ...]


@dataclass(frozen=True)
class ResolvableDesign:
    d: int
    classes: tuple[ParallelClass, ...]

    def __post_init__(self) -> None:
        classes = tuple(tuple(tuple(sorted(int(x) for x in b)) for b in cls) for cls in self.classes)
        object.__setattr__(self, "classes", classes)

    @property
    def r(self) -> int:
        return len(self.classes)

    @property
    def block_size_profile(self) -> Counter:
        return Counter(len(b) for cls in self.classes for b in cls)

    @property
    def k(self) -> int | None:
        """The common block size, or None if block sizes vary."""
        sizes = self.block_size_profile
        return next(iter(sizes)) if len(sizes) == 1 else None

    @property
    def s(self) -> int | None:
        k = self.k
        return None if not k else self.d // k

    def to_json(self) -> dict:
        return {"d": self.d, "classes": [[list(b) for b in cls] for cls in self.classes]}

    @classmethod
    def from_json(cls, data: dict) -> ResolvableDesign:
        return cls(int(data["d"]), tuple(tuple(tuple(b) for b in c) for c in data["classes"]))

    def relabel(self) -> ResolvableDesign:
        """Map the points actually used onto 1..d', preserving their order."""
        pts = sorted({x for cls in self.classes for b in cls for x in b})
        new = {x: i + 1 for i, x in enumerate(pts)}
        return ResolvableDesign(
            len(pts), tuple(tuple(tuple(new[x] for x in b) for b in cls) for cls in self.classes)
        )


# ---------------------------------------------------------------------------
# validation and mu
# ---------------------------------------------------------------------------


@dataclass
class ValidationReport:
    valid: bool
    partitions: list[bool]
    block_size_profile: dict[int, int]
    k: int | None
    simple: bool
    diagnostics: list[str] = field(default_factory=list)


def validate(design: ResolvableDesign) -> ValidationReport:
    diags: list[str] = []
    points = set(range(1, design.d + 1))
    partitions = []
    for l, cls in enumerate(design.classes):
        seen: Counter = Counter(x for b in cls for x in b)
        ok = True
        missing = sorted(points - seen.keys())
        extra = sorted(seen.keys() - points)
        repeated = sorted(x for x, c in seen.items() if c > 1)
        if missing:
            diags.append(f"class {l}: missing points {missing}")
            ok = False
        if extra:
            diags.append(f"class {l}: points outside 1..{design.d}: {extra}")
            ok = False
        if repeated:
            diags.append(f"class {l}: points covered more than once {repeated}")
            ok = False
        if any(len(b) == 0 for b in cls):
            diags.append(f"class {l}: empty block")
            ok = False
        partitions.append(ok)
    blocks = Counter(b for cls in design.classes for b in cls)
    simple = all(c == 1 for c in blocks.values())
    if not simple:
        diags.append("repeated blocks: design is not simple")
    if design.r < 1:
        diags.append("no parallel classes")
    profile = dict(sorted(design.block_size_profile.items()))
    return ValidationReport(
        valid=design.r >= 1 and all(partitions),
        partitions=partitions,
        block_size_profile=profile,
        k=design.k,
        simple=simple,
        diagnostics=diags,
    )


@dataclass(frozen=True)
class IntersectionProfile:
    mu: int
    histogram: dict[int, int]


def _point_to_block(cls: ParallelClass) -> dict[int, int]:
    return {x: i for i, b in enumerate(cls) for x in b}


def mu(design: ResolvableDesign) -> IntersectionProfile:
    if design.r < 2:
        raise SingleClass("mu needs at least two parallel classes")
    hist: Counter = Counter()
    for a, b in combinations(range(design.r), 2):
        where = _point_to_block(design.classes[b])
        nb = len(design.classes[b])
        for blk in design.classes[a]:
            counts = Counter(where[x] for x in blk if x in where)
            hist.update(counts.values())
            hist[0] += nb - len(counts)
    top = max((v for v, c in hist.items() if c), default=0)
    return IntersectionProfile(top, {v: hist.get(v, 0) for v in range(top + 1)})


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------


def t_bound(d: int, k: int, mu: int) -> int:
    """Counting bound on k-subsets of a d-set meeting pairwise in at most mu points."""
    if not 0 <= mu < k < d:
        raise DomainViolation(f"need 0 <= mu < k < d, got d={d} k={k} mu={mu}")
    return math.comb(d, mu + 1) // math.comb(k, mu + 1)


def _johnson(d: int, k: int, mu: int) -> int:
    # recursive Johnson bound, at least as strong as t_bound; used for pruning
    if mu < 0 or k > d:
        return 0
    if mu >= k:
        return math.comb(d, k)
    if mu == 0:
        return d // k
    return min((d * _johnson(d - 1, k - 1, mu - 1)) // k, math.comb(d, mu + 1) // math.comb(k, mu + 1))


@dataclass(frozen=True)
class OracleResult:
    value: int
    exact: bool
    nodes: int
    witness: tuple[Block, ...]

    def __int__(self) -> int:
        return self.value


def t_oracle(d: int, k: int, mu: int, node_budget: int = 2_000_000) -> OracleResult:
    """Exact maximum family of k-subsets of 1..d with pairwise intersections <= mu.

    Branch and bound over the compatibility graph of k-subsets (lexicographic
    order) with a greedy colouring bound.  By symmetry the family may be taken
    to contain {1..k}, so the search starts from that block.  If the node
    budget runs out the best family found so far is returned with
    ``exact=False``.
    """
    if not 0 <= mu < k < d:
        raise DomainViolation(f"need 0 <= mu < k < d, got d={d} k={k} mu={mu}")
    subsets = [frozenset(c) for c in combinations(range(1, d + 1), k)]
    n = len(subsets)
    adj = [0] * n
    for i in range(n):
        si = subsets[i]
        for j in range(i + 1, n):
            if len(si & subsets[j]) <= mu:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    cap = _johnson(d, k, mu)
    best: list[int] = [0]
    nodes = 0
    exhausted = False

    def colour_bound(cand: int) -> list[tuple[int, int]]:
        # greedy sequential colouring; returns (vertex, colour) in ascending colour
        order = []
        colour = 0
        while cand:
            colour += 1
            avail = cand
            while avail:
                v = (avail & -avail).bit_length() - 1
                avail &= ~(1 << v)
                avail &= ~adj[v]
                cand &= ~(1 << v)
                order.append((v, colour))
        return order

    def expand(clique: list[int], cand: int) -> bool:
        nonlocal nodes, exhausted
        nodes += 1
        if nodes > node_budget:
            exhausted = True
            return True
        order = colour_bound(cand)
        for v, c in reversed(order):
            if len(clique) + c <= len(best):
                return False
            clique.append(v)
            new = cand & adj[v]
            if new:
                if expand(clique, new):
                    return True
            elif len(clique) > len(best):
                best[:] = clique
                if len(best) >= cap:
                    return True
            clique.pop()
            cand &= ~(1 << v)
        return False

    best[:] = [0]
    if cap > 1:
        expand([0], adj[0])
    family = tuple(tuple(sorted(subsets[i])) for i in sorted(best))
    return OracleResult(len(best), not exhausted, nodes, family)


@dataclass(frozen=True)
class ClassCountBound:
    mu_min: int
    r_max: int


def class_count_bound(d: int, k: int, s: int, mu: int | None = None) -> ClassCountBound:
    """Necessary conditions on an RBD with d = k*s: mu >= ceil(k/s) and a cap on r."""
    if k < 1 or s < 1 or d != k * s:
        raise DomainViolation(f"need d = k*s, got d={d} k={k} s={s}")
    mu_min = -(-k // s)
    if mu is None:
        mu = mu_min
    if mu < mu_min:
        raise DomainViolation(f"mu={mu} is below the minimum {mu_min}")
    if mu == 1:
        if k < 2:
            raise DomainViolation("block size must be at least 2")
        r_max = s + (s - 1) // (k - 1)
    else:
        r_max = t_bound(d - 1, k - 1, mu - 1)
    return ClassCountBound(mu_min, r_max)


# ---------------------------------------------------------------------------
# MOLS <-> RBD
# ---------------------------------------------------------------------------


def mols_to_rbd(mols: MolsSet) -> ResolvableDesign:
    """Rows, columns, then one class per square; point (i, j) is labelled i*s + j + 1."""
    s = mols.order
    rows = tuple(tuple(i * s + j + 1 for j in range(s)) for i in range(s))
    cols = tuple(tuple(i * s + j + 1 for i in range(s)) for j in range(s))
    classes = [rows, cols]
    for sq in mols.squares:
        blocks: list[list[int]] = [[] for _ in range(s)]
        for i in range(s):
            for j in range(s):
                blocks[sq.cells[i][j] - 1].append(i * s + j + 1)
        classes.append(tuple(tuple(b) for b in blocks))
    return ResolvableDesign(s * s, tuple(classes))


def rbd_to_mols(design: ResolvableDesign) -> MolsSet:
    """Inverse of :func:`mols_to_rbd`; the first two classes act as rows and columns."""
    s = math.isqrt(design.d)
    if s * s != design.d or s < 2:
        raise PreconditionViolated(f"d={design.d} is not a square >= 4")
    if design.r < 2:
        raise PreconditionViolated("need at least the two frame classes")
    if design.k != s:
        raise PreconditionViolated(f"block sizes {dict(design.block_size_profile)} are not all {s}")
    report = validate(design)
    if not report.valid:
        raise PreconditionViolated("; ".join(report.diagnostics))
    prof = mu(design)
    if prof.mu != 1 or prof.histogram.get(0, 0):
        raise PreconditionViolated(f"cross-class intersections are not all 1: {prof.histogram}")
    rows, cols = design.classes[0], design.classes[1]
    cell = [[(set(rows[i]) & set(cols[j])).pop() for j in range(s)] for i in range(s)]
    squares = []
    for cls in design.classes[2:]:
        where = _point_to_block(cls)
        squares.append(LatinSquare(tuple(tuple(where[cell[i][j]] + 1 for j in range(s)) for i in range(s))))
    return MolsSet(s, tuple(squares))


def arbibd(spec: FieldSpec) -> ResolvableDesign:
    """The affine plane of order q as a resolvable design with q+1 classes.

    Classes are ordered rows, then one class per nonzero field element (the
    complete MOLS), then columns.
    """
    base = mols_to_rbd(mols_prime_power(spec))
    rows, cols, *squares = base.classes
    return ResolvableDesign(base.d, (rows, *squares, cols))


def design_from_blocks(d: int, classes: Iterable[Sequence[Iterable[int]]]) -> ResolvableDesign:
    return ResolvableDesign(d, tuple(tuple(tuple(b) for b in cls) for cls in classes))
