"""Resolvable designs with mu = 1 that feed APMUB constructions.

Two families are built here:

* ``d = (s - e) * s`` from a w-MOLS(s): delete e row blocks (and their
  points) from the MOLS design and drop the row class.  This gives w + 1
  classes of block size s - e (w + 2 classes when e = 0).
* ``d = (q - e) * (q + f)`` from the affine plane of order q: trim the plane
  (:func:`trim_arbibd`) and then move points from row blocks into the other
  classes (:func:`reshape`) until every block has size q - e.  This yields
  ``floor((q - e) / f) + 1`` classes.

Where a step needs to pick blocks or points, blocks of the row class are
consumed from the highest-labelled end and points are taken from the top of
each block.  With this choice the surviving points are an initial segment
1..d and the small worked designs come out label-for-label as in the
literature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .block_designs import ResolvableDesign, arbibd, mols_to_rbd, mu, validate
from .errors import (
    DomainViolation,
    InternalInvariantBroken,
    NoAdmissiblePlan,
    OrderMismatch,
)
from .finite_field import field_new, prime_power
from .hadamard import real_hadamard_available
from .latin_squares import MolsSet, constructive_mols_count, mols_for_order

__all__ = [
    "QefParams",
    "MixedDesign",
    "QefResult",
    "ConstructionPlan",
    "construct_se_s",
    "trim_arbibd",
    "reshape",
    "construct_qef",
    "qef_pipeline",
    "plan",
    "design_for_plan",
]

ORIGINAL, TRIMMED, APPENDED = "original", "trimmed", "appended"


@dataclass(frozen=True)
class QefParams:
    q: int
    e: int
    f: int

    def __post_init__(self) -> None:
        if prime_power(self.q) is None:
            raise DomainViolation(f"q={self.q} is not a prime power")
        if self.e < 0 or self.f < 0:
            raise DomainViolation(f"e and f must be non-negative, got e={self.e} f={self.f}")
        if self.e >= self.q:
            raise DomainViolation(f"e={self.e} leaves no points in blocks of size q-e")

    @property
    def h(self) -> int:
        return self.e - self.f

    @property
    def k(self) -> int:
        return self.q - self.e

    @property
    def s(self) -> int:
        return self.q + self.f

    @property
    def d(self) -> int:
        return self.k * self.s

    @property
    def admissible(self) -> bool:
        """Whether beta <= 2 for mu = 1, i.e. 4e + f <= 3q."""
        return 4 * self.e + self.f <= 3 * self.q

    @property
    def guaranteed_classes(self) -> int:
        if self.f == 0:
            raise DomainViolation("the reshape count needs f > 0")
        return self.k // self.f + 1

    def require_reshape(self) -> None:
        if not 0 < self.f <= self.e:
            raise DomainViolation(f"the trim/reshape pipeline needs 0 < f <= e, got e={self.e} f={self.f}")


@dataclass(frozen=True)
class MixedDesign:
    """A design whose classes may mix block sizes, with a provenance tag per block."""

    design: ResolvableDesign
    provenance: tuple[tuple[str, ...], ...]
    params: QefParams | None = None

    def excess(self, k: int) -> list[list[int]]:
        return [[len(b) - k for b in cls] for cls in self.design.classes]


# ---------------------------------------------------------------------------
# d = (s - e) s
# ---------------------------------------------------------------------------


def construct_se_s(s: int, e: int, mols: MolsSet, include_row_class: bool = False) -> ResolvableDesign:
    """Delete e row blocks from the MOLS design of order s.

    Classes come out as one per square followed by the columns.  With
    ``include_row_class`` the surviving row blocks (size s, not s - e) are
    appended as a final class; this is a diagnostic only, since the resulting
    bases are no longer two-valued.
    """
    if mols.order != s:
        raise OrderMismatch(f"MOLS of order {mols.order} given for s={s}")
    if e < 0 or e >= s:
        raise DomainViolation(f"need 0 <= e < s, got s={s} e={e}")
    base = mols_to_rbd(mols)
    if e == 0:
        return base
    rows, cols, *squares = base.classes
    gone = {x for b in rows[s - e :] for x in b}
    classes = [tuple(tuple(x for x in b if x not in gone) for b in cls) for cls in (*squares, cols)]
    if include_row_class:
        classes.append(rows[: s - e])
    return ResolvableDesign(base.d, tuple(classes)).relabel()


# ---------------------------------------------------------------------------
# d = (q - e)(q + f)
# ---------------------------------------------------------------------------


def _check(cond: bool, message: str, dump: object = None) -> None:
    if not cond:
        raise InternalInvariantBroken(message, dump)


def trim_arbibd(params: QefParams) -> MixedDesign:
    """Stage one: remove h whole row blocks and the top e points of f more.

    The result has q + 1 classes on (q - e)(q + f) points.  The row class
    keeps q - h blocks (the last f of them trimmed to size q - e); block sizes
    in every other class lie in q-e .. q-e+f with total excess (q - e) f.
    """
    params.require_reshape()
    q, f, h, k = params.q, params.f, params.h, params.k
    base = arbibd(field_new(*prime_power(q)))
    rows = base.classes[0]
    gone = {x for b in rows[q - h :] for x in b}
    for b in rows[q - h - f : q - h]:
        gone.update(b[k:])
    classes = [rows[: q - h]] + list(base.classes[1:])
    classes = [tuple(tuple(x for x in b if x not in gone) for b in cls) for cls in classes]
    design = ResolvableDesign(base.d, tuple(classes)).relabel()
    prov = [tuple(TRIMMED if i >= q - h - f else ORIGINAL for i in range(q - h))]
    prov += [tuple(TRIMMED if len(b) < q else ORIGINAL for b in cls) for cls in design.classes[1:]]

    _check(design.d == params.d, f"stage one has {design.d} points, expected {params.d}")
    _check(design.r == q + 1, "stage one lost a class")
    sizes_row = {len(b) for b in design.classes[0]}
    _check(sizes_row <= {k, q}, f"row block sizes {sizes_row}")
    for l, cls in enumerate(design.classes[1:], start=1):
        ex = [len(b) - k for b in cls]
        _check(all(0 <= m <= f for m in ex), f"class {l} excess {ex} outside 0..{f}")
        _check(sum(ex) == k * f, f"class {l} excess totals {sum(ex)}, expected {k * f}")
    _check(validate(design).valid, "stage one is not resolvable", design)
    _check(mu(design).mu <= 1, "stage one has mu > 1", design)
    return MixedDesign(design, tuple(prov), params)


@dataclass
class QefResult:
    design: ResolvableDesign
    stage1: MixedDesign
    provenance: tuple[tuple[str, ...], ...]
    swaps: list[int] = field(default_factory=list)
    extra_classes: int = 0
    discarded: int = 0

    def report(self) -> dict:
        p = self.stage1.params
        return {
            "params": {"q": p.q, "e": p.e, "f": p.f},
            "d": self.design.d,
            "classes": self.design.r,
            "guaranteed": p.guaranteed_classes,
            "extra_classes": self.extra_classes,
            "discarded_classes": self.discarded,
            "rebalancing_swaps": self.swaps,
        }


def _absorb(target, marks):
    """Remove the marked points from the target blocks and append them as new blocks."""
    marked = set()
    for pts in marks:
        marked.update(pts)
    new = [tuple(x for x in b if x not in marked) for b in target]
    new += [tuple(sorted(pts)) for pts in marks]
    prov = [TRIMMED if len(b_new) < len(b) else ORIGINAL for b, b_new in zip(target, new)]
    prov += [APPENDED] * len(marks)
    return tuple(new), tuple(prov)


def _mark(target, selected, k: int) -> tuple[list[set[int]], int]:
    """Choose, for each target block, m_j of its points in the selected blocks.

    Greedy in target-block order, preferring selected blocks with spare
    capacity, then swap marks until every selected block carries exactly k.
    Returns the marked point sets per selected block and the swap count.
    """
    f = len(selected)
    where = {x: u for u, b in enumerate(selected) for x in b}
    meet: list[dict[int, int]] = []  # per target block: selected index -> point
    for b in target:
        meet.append({where[x]: x for x in b if x in where})
    chosen: list[set[int]] = []
    count = [0] * f
    for j, b in enumerate(target):
        m = len(b) - k
        avail = sorted(meet[j])
        if m > len(avail):
            raise InternalInvariantBroken(f"target block {j} needs {m} marks but meets {len(avail)} blocks")
        pick = [u for u in avail if count[u] < k][:m]
        if len(pick) < m:
            pick += [u for u in avail if u not in pick][: m - len(pick)]
        for u in pick:
            count[u] += 1
        chosen.append(set(pick))
    swaps = 0
    while True:
        over = [u for u in range(f) if count[u] > k]
        if not over:
            break
        under = [v for v in range(f) if count[v] < k]
        u, v = over[0], under[0]
        for j in range(len(target)):
            if u in chosen[j] and v not in chosen[j] and v in meet[j]:
                chosen[j].discard(u)
                chosen[j].add(v)
                count[u] -= 1
                count[v] += 1
                swaps += 1
                break
        else:
            raise InternalInvariantBroken(
                f"no rebalancing swap from selected block {u} to {v}",
                {"target": target, "selected": selected, "marks": chosen, "count": count},
            )
    marks = [set() for _ in range(f)]
    for j in range(len(target)):
        for u in chosen[j]:
            marks[u].add(meet[j][u])
    return marks, swaps


def _max_flow(n: int, cap: dict[tuple[int, int], int], src: int, sink: int) -> dict[tuple[int, int], int]:
    """Edmonds-Karp on a small graph given as a capacity dict; returns the flow."""
    adj: dict[int, list[int]] = {v: [] for v in range(n)}
    for u, v in list(cap):
        adj[u].append(v)
        adj[v].append(u)
        cap.setdefault((v, u), 0)
    flow = {e: 0 for e in cap}
    while True:
        parent = {src: src}
        frontier = [src]
        while frontier and sink not in parent:
            nxt = []
            for u in frontier:
                for v in adj[u]:
                    if v not in parent and cap[(u, v)] - flow[(u, v)] > 0:
                        parent[v] = u
                        nxt.append(v)
            frontier = nxt
        if sink not in parent:
            return flow
        path, v = [], sink
        while v != src:
            path.append((parent[v], v))
            v = parent[v]
        push = min(cap[e] - flow[e] for e in path)
        for u, v in path:
            flow[(u, v)] += push
            flow[(v, u)] -= push


def _flow_marks(target, donors, k: int) -> list[set[int]] | None:
    """Marks giving target block j exactly len-k points and each donor exactly k.

    Each donor block meets each target block in at most one point, so this is
    a degree-constrained bipartite selection, solved as a max flow.
    """
    need = [len(b) - k for b in target]
    if any(m < 0 for m in need) or sum(need) != k * len(donors):
        return None
    where = {x: j for j, b in enumerate(target) for x in b}
    nd = len(donors)
    src, sink = 0, 1 + nd + len(target)
    cap: dict[tuple[int, int], int] = {}
    point: dict[tuple[int, int], int] = {}
    for u, blk in enumerate(donors):
        cap[(src, 1 + u)] = k
        for x in blk:
            if x in where:
                j = where[x]
                cap[(1 + u, 1 + nd + j)] = 1
                point[(u, j)] = x
    for j, m in enumerate(need):
        if m:
            cap[(1 + nd + j, sink)] = m
    flow = _max_flow(sink + 1, cap, src, sink)
    marks = [set() for _ in donors]
    for (u, j), x in point.items():
        if flow[(1 + u, 1 + nd + j)] > 0:
            marks[u].add(x)
    if any(len(m) != k for m in marks):
        return None
    return marks


def _extra_classes(d: int, emitted, targets, donor_pools, k: int, f: int, budget: int = 20000):
    """Best-effort search for classes beyond the guaranteed count.

    A leftover class becomes a new class when f blocks of one other unused
    pool (another leftover class, or the unused row blocks) can absorb exactly
    the excess of its blocks.  Each pool is used at most once, either as a
    target or as a donor.  Candidates are accepted only if the enlarged design
    still has constant block size and mu = 1.
    """
    pools = list(targets) + list(donor_pools)
    used: set[int] = set()
    found = []
    tries = 0
    for t, target in enumerate(targets):
        if t in used:
            continue
        for dn, pool in enumerate(pools):
            if dn == t or dn in used or t in used:
                continue
            for combo in combinations(range(len(pool)), f):
                tries += 1
                if tries > budget:
                    return found
                donors = [pool[i] for i in combo]
                if any(len(b) < k for b in donors):
                    continue
                marks = _flow_marks(target, donors, k)
                if marks is None:
                    continue
                new, tags = _absorb(target, [sorted(m) for m in marks])
                trial = ResolvableDesign(d, tuple(emitted) + tuple(c for c, _ in found) + (new,))
                if trial.k == k and validate(trial).valid and mu(trial).mu == 1:
                    found.append((new, tags))
                    used.update({t, dn})
                    break
    return found


def _reshape(stage1: MixedDesign, params: QefParams, extra_search: bool = False) -> QefResult:
    params.require_reshape()
    if stage1.params is not None and stage1.params != params:
        raise DomainViolation(f"stage one was built for {stage1.params}, not {params}")
    q, f, k = params.q, params.f, params.k
    rows, *targets = stage1.design.classes
    queue = list(reversed(rows))  # the f trimmed blocks come first
    r = (q - params.h) // f
    classes, prov, swaps = [], [], []
    for c in range(r):
        selected = queue[c * f : (c + 1) * f]
        target = targets[c]
        if c == 0:
            marks = [set(b) for b in selected]
            n_swaps = 0
        else:
            marks, n_swaps = _mark(target, selected, k)
        new, tags = _absorb(target, [sorted(m) for m in marks])
        classes.append(new)
        prov.append(tags)
        swaps.append(n_swaps)
    extra = 0
    if extra_search:
        spare = queue[r * f :]
        found = _extra_classes(
            stage1.design.d, classes, targets[r:], [spare] if spare else [], k, f
        )
        for new, tags in found:
            classes.append(new)
            prov.append(tags)
        extra = len(found)
    design = ResolvableDesign(stage1.design.d, tuple(classes))

    for l, cls in enumerate(design.classes):
        _check(len(cls) == q + f, f"class {l} has {len(cls)} blocks, expected {q + f}", design)
        _check(all(len(b) == k for b in cls), f"class {l} has a block of size != {k}", design)
    _check(validate(design).valid, "reshaped design is not resolvable", design)
    if design.r >= 2:
        _check(mu(design).mu == 1, "reshaped design has mu != 1", design)
    for n_swaps in swaps:
        _check(n_swaps <= k * f, f"{n_swaps} swaps exceeds the bound {k * f}")
    discarded = len(targets) - r - extra
    return QefResult(design, stage1, tuple(prov), swaps, extra, discarded)


def reshape(stage1: MixedDesign, params: QefParams) -> ResolvableDesign:
    """Stage two: floor((q - h)/f) classes of q + f blocks, all of size q - e."""
    return _reshape(stage1, params).design


def qef_pipeline(params: QefParams, extra_search: bool = False) -> QefResult:
    return _reshape(trim_arbibd(params), params, extra_search)


def construct_qef(params: QefParams, extra_search: bool = False) -> ResolvableDesign:
    """The d = (q - e)(q + f) design; f = 0 is the row-deletion design of order q."""
    if params.f == 0:
        return construct_se_s(params.q, params.e, mols_for_order(params.q))
    return qef_pipeline(params, extra_search).design


# ---------------------------------------------------------------------------
# planning
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstructionPlan:
    method: str  # "mols_lower_bound" or "qef_reshape"
    params: tuple[tuple[str, int], ...]
    d: int
    k: int
    s: int
    r: int
    beta_sq: Fraction
    delta_sq: tuple[Fraction, ...]
    epsilon: Fraction
    classification: str
    lower_bound: bool
    real_hadamard: bool

    @property
    def parameters(self) -> dict[str, int]:
        return dict(self.params)

    @property
    def beta(self) -> float:
        return math.sqrt(self.beta_sq)

    @property
    def label(self) -> str:
        inner = ",".join(f"{n}={v}" for n, v in self.params)
        return f"{self.method}({inner})"

    def to_json(self) -> dict:
        def frac(x: Fraction) -> dict:
            return {"num": x.numerator, "den": x.denominator}

        return {
            "method": self.method,
            "params": self.parameters,
            "d": self.d,
            "k": self.k,
            "s": self.s,
            "r": self.r,
            "beta_sq": frac(self.beta_sq),
            "delta_sq": [frac(x) for x in self.delta_sq],
            "epsilon": frac(self.epsilon),
            "classification": self.classification,
            "mols_lower_bound": self.lower_bound,
            "real_hadamard": self.real_hadamard,
        }


def _plan_entry(method, params, k, s, r, lower_bound) -> ConstructionPlan:
    beta_sq = Fraction(s, k)
    mub = s == k
    delta = (Fraction(1, k * k),) if mub else (Fraction(0), Fraction(1, k * k))
    return ConstructionPlan(
        method=method,
        params=tuple(params.items()),
        d=k * s,
        k=k,
        s=s,
        r=r,
        beta_sq=beta_sq,
        delta_sq=delta,
        epsilon=1 - Fraction(1, s),
        classification="MUB" if mub else "APMUB",
        lower_bound=lower_bound,
        real_hadamard=real_hadamard_available(k),
    )


def plan(d: int) -> list[ConstructionPlan]:
    """Every admissible route to an APMUB (or MUB) family in dimension d."""
    if d < 4:
        raise NoAdmissiblePlan(f"d={d} is too small")
    out: list[ConstructionPlan] = []
    for k in range(2, math.isqrt(d) + 1):
        if d % k:
            continue
        s = d // k
        if s <= 4 * k:
            w = constructive_mols_count(s)
            e = s - k
            r = w + 2 if e == 0 else w + 1
            composite = prime_power(s) is None
            out.append(_plan_entry("mols_lower_bound", {"s": s, "e": e}, k, s, r, composite))
        if k == s:
            continue
        for q in range(-(-(k + s) // 2), s):
            if prime_power(q) is None:
                continue
            e, f = q - k, s - q
            if not (0 < f <= e and 4 * e + f <= 3 * q):
                continue
            out.append(_plan_entry("qef_reshape", {"q": q, "e": e, "f": f}, k, s, k // f + 1, False))
    if not out:
        raise NoAdmissiblePlan(f"no admissible factorization of d={d}")
    out.sort(key=lambda p: (-p.r, p.beta_sq, p.method, p.params))
    return out


def design_for_plan(p: ConstructionPlan, extra_search: bool = False) -> ResolvableDesign:
    args = p.parameters
    if p.method == "mols_lower_bound":
        return construct_se_s(args["s"], args["e"], mols_for_order(args["s"]))
    return construct_qef(QefParams(args["q"], args["e"], args["f"]), extra_search)
