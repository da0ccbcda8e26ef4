"""Orthonormal bases from block designs, and their exact audit.

Every block ``b`` of a parallel class, with points ``x_1 < ... < x_k``, and
every row ``u`` of a k x k Hadamard scaffold ``H`` give the unit vector with
component ``H[u, j] / sqrt(k)`` at coordinate ``x_j``.  A class therefore
yields an orthonormal basis, and two vectors from different classes overlap
in ``|b cap b'|`` coordinates.  For designs with mu = 1 every cross-basis
inner product is exactly 0 or 1/k.

:func:`analyze` recomputes all of this from the vectors alone, in exact
cyclotomic arithmetic, and classifies the collection.
"""

from __future__ import annotations

import math
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Sequence

import numpy as np

from .block_designs import ResolvableDesign
from .constructions import QefParams
from .cyclotomic import RootSum
from .errors import (
    DomainViolation,
    NonConstantBlockSize,
    NotBiangular,
    OrderMismatch,
    VerificationError,
)
from .hadamard import PhaseEntry, UnitaryScaffold

__all__ = [
    "BasisVector",
    "MubCollection",
    "Overlap",
    "SpectrumReport",
    "PredictedParams",
    "WeighingMatrix",
    "build_bases",
    "inner_product",
    "analyze",
    "predicted_params",
    "weighing_from_bases",
    "verify_weighing",
    "bases_from_weighing",
    "weighing_product",
]

FLOAT_TOL = 1e-9


def _frac(x: Fraction) -> dict:
    return {"num": x.numerator, "den": x.denominator}


def _exact_sqrt(x: Fraction) -> Fraction | None:
    n, d = math.isqrt(x.numerator), math.isqrt(x.denominator)
    return Fraction(n, d) if n * n == x.numerator and d * d == x.denominator else None


# ---------------------------------------------------------------------------
# vectors and collections
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BasisVector:
    """A unit vector with |support| = k nonzero entries, each a phase over sqrt(k)."""

    d: int
    support: tuple[int, ...]
    phases: tuple[PhaseEntry, ...]

    @property
    def k(self) -> int:
        return len(self.support)

    def to_array(self) -> np.ndarray:
        v = np.zeros(self.d, dtype=complex)
        for x, p in zip(self.support, self.phases):
            v[x - 1] = complex(p)
        return v / math.sqrt(self.k)

    def to_json(self) -> dict:
        return {"support": list(self.support), "phases": [{"num": p.num, "den": p.den} for p in self.phases]}

    @classmethod
    def from_json(cls, d: int, data: dict) -> BasisVector:
        phases = tuple(PhaseEntry(bool(p.get("zero", False)), int(p["num"]), int(p["den"])) for p in data["phases"])
        return cls(d, tuple(int(x) for x in data["support"]), phases)


@dataclass(frozen=True)
class MubCollection:
    d: int
    bases: tuple[tuple[BasisVector, ...], ...]
    provenance: dict = field(default_factory=dict, compare=False)

    @property
    def r(self) -> int:
        return len(self.bases)

    @property
    def k(self) -> int | None:
        sizes = {v.k for b in self.bases for v in b}
        return next(iter(sizes)) if len(sizes) == 1 else None

    def matrix(self, l: int) -> np.ndarray:
        """Basis l as a d x d matrix whose columns are the vectors."""
        m = np.zeros((self.d, len(self.bases[l])), dtype=complex)
        for i, v in enumerate(self.bases[l]):
            if v.support and all(1 <= x <= self.d for x in v.support):
                m[[x - 1 for x in v.support], i] = [complex(p) for p in v.phases[: v.k]]
                m[:, i] /= math.sqrt(v.k)
        return m

    def to_json(self, claim: str | None = None) -> dict:
        out = {
            "d": self.d,
            "k": self.k,
            "bases": [[v.to_json() for v in b] for b in self.bases],
        }
        if claim is not None:
            out["claim"] = claim
        if self.provenance:
            out["provenance"] = self.provenance
        return out

    @classmethod
    def from_json(cls, data: dict) -> MubCollection:
        d = int(data["d"])
        bases = tuple(tuple(BasisVector.from_json(d, v) for v in b) for b in data["bases"])
        return cls(d, bases, dict(data.get("provenance", {})))


def build_bases(
    design: ResolvableDesign,
    scaffolds: UnitaryScaffold | Sequence[UnitaryScaffold],
) -> MubCollection:
    """One basis per parallel class.

    A single scaffold is shared by all classes and needs a constant block
    size.  A sequence gives one scaffold per class, and then only block sizes
    within each class must agree with that class's scaffold.
    """
    if isinstance(scaffolds, UnitaryScaffold):
        if design.k is None:
            raise NonConstantBlockSize(f"block sizes {dict(design.block_size_profile)} with a shared scaffold")
        per_class = [scaffolds] * design.r
    else:
        per_class = list(scaffolds)
        if len(per_class) != design.r:
            raise OrderMismatch(f"{len(per_class)} scaffolds for {design.r} classes")
    bases = []
    for l, (cls, sc) in enumerate(zip(design.classes, per_class)):
        sizes = {len(b) for b in cls}
        if len(sizes) != 1:
            raise NonConstantBlockSize(f"class {l} has block sizes {sorted(sizes)}")
        (k,) = sizes
        if sc.k != k:
            raise OrderMismatch(f"class {l} has block size {k} but scaffold order {sc.k}")
        if any(x.zero for row in sc.entries for x in row):
            raise DomainViolation(f"scaffold {sc.name or '?'} has zero entries")
        basis = [BasisVector(design.d, tuple(b), sc.entries[u]) for b in cls for u in range(k)]
        bases.append(tuple(basis))
    names = sorted({sc.name for sc in per_class})
    prov = {"scaffold": names[0] if len(names) == 1 else names}
    return MubCollection(design.d, tuple(bases), prov)


# ---------------------------------------------------------------------------
# inner products
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Overlap:
    """<a|b> = value / sqrt(k_a k_b), with value a sum of roots of unity."""

    value: RootSum
    norm_sq: Fraction
    abs_sq: Fraction | None  # exact |<a|b>|^2 when rational

    @property
    def magnitude(self) -> float:
        return abs(complex(self.value)) * math.sqrt(self.norm_sq)

    @property
    def exact_magnitude(self) -> Fraction | None:
        return None if self.abs_sq is None else _exact_sqrt(self.abs_sq)


def _conductor(vectors) -> int:
    return math.lcm(1, *(p.den for v in vectors for p in v.phases))


def inner_product(a: BasisVector, b: BasisVector) -> Overlap:
    if a.d != b.d:
        raise OrderMismatch(f"dimensions {a.d} and {b.d}")
    n = _conductor((a, b))
    pa = {x: p.num * (n // p.den) for x, p in zip(a.support, a.phases)}
    exps = [p.num * (n // p.den) - pa[x] for x, p in zip(b.support, b.phases) if x in pa]
    value = RootSum.from_exponents(n, exps)
    norm_sq = Fraction(1, a.k * b.k)
    mag = value.abs_sq().rational()
    out = Overlap(value, norm_sq, None if mag is None else mag * norm_sq)
    # float cross-check of the exact value
    fl = abs(np.vdot(a.to_array(), b.to_array())) ** 2
    if out.abs_sq is not None and abs(fl - float(out.abs_sq)) > FLOAT_TOL:
        raise VerificationError(f"exact |<a|b>|^2 = {out.abs_sq} but floating point gives {fl}")
    return out


# ---------------------------------------------------------------------------
# analysis
# ---------------------------------------------------------------------------


@dataclass
class SpectrumReport:
    d: int
    r: int
    k: int | None
    classification: str
    delta_sq: tuple[Fraction, ...]
    delta_float: tuple[float, ...]
    beta_sq: Fraction | None
    beta: float | None
    epsilon: Fraction | None
    exact: bool
    orthonormal: bool
    parseval: bool
    float_agrees: bool | None
    t_profile: dict[tuple[int, int], dict[tuple[int, int], int]]
    n_counts: dict[tuple[int, int], tuple[int, int]]
    lambda_estimate: float | None
    failures: list[str]

    @property
    def delta(self) -> tuple[Fraction, ...] | None:
        """Attained magnitudes, if all are rational."""
        out = tuple(_exact_sqrt(x) for x in self.delta_sq)
        return None if any(x is None for x in out) else out

    @property
    def uniform_t(self) -> tuple[int, int] | None:
        """(t1, t2) if every vector in every pair has the same counts."""
        vals = {key for prof in self.t_profile.values() for key in prof}
        return next(iter(vals)) if len(vals) == 1 else None

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "r": self.r,
            "k": self.k,
            "classification": self.classification,
            "delta_sq": [_frac(x) for x in self.delta_sq],
            "delta_float": list(self.delta_float),
            "beta_sq": None if self.beta_sq is None else _frac(self.beta_sq),
            "epsilon": None if self.epsilon is None else _frac(self.epsilon),
            "exact": self.exact,
            "orthonormal": self.orthonormal,
            "parseval": self.parseval,
            "float_agrees": self.float_agrees,
            "pairs": [
                {
                    "pair": list(pair),
                    "n1": self.n_counts[pair][0],
                    "n2": self.n_counts[pair][1],
                    "t": [{"t1": t1, "t2": t2, "vectors": c} for (t1, t2), c in sorted(prof.items())],
                }
                for pair, prof in sorted(self.t_profile.items())
            ],
            "lambda_estimate": self.lambda_estimate,
            "failures": list(self.failures),
        }


def _structural_failures(m: MubCollection) -> list[str]:
    out = []
    if m.d < 1:
        out.append(f"dimension {m.d} is not positive")
        return out
    for l, basis in enumerate(m.bases):
        if len(basis) != m.d:
            out.append(f"basis {l} has {len(basis)} vectors, expected {m.d}")
        for i, v in enumerate(basis):
            where = f"basis {l} vector {i}"
            if v.d != m.d:
                out.append(f"{where}: dimension {v.d}")
            if not v.support:
                out.append(f"{where}: empty support")
            if len(v.phases) != len(v.support):
                out.append(f"{where}: {len(v.phases)} phases for {len(v.support)} support points")
            if any(not 1 <= x <= m.d for x in v.support):
                out.append(f"{where}: support index outside 1..{m.d}")
            if any(a >= b for a, b in zip(v.support, v.support[1:])):
                out.append(f"{where}: support is not strictly increasing")
            if any(p.zero for p in v.phases):
                out.append(f"{where}: zero phase entry")
    return out


# per-process state for parallel pair jobs
_STATE: dict = {}


def _prepare(m: MubCollection, n: int):
    prepared = []
    for basis in m.bases:
        vecs = []
        index: dict[int, list[tuple[int, int, int]]] = {}
        for i, v in enumerate(basis):
            exps = tuple(p.num * (n // p.den) for p in v.phases)
            vecs.append((v.support, exps, v.k))
            for x, e in zip(v.support, exps):
                index.setdefault(x, []).append((i, e, v.k))
        prepared.append((vecs, index))
    return prepared


def _overlaps(vecs_a, index_b, n: int, skip_self: bool):
    """Yield, per vector a, the dict j -> exponent list of <a|b_j>."""
    for i, (supp, exps, ka) in enumerate(vecs_a):
        acc: dict[int, list[int]] = {}
        kb_of: dict[int, int] = {}
        for x, ea in zip(supp, exps):
            for j, eb, kb in index_b.get(x, ()):
                lst = acc.get(j)
                if lst is None:
                    acc[j] = [(eb - ea) % n]
                    kb_of[j] = kb
                else:
                    lst.append((eb - ea) % n)
        if skip_self:
            acc.pop(i, None)
        yield i, ka, acc, kb_of


def _within_basis(l: int):
    vecs, index = _STATE["prep"][l]
    n = _STATE["n"]
    bad = []
    for i, ka, acc, _ in _overlaps(vecs, index, n, skip_self=True):
        for j, exps in acc.items():
            if len(exps) == 1 or not RootSum.from_exponents(n, exps).is_zero():
                bad.append(f"basis {l}: vectors {i} and {j} are not orthogonal")
                if len(bad) > 5:
                    return bad
    return bad


def _cross_pair(pair: tuple[int, int]):
    l, mm = pair
    vecs_a, _ = _STATE["prep"][l]
    _, index_b = _STATE["prep"][mm]
    n, d = _STATE["n"], _STATE["d"]
    exact_vals: set[Fraction] = set()
    float_vals: list[float] = []
    tcount: Counter = Counter()
    n2 = 0
    parseval_bad = []
    for i, ka, acc, kb_of in _overlaps(vecs_a, index_b, n, skip_self=False):
        singles: Counter = Counter()  # kb -> number of one-term overlaps
        t2 = 0
        total = Fraction(0)
        ftotal = 0.0
        inexact = False
        for j, exps in acc.items():
            kb = kb_of[j]
            if len(exps) == 1:
                singles[kb] += 1
                continue
            rs = RootSum.from_exponents(n, exps)
            if rs.is_zero():
                continue
            t2 += 1
            a2 = rs.abs_sq().rational()
            if a2 is None:
                inexact = True
                fv = abs(complex(rs)) ** 2 / (ka * kb)
                float_vals.append(fv)
                ftotal += fv
                continue
            val = a2 / (ka * kb)
            exact_vals.add(val)
            total += val
        for kb, c in singles.items():
            val = Fraction(1, ka * kb)
            exact_vals.add(val)
            total += c * val
            t2 += c
        if inexact:
            if abs(float(total) + ftotal - 1) > FLOAT_TOL:
                parseval_bad.append(i)
        elif total != 1:
            parseval_bad.append(i)
        tcount[(d - t2, t2)] += 1
        n2 += t2
    return pair, exact_vals, float_vals, dict(tcount), n2, parseval_bad


def _float_check(m: MubCollection, report_vals: list[float], n_counts) -> tuple[bool, list[str]]:
    mats = [m.matrix(l) for l in range(m.r)]
    issues = []
    eye = np.eye(m.d)
    for l, a in enumerate(mats):
        if np.abs(a.conj().T @ a - eye).max() > FLOAT_TOL:
            issues.append(f"float check: basis {l} is not unitary")
    vals = np.array(sorted(report_vals)) if report_vals else np.array([])
    for (l, mm), (n1, n2) in n_counts.items():
        g = np.abs(mats[l].conj().T @ mats[mm]) ** 2
        nz = g > FLOAT_TOL
        if int(nz.sum()) != n2:
            issues.append(f"float check: pair {(l, mm)} has {int(nz.sum())} nonzero overlaps, exact count {n2}")
        if vals.size and nz.any():
            x = g[nz]
            pos = np.clip(np.searchsorted(vals, x), 1, max(vals.size - 1, 1))
            near = np.minimum(np.abs(x - vals[pos - 1]), np.abs(x - vals[np.minimum(pos, vals.size - 1)]))
            if near.max() > FLOAT_TOL:
                issues.append(f"float check: pair {(l, mm)} has a magnitude outside the exact spectrum")
    return not issues, issues


def _workers(workers: int | None) -> int:
    if workers is None:
        try:
            workers = int(os.environ.get("APMUB_THREADS", "1"))
        except ValueError:
            workers = 1
    return max(1, workers)


def _init_worker(state: dict) -> None:
    _STATE.clear()
    _STATE.update(state)


def analyze(m: MubCollection, workers: int | None = None, float_check: bool | None = None) -> SpectrumReport:
    """Exact spectrum, counts and classification of a basis collection.

    ``workers`` (default: the APMUB_THREADS environment variable, else 1)
    spreads base pairs over processes; results are merged in pair order so
    the report does not depend on it.  ``float_check`` (default: on for
    d <= 512) repeats the Gram computations in floating point and records
    whether they agree with the exact values.
    """
    failures = _structural_failures(m)
    k = m.k
    if failures:
        return SpectrumReport(
            m.d, m.r, k, "fail", (), (), None, None, None, False, False, False, None, {}, {}, None, failures
        )
    n = _conductor(v for b in m.bases for v in b)
    state = {"prep": _prepare(m, n), "n": n, "d": m.d}
    pairs = [(l, mm) for l in range(m.r) for mm in range(l + 1, m.r)]
    nw = _workers(workers)
    if nw > 1 and len(pairs) > 1:
        with ProcessPoolExecutor(max_workers=nw, initializer=_init_worker, initargs=(state,)) as ex:
            within = list(ex.map(_within_basis, range(m.r)))
            cross = list(ex.map(_cross_pair, pairs))
    else:
        _init_worker(state)
        within = [_within_basis(l) for l in range(m.r)]
        cross = [_cross_pair(p) for p in pairs]
        _STATE.clear()
    for bad in within:
        failures.extend(bad)
    orthonormal = not any(within)

    exact_vals: set[Fraction] = set()
    float_vals: list[float] = []
    t_profile: dict = {}
    n_counts: dict = {}
    parseval = True
    zero_seen = False
    for pair, ev, fv, tc, n2, pbad in cross:
        exact_vals |= ev
        float_vals.extend(fv)
        t_profile[pair] = tc
        n_counts[pair] = (m.d * m.d - n2, n2)
        if any(t1 for (t1, _t2) in tc):
            zero_seen = True
        if pbad:
            parseval = False
            failures.append(f"pair {pair}: Parseval fails for {len(pbad)} vectors")
    exact = not float_vals
    delta_sq = tuple(sorted(exact_vals | ({Fraction(0)} if zero_seen else set())))
    delta_float = tuple(sorted({round(x, 12) for x in float_vals}))
    if float_check is None:
        float_check = m.d <= 512
    agrees = None
    if float_check:
        agrees, issues = _float_check(m, [float(x) for x in exact_vals] + float_vals, n_counts)
        failures.extend(issues)

    if pairs:
        top_exact = max(exact_vals, default=Fraction(0))
        if exact:
            beta_sq = top_exact * m.d
            beta = math.sqrt(beta_sq)
        else:
            beta_sq = None
            beta = math.sqrt(max(float(top_exact), max(float_vals)) * m.d)
    else:
        beta_sq, beta = None, None
    epsilon = None if k is None else 1 - Fraction(k, m.d)

    if not orthonormal or not parseval or agrees is False:
        cls = "fail"
    elif not pairs:
        cls = "MUB"  # a single orthonormal basis is vacuously unbiased
    elif exact and delta_sq == (Fraction(1, m.d),):
        cls = "MUB"
    elif exact and len(delta_sq) == 2 and delta_sq[0] == 0 and 1 < beta_sq <= 4:
        cls = "APMUB"
    elif beta is not None and beta <= 2 + FLOAT_TOL:
        cls = "AMUB"
    else:
        cls = "fail"
        failures.append(f"beta = {beta:.6g} exceeds 2")
    lam = None
    if beta is not None and beta > 1 + FLOAT_TOL and m.d > 1:
        lam = -math.log(beta - 1) / math.log(m.d)
    return SpectrumReport(
        m.d, m.r, k, cls, delta_sq, delta_float, beta_sq, beta, epsilon, exact, orthonormal,
        parseval, agrees, t_profile, n_counts, lam, failures,
    )


# ---------------------------------------------------------------------------
# predicted parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PredictedParams:
    """Closed forms for the mu-design route with d = (q - e)(q + f).

    ``q_series`` holds the terms 1, (e+f)/(2q), ... through q^-3 (times mu);
    ``d_series`` holds mu, mu x, mu x^2 / 2, ... through d^-4 with
    x = (e+f) / (2 sqrt d), evaluated in decimal arithmetic.
    """

    params: QefParams
    mu: int
    beta_sq: Fraction
    delta_sq: tuple[Fraction, ...]
    epsilon: Fraction
    admissible: bool
    q_series: tuple[Fraction, ...]
    q_next: Fraction
    q_tail_bound: Fraction | None
    d_series: tuple[Decimal, ...]
    d_next: Decimal
    d_tail_bound: Decimal | None
    precision: int

    @property
    def beta(self) -> float:
        return math.sqrt(self.beta_sq)

    def beta_decimal(self) -> Decimal:
        with localcontext() as ctx:
            ctx.prec = self.precision
            return (Decimal(self.beta_sq.numerator) / Decimal(self.beta_sq.denominator)).sqrt()

    @property
    def q_sum(self) -> Fraction:
        return sum(self.q_series, Fraction(0))

    @property
    def d_sum(self) -> Decimal:
        with localcontext() as ctx:
            ctx.prec = self.precision
            return sum(self.d_series, Decimal(0))

    @property
    def classes(self) -> int | None:
        p = self.params
        return p.k // p.f + 1 if p.f else None


def predicted_params(params: QefParams, mu: int = 1, precision: int = 60) -> PredictedParams:
    q, e, f = params.q, params.e, params.f
    if mu < 1:
        raise DomainViolation(f"mu must be positive, got {mu}")
    k, s = params.k, params.s
    d = k * s
    beta_sq = Fraction(mu * mu * s, k)
    g = e + f
    t = Fraction(1, q)
    coeffs = (
        Fraction(1),
        Fraction(g, 2),
        Fraction(g * (3 * e - f), 8),
        Fraction(g * (5 * e * e - 2 * e * f + f * f), 16),
    )
    c4 = Fraction(g * (35 * e**3 - 15 * e * e * f + 9 * e * f * f - 5 * f**3), 128)
    q_series = tuple(mu * c * t**n for n, c in enumerate(coeffs))
    q_next = mu * c4 * t**4
    # every coefficient beyond the constant is at most max(e, f)^n in size
    gt = max(e, f) * t
    q_tail = mu * gt**4 / (1 - gt) if gt < 1 else None

    with localcontext() as ctx:
        ctx.prec = precision
        x = Decimal(g) / (2 * Decimal(d).sqrt())
        m = Decimal(mu)
        d_series = (
            m,
            m * x,
            m * x**2 / 2,
            -m * x**4 / 8,
            m * x**6 / 16,
            -5 * m * x**8 / 128,
        )
        d_next = 7 * m * x**10 / 256
        # sqrt(1 + y) is alternating with shrinking terms for 0 <= y <= 1
        d_tail = abs(d_next) if x * x <= 1 else None
        d_series = tuple(+v for v in d_series)

    c = 2
    admissible = g * g * (mu * c) ** 2 <= (c * c - mu * mu) ** 2 * d and c > mu
    delta = (Fraction(0), Fraction(mu * mu, k * k)) if (e or f) else (Fraction(1, d),)
    return PredictedParams(
        params, mu, beta_sq, delta, 1 - Fraction(1, s), admissible, q_series, q_next,
        q_tail, d_series, d_next, d_tail, precision,
    )


# ---------------------------------------------------------------------------
# weighing matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeighingMatrix:
    """W = scale * E with E a matrix of cyclotomic integers (None for zero)."""

    order: int
    weight: int
    entries: tuple[tuple[RootSum | None, ...], ...]
    scale_sq: Fraction

    def to_array(self) -> np.ndarray:
        a = np.array([[0j if x is None else complex(x) for x in row] for row in self.entries])
        return a * math.sqrt(self.scale_sq)

    def to_json(self) -> dict:
        def entry(x):
            if x is None or x.is_zero():
                return {"zero": True, "num": 0, "den": 1}
            if x.is_monomial():
                p = PhaseEntry.phase(x.terms[0][0], x.n)
                return {"zero": False, "num": p.num, "den": p.den}
            return {"zero": False, "terms": [list(t) for t in x.terms], "N": x.n}

        return {
            "order": self.order,
            "weight": self.weight,
            "scale_sq": _frac(self.scale_sq),
            "entries": [[entry(x) for x in row] for row in self.entries],
        }


def _gram_entries(m: MubCollection, l: int, mm: int, n: int) -> list[list[RootSum | None]]:
    prep = _prepare(m, n)
    vecs_a, _ = prep[l]
    _, index_b = prep[mm]
    out: list[list[RootSum | None]] = [[None] * m.d for _ in range(m.d)]
    for i, _ka, acc, _kb in _overlaps(vecs_a, index_b, n, skip_self=False):
        for j, exps in acc.items():
            rs = RootSum.from_exponents(n, exps)
            out[i][j] = None if rs.is_zero() else rs
    return out


def _matmul_adjoint(a, b, n: int, d: int):
    # a^dagger b for matrices of RootSum | None, via column sparsity
    cols_a = [[(r, a[r][c]) for r in range(d) if a[r][c] is not None] for c in range(d)]
    rows_b = [{c: b[r][c] for c in range(d) if b[r][c] is not None} for r in range(d)]
    out = [[None] * d for _ in range(d)]
    for i in range(d):
        acc: dict[int, dict[int, int]] = {}
        for r, x in cols_a[i]:
            xc = x.conj()
            for j, y in rows_b[r].items():
                tgt = acc.setdefault(j, {})
                for ea, ca in xc.terms:
                    for eb, cb in y.terms:
                        e = (ea + eb) % n
                        tgt[e] = tgt.get(e, 0) + ca * cb
        for j, terms in acc.items():
            rs = RootSum(n, terms)
            out[i][j] = None if rs.is_zero() else rs
    return out


def weighing_from_bases(m: MubCollection) -> list[WeighingMatrix]:
    """W_i = M_1^dagger M_i for i = 2..r, each of weight k^2 = d / beta^2."""
    if m.r <= 1:
        return []
    report = analyze(m)
    if report.classification not in ("MUB", "APMUB"):
        raise NotBiangular(f"collection classifies as {report.classification}")
    k = m.k
    if k is None or report.beta_sq is None or report.beta_sq * k * k != m.d:
        raise NotBiangular("weighing matrices need a common support size with d = beta^2 k^2")
    n = _conductor(v for b in m.bases for v in b)
    out = []
    for i in range(1, m.r):
        e = _gram_entries(m, 0, i, n)
        out.append(WeighingMatrix(m.d, k * k, tuple(tuple(r) for r in e), Fraction(1, k * k)))
    return out


def verify_weighing(w: WeighingMatrix) -> bool:
    """Exact W^dagger W = I, w nonzeros per row and column, magnitudes 1/sqrt(w)."""
    d = w.order
    if len(w.entries) != d or any(len(row) != d for row in w.entries):
        return False
    target = Fraction(1, w.weight)
    for row in w.entries:
        for x in row:
            if x is not None and not x.is_zero():
                a2 = x.abs_sq().rational()
                if a2 is None or a2 * w.scale_sq != target:
                    return False
    nz = [[x is not None and not x.is_zero() for x in row] for row in w.entries]
    if any(sum(row) != w.weight for row in nz):
        return False
    if any(sum(nz[r][c] for r in range(d)) != w.weight for c in range(d)):
        return False
    n = math.lcm(1, *(x.n for row in w.entries for x in row if x is not None))
    ent = [[None if x is None else x.lift(n) for x in row] for row in w.entries]
    g = _matmul_adjoint(ent, ent, n, d)
    for i in range(d):
        for j in range(d):
            x = g[i][j]
            if i == j:
                if x is None or x.rational() is None or x.rational() * w.scale_sq != 1:
                    return False
            elif x is not None:
                return False
    return True


def weighing_product(a: WeighingMatrix, b: WeighingMatrix) -> WeighingMatrix:
    """a^dagger b, which for mutually unbiased weighing matrices is again weighing."""
    if a.order != b.order:
        raise OrderMismatch(f"orders {a.order} and {b.order}")
    n = math.lcm(1, *(x.n for w in (a, b) for row in w.entries for x in row if x is not None))
    ea = [[None if x is None else x.lift(n) for x in row] for row in a.entries]
    eb = [[None if x is None else x.lift(n) for x in row] for row in b.entries]
    prod = _matmul_adjoint(ea, eb, n, a.order)
    return WeighingMatrix(a.order, a.weight, tuple(tuple(r) for r in prod), a.scale_sq * b.scale_sq)


def bases_from_weighing(ws: Sequence[WeighingMatrix]) -> MubCollection:
    """The collection {I} together with the columns of each W_i."""
    if not ws:
        raise DomainViolation("no weighing matrices given")
    d = ws[0].order
    ident = tuple(BasisVector(d, (x,), (PhaseEntry(),)) for x in range(1, d + 1))
    bases = [ident]
    for w in ws:
        basis = []
        for c in range(d):
            supp, phases = [], []
            for r in range(d):
                x = w.entries[r][c]
                if x is None:
                    continue
                if not x.is_monomial() or x.abs_sq().rational() * w.scale_sq * w.weight != 1:
                    raise DomainViolation("column entries are not single scaled roots of unity")
                supp.append(r + 1)
                phases.append(PhaseEntry.phase(x.terms[0][0], x.n))
            basis.append(BasisVector(d, tuple(supp), tuple(phases)))
        bases.append(tuple(basis))
    return MubCollection(d, tuple(bases), {"source": "weighing matrices"})
