import math
from itertools import combinations

import pytest

from apmub.block_designs import (
    ResolvableDesign,
    arbibd,
    class_count_bound,
    mols_to_rbd,
    mu,
    rbd_to_mols,
    t_bound,
    t_oracle,
    validate,
)
from apmub.errors import DomainViolation, PreconditionViolated, SingleClass
from apmub.finite_field import field_of_order
from apmub.latin_squares import mols_for_order

from conftest import load_design


def test_affine_plane_of_order_seven_matches_reference():
    ref = load_design("affine_plane_7.json")
    assert arbibd(field_of_order(7)) == ref


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9])
def test_arbibd_is_affine_plane(q):
    d = arbibd(field_of_order(q))
    rep = validate(d)
    assert rep.valid and rep.simple and rep.k == q
    assert d.r == q + 1
    prof = mu(d)
    assert prof.mu == 1 and prof.histogram[0] == 0
    # any two points lie in exactly one common block
    seen = {}
    for cls in d.classes:
        for b in cls:
            for pair in combinations(b, 2):
                seen[pair] = seen.get(pair, 0) + 1
    assert len(seen) == math.comb(q * q, 2) and set(seen.values()) == {1}


def test_validate_reports_problems():
    bad = ResolvableDesign(4, (((1, 2), (3, 4)), ((1, 2), (2, 3))))
    rep = validate(bad)
    assert not rep.valid
    assert rep.partitions == [True, False]
    assert not rep.simple
    assert any("missing" in x for x in rep.diagnostics)
    assert any("more than once" in x for x in rep.diagnostics)


def test_mu_needs_two_classes():
    with pytest.raises(SingleClass):
        mu(ResolvableDesign(2, (((1, 2),),)))


def test_block_size_profile_and_relabel():
    d = ResolvableDesign(5, (((1, 2, 5), (3,)),))
    assert dict(d.block_size_profile) == {3: 1, 1: 1}
    assert d.k is None
    assert d.relabel() == ResolvableDesign(4, (((1, 2, 4), (3,)),))


def test_json_round_trip():
    d = arbibd(field_of_order(4))
    assert ResolvableDesign.from_json(d.to_json()) == d


def test_t_bound_values_and_domain():
    assert t_bound(7, 3, 1) == 7
    assert t_bound(9, 3, 1) == 12
    assert t_bound(10, 4, 1) == 7
    for args in [(5, 5, 1), (5, 3, 3), (5, 3, -1)]:
        with pytest.raises(DomainViolation):
            t_bound(*args)


@pytest.mark.parametrize("d,k,mu_,value", [(7, 3, 1, 7), (9, 3, 1, 12), (10, 4, 1, 5), (10, 3, 1, 13), (6, 3, 1, 4)])
def test_oracle_known_values(d, k, mu_, value):
    res = t_oracle(d, k, mu_)
    assert res.exact and res.value == value
    w = [set(b) for b in res.witness]
    assert len(w) == value and all(len(b) == k for b in w)
    assert all(len(a & b) <= mu_ for a, b in combinations(w, 2))


def test_oracle_budget_gives_lower_bound():
    res = t_oracle(10, 4, 2, node_budget=5)
    assert not res.exact
    assert 1 <= res.value <= t_bound(10, 4, 2)


def test_class_count_bound():
    b = class_count_bound(24, 4, 6)
    assert b.mu_min == 1 and b.r_max == 7
    assert class_count_bound(25, 5, 5).r_max == 6
    assert class_count_bound(12, 6, 2).mu_min == 3
    with pytest.raises(DomainViolation):
        class_count_bound(12, 6, 2, mu=2)
    with pytest.raises(DomainViolation):
        class_count_bound(10, 3, 3)


@pytest.mark.parametrize("s", [3, 4, 5, 6, 7])
def test_mols_rbd_round_trip(s):
    m = mols_for_order(s)
    d = mols_to_rbd(m)
    assert d.r == m.count + 2
    back = rbd_to_mols(d)
    assert back.squares == m.squares


def test_rbd_to_mols_rejects():
    with pytest.raises(PreconditionViolated):
        rbd_to_mols(ResolvableDesign(6, (((1, 2, 3), (4, 5, 6)),) * 2))
    d = mols_to_rbd(mols_for_order(4))
    broken = ResolvableDesign(d.d, (d.classes[0], d.classes[0]))
    with pytest.raises(PreconditionViolated):
        rbd_to_mols(broken)
