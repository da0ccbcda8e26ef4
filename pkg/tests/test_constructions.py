import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from apmub.block_designs import mu, validate
from apmub.constructions import (
    ORIGINAL,
    TRIMMED,
    QefParams,
    construct_qef,
    construct_se_s,
    design_for_plan,
    plan,
    qef_pipeline,
    reshape,
    trim_arbibd,
)
from apmub.errors import DomainViolation, NoAdmissiblePlan, OrderMismatch
from apmub.finite_field import prime_power
from apmub.latin_squares import mols_for_order

from conftest import DATA, load_design


def as_sets(design):
    return [frozenset(cls) for cls in design.classes]


def test_ses_matches_reference():
    assert construct_se_s(5, 3, mols_for_order(5)) == load_design("ses_10.json")


def test_ses_domain():
    m = mols_for_order(5)
    assert construct_se_s(5, 0, m).r == 6
    for e in (-1, 5):
        with pytest.raises(DomainViolation):
            construct_se_s(5, e, m)
    with pytest.raises(OrderMismatch):
        construct_se_s(4, 1, m)


def test_ses_row_class_diagnostic():
    d = construct_se_s(5, 3, mols_for_order(5), include_row_class=True)
    assert d.r == 6 and dict(d.block_size_profile) == {2: 25, 5: 2}
    assert validate(d).valid


def test_trim_matches_reference():
    stage1 = trim_arbibd(QefParams(7, 3, 1))
    assert stage1.design == load_design("trimmed_32.json")
    assert stage1.provenance[0] == (ORIGINAL,) * 4 + (TRIMMED,)


def test_reshape_matches_reference_classes():
    ref = load_design("reshaped_32.json")
    got = construct_qef(QefParams(7, 3, 1))
    assert sorted(map(sorted, as_sets(got))) == sorted(map(sorted, as_sets(ref)))


def test_extra_search_finds_a_sixth_class_for_d32():
    res = qef_pipeline(QefParams(7, 3, 1), extra_search=True)
    assert res.design.r == 6 and res.extra_classes == 1
    assert mu(res.design).mu == 1
    # the stored reference sixth class is another valid completion
    extra = json.loads((DATA / "reshaped_32.json").read_text())["extra_class"]
    from apmub.block_designs import ResolvableDesign

    alt = ResolvableDesign(32, (*load_design("reshaped_32.json").classes, tuple(map(tuple, extra))))
    assert validate(alt).valid and mu(alt).mu == 1


def test_params_validation():
    with pytest.raises(DomainViolation):
        QefParams(6, 1, 1)
    with pytest.raises(DomainViolation):
        QefParams(7, 7, 1)
    with pytest.raises(DomainViolation):
        trim_arbibd(QefParams(7, 1, 2))
    with pytest.raises(DomainViolation):
        trim_arbibd(QefParams(7, 1, 0))
    p = QefParams(43, 15, 2)
    assert (p.k, p.s, p.d) == (28, 45, 1260) and p.guaranteed_classes == 15


def test_f_zero_routes_to_row_deletion():
    d = construct_qef(QefParams(5, 1, 0))
    assert d.d == 20 and d.r == 5 and d.k == 4


triples = st.sampled_from([q for q in range(3, 17) if prime_power(q)]).flatmap(
    lambda q: st.integers(1, q - 1).flatmap(lambda e: st.tuples(st.just(q), st.just(e), st.integers(1, e)))
)


@settings(max_examples=40, deadline=None)
@given(triples)
def test_pipeline_invariants(qef):
    params = QefParams(*qef)
    stage1 = trim_arbibd(params)
    k, f = params.k, params.f
    assert stage1.design.d == params.d and stage1.design.r == params.q + 1
    for cls in stage1.design.classes[1:]:
        ex = [len(b) - k for b in cls]
        assert all(0 <= x <= f for x in ex) and sum(ex) == k * f
    res = qef_pipeline(params)
    d = res.design
    assert d.r == params.guaranteed_classes
    assert d.k == k and all(len(cls) == params.s for cls in d.classes)
    assert validate(d).valid
    if d.r >= 2:
        assert mu(d).mu == 1
    assert all(x <= k * f for x in res.swaps)
    assert reshape(stage1, params) == d


def test_plan_d24():
    plans = plan(24)
    labels = [p.label for p in plans]
    assert "qef_reshape(q=5,e=1,f=1)" in labels
    best = next(p for p in plans if p.label == "qef_reshape(q=5,e=1,f=1)")
    assert best.r == 5 and best.beta_sq == Fraction(3, 2) and best.real_hadamard
    assert best.delta_sq == (0, Fraction(1, 16))
    assert [p.r for p in plans] == sorted((p.r for p in plans), reverse=True)
    for p in plans:
        assert p.beta_sq <= 4
        d = design_for_plan(p)
        assert d.d == 24 and d.r == p.r and d.k == p.k


def test_plan_square_dimension_is_mub():
    top = plan(25)[0]
    assert top.classification == "MUB" and top.r == 6


def test_plan_lower_bound_flag():
    composite = [p for p in plan(1260) if p.method == "mols_lower_bound" and p.parameters["s"] == 36]
    assert composite and composite[0].lower_bound and composite[0].r == 4


def test_plan_rejects_small():
    with pytest.raises(NoAdmissiblePlan):
        plan(3)
    with pytest.raises(NoAdmissiblePlan):
        plan(7)
