import numpy as np
import pytest
from hypothesis import given, strategies as st

from apmub.errors import DivisionByZero, DomainViolation, FieldMismatch, NotPrime, UnsupportedCharacteristic
from apmub.finite_field import (
    _is_irreducible,
    elements,
    factorize,
    field_new,
    field_of_order,
    inv,
    prime_power,
    quadratic_character,
)

PRIME_POWERS = [q for q in range(2, 82) if prime_power(q)]


def tables(spec):
    q = spec.order
    add = np.array([[spec._add(a, b) for b in range(q)] for a in range(q)])
    mul = np.array([[spec._mul(a, b) for b in range(q)] for a in range(q)])
    return add, mul


@pytest.mark.parametrize("q", PRIME_POWERS)
def test_field_axioms_exhaustive(q):
    spec = field_of_order(q)
    add, mul = tables(spec)
    idx = np.arange(q)
    assert (add == add.T).all() and (mul == mul.T).all()
    assert (add[:, 0] == idx).all() and (mul[:, 1] == idx).all()
    assert (mul[:, 0] == 0).all()
    # associativity: (a+b)+c == a+(b+c) over all triples
    a, b, c = np.meshgrid(idx, idx, idx, indexing="ij")
    assert (add[add[a, b], c] == add[a, add[b, c]]).all()
    assert (mul[mul[a, b], c] == mul[a, mul[b, c]]).all()
    assert (mul[a, add[b, c]] == add[mul[a, b], mul[a, c]]).all()
    # every nonzero element has exactly one inverse, every element one negative
    assert ((mul[1:, 1:] == 1).sum(axis=1) == 1).all()
    assert ((add == 0).sum(axis=1) == 1).all()


@pytest.mark.parametrize("q", [4, 8, 9, 16, 25, 27, 32, 49, 64, 81])
def test_modulus_is_smallest_irreducible(q):
    spec = field_of_order(q)
    p, n = spec.p, spec.n
    assert _is_irreducible(spec.modulus, p)
    assert spec.modulus[-1] == 1 and len(spec.modulus) == n + 1
    # no lexicographically smaller monic irreducible of the same degree
    from apmub.finite_field import _monic

    smaller = [m for m in _monic(n, p) if sorted([m, spec.modulus])[0] == m and m != spec.modulus]
    assert not any(_is_irreducible(m, p) for m in smaller)


def test_known_moduli():
    assert field_new(3, 2).modulus == (1, 0, 1)
    assert field_new(2, 2).modulus == (1, 1, 1)
    assert field_new(2, 3).modulus == (1, 0, 1, 1)  # 1 + x^2 + x^3 precedes 1 + x + x^3 low-degree-first


def test_element_encoding_round_trip():
    spec = field_new(3, 2)
    for x in elements(spec):
        assert spec.index_of(x.coeffs) == x.index


def test_operator_sugar():
    spec = field_new(5)
    two, three = spec.element(2), spec.element(3)
    assert (two + three).index == 0
    assert (two * three).index == 1
    assert (two / three).index == 4
    assert (two - three).index == 4
    assert (two**4).index == 1
    assert inv(two).index == 3


def test_errors():
    with pytest.raises(NotPrime):
        field_new(6)
    with pytest.raises(DivisionByZero):
        inv(field_new(7).zero)
    with pytest.raises(ZeroDivisionError):
        field_new(7).one / field_new(7).zero
    with pytest.raises(FieldMismatch):
        field_new(5).one + field_new(7).one
    with pytest.raises(UnsupportedCharacteristic):
        quadratic_character(field_new(2, 3), field_new(2, 3).one)
    with pytest.raises(DomainViolation):
        field_new(5).element(5)
    with pytest.raises(DomainViolation):
        field_of_order(12)


@pytest.mark.parametrize("q", [q for q in range(3, 50) if prime_power(q) and q % 2])
def test_quadratic_character_multiplicative(q):
    spec = field_of_order(q)
    els = elements(spec)
    chi = {x.index: quadratic_character(spec, x) for x in els}
    for a in els:
        for b in els:
            assert chi[(a * b).index] == chi[a.index] * chi[b.index]
    assert sum(chi.values()) == 0
    squares = {(x * x).index for x in els[1:]}
    assert {i for i, v in chi.items() if v == 1} == squares


def test_chi_minus_one_matches_congruence():
    for q in (3, 5, 7, 9, 11, 13, 25, 27):
        spec = field_of_order(q)
        assert quadratic_character(spec, -spec.one) == (1 if q % 4 == 1 else -1)


@given(st.integers(min_value=2, max_value=10**6))
def test_factorize_reconstructs(n):
    f = factorize(n)
    prod = 1
    for p, e in f.items():
        prod *= p**e
    assert prod == n
    assert list(f) == sorted(f)
    assert (prime_power(n) is not None) == (len(f) == 1)
