import cmath
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from apmub.cyclotomic import RootSum, cyclotomic_polynomial


@pytest.mark.parametrize(
    "n, coeffs",
    [(1, (-1, 1)), (2, (1, 1)), (4, (1, 0, 1)), (6, (1, -1, 1)), (12, (1, 0, -1, 0, 1))],
)
def test_cyclotomic_polynomial(n, coeffs):
    assert cyclotomic_polynomial(n) == coeffs


@pytest.mark.parametrize("n", [2, 3, 5, 6, 8, 12])
def test_sum_of_all_roots_vanishes(n):
    assert RootSum.from_exponents(n, range(n)).is_zero()
    assert RootSum.from_exponents(n, [0]).rational() == 1


def test_abs_sq_of_gauss_type_sum():
    s = RootSum.from_exponents(3, [0, 1])
    assert (s.abs_sq()).rational() == 1
    s = RootSum.from_exponents(4, [0, 1])
    assert s.abs_sq().rational() == 2


exps = st.lists(st.integers(min_value=0, max_value=11), max_size=8)


@given(exps, exps)
def test_ring_ops_match_complex(a, b):
    x, y = RootSum.from_exponents(12, a), RootSum.from_exponents(12, b)
    w = cmath.exp(2j * cmath.pi / 12)
    cx, cy = sum(w**e for e in a), sum(w**e for e in b)
    assert abs(complex(x * y) - cx * cy) < 1e-9
    assert abs(complex(x + y) - (cx + cy)) < 1e-9
    assert abs(complex(x.conj()) - cx.conjugate()) < 1e-9
    assert (x - x).is_zero()
    if (x * y).is_zero():
        assert abs(cx * cy) < 1e-9


def test_rational_detection():
    half = RootSum.from_exponents(6, [1, 5])  # w + w^-1 = 1 for a primitive 6th root
    assert half.rational() == Fraction(1)
    assert RootSum.from_exponents(8, [1]).rational() is None
