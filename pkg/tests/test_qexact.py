import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdeform.errors import DomainError, PoleError
from qdeform.qexact import (
    E_q_series,
    QPoly,
    QRational,
    QSeries,
    QSPoly,
    e_q_series,
    eval_at_q,
    gauss_binomial,
    numeric_E_product,
    numeric_e,
    q_factorial,
    q_integer,
    q_pochhammer,
    series_e_q_direct,
)

q = QPoly.q()


def inversion_generating_polynomial(n, k):
    """Oracle: sum of q^inv over 0/1 words with k ones."""
    out = {}
    for ones in itertools.combinations(range(n), k):
        word = [1 if i in ones else 0 for i in range(n)]
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if word[i] > word[j])
        out[inv] = out.get(inv, 0) + 1
    return QPoly(out)


def test_q_integer_examples():
    assert q_integer(0) == 0
    assert q_integer(1) == 1
    assert q_integer(3) == 1 + q + q**2


def test_q_factorial_examples():
    assert q_factorial(0) == 1
    assert q_factorial(2) == 1 + q
    assert q_factorial(3) == QPoly.from_list([1, 2, 2, 1])


def test_gauss_binomial_examples():
    assert gauss_binomial(5, 0) == 1
    assert gauss_binomial(2, 1) == 1 + q
    assert gauss_binomial(4, 2) == QPoly.from_list([1, 1, 2, 1, 1])
    with pytest.raises(DomainError):
        gauss_binomial(2, 3)


@pytest.mark.parametrize("n", range(0, 9))
def test_gauss_binomial_matches_inversion_oracle(n):
    for k in range(n + 1):
        assert gauss_binomial(n, k) == inversion_generating_polynomial(n, k)


def test_gauss_binomial_is_factorial_quotient():
    for n in range(10):
        for k in range(n + 1):
            assert gauss_binomial(n, k) * q_factorial(k) * q_factorial(n - k) == q_factorial(n)


def test_q_pochhammer_examples():
    assert q_pochhammer(0) == 1
    assert q_pochhammer(1) == 1 - q
    assert q_pochhammer(2) == QPoly.from_list([1, -1, -1, 1])
    # general first argument: (q^2; q)_2 = (1 - q^2)(1 - q^3)
    assert q_pochhammer(2, q**2) == (1 - q**2) * (1 - q**3)


def test_factorial_from_pochhammer():
    for k in range(8):
        assert q_factorial(k) * (1 - q) ** k == q_pochhammer(k)


def test_e_series_low_order():
    assert e_q_series(1) == QSeries([1, QRational(1, 1 - q)])
    assert E_q_series(1) == QSeries([1, QRational(1, 1 - q)])
    assert E_q_series(3)[3] == QRational(q**3, q_pochhammer(3))


@pytest.mark.parametrize("order", [0, 1, 5, 12])
def test_e_times_E_minus_is_one(order):
    assert e_q_series(order) * E_q_series(order).negate_argument() == 1


def test_eval_at_q_examples():
    assert eval_at_q(q_integer(3), 1) == 3
    assert eval_at_q(q_integer(3), 0) == 1
    assert eval_at_q(gauss_binomial(4, 2), 1) == 6
    assert eval_at_q(q_integer(3), Fraction(1, 2)) == Fraction(7, 4)
    assert eval_at_q(q_integer(3), 0.5) == pytest.approx(1.75)
    with pytest.raises(PoleError):
        eval_at_q(QRational(1, 1 - q), 1)


@pytest.mark.parametrize("n", range(0, 21))
def test_q_one_limits(n):
    assert eval_at_q(q_integer(n), 1) == n
    assert eval_at_q(q_factorial(n), 1) == math.factorial(n)


@pytest.mark.parametrize("n", range(0, 13))
def test_gauss_symmetry_and_pascal(n):
    for k in range(n + 1):
        assert gauss_binomial(n, k) == gauss_binomial(n, n - k)
        if 0 < k < n:
            assert gauss_binomial(n, k) == gauss_binomial(n - 1, k - 1) + gauss_binomial(n - 1, k).shift(k)


def test_numeric_E_product():
    assert numeric_E_product(0, 0.5) == 1
    assert numeric_E_product(3, 0.0) == 4
    with pytest.raises(DomainError):
        numeric_E_product(1.0, 1.0)


def test_e_via_reciprocal_product_matches_series():
    # e_{q^2}(-x^2) at x = 1 is outside the series' disc, so compare at x^2 = 0.9
    q2 = 0.25
    w = -0.9
    assert numeric_e(w, q2) == pytest.approx(series_e_q_direct(w, q2), abs=1e-10)
    # the stated case: e_{q^2}(-1) with q = 0.5 through 1/E_{q^2}(1)
    direct = 1.0 / math.prod(1 + q2**k for k in range(200))
    assert numeric_e(-1.0, q2) == pytest.approx(direct, abs=1e-12)


def test_qrational_arithmetic_and_equality():
    a = QRational(1, 1 - q)
    b = QRational(1 + q, 1 - q**2)
    assert a == b
    assert a + a == QRational(2, 1 - q)
    assert (a * (1 - q)).to_poly() == 1
    assert QRational(1 - q**2, 1 - q).to_poly() == 1 + q
    with pytest.raises(ArithmeticError):
        QRational(1, 1 - q).to_poly()


def test_qpoly_json_roundtrip():
    p = QPoly({0: Fraction(1, 3), 4: -2})
    assert p.to_json() == {"0": "1/3", "4": "-2"}
    assert QPoly.from_json(p.to_json()) == p


def test_qpoly_rejects_float_coefficients():
    with pytest.raises(TypeError):
        QPoly({0: 0.5})


def test_qspoly_mixing():
    s = QSPoly.s()
    expr = 1 + s + s * QSPoly.q()
    assert expr.coeff(1, 1) == 1
    assert expr.specialize_s(1) == 2 + q
    assert (expr - s) * 1 == 1 + s * q


small_polys = st.dictionaries(
    st.integers(0, 6), st.fractions(max_denominator=5).filter(lambda x: x != 0), max_size=5
).map(QPoly)


@settings(max_examples=60, deadline=None)
@given(small_polys, small_polys, small_polys)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == 0


@settings(max_examples=60, deadline=None)
@given(small_polys, small_polys.filter(lambda p: not p.is_zero()))
def test_divmod_reconstructs(a, b):
    quot, rem = a.divmod(b)
    assert quot * b + rem == a
    assert rem.degree < b.degree


@settings(max_examples=40, deadline=None)
@given(small_polys, st.fractions(min_value=-3, max_value=3, max_denominator=7))
def test_evaluation_is_ring_homomorphism(a, x):
    b = a * a + 1
    assert eval_at_q(b, x) == eval_at_q(a, x) ** 2 + 1
