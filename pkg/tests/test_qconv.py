import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdeform.cumulants import MomentSequence
from qdeform.errors import DomainError
from qdeform.jackson import LatticeFunction, q_moment_disc
from qdeform.qconv import (
    BraidedElement,
    TensorElement,
    braided_antipode,
    braided_coproduct,
    braided_counit,
    braiding_phi,
    ck_convolve_functions,
    ck_convolve_moments,
    ck_convolve_polynomial,
    ck_convolve_table,
    coproduct,
    km_convolve,
    lattice_moment,
    q_taylor_coproduct,
)
from qdeform.qexact import E_q_series, QPoly, QRational, e_q_series, eval_at_q, gauss_binomial

q = QPoly.q()

F_TAB = {(1, 0): F(1, 2), (-1, 1): F(1, 3), (1, -1): F(1, 4)}
G_TAB = {(1, 1): 1, (-1, 0): F(2, 3), (1, 2): F(-1, 5), (-1, -2): F(1, 7)}


def test_moment_examples():
    a = MomentSequence((1, F(1, 2), 3, -1))
    assert ck_convolve_moments(a, (1, 0, 0, 0), q).values == a.values
    got = ck_convolve_moments(a, a, 1).values
    assert got == tuple(sum(math.comb(n, k) * a[k] * a[n - k] for k in range(n + 1)) for n in range(4))
    got0 = ck_convolve_moments(a, a, 0).values
    assert got0 == tuple(sum(a[k] * a[n - k] for k in range(n + 1)) for n in range(4))
    with pytest.raises(DomainError):
        ck_convolve_moments(a, (1, 0), q)


seqs = st.lists(st.fractions(min_value=-2, max_value=2, max_denominator=5), min_size=8, max_size=8)


@settings(max_examples=20, deadline=None)
@given(seqs, seqs, seqs)
def test_moment_convolution_commutative_associative(a, b, c):
    ab = ck_convolve_moments(a, b)
    assert ab.values == ck_convolve_moments(b, a).values
    assert ck_convolve_moments(ab, c).values == ck_convolve_moments(a, ck_convolve_moments(b, c)).values


def test_symbolic_moment_entries():
    a = (1, q, 1 + q**2, 0, q**3)
    b = (1, 2, F(1, 2), q, 1)
    ab = ck_convolve_moments(a, b)
    assert ab.values == ck_convolve_moments(b, a).values
    assert ab[1] == q + 2


@pytest.mark.parametrize("order", range(0, 7))
def test_function_level_moments_follow_moment_formula(order):
    """Exact in symbolic q with finitely supported lattice functions."""
    h = ck_convolve_table(F_TAB, G_TAB, None, order)
    mf = [lattice_moment(F_TAB, n, None) for n in range(order + 1)]
    mg = [lattice_moment(G_TAB, n, None) for n in range(order + 1)]
    pred = ck_convolve_moments(mf, mg)
    for n in range(order + 1):
        assert lattice_moment(h, n, None) == pred[n]


def test_printed_coefficient_shifts_moments():
    order = 4
    h = ck_convolve_table(F_TAB, G_TAB, None, order, coefficient="printed")
    mf = [lattice_moment(F_TAB, n, None) for n in range(order + 1)]
    mg = [lattice_moment(G_TAB, n, None) for n in range(order + 1)]
    for n in range(order + 1):
        expected = sum((gauss_binomial(n, k) * mf[k] * mg[n - k] * QRational(1, q**k) for k in range(n + 1)), 0)
        assert lattice_moment(h, n, None) == expected
    assert lattice_moment(h, 1, None) != ck_convolve_moments(mf, mg)[1]


def test_lattice_moment_matches_jackson_numerics():
    qv = 0.4
    ftab = {k: float(v) for k, v in F_TAB.items()}
    f = LatticeFunction.from_table(qv, ftab)
    for n in range(5):
        assert lattice_moment(ftab, n, qv) == pytest.approx(q_moment_disc(f, n, qv), rel=1e-12)
        assert float(eval_at_q(lattice_moment(F_TAB, n, None), F(2, 5))) == pytest.approx(q_moment_disc(f, n, qv))


def test_polynomial_g_terminates():
    fm = (1, F(1, 3), F(1, 2), 0, 2, 1, 1, 1)
    g = [0, 0, 0, 1]
    out = ck_convolve_polynomial(fm, g)
    assert len(out) == 4 and out[3] == 1
    # one more derivative term would act on a zero polynomial
    assert ck_convolve_polynomial(fm, g + [0])[:4] == out


def test_q_one_polynomial_is_classical_convolution():
    # f = law with atoms at -1, 1/2, 2; (f * g)(x) = E g(x - Y)
    atoms = [(F(-1), F(1, 4)), (F(1, 2), F(1, 2)), (F(2), F(1, 4))]
    fm = [sum(p * y**n for y, p in atoms) for n in range(7)]
    g = [F(1), F(-2), F(0), F(1, 3), F(0), F(0), F(1, 2)]
    out = ck_convolve_polynomial(fm, g, 1)
    for x in (F(0), F(1, 3), F(-2)):
        direct = sum(p * sum(c * (x - y) ** k for k, c in enumerate(g)) for y, p in atoms)
        assert sum(c * x**k for k, c in enumerate(out)) == direct


def test_q_zero_is_boolean_pattern():
    fm = (1, F(1, 2), F(2, 3))
    out = ck_convolve_polynomial(fm, [0, 0, 1], 0, coefficient="printed")
    # [2,k]_0 = 1: x^2 - m_1 x + m_2
    assert out == [fm[2], -fm[1], 1]


def test_numeric_callable_agrees_with_exact_polynomial():
    qv = 0.6
    fm = [1.0, 0.25, 0.5, 0.1, 0.3]
    g = [1.0, -1.0, 0.5, 2.0, 0.25]
    h = ck_convolve_functions(fm, lambda x: sum(c * x**k for k, c in enumerate(g)), qv, 4)
    exact = ck_convolve_polynomial(fm, g, qv)
    for x in (0.7, -1.3, 2.0):
        assert h(x) == pytest.approx(sum(c * x**k for k, c in enumerate(exact)), rel=1e-9)
    with pytest.raises(DomainError):
        h(0.0)


def test_numeric_function_level_moment_consistency():
    qv = 0.5
    ftab = {k: float(v) for k, v in F_TAB.items()}
    gtab = {k: float(v) for k, v in G_TAB.items()}
    f = LatticeFunction.from_table(qv, ftab)
    order = 5
    h = ck_convolve_functions(f, gtab, qv, order)
    mf = [q_moment_disc(f, n, qv) for n in range(order + 1)]
    mg = [lattice_moment(gtab, n, qv) for n in range(order + 1)]
    pred = ck_convolve_moments(mf, mg, qv)
    for n in range(order + 1):
        assert lattice_moment(h, n, qv) == pytest.approx(pred[n], rel=1e-8, abs=1e-10)


def test_coproduct_examples():
    assert braided_coproduct(0) == TensorElement({(0, 0): 1})
    assert braided_coproduct(1) == TensorElement({(1, 0): 1, (0, 1): 1})
    assert braided_coproduct(2) == TensorElement({(2, 0): 1, (1, 1): 1 + q, (0, 2): 1})


def test_antipode_and_counit_examples():
    x = BraidedElement.monomial(1, 3)
    assert braided_antipode(x) == BraidedElement([0, -1], 3)
    assert braided_antipode(BraidedElement.monomial(2, 3)) == BraidedElement([0, 0, q], 3)
    assert braided_counit(BraidedElement([1, 3])) == 1
    assert braiding_phi(2, 3) == TensorElement({(3, 2): q**6})


@pytest.mark.parametrize("order", [0, 3, 8])
def test_exponential_identities(order):
    e = BraidedElement.from_series(e_q_series(order))
    assert braided_antipode(e) == BraidedElement.from_series(E_q_series(order).negate_argument())
    assert braided_antipode(e) * e == 1
    assert braided_counit(e) == 1


def test_e_q_is_group_like():
    order = 6
    e = BraidedElement.from_series(e_q_series(order))
    lhs = coproduct(e)
    rhs = TensorElement.from_pair(e, e)
    trunc = {k: v for k, v in rhs.terms.items() if sum(k) <= order}
    assert lhs == TensorElement(trunc, order)


@pytest.mark.parametrize("k", range(0, 9))
def test_hopf_axioms_on_monomials(k):
    d = braided_coproduct(k, 8)
    # (epsilon (x) id) Delta = id
    assert d.contract_left(lambda i: int(i == 0)) == BraidedElement.monomial(k, 8)
    # m (S (x) id) Delta = epsilon 1
    anti = d.map_left(lambda i: (-1) ** i * q ** math.comb(i, 2)).multiply()
    assert anti == BraidedElement([int(k == 0)], 8)


@pytest.mark.parametrize("a,b", [(1, 1), (1, 2), (2, 3), (3, 3)])
def test_coproduct_is_braided_multiplicative(a, b):
    order = a + b
    assert braided_coproduct(a + b, order) == braided_coproduct(a, order) * braided_coproduct(b, order)


def test_taylor_coproduct():
    assert q_taylor_coproduct(BraidedElement.monomial(2, 2)) == braided_coproduct(2)
    assert q_taylor_coproduct(BraidedElement([1], 0)) == TensorElement({(0, 0): 1})
    g = BraidedElement([1, F(1, 2), q, 0, 3], 4)
    assert q_taylor_coproduct(g) == coproduct(g)


def test_km_examples():
    fm = (F(3, 2), 0, F(1, 2), 0, 1)
    assert km_convolve(fm, BraidedElement([1], 0)) == BraidedElement([F(3, 2)], 0)
    assert km_convolve(fm, BraidedElement([0, 1], 1)) == BraidedElement([0, F(3, 2)], 1)


@pytest.mark.parametrize("degree", range(0, 7))
def test_km_matches_ck_on_polynomials(degree):
    fm = (1, F(1, 2), q, F(-1, 3), 1 + q, 2, F(1, 7))
    g = BraidedElement([F(k + 1, 2) if k % 2 else q**k for k in range(degree + 1)], degree)
    assert km_convolve(fm, g) == BraidedElement(ck_convolve_polynomial(fm, list(g.coeffs)), degree)
    printed = ck_convolve_polynomial(fm, list(g.coeffs), coefficient="printed")
    if degree >= 1:
        assert km_convolve(fm, g) != BraidedElement(printed, degree)


def test_errors():
    with pytest.raises(DomainError):
        BraidedElement([1], 1) + BraidedElement([1], 2)
    with pytest.raises(DomainError):
        km_convolve((1,), BraidedElement([0, 1], 1))
    with pytest.raises(DomainError):
        ck_convolve_polynomial((1,), [0, 1])
    with pytest.raises(DomainError):
        ck_convolve_table((1, 0), G_TAB, None, 1, coefficient="bogus")
