import csv
import io
import itertools
from collections import Counter
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from qdeform import _kernels_py
from qdeform.errors import DomainError
from qdeform.partitions import (
    PairPartition,
    Permutation,
    QSWeight,
    SetPartition,
    StatWeight,
    bell,
    catalan,
    crossings,
    e0,
    enumerate_pair_partitions,
    enumerate_set_partitions,
    generating_polynomial,
    inversions,
    ip,
    nestings,
    nica_c0,
    pair_stat_histogram,
    partition_stats_csv,
    restricted_crossings,
    wick_sum,
)
from qdeform.qexact import QPoly, QSPoly, double_factorial, eval_at_q, q_integer

P = PairPartition.from_pairs
S = SetPartition.from_blocks


def brute_pair_partitions(two_n):
    """Oracle: all perfect matchings via permutations, deduplicated."""
    seen = set()
    for perm in itertools.permutations(range(1, two_n + 1)):
        pairs = tuple(sorted(tuple(sorted(perm[i:i + 2])) for i in range(0, two_n, 2)))
        seen.add(pairs)
    return seen


def test_enumerate_small():
    assert [v.pairs for v in enumerate_pair_partitions(2)] == [((1, 2),)]
    assert {v.pairs for v in enumerate_pair_partitions(4)} == {
        ((1, 2), (3, 4)), ((1, 3), (2, 4)), ((1, 4), (2, 3))
    }
    assert sum(1 for _ in enumerate_pair_partitions(8)) == 105


@pytest.mark.parametrize("two_n", [0, 2, 4, 6, 8])
def test_enumeration_matches_brute_force(two_n):
    got = [v.pairs for v in enumerate_pair_partitions(two_n)]
    assert len(got) == len(set(got)) == double_factorial(two_n // 2)
    if two_n:
        assert set(got) == brute_pair_partitions(two_n)


def test_enumeration_errors():
    with pytest.raises(DomainError):
        list(enumerate_pair_partitions(3))
    with pytest.raises(DomainError):
        list(enumerate_pair_partitions(18))
    with pytest.raises(DomainError):
        list(enumerate_set_partitions(13))


@pytest.mark.parametrize("n,count", [(0, 1), (1, 1), (3, 5), (5, 52), (7, 877)])
def test_set_partition_counts(n, count):
    parts = list(enumerate_set_partitions(n))
    assert len(parts) == len({p.blocks for p in parts}) == count == bell(n)


def test_statistics_examples():
    assert crossings(P([(1, 2), (3, 4)])) == 0
    assert crossings(P([(1, 3), (2, 4)])) == 1
    assert crossings(P([(1, 4), (2, 5), (3, 6)])) == 3
    assert nestings(P([(1, 2), (3, 4)])) == 0
    assert nestings(P([(1, 4), (2, 3)])) == 1
    assert nestings(P([(1, 6), (2, 5), (3, 4)])) == 3
    assert ip(P([(1, 2), (3, 4)])) == 0
    assert ip(P([(1, 3), (2, 4)])) == 2
    assert ip(P([(1, 4), (2, 3)])) == 2
    assert e0(P([(1, 2), (3, 4)])) == 0
    assert e0(P([(1, 3), (2, 4)])) == 2
    assert e0(P([(1, 4), (2, 3)])) == 1


def brute_restricted_crossings(v: SetPartition):
    arcs = [(b[i], b[i + 1]) for b in v.blocks for i in range(len(b) - 1)]
    return sum(1 for (a, b), (c, d) in itertools.product(arcs, arcs) if a < c < b < d)


def brute_c0(v: SetPartition):
    n = v.n
    block_of = {p: i for i, b in enumerate(v.blocks) for p in b}
    mins = {b[0] for b in v.blocks}
    count = 0
    for m1, m2, m3, m4 in itertools.product(range(1, n + 1), repeat=4):
        if not m1 <= m2 <= m3 <= m4:
            continue
        if (block_of[m1] == block_of[m3] and block_of[m2] == block_of[m4]
                and block_of[m2] != block_of[m3] and m1 in mins and m2 in mins):
            count += 1
    return count


def test_restricted_crossings_examples():
    assert restricted_crossings(S([(1, 2), (3, 4, 5)])) == 0
    assert restricted_crossings(S([(1, 3), (2, 4)])) == 1
    # arcs (1,3),(3,5) against (2,4): both cross it
    v = S([(1, 3, 5), (2, 4)])
    assert brute_restricted_crossings(v) == 2
    assert restricted_crossings(v) == 2


def test_c0_examples():
    assert nica_c0(S([(1, 2), (3,)])) == 0
    assert nica_c0(S([(1, 3), (2, 4)])) == 1
    assert nica_c0(S([(1, 4), (2, 3)])) == 0


@pytest.mark.parametrize("n", range(1, 8))
def test_set_statistics_against_brute_force(n):
    # the non-strict reading of the c0 inequalities gives the same counts
    for v in enumerate_set_partitions(n):
        assert restricted_crossings(v) == brute_restricted_crossings(v)
        assert nica_c0(v) == brute_c0(v)


def test_inversions_examples():
    assert inversions(Permutation((1, 2, 3))) == 0
    assert inversions(Permutation((2, 1, 3))) == 1
    assert inversions(Permutation((4, 3, 2, 1))) == 6


@pytest.mark.parametrize("n", range(1, 7))
def test_crossing_nesting_identity(n):
    for v in enumerate_pair_partitions(2 * n):
        assert crossings(v) + nestings(v) == ip(v) // 2
        assert ip(v) % 2 == 0


@pytest.mark.parametrize("n", range(1, 6))
def test_cr_nest_symmetric_distribution(n):
    hist = Counter((crossings(v), nestings(v)) for v in enumerate_pair_partitions(2 * n))
    assert all(hist[(a, b)] == hist[(b, a)] for a, b in hist)
    assert dict(hist) == pair_stat_histogram(n)


@pytest.mark.parametrize("n", range(1, 6))
def test_restricted_crossings_reduce_to_crossings(n):
    for v in enumerate_pair_partitions(2 * n):
        assert restricted_crossings(v) == crossings(v)


@pytest.mark.parametrize("n", range(0, 8))
def test_cr_generating_polynomial_limits(n):
    poly = generating_polynomial(n, "cr")
    assert eval_at_q(poly, 1) == double_factorial(n)
    assert eval_at_q(poly, 0) == catalan(n)


def test_e0_generating_polynomial_is_odd_q_integer_product():
    for n in range(1, 7):
        expected = QPoly(1)
        for k in range(1, n + 1):
            expected = expected * q_integer(2 * k - 1)
        assert generating_polynomial(n, "e0") == expected


def test_wick_sum_examples():
    assert wick_sum(2, [[1, 1], [1, 1]], QSWeight()) == 1
    ones = [[1] * 4 for _ in range(4)]
    s, q = QSPoly.s(), QSPoly.q()
    assert wick_sum(4, ones, QSWeight()) == 1 + s + s * q
    assert wick_sum(4, ones, StatWeight("e0")) == q_integer(1) * q_integer(3)


@pytest.mark.parametrize("n", range(1, 6))
def test_wick_sum_unit_weight_counts(n):
    ones = [[1] * (2 * n) for _ in range(2 * n)]
    assert wick_sum(2 * n, ones) == double_factorial(n)


def test_wick_sum_dimension_errors():
    with pytest.raises(DomainError):
        wick_sum(4, [[1, 1], [1, 1]])
    with pytest.raises(DomainError):
        wick_sum(2, [[1, 2], [3, 1]])


@pytest.mark.parametrize("two_n", [2, 4, 6, 8])
def test_free_variable_lemma(two_n):
    """Distinct formal covariances isolate each partition's weight."""
    x = {(i, j): sympy.Symbol(f"x{i}_{j}") for i in range(two_n) for j in range(i + 1, two_n)}
    cov = [[0] * two_n for _ in range(two_n)]
    for (i, j), sym in x.items():
        cov[i][j] = cov[j][i] = sym
    qs, ss = sympy.symbols("q s")
    weight = QSWeight(qs, ss)
    total = sympy.expand(wick_sum(two_n, cov, weight))
    poly = sympy.Poly(total, *x.values())
    assert len(poly.terms()) == double_factorial(two_n // 2)
    for v in enumerate_pair_partitions(two_n):
        mono = sympy.Mul(*[x[(a - 1, b - 1)] for a, b in v.pairs])
        coeff = poly.coeff_monomial(mono)
        assert sympy.simplify(coeff - ss ** (ip(v) // 2) * qs ** crossings(v)) == 0


def test_wick_sum_parallel_matches_serial():
    ones = [[Fraction(1)] * 8 for _ in range(8)]
    w = StatWeight("cr")
    assert wick_sum(8, ones, w, workers=2) == wick_sum(8, ones, w)


def test_csv_rows():
    rows = list(csv.reader(io.StringIO(partition_stats_csv(4))))
    assert rows[0] == ["pairs", "cr", "nest", "ip", "e0"]
    assert ["(1,3)(2,4)", "1", "0", "2", "2"] in rows
    assert len(rows) == 4


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 5), min_size=1, max_size=9))
def test_kernel_stats_agree(labels):
    # turn an arbitrary label list into a restricted growth string
    relabel, rgs = {}, []
    for x in labels:
        relabel.setdefault(x, len(relabel))
        rgs.append(relabel[x])
    from qdeform._backend import kernels

    assert kernels.set_partition_stats(rgs) == _kernels_py.set_partition_stats(rgs)
