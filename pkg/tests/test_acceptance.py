"""Acceptance suite: one test and one printed PASS/FAIL line per criterion.

Run ``pytest tests/test_acceptance.py -v`` to see the lines inline.
"""

import math

import pytest

from qdeform import verify
from qdeform.fock import build_fock, vacuum_wick
from qdeform.partitions import enumerate_pair_partitions

CRITERIA = {
    1: ("crossing-nesting identity", "partitions", {"n": 6}, 10.0),
    2: ("Wick cross-validation", "wick", {"max_two_n": 8, "max_dim": 3}, 120.0),
    3: ("mu_q^I moments three ways", "moments", {"n": 6}, 30.0),
    4: ("commutation residuals", "commutation", {"cutoff": 5, "dim": 3}, None),
    5: ("q-exponential duality", "exponential", {"order": 30}, None),
    6: ("discrete orthogonality", "discrete", {"n": 4, "qs": (0.3, 0.5, 0.8)}, 60.0),
    7: ("continuous orthogonality", "continuous", {"n": 4, "qs": (0.0, 0.5)}, None),
    8: ("CK convolution", "conv", {"degree": 6, "length": 8}, None),
    9: ("Boolean Khintchine equality", "khintchine", {"trials": 50, "max_size": 8, "max_n": 6}, None),
    10: ("limit sanity", "limits", {"max_n": 4, "norm_cutoff": 30}, None),
    11: ("positivity scans", "positivity", {"depth": 5}, None),
}


def _report(capsys, number, res, budget):
    name = CRITERIA[number][0]
    in_time = budget is None or res.seconds < budget
    ok = res.passed and in_time
    limit = f" / {budget:.0f} s" if budget else ""
    failed = [f"{r['check']}[{r['params']}]" for r in res.rows if not r["passed"]]
    detail = res.summary + (f"; failed: {', '.join(failed)}" if failed else "")
    if not in_time:
        detail += "; over time budget"
    with capsys.disabled():
        print(f"\nACCEPTANCE {number:>2} {name}: {'PASS' if ok else 'FAIL'} "
              f"({res.seconds:.2f} s{limit}) {detail}")
    return ok


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    _, target, kwargs, budget = CRITERIA[number]
    res = verify.CHECKS[target](**kwargs)
    assert res.rows
    assert _report(capsys, number, res, budget)


# direct spot checks against literal values

def test_pair_partition_count_n6():
    assert sum(1 for _ in enumerate_pair_partitions(12)) == 10395


@pytest.mark.parametrize("n,catalan", [(2, 2), (3, 5)])
def test_free_moments_literal(n, catalan):
    assert vacuum_wick(build_fock(1, n, 0, flavor="qccr"), [[1]] * (2 * n)) == catalan


def test_classical_moment_literal():
    assert vacuum_wick(build_fock(1, 4, 1, flavor="qccr"), [[1]] * 8) == 105


def test_inverse_relation_uses_q_two():
    res = verify.check_commutation(cutoff=5, dim=3)
    rows = [r for r in res.rows if r["params"].startswith("inverse")]
    assert rows and all(r["passed"] for r in rows)
    assert "q=2" in rows[0]["params"]


def test_free_norm_raw_vs_extrapolated():
    # the raw truncated norm 2 cos(pi / 32) is outside 1e-3; the extrapolated estimate is inside
    res = verify.check_limits(max_n=1, norm_cutoff=30)
    row = next(r for r in res.rows if r["check"] == "free norm estimate")
    raw = float(row["observed"].split("raw=")[1])
    assert raw == pytest.approx(2 * math.cos(math.pi / 32), rel=1e-12)
    assert abs(raw - 2) > 1e-3 and row["passed"]
