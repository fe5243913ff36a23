"""q-cumulants defined through partition-weighted moment sums, and the
additive ``*_q`` convolution they induce.

``m_n = sum over set partitions V of {1..n} of q^{stat(V)} prod_{B in V} R(|B|)``

with ``stat`` either the restricted (consecutive-arc) crossing number or
Nica's left-reduced crossing number ``c0``.  The inverse transform is a
triangular recursion: the one-block partition is the only term carrying
``R(n)`` and it has ``stat = 0``.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Sequence

import numpy as np

from .errors import DomainError
from .partitions import set_partition_table
from .qexact import QPoly, to_fraction

STATISTICS = ("biane_cr", "nica_c0")
MAX_LENGTH = 12


@dataclass(frozen=True)
class MomentSequence:
    """Moments ``m_0..m_N`` with a provenance label."""

    values: tuple
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]

    @property
    def order(self) -> int:
        return len(self.values) - 1


@dataclass(frozen=True)
class CumulantSequence:
    """Cumulants ``R(1)..R(N)`` for one of the two crossing statistics."""

    values: tuple
    statistic: str = "biane_cr"

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if self.statistic not in STATISTICS:
            raise DomainError(f"unknown statistic {self.statistic!r}")

    def __len__(self):
        return len(self.values)

    def __getitem__(self, n):
        """``R(n)``, 1-based."""
        return self.values[n - 1]


def _resolve_q(q):
    if q is None or q == "symbolic":
        return QPoly.q()
    return q


@lru_cache(maxsize=None)
def _table(n: int, statistic: str):
    return tuple(sorted(set_partition_table(n, statistic).items()))


def _partition_sum(n, r_values, q, statistic, skip_single=False):
    total = 0
    for (sizes, stat), count in _table(n, statistic):
        if skip_single and len(sizes) == 1:
            continue
        term = count
        for b in sizes:
            term = term * r_values[b - 1]
            if isinstance(term, (int, Fraction)) and term == 0:
                break
        else:
            if stat:
                term = term * q**stat
            total = total + term
    return total


def moments_from_cumulants(r: CumulantSequence, q=None, label: str = "") -> MomentSequence:
    """Moments ``m_0..m_N`` from cumulants ``R(1)..R(N)``; ``q=None`` means symbolic."""
    if len(r) > MAX_LENGTH:
        raise DomainError(f"moment sequences are capped at length {MAX_LENGTH}")
    q = _resolve_q(q)
    vals = [1]
    for n in range(1, len(r) + 1):
        vals.append(_partition_sum(n, r.values, q, r.statistic))
    return MomentSequence(tuple(vals), label or f"moments_from_cumulants[{r.statistic}]")


def cumulants_from_moments(m: MomentSequence, q=None, statistic: str = "biane_cr") -> CumulantSequence:
    """Invert :func:`moments_from_cumulants` by triangular recursion."""
    if statistic not in STATISTICS:
        raise DomainError(f"unknown statistic {statistic!r}")
    if m[0] != 1:
        raise DomainError("m_0 must equal 1")
    if m.order > MAX_LENGTH:
        raise DomainError(f"moment sequences are capped at length {MAX_LENGTH}")
    q = _resolve_q(q)
    r: list = []
    for n in range(1, m.order + 1):
        r.append(0)  # placeholder, the single-block term is skipped
        r[n - 1] = m[n] - _partition_sum(n, r, q, statistic, skip_single=True)
    return CumulantSequence(tuple(r), statistic)


def biane_convolve(m1: MomentSequence, m2: MomentSequence, q=None,
                   statistic: str = "biane_cr") -> MomentSequence:
    """``m1 *_q m2``: add cumulants and transform back."""
    if len(m1) != len(m2):
        raise DomainError("moment sequences must have equal length")
    r1 = cumulants_from_moments(m1, q, statistic)
    r2 = cumulants_from_moments(m2, q, statistic)
    r = CumulantSequence(tuple(a + b for a, b in zip(r1.values, r2.values)), statistic)
    return moments_from_cumulants(r, q, label=f"({m1.label}) *_q ({m2.label})")


# ---------------------------------------------------------------------------
# Hankel positivity
# ---------------------------------------------------------------------------

@dataclass
class HankelReport:
    psd: bool
    min_eigenvalue: float
    size: int
    exact: bool | None = None
    certificate: dict | None = None


def hankel_matrix(m: Sequence, size: int):
    """``H[i][j] = m_{i+j}`` for ``0 <= i, j <= size``."""
    if len(m) < 2 * size + 1:
        raise DomainError(f"need {2 * size + 1} moments for a Hankel matrix of size {size}")
    return [[m[i + j] for j in range(size + 1)] for i in range(size + 1)]


def _exact_psd(H) -> tuple[bool, list | None]:
    """Exact PSD test by symmetric elimination; returns a witness vector on failure.

    The witness ``v`` satisfies ``v^T H v < 0`` exactly.
    """
    n = len(H)
    A = [[Fraction(x) for x in row] for row in H]
    # track the transformation so a negative pivot maps back to a vector
    T = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    active = list(range(n))
    while active:
        p = active[0]
        piv = A[p][p]
        if piv < 0:
            return False, T[p]
        if piv == 0:
            for j in active[1:]:
                if A[p][j] != 0:
                    # v = t * e_p + e_j with t chosen to make the form negative
                    ajj, apj = A[j][j], A[p][j]
                    t = -(ajj + 1) / (2 * apj)
                    v = [t * T[p][k] + T[j][k] for k in range(n)]
                    return False, v
            active.pop(0)
            continue
        for j in active[1:]:
            f = A[j][p] / piv
            if f:
                for k in active:
                    A[j][k] -= f * A[p][k]
                for k in range(n):
                    T[j][k] -= f * T[p][k]
        for j in active[1:]:
            A[p][j] = A[j][p] = Fraction(0)
        active.pop(0)
    return True, None


def _quad_form(H, v):
    n = len(H)
    return sum(v[i] * H[i][j] * v[j] for i in range(n) for j in range(n))


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def hankel_psd_check(m: MomentSequence | Sequence, size: int, tol: float = 1e-10) -> HankelReport:
    """Numerical PSD check of the Hankel matrix, re-verified exactly for rational input.

    ``tol`` is relative to the largest absolute Hankel entry.
    """
    vals = m.values if isinstance(m, MomentSequence) else tuple(m)
    H = hankel_matrix(vals, size)
    Hf = np.array([[float(x) for x in row] for row in H])
    scale = max(1.0, float(np.max(np.abs(Hf))))
    eig = float(np.linalg.eigvalsh(Hf).min())
    psd = eig >= -tol * scale
    report = HankelReport(psd=psd, min_eigenvalue=eig, size=size)
    if all(_is_exact(x) for row in H for x in row):
        exact_ok, witness = _exact_psd(H)
        report.exact = exact_ok
        report.psd = exact_ok
        if not exact_ok:
            value = _quad_form(H, witness)
            report.certificate = {
                "vector": [str(x) for x in witness],
                "quadratic_form": str(value),
                "moments": [str(x) for x in vals[: 2 * size + 1]],
            }
    elif not psd:
        w, V = np.linalg.eigh(Hf)
        v = V[:, 0]
        report.certificate = {
            "vector": [float(x) for x in v],
            "quadratic_form": float(v @ Hf @ v),
            "moments": [float(x) for x in vals[: 2 * size + 1]],
        }
    return report


# ---------------------------------------------------------------------------
# test families and scans
# ---------------------------------------------------------------------------

class SymmetricBernoulli:
    """Law of ``+-a`` with equal weights."""

    name = "bernoulli"

    def __call__(self, a, length: int) -> MomentSequence:
        a = to_fraction(a) if not isinstance(a, float) else a
        return MomentSequence(tuple(a**n if n % 2 == 0 else 0 for n in range(length)), f"bernoulli(a={a})")


class Gaussian:
    """Centered Gaussian of variance ``v``."""

    name = "gaussian"

    def __call__(self, v, length: int) -> MomentSequence:
        v = to_fraction(v) if not isinstance(v, float) else v
        vals = tuple(math.prod(range(1, n, 2)) * v ** (n // 2) if n % 2 == 0 else 0 for n in range(length))
        return MomentSequence(vals, f"gaussian(var={v})")


class TwoPoint:
    """Law ``(1-p) delta_0 + p delta_1`` (asymmetric)."""

    name = "two_point"

    def __call__(self, p, length: int) -> MomentSequence:
        p = to_fraction(p) if not isinstance(p, float) else p
        return MomentSequence(tuple(1 if n == 0 else p for n in range(length)), f"two_point(p={p})")


FAMILIES = {"bernoulli": SymmetricBernoulli(), "gaussian": Gaussian(), "two_point": TwoPoint()}


@dataclass
class ScanRecord:
    params: dict
    q: object
    depth: int
    psd: bool
    min_eig: float
    certificate: dict | None = None
    statistic: str = "biane_cr"

    def to_json(self) -> str:
        return json.dumps({
            "params": self.params,
            "q": str(self.q),
            "depth": self.depth,
            "statistic": self.statistic,
            "psd": self.psd,
            "min_eig": self.min_eig,
            "certificate": self.certificate,
        }, sort_keys=True)


def _scan_point(args):
    (f1, p1), (f2, p2), q, depth, statistic, tol = args
    length = 2 * depth + 1
    m1 = FAMILIES[f1](p1, length)
    m2 = FAMILIES[f2](p2, length)
    conv = biane_convolve(m1, m2, q, statistic)
    rep = hankel_psd_check(conv, depth, tol)
    params = {"family1": f1, "param1": str(p1), "family2": f2, "param2": str(p2)}
    return ScanRecord(params, q, depth, rep.psd, rep.min_eigenvalue, rep.certificate, statistic)


def positivity_scan(family1: tuple, family2: tuple, q_grid: Sequence, depth: int,
                    statistic: str = "biane_cr", tol: float = 1e-10,
                    workers: int = 1) -> list[ScanRecord]:
    """Convolve every pair of family members at every ``q`` and test Hankel positivity.

    ``family1`` and ``family2`` are ``(name, [params])`` with names from
    :data:`FAMILIES`.  Rational ``q`` and parameters make the check exact.  The
    output records violations with a reproduction certificate; it does not
    decide the positivity question.
    """
    name1, params1 = family1
    name2, params2 = family2
    for nm in (name1, name2):
        if nm not in FAMILIES:
            raise DomainError(f"unknown family {nm!r}")
    jobs = [((name1, a), (name2, b), q, depth, statistic, tol)
            for q, a, b in product(q_grid, params1, params2)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(_scan_point, jobs))
    return [_scan_point(j) for j in jobs]
