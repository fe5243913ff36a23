"""Set partitions, pair partitions and their crossing statistics.

Enumerations are streaming generators in canonical order.  Histogram-type
aggregates (``pair_stat_histogram``, ``set_partition_table``) go through the
compiled kernels when available.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from ._backend import kernels
from .errors import DomainError, VerificationError
from .qexact import QPoly, QSPoly

PAIR_CAP = 16
SET_CAP = 12


@dataclass(frozen=True)
class PairPartition:
    """Pairs ``(opener, closer)``, 1-based, sorted by opener."""

    pairs: tuple

    def __post_init__(self):
        pts = sorted(p for pair in self.pairs for p in pair)
        if pts != list(range(1, len(pts) + 1)):
            raise DomainError(f"pairs do not cover 1..2n exactly once: {self.pairs}")
        if any(a >= b for a, b in self.pairs):
            raise DomainError("each pair needs opener < closer")
        if list(self.pairs) != sorted(self.pairs):
            raise DomainError("pairs must be sorted by opener")

    @classmethod
    def from_pairs(cls, pairs) -> "PairPartition":
        return cls(tuple(sorted((min(a, b), max(a, b)) for a, b in pairs)))

    @property
    def size(self) -> int:
        return 2 * len(self.pairs)

    def as_set_partition(self) -> "SetPartition":
        return SetPartition(tuple(tuple(p) for p in self.pairs))

    def __str__(self):
        return "".join(f"({a},{b})" for a, b in self.pairs)


@dataclass(frozen=True)
class SetPartition:
    """Blocks as sorted tuples, ordered by their minimum."""

    blocks: tuple

    def __post_init__(self):
        pts = sorted(p for b in self.blocks for p in b)
        if pts != list(range(1, len(pts) + 1)):
            raise DomainError(f"blocks do not cover 1..n exactly once: {self.blocks}")
        if any(list(b) != sorted(b) or not b for b in self.blocks):
            raise DomainError("blocks must be nonempty and sorted")
        if [b[0] for b in self.blocks] != sorted(b[0] for b in self.blocks):
            raise DomainError("blocks must be ordered by minimum")

    @classmethod
    def from_blocks(cls, blocks) -> "SetPartition":
        bl = sorted(tuple(sorted(b)) for b in blocks)
        return cls(tuple(bl))

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    def rgs(self) -> list:
        """Restricted growth string, 0-based block labels."""
        out = [0] * self.n
        for label, blk in enumerate(self.blocks):
            for p in blk:
                out[p - 1] = label
        return out

    def block_sizes(self) -> tuple:
        return tuple(sorted((len(b) for b in self.blocks), reverse=True))


@dataclass(frozen=True)
class Permutation:
    """A bijection of ``1..n`` given by its images."""

    images: tuple

    def __post_init__(self):
        if sorted(self.images) != list(range(1, len(self.images) + 1)):
            raise DomainError(f"not a permutation of 1..n: {self.images}")


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

def enumerate_pair_partitions(two_n: int, cap: int = PAIR_CAP) -> Iterator[PairPartition]:
    """Yield the ``(2n-1)!!`` pair partitions of ``{1..two_n}`` in lexicographic order."""
    if not isinstance(two_n, int) or two_n < 0 or two_n % 2:
        raise DomainError(f"two_n must be a nonnegative even int, got {two_n!r}")
    if two_n > cap:
        raise DomainError(f"two_n={two_n} exceeds the enumeration cap {cap}")

    def rec(free: list, acc: list):
        if not free:
            yield PairPartition(tuple(acc))
            return
        a = free[0]
        for idx in range(1, len(free)):
            b = free[idx]
            acc.append((a, b))
            yield from rec(free[1:idx] + free[idx + 1:], acc)
            acc.pop()

    yield from rec(list(range(1, two_n + 1)), [])


def enumerate_set_partitions(n: int, cap: int = SET_CAP) -> Iterator[SetPartition]:
    """Yield the Bell(n) set partitions of ``{1..n}`` (restricted-growth order)."""
    if not isinstance(n, int) or n < 0:
        raise DomainError(f"n must be a nonnegative int, got {n!r}")
    if n > cap:
        raise DomainError(f"n={n} exceeds the enumeration cap {cap}")
    from ._kernels_py import _rgs_iter

    for rgs in _rgs_iter(n):
        nb = max(rgs) + 1 if n else 0
        blocks = [[] for _ in range(nb)]
        for i, b in enumerate(rgs):
            blocks[b].append(i + 1)
        yield SetPartition(tuple(tuple(b) for b in blocks))


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------

def crossings(v: PairPartition) -> int:
    """Number of pairs of arcs ``(a,b), (c,d)`` with ``a < c < b < d``."""
    return sum(1 for a, b in v.pairs for c, d in v.pairs if a < c < b < d)


def nestings(v: PairPartition) -> int:
    """Number of pairs of arcs ``(a,b), (c,d)`` with ``a < c < d < b``."""
    return sum(1 for a, b in v.pairs for c, d in v.pairs if a < c < d < b)


def ip(v: PairPartition) -> int:
    """Total count of interior points over all arcs."""
    return sum(b - a - 1 for a, b in v.pairs)


def e0(v: PairPartition) -> int:
    """``nest + 2 cr``; cross-checked against ``ip/2 + cr``."""
    cr, ne = crossings(v), nestings(v)
    val = ne + 2 * cr
    alt = ip(v)
    if alt % 2 or alt // 2 + cr != val:
        raise VerificationError(f"e0 formulas disagree on {v}: {val} vs ip/2+cr={alt / 2 + cr}")
    return val


def restricted_crossings(v: SetPartition | PairPartition) -> int:
    """Crossings among arcs joining consecutive elements of each block."""
    if isinstance(v, PairPartition):
        v = v.as_set_partition()
    return kernels.set_partition_stats(v.rgs())[1]


def nica_c0(v: SetPartition | PairPartition) -> int:
    """Quadruples ``m1 < m2 < m3 < m4`` with ``m1 ~ m3``, ``m2 ~ m4``, ``m2 !~ m3``,
    ``m1`` and ``m2`` minimal in their blocks."""
    if isinstance(v, PairPartition):
        v = v.as_set_partition()
    return kernels.set_partition_stats(v.rgs())[2]


def inversions(p: Permutation | Sequence[int]) -> int:
    images = p.images if isinstance(p, Permutation) else tuple(p)
    n = len(images)
    return sum(1 for i in range(n) for j in range(i + 1, n) if images[i] > images[j])


# ---------------------------------------------------------------------------
# aggregates
# ---------------------------------------------------------------------------

def pair_stat_histogram(n_pairs: int) -> dict:
    """``{(cr, nest): count}`` over ``P_2(2 n_pairs)``."""
    if 2 * n_pairs > PAIR_CAP:
        raise DomainError(f"2n={2 * n_pairs} exceeds the enumeration cap {PAIR_CAP}")
    return kernels.pair_stat_histogram(n_pairs)


def set_partition_table(n: int, statistic: str = "biane_cr") -> dict:
    """``{(block_sizes, stat): count}`` over ``P(n)``; ``statistic`` is
    ``"biane_cr"`` or ``"nica_c0"``."""
    if statistic not in ("biane_cr", "nica_c0"):
        raise DomainError(f"unknown statistic {statistic!r}")
    if n > SET_CAP:
        raise DomainError(f"n={n} exceeds the enumeration cap {SET_CAP}")
    return kernels.set_partition_table(n, statistic)


_STAT_EXPONENT = {
    "cr": lambda cr, ne: cr,
    "nest": lambda cr, ne: ne,
    "e0": lambda cr, ne: ne + 2 * cr,
    "ip_half": lambda cr, ne: cr + ne,
}


def generating_polynomial(n_pairs: int, stat: str = "cr") -> QPoly:
    """``sum over P_2(2n) of q^stat`` for ``stat`` in cr, nest, e0, ip_half."""
    f = _STAT_EXPONENT[stat]
    out = {}
    for (cr, ne), cnt in pair_stat_histogram(n_pairs).items():
        e = f(cr, ne)
        out[e] = out.get(e, 0) + cnt
    return QPoly(out)


# ---------------------------------------------------------------------------
# Wick sums
# ---------------------------------------------------------------------------

class QSWeight:
    """Weight ``s^{ip/2} q^{cr}``; ``q`` and ``s`` may be numbers or polynomials.

    With ``q = s = None`` the weight is the symbolic :class:`QSPoly` monomial.
    """

    def __init__(self, q=None, s=None):
        self.q = q
        self.s = s

    def __call__(self, cr: int, nest: int, ip_: int):
        half = ip_ // 2
        if self.q is None and self.s is None:
            return QSPoly.monomial(cr, half)
        q = QSPoly.q() if self.q is None else self.q
        s = QSPoly.s() if self.s is None else self.s
        return s**half * q**cr


class StatWeight:
    """Weight ``q^{stat}`` with ``stat`` one of ``cr``, ``nest``, ``e0``, ``ip_half``."""

    def __init__(self, stat: str, q=None):
        self.stat = stat
        self.q = q
        self._f = _STAT_EXPONENT[stat]

    def __getstate__(self):
        return {"stat": self.stat, "q": self.q}

    def __setstate__(self, state):
        self.__init__(state["stat"], state["q"])

    def __call__(self, cr: int, nest: int, ip_: int):
        e = self._f(cr, nest)
        if self.q is None:
            return QPoly.monomial(e)
        return self.q**e


class UnitWeight:
    def __call__(self, cr, nest, ip_):
        return 1


def _is_zero(x) -> bool:
    try:
        return x == 0
    except TypeError:
        return False


def _wick_partial(cov, weight, first_partner: int | None):
    """Sum over pair partitions (optionally with point 0 paired to ``first_partner``)."""
    size = len(cov)
    cache: dict = {}
    total = 0

    # arcs stored as closer positions of previously placed arcs (openers increase)
    def rec(free: list, closers: list, cr: int, ne: int, prod):
        nonlocal total
        if not free:
            key = (cr, ne)
            w = cache.get(key)
            if w is None:
                w = cache[key] = weight(cr, ne, 2 * (cr + ne))
            total = total + w * prod
            return
        a = free[0]
        partners = range(1, len(free))
        if first_partner is not None and not closers:
            partners = [free.index(first_partner)]
        for idx in partners:
            b = free[idx]
            c = cov[a][b]
            if _is_zero(c):
                continue
            dcr = dne = 0
            for d in closers:
                if d > b:
                    dne += 1
                elif d > a:
                    dcr += 1
            closers.append(b)
            rec(free[1:idx] + free[idx + 1:], closers, cr + dcr, ne + dne, prod * c if prod is not None else c)
            closers.pop()

    if size == 0:
        return weight(0, 0, 0)
    rec(list(range(size)), [], 0, 0, None)
    return total


def wick_sum(two_n: int, covariance, weight: Callable = None, workers: int = 1):
    """``sum over V in P_2(2n) of weight(cr, nest, ip) * prod_{(i,j) in V} covariance[i][j]``.

    Exact when weights and covariance entries are exact.  Partitions whose
    covariance product vanishes are pruned.  ``workers > 1`` splits the sum by
    the partner of point 1 across processes; the weight must then be picklable.
    """
    if weight is None:
        weight = UnitWeight()
    if two_n % 2 or two_n < 0:
        raise DomainError("two_n must be even and nonnegative")
    if two_n > PAIR_CAP:
        raise DomainError(f"two_n={two_n} exceeds the enumeration cap {PAIR_CAP}")
    cov = [list(row) for row in covariance]
    if len(cov) != two_n or any(len(r) != two_n for r in cov):
        raise DomainError(f"covariance must be {two_n}x{two_n}")
    for i in range(two_n):
        for j in range(i + 1, two_n):
            if cov[i][j] != cov[j][i]:
                raise DomainError("covariance must be symmetric")
    if workers <= 1 or two_n < 6:
        return _wick_partial(cov, weight, None)
    with ProcessPoolExecutor(max_workers=workers) as ex:
        parts = list(ex.map(_wick_partial, [cov] * (two_n - 1), [weight] * (two_n - 1), range(1, two_n)))
    total = 0
    for p in parts:
        total = total + p
    return total


def partition_stats_rows(two_n: int) -> Iterator[dict]:
    """One row per pair partition: pairs, cr, nest, ip, e0."""
    for v in enumerate_pair_partitions(two_n):
        cr, ne = crossings(v), nestings(v)
        yield {"pairs": str(v), "cr": cr, "nest": ne, "ip": ip(v), "e0": ne + 2 * cr}


def partition_stats_csv(two_n: int) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["pairs", "cr", "nest", "ip", "e0"], lineterminator="\n")
    w.writeheader()
    for row in partition_stats_rows(two_n):
        w.writerow(row)
    return buf.getvalue()


def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)


def bell(n: int) -> int:
    row = [1]
    for _ in range(n):
        new = [row[-1]]
        for x in row:
            new.append(new[-1] + x)
        row = new
    return row[0]
