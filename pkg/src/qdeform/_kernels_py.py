"""Pure-Python partition kernels.

Reference implementation of the compiled ``_kernels`` extension; the two must
return identical results (``tests/test_kernels.py`` compares them).
"""

from __future__ import annotations

from collections import Counter


def pair_stat_histogram(n_pairs: int) -> dict:
    """Histogram ``{(cr, nest): count}`` over all pair partitions of ``2 * n_pairs`` points.

    Points are scanned left to right.  Closing the ``i``-th oldest of ``m`` open
    arcs nests it inside the ``i`` older ones and crosses the ``m - 1 - i``
    younger ones.
    """
    hist: Counter = Counter()
    total = 2 * n_pairs
    # stack entries: (position, open_count, cr, nest)
    stack = [(0, 0, 0, 0)]
    while stack:
        pos, m, cr, nest = stack.pop()
        if pos == total:
            hist[(cr, nest)] += 1
            continue
        remaining = total - pos
        if m + 1 <= remaining - 1:
            stack.append((pos + 1, m + 1, cr, nest))
        for i in range(m):
            stack.append((pos + 1, m - 1, cr + m - 1 - i, nest + i))
    return dict(hist)


def _rgs_iter(n: int):
    """Restricted growth strings of length ``n`` (one per set partition)."""
    if n == 0:
        yield []
        return
    a = [0] * n
    b = [1] * n  # b[i] = max(a[:i]) + 1
    while True:
        yield a
        i = n - 1
        while i > 0 and a[i] == b[i]:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        for j in range(i + 1, n):
            a[j] = 0
            b[j] = max(b[j - 1], a[j - 1] + 1)


def set_partition_stats(rgs) -> tuple:
    """Block sizes (descending), restricted crossings and Nica's ``c0`` of an RGS."""
    n = len(rgs)
    nb = max(rgs) + 1 if n else 0
    blocks = [[] for _ in range(nb)]
    for i, b in enumerate(rgs):
        blocks[b].append(i)
    arcs = []
    for blk in blocks:
        for x, y in zip(blk, blk[1:]):
            arcs.append((x, y))
    rcr = 0
    for a, b in arcs:
        for c, d in arcs:
            if a < c < b < d:
                rcr += 1
    c0 = 0
    for A in blocks:
        for B in blocks:
            if A[0] >= B[0]:
                continue
            for m3 in A:
                if m3 > B[0]:
                    c0 += sum(1 for m4 in B if m4 > m3)
    sizes = tuple(sorted((len(b) for b in blocks), reverse=True))
    return sizes, rcr, c0


def set_partition_table(n: int, statistic: str) -> dict:
    """``{(block_sizes, stat): count}`` over all set partitions of ``n`` points."""
    idx = {"biane_cr": 1, "nica_c0": 2}[statistic]
    table: Counter = Counter()
    for rgs in _rgs_iter(n):
        st = set_partition_stats(rgs)
        table[(st[0], st[idx])] += 1
    return dict(table)
