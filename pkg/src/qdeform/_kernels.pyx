# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled partition kernels; same API as ``_kernels_py``."""

from libc.stdlib cimport calloc, free
from libc.string cimport memset


cdef void _walk(int pos, int m, int cr, int nest, int total, int width,
                long long *hist) nogil:
    cdef int i
    if pos == total:
        hist[cr * width + nest] += 1
        return
    if m + 1 <= total - pos - 1:
        _walk(pos + 1, m + 1, cr, nest, total, width, hist)
    for i in range(m):
        _walk(pos + 1, m - 1, cr + m - 1 - i, nest + i, total, width, hist)


def pair_stat_histogram(int n_pairs):
    """Histogram ``{(cr, nest): count}`` over all pair partitions of ``2 * n_pairs`` points."""
    cdef int width = n_pairs * (n_pairs - 1) // 2 + 1 if n_pairs > 0 else 1
    cdef long long *hist = <long long *> calloc(width * width, sizeof(long long))
    cdef int a, b
    if hist == NULL:
        raise MemoryError()
    try:
        with nogil:
            _walk(0, 0, 0, 0, 2 * n_pairs, width, hist)
        out = {}
        for a in range(width):
            for b in range(width):
                if hist[a * width + b]:
                    out[(a, b)] = hist[a * width + b]
        return out
    finally:
        free(hist)


cdef void _stats(int n, int *rgs, int *first, int *nxt, int *size,
                 int *rcr_out, int *c0_out) nogil:
    """Restricted crossings and c0 from an RGS; ``first``/``nxt``/``size`` are scratch."""
    cdef int i, j, b, nb = 0, rcr = 0, c0 = 0, m3, m4, bi, bj
    cdef int last[64]
    for i in range(n):
        nxt[i] = -1
        if rgs[i] + 1 > nb:
            nb = rgs[i] + 1
    for b in range(nb):
        first[b] = -1
        size[b] = 0
        last[b] = -1
    for i in range(n):
        b = rgs[i]
        if first[b] < 0:
            first[b] = i
        else:
            nxt[last[b]] = i
        last[b] = i
        size[b] += 1
    # arcs are (i, nxt[i]); count a < c < b < d
    for i in range(n):
        if nxt[i] < 0:
            continue
        for j in range(i + 1, nxt[i]):
            if nxt[j] > nxt[i]:
                rcr += 1
    # c0: m1 = min A < m2 = min B < m3 in A < m4 in B
    for bi in range(nb):
        for bj in range(nb):
            if first[bi] >= first[bj]:
                continue
            m3 = first[bi]
            while m3 >= 0:
                if m3 > first[bj]:
                    m4 = first[bj]
                    while m4 >= 0:
                        if m4 > m3:
                            c0 += 1
                        m4 = nxt[m4]
                m3 = nxt[m3]
    rcr_out[0] = rcr
    c0_out[0] = c0


def set_partition_stats(rgs):
    """Block sizes (descending), restricted crossings and Nica's ``c0`` of an RGS."""
    cdef int n = len(rgs)
    cdef int a[64]
    cdef int first[64]
    cdef int nxt[64]
    cdef int size[64]
    cdef int rcr = 0, c0 = 0, i, nb
    if n > 64:
        raise ValueError("at most 64 points")
    for i in range(n):
        a[i] = rgs[i]
    _stats(n, a, first, nxt, size, &rcr, &c0)
    nb = (max(rgs) + 1) if n else 0
    sizes = tuple(sorted((size[i] for i in range(nb)), reverse=True))
    return sizes, rcr, c0


def set_partition_table(int n, str statistic):
    """``{(block_sizes, stat): count}`` over all set partitions of ``n`` points."""
    cdef int which
    if statistic == "biane_cr":
        which = 1
    elif statistic == "nica_c0":
        which = 2
    else:
        raise KeyError(statistic)
    if n > 30:
        raise ValueError("n too large")
    if n == 0:
        return {((), 0): 1}
    cdef int a[64]
    cdef int bmax[64]
    cdef int first[64]
    cdef int nxt[64]
    cdef int size[64]
    cdef int srt[64]
    cdef int i, j, k, t, nb, rcr, c0, stat
    cdef long long code
    counts = {}
    memset(a, 0, sizeof(a))
    bmax[0] = 1
    for i in range(1, n):
        bmax[i] = 1
    while True:
        _stats(n, a, first, nxt, size, &rcr, &c0)
        stat = rcr if which == 1 else c0
        nb = 0
        for i in range(n):
            if a[i] + 1 > nb:
                nb = a[i] + 1
        # insertion sort of block sizes, descending
        for i in range(nb):
            t = size[i]
            j = i
            while j > 0 and srt[j - 1] < t:
                srt[j] = srt[j - 1]
                j -= 1
            srt[j] = t
        code = 0
        for i in range(nb):
            code = code * (n + 1) + srt[i]
        key = (code, nb, stat)
        counts[key] = counts.get(key, 0) + 1
        # next RGS
        i = n - 1
        while i > 0 and a[i] == bmax[i]:
            i -= 1
        if i == 0:
            break
        a[i] += 1
        for j in range(i + 1, n):
            a[j] = 0
            bmax[j] = bmax[j - 1] if bmax[j - 1] > a[j - 1] + 1 else a[j - 1] + 1
    out = {}
    for (code, nb, stat), cnt in counts.items():
        parts = []
        for k in range(nb):
            parts.append(code % (n + 1))
            code //= n + 1
        out[(tuple(reversed(parts)), stat)] = cnt
    return out
