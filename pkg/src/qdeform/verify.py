"""Cross-validation checks, one per target.

Every check compares two independent routes to the same quantity and
returns a :class:`CheckResult` whose rows record each comparison.  The
command-line ``verify`` and ``verify-all`` subcommands and the acceptance
tests are thin wrappers around this module.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cumulants import positivity_scan
from .fock import (
    build_fock,
    commutation_residual,
    gaussian_norm_estimate,
    truncated_gaussian_norm,
    vacuum_wick,
    wick_table,
)
from .khintchine import boolean_omegas, khintchine_lhs, khintchine_rhs, random_alphas, tt_star_blocks
from .orthopoly import (
    continuous_mass,
    jacobi_data,
    moments_from_jacobi,
    orthogonality_check_continuous,
    orthogonality_check_discrete,
)
from .partitions import QSWeight, crossings, enumerate_pair_partitions, generating_polynomial, ip, nestings, wick_sum
from .qconv import (
    BraidedElement,
    ck_convolve_moments,
    ck_convolve_polynomial,
    ck_convolve_table,
    km_convolve,
    lattice_moment,
)
from .qexact import E_q_series, QPoly, double_factorial, e_q_series, q_integer


@dataclass
class CheckResult:
    target: str
    passed: bool
    seconds: float
    summary: str
    rows: list = field(default_factory=list)


def _row(check, params, expected, observed, passed):
    return {"check": check, "params": params, "expected": str(expected),
            "observed": str(observed), "passed": bool(passed)}


def _finish(target, rows, start, summary, extra_ok=True):
    ok = extra_ok and all(r["passed"] for r in rows)
    return CheckResult(target, ok, time.perf_counter() - start, summary, rows)


# ---------------------------------------------------------------------------

def check_partitions(n: int = 6) -> CheckResult:
    """``cr + nest = ip / 2`` on every pair partition of ``2k`` points, ``k <= n``."""
    start = time.perf_counter()
    rows = []
    for k in range(1, n + 1):
        bad = count = 0
        for v in enumerate_pair_partitions(2 * k):
            count += 1
            if 2 * (crossings(v) + nestings(v)) != ip(v):
                bad += 1
        rows.append(_row("cr+nest=ip/2", f"n={k}", 0, bad, bad == 0))
        rows.append(_row("count", f"n={k}", double_factorial(k), count, count == double_factorial(k)))
        cr, ne = generating_polynomial(k, "cr"), generating_polynomial(k, "nest")
        rows.append(_row("cr~nest", f"n={k}", cr, ne, cr == ne))
    return _finish("partitions", rows, start, f"{sum(r['passed'] for r in rows)}/{len(rows)} identities")


def _pattern(word):
    seen = {}
    return tuple(seen.setdefault(a, len(seen)) for a in word)


def check_wick(max_two_n: int = 8, max_dim: int = 3) -> CheckResult:
    """Fock vacuum moments against the partition sum ``s^{ip/2} q^{cr}``, symbolic ``(q, s)``."""
    start = time.perf_counter()
    rows = []
    weight = QSWeight()
    for dim in range(1, max_dim + 1):
        for two_n in range(2, max_two_n + 1, 2):
            rep = build_fock(dim, two_n // 2)
            table = wick_table(rep, two_n)
            cache = {}
            bad = 0
            for word, val in table.items():
                key = _pattern(word)
                if key not in cache:
                    cov = [[int(a == b) for b in key] for a in key]
                    cache[key] = wick_sum(two_n, cov, weight)
                if val != cache[key]:
                    bad += 1
            rows.append(_row("fock=wick_sum", f"dim_h={dim},2n={two_n}", f"{len(table)} words",
                             f"{bad} mismatches", bad == 0))
    return _finish("wick", rows, start, f"{len(rows)} (dim_h, 2n) tables")


def check_moments(n: int = 6) -> CheckResult:
    """``sum q^{e0} = prod [2k-1]_q =`` Jacobi moment of the discrete type I recurrence."""
    start = time.perf_counter()
    rows = []
    jac = jacobi_data("discrete_I", n)
    for k in range(1, n + 1):
        a = generating_polynomial(k, "e0")
        b = QPoly(1)
        for j in range(1, k + 1):
            b = b * q_integer(2 * j - 1)
        c = moments_from_jacobi(jac, 2 * k)
        rows.append(_row("sum q^e0 = prod [2k-1]", f"n={k}", b, a, a == b))
        rows.append(_row("jacobi = prod [2k-1]", f"n={k}", b, c, c == b))
    return _finish("moments", rows, start, f"n <= {n}")


_RELATIONS = {"qccr": Fraction(1, 2), "qdisc": Fraction(1, 2), "inverse": Fraction(2)}


def check_commutation(cutoff: int = 5, dim: int = 3, tol: float = 1e-10) -> CheckResult:
    """Deformed commutation relations below the truncation edge, exact and float."""
    start = time.perf_counter()
    rows = []
    rng = random.Random(0)
    basis = [[int(i == j) for j in range(dim)] for i in range(dim)]
    extra = [[Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(dim)] for _ in range(2)]
    vectors = basis + extra
    for flavor, qv in _RELATIONS.items():
        exact = build_fock(dim, cutoff, qv, flavor=flavor)
        flt = build_fock(dim, cutoff, float(qv), flavor=flavor, backend="float")
        worst_exact = max(commutation_residual(exact, f, g) for f in vectors for g in vectors)
        fl_vectors = [[float(x) for x in v] for v in vectors]
        worst_float = max(commutation_residual(flt, f, g) for f in fl_vectors for g in fl_vectors)
        rows.append(_row("exact residual", f"{flavor},q={qv}", 0, worst_exact, worst_exact == 0))
        rows.append(_row("float residual", f"{flavor},q={float(qv)}", f"<{tol}", worst_float, worst_float < tol))
    return _finish("commutation", rows, start, f"cutoff={cutoff}, dim_h={dim}")


def check_exponential(order: int = 30) -> CheckResult:
    """``e_q(z) E_q(-z) = 1`` as truncated series."""
    start = time.perf_counter()
    prod = e_q_series(order) * E_q_series(order).negate_argument()
    ok = prod == 1
    bad = [k for k in range(1, order + 1) if not prod[k] == 0]
    rows = [_row("e_q(z)E_q(-z)=1", f"order={order}", "1", f"nonzero at {bad}" if bad else "1", ok)]
    return _finish("exponential", rows, start, f"order {order}")


def check_discrete(n: int = 4, qs=(0.3, 0.5, 0.8), tol: float = 1e-8) -> CheckResult:
    """Jackson-integral Grams of the type I and II families."""
    start = time.perf_counter()
    rows = []
    for kind in ("I", "II"):
        for qv in qs:
            off = max((orthogonality_check_discrete(kind, a, b, qv).offdiag_residual
                       for a in range(n + 1) for b in range(a + 1, n + 1)), default=0.0)
            ratios = [orthogonality_check_discrete(kind, a, a, qv).diag_ratio for a in range(n + 1)]
            spread = max(abs(r / ratios[0] - 1) for r in ratios)
            rows.append(_row("offdiag", f"type {kind},q={qv}", f"<{tol}", f"{off:.3e}", off < tol))
            rows.append(_row("diag ratio constant", f"type {kind},q={qv}", f"<{tol}", f"{spread:.3e}",
                             spread < tol))
    return _finish("discrete", rows, start, f"n <= {n}")


def check_continuous(n: int = 4, qs=(0.0, 0.5), tol: float = 1e-5, mass_tol: float = 1e-6) -> CheckResult:
    """Quadrature Grams against ``[n]_q! delta_nm`` and total mass."""
    start = time.perf_counter()
    rows = []
    for qv in qs:
        worst = max(orthogonality_check_continuous(a, b, qv) for a in range(n + 1) for b in range(n + 1))
        mass = continuous_mass(qv)
        rows.append(_row("gram", f"q={qv}", f"<{tol}", f"{worst:.3e}", worst < tol))
        rows.append(_row("mass", f"q={qv}", 1, repr(mass), abs(mass - 1) < mass_tol))
    return _finish("continuous", rows, start, f"n, m <= {n}")


_F_TAB = {(1, 0): Fraction(1, 2), (-1, 1): Fraction(1, 3), (1, -1): Fraction(1, 4)}
_G_TAB = {(1, 1): 1, (-1, 0): Fraction(2, 3), (1, 2): Fraction(-1, 5), (-1, -2): Fraction(1, 7)}


def check_conv(degree: int = 6, length: int = 8, seed: int = 0) -> CheckResult:
    """Moment formula, algebra laws, the ``q = 1`` and ``q = 0`` limits, and the braided composite."""
    start = time.perf_counter()
    rows = []
    q = QPoly.q()
    # function level: moments of f * g from lattice tables
    for order in range(degree + 1):
        h = ck_convolve_table(_F_TAB, _G_TAB, None, order)
        mf = [lattice_moment(_F_TAB, k, None) for k in range(order + 1)]
        mg = [lattice_moment(_G_TAB, k, None) for k in range(order + 1)]
        pred = ck_convolve_moments(mf, mg)
        ok = all(lattice_moment(h, k, None) == pred[k] for k in range(order + 1))
        rows.append(_row("moment formula", f"order={order}", "equal", "equal" if ok else "differ", ok))
    rng = random.Random(seed)
    seqs = [[Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(length)] for _ in range(3)]
    a, b, c = seqs
    ab = ck_convolve_moments(a, b)
    rows.append(_row("commutative", f"length={length}", "", "", ab.values == ck_convolve_moments(b, a).values))
    rows.append(_row("associative", f"length={length}", "", "",
                     ck_convolve_moments(ab, c).values == ck_convolve_moments(a, ck_convolve_moments(b, c)).values))
    one = ck_convolve_moments(a, b, 1).values
    binom = tuple(sum(math.comb(n, k) * a[k] * b[n - k] for k in range(n + 1)) for n in range(length))
    rows.append(_row("q=1 binomial", f"length={length}", "", "", one == binom))
    zero = ck_convolve_moments(a, b, 0).values
    boolean = tuple(sum(a[k] * b[n - k] for k in range(n + 1)) for n in range(length))
    rows.append(_row("q=0 boolean", f"length={length}", "", "", zero == boolean))
    # q = 1 polynomial level: E g(x - Y) for a finite law
    atoms = [(Fraction(-1), Fraction(1, 4)), (Fraction(1, 2), Fraction(1, 2)), (Fraction(2), Fraction(1, 4))]
    fm = [sum(p * y**n for y, p in atoms) for n in range(degree + 1)]
    g = [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(degree + 1)]
    out = ck_convolve_polynomial(fm, g, 1)
    ok = all(sum(cf * x**k for k, cf in enumerate(out))
             == sum(p * sum(cf * (x - y) ** k for k, cf in enumerate(g)) for y, p in atoms)
             for x in (Fraction(0), Fraction(1, 3), Fraction(-2)))
    rows.append(_row("q=1 classical polynomial", f"degree={degree}", "", "", ok))
    fm_sym = (1, Fraction(1, 2), q, Fraction(-1, 3), 1 + q, 2, Fraction(1, 7))[: degree + 1]
    for d in range(degree + 1):
        gg = BraidedElement([Fraction(k + 1, 2) if k % 2 else q**k for k in range(d + 1)], d)
        ok = km_convolve(fm_sym[: d + 1], gg) == BraidedElement(ck_convolve_polynomial(fm_sym[: d + 1],
                                                                                       list(gg.coeffs)), d)
        rows.append(_row("braided composite = convolution", f"degree={d}", "", "", ok))
    return _finish("conv", rows, start, f"degree <= {degree}, length {length}")


def check_khintchine(trials: int = 50, seed: int = 0, max_size: int = 8, max_n: int = 6,
                     tol: float = 1e-9) -> CheckResult:
    """Boolean equality over seeded random complex coefficients, and the exact ``T T^*`` blocks."""
    start = time.perf_counter()
    rows = []
    streams = np.random.SeedSequence(seed).spawn(trials)
    worst = 0.0
    for t, ss in enumerate(streams):
        gen = np.random.default_rng(ss)
        N = 1 + t % max_n
        size = 1 + (t * 5) % max_size
        alphas = random_alphas(gen, N, size)
        lhs, rhs = khintchine_lhs(alphas, boolean_omegas(N)), khintchine_rhs(alphas)
        worst = max(worst, abs(lhs - rhs) / rhs)
    rows.append(_row("lhs=rhs", f"trials={trials},seed={seed}", f"<{tol}", f"{worst:.3e}", worst < tol))
    # Gaussian-integer entries: products and sums are exact in binary floating point
    rng = random.Random(seed)
    for N, size in [(1, 3), (3, 4), (max_n, max_size)]:
        alphas = [np.array([[complex(rng.randint(-9, 9), rng.randint(-9, 9)) for _ in range(size)]
                            for _ in range(size)]) for _ in range(N)]
        tts, a_blk, b_blk = tt_star_blocks(alphas)
        ok = ((tts[:size, :size] == a_blk).all() and (tts[size:, size:] == b_blk).all()
              and not tts[:size, size:].any() and not tts[size:, :size].any())
        rows.append(_row("TT* = diag(A, B)", f"N={N},size={size}", "exact", "exact" if ok else "differ", ok))
    return _finish("khintchine", rows, start, f"{trials} trials")


def check_limits(max_n: int = 4, norm_cutoff: int = 30, tol: float = 1e-3) -> CheckResult:
    """Classical, free and Boolean limits of the Fock constructions."""
    start = time.perf_counter()
    rows = []
    for n in range(1, max_n + 1):
        m = vacuum_wick(build_fock(1, n, 1, flavor="qccr"), [[1]] * (2 * n))
        rows.append(_row("q=1 gaussian", f"2n={2 * n}", double_factorial(n), m, m == double_factorial(n)))
        m = vacuum_wick(build_fock(1, n, 0, flavor="qccr"), [[1]] * (2 * n))
        cat = math.comb(2 * n, n) // (n + 1)
        rows.append(_row("q=0 catalan", f"2n={2 * n}", cat, m, m == cat))
        m = vacuum_wick(build_fock(1, n, 0, flavor="qdisc"), [[1]] * (2 * n))
        rows.append(_row("boolean", f"2n={2 * n}", 1, m, m == 1))
    est = gaussian_norm_estimate(build_fock(1, norm_cutoff, 0.0, flavor="qccr", backend="float"), [1.0])
    raw = est.values[-1]
    rows.append(_row("free norm estimate", f"cutoff={norm_cutoff}", 2,
                     f"extrapolated={est.extrapolated!r} raw={raw!r}", abs(est.extrapolated - 2) < tol))
    bnorm = truncated_gaussian_norm(build_fock(1, 4, 0.0, flavor="qdisc", backend="float"), [1.0])
    rows.append(_row("boolean norm", "cutoff=4", 1, repr(bnorm), bnorm == 1.0))
    return _finish("limits", rows, start, f"free norm raw {raw:.6f}, extrapolated {est.extrapolated:.6f}")


def check_positivity(depth: int = 5, intermediate=(Fraction(1, 2), Fraction(-1, 2))) -> CheckResult:
    """Hankel scans of ``*_q`` convolutions: clean at ``q in {0, 1}``, reproducible elsewhere."""
    start = time.perf_counter()
    rows = []
    bern = ("bernoulli", [1, 2])
    gau = ("gaussian", [1, Fraction(1, 2)])
    for qv in (0, 1):
        recs = positivity_scan(bern, gau, [qv], depth) + positivity_scan(bern, bern, [qv], depth)
        bad = sum(not r.psd for r in recs)
        rows.append(_row("no violations", f"q={qv},depth={depth}", 0, bad, bad == 0))
    first = [r.to_json() for r in positivity_scan(bern, gau, list(intermediate), depth)]
    second = [r.to_json() for r in positivity_scan(bern, gau, list(intermediate), depth)]
    violations = sum('"psd": false' in j for j in first)
    rows.append(_row("reproducible", f"q={[str(x) for x in intermediate]}", "identical",
                     f"{len(first)} records, {violations} violations", first == second))
    return _finish("positivity", rows, start,
                   f"depth {depth}; {violations} violations certified at intermediate q")


CHECKS = {
    "partitions": check_partitions,
    "wick": check_wick,
    "moments": check_moments,
    "commutation": check_commutation,
    "exponential": check_exponential,
    "discrete": check_discrete,
    "continuous": check_continuous,
    "conv": check_conv,
    "khintchine": check_khintchine,
    "limits": check_limits,
    "positivity": check_positivity,
}


def run_all() -> list[CheckResult]:
    return [fn() for fn in CHECKS.values()]
