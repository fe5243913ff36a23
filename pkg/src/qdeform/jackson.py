"""q-derivative and Jackson integrals on the lattice ``{+-q^k}``.

All sums are formed in float and added with :func:`math.fsum`; the terms
``q^k f(q^k)`` span many orders of magnitude and naive accumulation loses
the small end.  Every truncated sum carries a tail estimate, and a sum whose
tail cannot be pushed below ``tol`` raises :class:`NonConvergenceError`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .errors import DomainError, NonConvergenceError

SAFETY = 10.0
DEFAULT_WINDOW = (-64, 256)


@dataclass
class LatticeFunction:
    """A function sampled on the q-lattice.

    Either ``evaluator`` is set, or ``table`` maps ``(eps, k)`` with
    ``eps in {1, -1}`` to the value at ``eps * q**k`` for ``k_min <= k <= k_max``.
    Table functions vanish off their window.

    Parameters
    ----------
    evaluator : callable, optional
        ``x -> f(x)``.
    table : mapping, optional
        Lattice values keyed by ``(eps, k)``.
    k_min, k_max : int
        Window of the table.
    zero_value : float
        ``f(0)`` for table functions.
    derivative_at_zero : float, optional
        ``f'(0)``; required by :func:`q_derivative` at ``x = 0``.
    bound : float, optional
        A bound on ``|f|`` near 0, used by the unilateral tail estimate.
    """

    evaluator: Callable | None = None
    table: Mapping | None = None
    k_min: int = 0
    k_max: int = -1
    zero_value: float = 0.0
    derivative_at_zero: float | None = None
    bound: float | None = None
    _q: float | None = field(default=None, repr=False)

    def __post_init__(self):
        if (self.evaluator is None) == (self.table is None):
            raise DomainError("give exactly one of evaluator or table")

    @classmethod
    def from_table(cls, q: float, table: Mapping, zero_value: float = 0.0, **kw) -> "LatticeFunction":
        ks = [k for _, k in table]
        if not ks:
            raise DomainError("empty table")
        return cls(table=dict(table), k_min=min(ks), k_max=max(ks), zero_value=zero_value, _q=q, **kw)

    def at_lattice(self, eps: int, k: int, q: float) -> float:
        if self.table is not None:
            if self._q is not None and q != self._q:
                raise DomainError(f"table was sampled at q={self._q}, not {q}")
            return self.table.get((eps, k), 0.0)
        return self.evaluator(eps * q**k)

    def __call__(self, x: float) -> float:
        if self.evaluator is not None:
            return self.evaluator(x)
        if x == 0:
            return self.zero_value
        eps = 1 if x > 0 else -1
        kf = math.log(abs(x)) / math.log(self._q)
        k = round(kf)
        if abs(kf - k) > 1e-9:
            raise DomainError(f"{x} is not on the q-lattice")
        return self.table.get((eps, k), 0.0)


def as_lattice_function(f) -> LatticeFunction:
    if isinstance(f, LatticeFunction):
        return f
    if callable(f):
        return LatticeFunction(evaluator=f)
    raise TypeError("expected a LatticeFunction or a callable")


def _check_q(q):
    if not 0 < q < 1:
        raise DomainError(f"Jackson integrals need 0 < q < 1, got {q}")


def q_derivative(f, x: float, q: float) -> float:
    """``(f(x) - f(qx)) / (x - qx)``; at ``x = 0`` the supplied ``f'(0)``."""
    f = as_lattice_function(f)
    if x == 0:
        if f.derivative_at_zero is None:
            raise DomainError("q-derivative at 0 needs f.derivative_at_zero")
        return f.derivative_at_zero
    return (f(x) - f(q * x)) / (x - q * x)


def jackson_integral_unilateral(f, x: float, q: float, tol: float = 1e-15,
                                max_terms: int = 200_000) -> float:
    """``(1-q) sum_{k>=0} q^k x f(q^k x)``.

    The tail after ``K`` terms is at most ``M |x| q^K`` where ``M`` bounds
    ``|f|`` on ``[0, q^K x]``.  ``M`` is ``f.bound`` when given, otherwise
    ``SAFETY`` times the largest of the last few sampled values.
    """
    _check_q(q)
    f = as_lattice_function(f)
    terms = []
    recent: list[float] = []
    qk = 1.0
    for k in range(max_terms):
        val = f(qk * x)
        terms.append(qk * val)
        recent = (recent + [abs(val)])[-8:]
        qk *= q
        if k >= 4:
            m = f.bound if f.bound is not None else SAFETY * max(recent)
            if m * abs(x) * qk < tol:
                return (1 - q) * x * math.fsum(terms)
    raise NonConvergenceError(f"unilateral Jackson sum did not settle in {max_terms} terms")


def _term(f, k, q):
    try:
        a = f.at_lattice(1, k, q)
        b = f.at_lattice(-1, k, q)
        t = q**k * (a + b)
    except OverflowError as exc:
        raise NonConvergenceError(f"Jackson term overflows at k={k}") from exc
    if not math.isfinite(t):
        raise NonConvergenceError(f"non-finite Jackson term at k={k}")
    return t


def _tail_negative(terms_neg):
    """Geometric tail estimate for ``k -> -infinity`` from the outermost terms.

    ``terms_neg`` lists terms from the window edge inward.
    """
    edge = [abs(t) for t in terms_neg[:4]]
    if all(t == 0 for t in edge):
        return 0.0
    if edge[1] == 0:
        return math.inf
    r = edge[0] / edge[1]
    if r >= 1:
        return math.inf
    return SAFETY * edge[0] * r / (1 - r)


def jackson_integral_bilateral(f, q: float, tol: float = 1e-15, window: tuple = DEFAULT_WINDOW,
                               max_window: int = 4096) -> float:
    """``(1-q) sum_{k in Z} sum_{eps=+-1} q^k f(eps q^k)``.

    The window ``[k_min, k_max]`` grows until both tails are certified below
    ``tol``: the ``k -> -inf`` tail by a ratio test on the outermost terms,
    the ``k -> +inf`` tail by ``2 M q^{k_max+1} / (1-q)`` with ``M`` a bound
    on ``|f|`` near 0 (``SAFETY`` times the innermost samples when not given).
    """
    _check_q(q)
    f = as_lattice_function(f)
    lo, hi = window
    if f.table is not None:
        lo, hi = min(lo, f.k_min), max(hi, f.k_max)
    cache: dict[int, float] = {}

    def term(k):
        if k not in cache:
            cache[k] = _term(f, k, q)
        return cache[k]

    while True:
        neg_ok = f.table is not None or _tail_negative([term(k) for k in range(lo, lo + 4)]) < tol
        if f.table is not None:
            pos_ok = True
        else:
            inner = max(abs(f.at_lattice(e, k, q)) for e in (1, -1) for k in range(hi - 3, hi + 1))
            m = f.bound if f.bound is not None else SAFETY * inner
            pos_ok = 2 * m * q ** (hi + 1) / (1 - q) < tol
        if neg_ok and pos_ok:
            break
        if hi - lo > max_window:
            raise NonConvergenceError(
                f"bilateral Jackson sum not certified within window [{lo}, {hi}]")
        if not neg_ok:
            lo -= 64
        if not pos_ok:
            hi += 256
    return (1 - q) * math.fsum(term(k) for k in range(lo, hi + 1))


def q_moment_disc(f, n: int, q: float, **kw) -> float:
    """``q^{binom(n,2)} int x^n f(x) d_qx`` over the whole line."""
    if n < 0:
        raise DomainError("moment index must be nonnegative")
    f = as_lattice_function(f)
    if f.table is not None:
        tab = {(e, k): (e * q**k) ** n * v for (e, k), v in f.table.items()}
        g = LatticeFunction.from_table(q, tab, zero_value=0.0 if n else f.zero_value)
    else:
        g = LatticeFunction(evaluator=lambda x: x**n * f(x))
    return q ** math.comb(n, 2) * jackson_integral_bilateral(g, q, **kw)
