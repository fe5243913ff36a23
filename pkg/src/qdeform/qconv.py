"""Discrete q-convolution on moments and functions, and the braided line.

Moment level::

    m_n(f (x)_q g) = sum_k [n, k]_q m_k(f) m_{n-k}(g)

with ``m_n(f) = q^{binom(n,2)} int f(x) x^n d_qx`` (:func:`qdeform.jackson.q_moment_disc`).

Function level the convolution is the series
``sum_n (-1)^n c_n(f) / [n]_q! (delta_q^n g)``.  Summation by parts on the
lattice gives ``m_N(delta_q h) = -q^{-1} [N]_q m_{N-1}(h)``, so the moment
formula above holds for the coefficient ``c_n = q^n m_n(f)`` (the default,
``coefficient="dilated"``).  With ``c_n = m_n(f)`` (``"printed"``) the moments
come out as ``sum_k [n,k]_q q^{-k} m_k(f) m_{n-k}(g)`` instead.  The braided
composite ``g -> (f (x) id)(m (x) id)(id (x) Q (x) id)(id (x) S (x) id)(id (x) Delta) g``
with ``Q h(x) = h(qx)`` produces the dilated coefficient.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .cumulants import MomentSequence
from .errors import DomainError
from .jackson import q_moment_disc
from .qexact import QPoly, QRational, QSeries, gauss_binomial, eval_at_q, q_factorial

COEFFICIENTS = ("dilated", "printed")


def _resolve_q(q):
    return QPoly.q() if q is None or q == "symbolic" else q


def _gauss(n, k, q):
    g = gauss_binomial(n, k)
    return g if isinstance(q, QPoly) else eval_at_q(g, q)


def _qpow(q, k: int):
    """``q**k`` for any integer ``k``; symbolic negative powers become QRational."""
    if k >= 0:
        return q**k
    if isinstance(q, QPoly):
        return QRational(1, q ** (-k))
    if isinstance(q, int):
        return Fraction(1, q ** (-k))
    return 1 / q ** (-k)


def _qfact(n, q):
    f = q_factorial(n)
    return f if isinstance(q, QPoly) else eval_at_q(f, q)


def _values(m):
    return tuple(m.values) if isinstance(m, MomentSequence) else tuple(m)


# ---------------------------------------------------------------------------
# moment level
# ---------------------------------------------------------------------------

def ck_convolve_moments(a, b, q=None) -> MomentSequence:
    """``m_n = sum_k [n,k]_q a_k b_{n-k}``; exact for exact inputs.

    ``q=None`` keeps ``q`` symbolic.
    """
    q = _resolve_q(q)
    av, bv = _values(a), _values(b)
    if len(av) != len(bv):
        raise DomainError("moment sequences must have equal length")
    out = []
    for n in range(len(av)):
        total = 0
        for k in range(n + 1):
            if av[k] == 0 or bv[n - k] == 0:
                continue
            total = total + _gauss(n, k, q) * av[k] * bv[n - k]
        out.append(total)
    return MomentSequence(tuple(out), "ck_convolution")


def _coefficients(f_moments: Sequence, q, coefficient: str):
    if coefficient not in COEFFICIENTS:
        raise DomainError(f"coefficient must be one of {COEFFICIENTS}")
    if coefficient == "printed":
        return list(f_moments)
    return [q**n * m for n, m in enumerate(f_moments)]


# ---------------------------------------------------------------------------
# function level
# ---------------------------------------------------------------------------

def ck_convolve_polynomial(f_moments, g_coeffs: Sequence, q=None, coefficient: str = "dilated") -> list:
    """Exact series for polynomial ``g = sum_k g_k x^k``; returns the coefficients in ``x``.

    ``delta_q x^k = [k]_q x^{k-1}``, so the series stops after ``deg g`` terms.
    """
    q = _resolve_q(q)
    fm = _values(f_moments)
    d = len(g_coeffs) - 1
    if len(fm) <= d:
        raise DomainError(f"need moments m_0..m_{d} of f")
    c = _coefficients(fm[: d + 1], q, coefficient)
    out = [0] * (d + 1)
    for k, gk in enumerate(g_coeffs):
        if gk == 0:
            continue
        for n in range(k + 1):
            term = _gauss(k, n, q) * c[n] * gk
            out[k - n] = out[k - n] + (term if n % 2 == 0 else -term)
    return out


def lattice_q_derivatives(g, x: float, q: float, order: int) -> list[float]:
    """``[g(x), delta_q g(x), ..., delta_q^order g(x)]`` by nested difference quotients."""
    if x == 0:
        raise DomainError("iterated q-derivatives are taken at x != 0")
    vals = [g(q**k * x) for k in range(order + 1)]
    out = [vals[0]]
    level = vals
    for n in range(1, order + 1):
        level = [(level[k] - level[k + 1]) / ((1 - q) * q**k * x) for k in range(len(level) - 1)]
        out.append(level[0])
    return out


def table_q_derivative(table: Mapping, q) -> dict:
    """``delta_q`` of a finitely supported lattice table ``{(eps, k): value}``.

    Works for float, rational or symbolic ``q``.  The support grows by one
    step towards infinity (``k -> k - 1``).
    """
    out = {}
    keys = set(table) | {(e, k - 1) for e, k in table}
    for e, k in keys:
        diff = table.get((e, k), 0) - table.get((e, k + 1), 0)
        if diff == 0:
            continue
        out[(e, k)] = diff / ((1 - q) * _qpow(q, k) * e)
    return out


def lattice_moment(table: Mapping, n: int, q) -> object:
    """``q^{binom(n,2)} (1-q) sum q^k (eps q^k)^n v`` for a finitely supported table.

    Exact for rational or symbolic ``q``; float otherwise.
    """
    q = _resolve_q(q)
    total = 0
    for (e, k), v in table.items():
        if v == 0:
            continue
        total = total + _qpow(q, k * (n + 1)) * (e**n) * v
    return total * (1 - q) * q ** math.comb(n, 2)


def ck_convolve_table(f, g_table: Mapping, q=None, order: int | None = None,
                      coefficient: str = "dilated") -> dict:
    """Function-level convolution with a finitely supported lattice ``g``.

    ``f`` is either a moment sequence ``m_0..m_order`` or a lattice table.
    Terms past ``order`` do not change moments ``m_N`` with ``N <= order``.
    """
    q = _resolve_q(q)
    if isinstance(f, Mapping):
        if order is None:
            raise DomainError("order is required when f is a table")
        fm = [lattice_moment(f, n, q) for n in range(order + 1)]
    else:
        fm = list(_values(f))
        order = len(fm) - 1 if order is None else order
        if len(fm) <= order:
            raise DomainError(f"need moments m_0..m_{order} of f")
    c = _coefficients(fm[: order + 1], q, coefficient)
    out: dict = {}
    deriv = dict(g_table)
    for n in range(order + 1):
        scale = c[n] / _qfact(n, q)
        if n % 2:
            scale = -scale
        for key, v in deriv.items():
            out[key] = out.get(key, 0) + scale * v
        deriv = table_q_derivative(deriv, q)
    return out


def ck_convolve_functions(f, g, q: float, order: int, coefficient: str = "dilated") -> Callable:
    """Truncated series ``sum_{n <= order} (-1)^n c_n / [n]_q! delta_q^n g``.

    Parameters
    ----------
    f : LatticeFunction, callable or moment sequence
        Lattice functions and callables go through :func:`q_moment_disc`.
    g : callable, polynomial coefficient list, or lattice table
        A callable is differentiated by nested lattice differences and the
        result is a callable.  A coefficient list gives exact coefficients,
        a ``{(eps, k): value}`` mapping gives a table.
    q : float
    order : int
        Highest derivative kept.
    """
    if isinstance(f, (MomentSequence, list, tuple)):
        fm = list(_values(f))[: order + 1]
    else:
        fm = [q_moment_disc(f, n, q) for n in range(order + 1)]
    if len(fm) <= order:
        raise DomainError(f"need moments m_0..m_{order} of f")
    if isinstance(g, Mapping):
        return ck_convolve_table(fm, g, q, order, coefficient)
    if isinstance(g, (list, tuple)):
        return ck_convolve_polynomial(fm, g, q, coefficient)
    if not 0 < q < 1:
        raise DomainError("numeric q-derivatives need 0 < q < 1")
    c = _coefficients(fm, q, coefficient)
    weights = [(-1) ** n * c[n] / float(eval_at_q(q_factorial(n), float(q))) for n in range(order + 1)]

    def h(x):
        return math.fsum(w * d for w, d in zip(weights, lattice_q_derivatives(g, x, q, order)))

    return h


# ---------------------------------------------------------------------------
# braided line
# ---------------------------------------------------------------------------

class BraidedElement:
    """Truncated power series ``sum_k c_k x^k``, ``k <= order``."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs, order: int | None = None):
        coeffs = list(coeffs)
        order = len(coeffs) - 1 if order is None else order
        if order < 0:
            raise DomainError("order must be nonnegative")
        self.coeffs = tuple(coeffs[: order + 1] + [0] * (order + 1 - len(coeffs)))
        self.order = order

    @classmethod
    def monomial(cls, k: int, order: int, coeff=1) -> "BraidedElement":
        return cls([0] * k + [coeff], order)

    @classmethod
    def from_series(cls, s: QSeries) -> "BraidedElement":
        return cls(s.coeffs, s.order)

    def _check(self, other):
        if self.order != other.order:
            raise DomainError(f"truncation orders differ: {self.order} vs {other.order}")

    def __add__(self, other):
        self._check(other)
        return BraidedElement([a + b for a, b in zip(self.coeffs, other.coeffs)], self.order)

    def __sub__(self, other):
        self._check(other)
        return BraidedElement([a - b for a, b in zip(self.coeffs, other.coeffs)], self.order)

    def __mul__(self, other):
        if not isinstance(other, BraidedElement):
            return BraidedElement([c * other for c in self.coeffs], self.order)
        self._check(other)
        out = [0] * (self.order + 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j in range(self.order + 1 - i):
                if other.coeffs[j] != 0:
                    out[i + j] = out[i + j] + a * other.coeffs[j]
        return BraidedElement(out, self.order)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, BraidedElement):
            return self.order == other.order and all(a - b == 0 for a, b in zip(self.coeffs, other.coeffs))
        if isinstance(other, (int, QPoly, QRational)):
            return self == BraidedElement([other], self.order)
        return NotImplemented

    __hash__ = None

    def __repr__(self):
        return f"BraidedElement({list(self.coeffs)!r}, order={self.order})"


class TensorElement:
    """``sum c_{ij} x^i (x) x^j`` in normal form (merged, zero terms dropped)."""

    __slots__ = ("terms", "order")

    def __init__(self, terms: Mapping | None = None, order: int = 0):
        self.order = order
        self.terms = {}
        for key, c in (terms or {}).items():
            if not (isinstance(c, (int,)) and c == 0) and not _is_zero(c):
                self.terms[key] = c

    def __add__(self, other):
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, 0) + c
        return TensorElement(out, self.order)

    def __eq__(self, other):
        if not isinstance(other, TensorElement):
            return NotImplemented
        keys = set(self.terms) | set(other.terms)
        return all(self.terms.get(k, 0) - other.terms.get(k, 0) == 0 for k in keys)

    __hash__ = None

    def __mul__(self, other: "TensorElement") -> "TensorElement":
        """Braided product ``(a (x) b)(c (x) d) = q^{|b||c|} ac (x) bd``."""
        q = QPoly.q()
        out: dict = {}
        for (a, b), c1 in self.terms.items():
            for (c, d), c2 in other.terms.items():
                if a + c > self.order or b + d > self.order:
                    continue
                key = (a + c, b + d)
                out[key] = out.get(key, 0) + q ** (b * c) * c1 * c2
        return TensorElement(out, self.order)

    @classmethod
    def from_pair(cls, left: BraidedElement, right: BraidedElement) -> "TensorElement":
        left._check(right)
        return cls({(i, j): a * b for i, a in enumerate(left.coeffs) for j, b in enumerate(right.coeffs)
                    if a != 0 and b != 0}, left.order)

    def map_left(self, fn) -> "TensorElement":
        return TensorElement({(i, j): fn(i) * c for (i, j), c in self.terms.items()}, self.order)

    def contract_left(self, functional) -> BraidedElement:
        """Apply a linear functional ``x^i -> functional(i)`` to the left leg."""
        out = [0] * (self.order + 1)
        for (i, j), c in self.terms.items():
            out[j] = out[j] + functional(i) * c
        return BraidedElement(out, self.order)

    def multiply(self) -> BraidedElement:
        out = [0] * (self.order + 1)
        for (i, j), c in self.terms.items():
            if i + j <= self.order:
                out[i + j] = out[i + j] + c
        return BraidedElement(out, self.order)

    def __repr__(self):
        return f"TensorElement({self.terms!r})"


def _is_zero(c):
    if isinstance(c, (QPoly, QRational)):
        return c.is_zero()
    return c == 0


def braided_coproduct(k: int, order: int | None = None) -> TensorElement:
    """``Delta(x^k) = sum_j [k, j]_q x^{k-j} (x) x^j``."""
    order = k if order is None else order
    return TensorElement({(k - j, j): gauss_binomial(k, j) for j in range(k + 1)}, order)


def coproduct(e: BraidedElement) -> TensorElement:
    out = TensorElement({}, e.order)
    for k, c in enumerate(e.coeffs):
        if c != 0:
            out = out + TensorElement({key: c * v for key, v in braided_coproduct(k, e.order).terms.items()}, e.order)
    return out


def _antipode_factor(k):
    return (-1) ** k * QPoly.q() ** math.comb(k, 2)


def braided_antipode(e: BraidedElement) -> BraidedElement:
    """``S(x^k) = (-1)^k q^{binom(k,2)} x^k``."""
    return BraidedElement([_antipode_factor(k) * c for k, c in enumerate(e.coeffs)], e.order)


def braided_counit(e: BraidedElement):
    """``epsilon(x^k) = delta_{k,0}``."""
    return e.coeffs[0]


def braiding_phi(k: int, l: int) -> TensorElement:
    """``Phi(x^k (x) x^l) = q^{kl} x^l (x) x^k``."""
    return TensorElement({(l, k): QPoly.q() ** (k * l)}, max(k, l))


def q_taylor_coproduct(f: BraidedElement) -> TensorElement:
    """``sum_j x^j / [j]_q! (x) delta_q^j f`` on a truncated series."""
    out: dict = {}
    for k, c in enumerate(f.coeffs):
        if c == 0:
            continue
        for j in range(k + 1):
            # delta_q^j x^k = [k]!/[k-j]! x^{k-j}
            coeff = QRational(q_factorial(k), q_factorial(k - j) * q_factorial(j))
            out[(j, k - j)] = out.get((j, k - j), 0) + coeff.to_poly() * c
    return TensorElement(out, f.order)


def km_convolve(f_moments, g: BraidedElement, q=None) -> BraidedElement:
    """Braided composite ``(f (x) id)(m (x) id)(id (x) Q (x) id)(id (x) S (x) id)(id (x) Delta)``.

    ``Delta`` splits ``g``, the left leg receives ``S`` and the dilation
    ``Q x^i = q^i x^i``, and is then integrated against ``f`` with the plain
    Jackson pairing ``int f(y) y^i d_qy = q^{-binom(i,2)} m_i(f)``.
    """
    if q not in (None, "symbolic"):
        raise DomainError("km_convolve works with symbolic q; specialize the result afterwards")
    qq = QPoly.q()
    fm = _values(f_moments)
    if len(fm) <= g.order:
        raise DomainError(f"need moments m_0..m_{g.order} of f")
    t = coproduct(g)
    t = t.map_left(_antipode_factor)
    t = t.map_left(lambda i: qq**i)

    def pairing(i):
        return QRational(fm[i], qq ** math.comb(i, 2))

    out = t.contract_left(pairing)
    return BraidedElement([_as_poly(c) for c in out.coeffs], out.order)


def _as_poly(c):
    """Collapse a QRational to a QPoly when the division is exact."""
    if not isinstance(c, QRational):
        return c
    try:
        return c.to_poly()
    except ArithmeticError:
        return c
