"""q-Hermite polynomials from three-term recurrences, their Jacobi moments,
the continuous orthogonality density, and numerical orthogonality checks.

Recurrences are symmetric, ``x p_n = p_{n+1} + b_n p_{n-1}`` with
``p_0 = 1, p_1 = x``:

=====================  ======================================
continuous             ``b_n = [n]_q``
discrete, type I       ``b_n = q^{n-1} [n]_q``
discrete, type II      ``b_n = -q^{-2(n-1)} [n]_q``
=====================  ======================================

Type II is ``i^{-n} h_n(ix; 1/q)``; its coefficients are Laurent
polynomials in ``q`` and are stored as :class:`QRational`.

The Jackson-integral orthogonality relations are stated for the
``(1 - q^n)`` normalization, ``b_n = q^{n-1}(1-q^n)`` (type I) and
``b_n = q^{-2n+1}(1-q^n)`` (type II); the ``standard_*`` constructors give
those.  For type I the two differ by ``x -> x / sqrt(1-q)`` and a factor
``(1-q)^{n/2}``; for type II the rescaling factor ``sqrt(1 - 1/q)`` is
imaginary, and the ``[n]_q`` family has recurrence weights of the wrong sign
for a positive orthogonality measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import DomainError
from .jackson import jackson_integral_bilateral
from .qexact import (
    QPoly,
    QRational,
    eval_at_q,
    numeric_E_product,
    q_factorial,
    q_integer,
    q_pochhammer,
)

_q = QPoly.q()


def _is_zero(c) -> bool:
    if isinstance(c, (QPoly, QRational)):
        return c.is_zero()
    return c == 0


class XPolynomial:
    """Polynomial in ``x`` whose coefficients are polynomials (or Laurent
    polynomials) in ``q``.  ``coeffs[k]`` multiplies ``x^k``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = list(coeffs)
        while coeffs and _is_zero(coeffs[-1]):
            coeffs.pop()
        self.coeffs = tuple(coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, k: int):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __add__(self, other: "XPolynomial") -> "XPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return XPolynomial(self.coeff(k) + other.coeff(k) for k in range(n))

    def __sub__(self, other: "XPolynomial") -> "XPolynomial":
        return self + other.scale(-1)

    def scale(self, c) -> "XPolynomial":
        return XPolynomial(c * a for a in self.coeffs)

    def times_x(self) -> "XPolynomial":
        return XPolynomial((0, *self.coeffs))

    def __eq__(self, other):
        if isinstance(other, XPolynomial):
            n = max(len(self.coeffs), len(other.coeffs))
            return all(self.coeff(k) - other.coeff(k) == 0 for k in range(n))
        return NotImplemented

    __hash__ = None

    def at_q(self, q) -> list:
        """Coefficients with ``q`` substituted (exact for rational ``q``)."""
        return [eval_at_q(c, q) if isinstance(c, (QPoly, QRational)) else c for c in self.coeffs]

    def numeric(self, q: float) -> np.polynomial.Polynomial:
        return np.polynomial.Polynomial([float(c) for c in self.at_q(float(q))])

    def __call__(self, x, q):
        return self.numeric(q)(x)

    def __repr__(self):
        return f"XPolynomial({list(self.coeffs)!r})"


@dataclass(frozen=True)
class JacobiData:
    """Weights ``b_1, b_2, ...`` of ``x p_n = p_{n+1} + b_n p_{n-1}``."""

    b: tuple
    name: str = ""

    def __getitem__(self, n):
        """``b_n``, 1-based."""
        return self.b[n - 1]

    def __len__(self):
        return len(self.b)


def _b_continuous(n):
    return q_integer(n)


def _b_discrete_I(n):
    return q_integer(n).shift(n - 1)


def _b_discrete_II(n):
    return -QRational(q_integer(n), _q ** (2 * (n - 1)))


def _b_standard_I(n):
    return _q ** (n - 1) * (1 - _q**n)


def _b_standard_II(n):
    return QRational(1 - _q**n, _q ** (2 * n - 1))


_WEIGHTS: dict[str, Callable] = {
    "continuous": _b_continuous,
    "discrete_I": _b_discrete_I,
    "discrete_II": _b_discrete_II,
    "standard_I": _b_standard_I,
    "standard_II": _b_standard_II,
}


def jacobi_data(family: str, length: int) -> JacobiData:
    """Recurrence weights ``b_1..b_length`` of a named family."""
    if family not in _WEIGHTS:
        raise DomainError(f"unknown family {family!r}; choose from {sorted(_WEIGHTS)}")
    return JacobiData(tuple(_WEIGHTS[family](k) for k in range(1, length + 1)), family)


@lru_cache(maxsize=None)
def _family(family: str, n: int) -> XPolynomial:
    if n == 0:
        return XPolynomial([1])
    if n == 1:
        return XPolynomial([0, 1])
    b = _WEIGHTS[family](n - 1)
    return _family(family, n - 1).times_x() - _family(family, n - 2).scale(b)


def _build(family, n):
    if n < 0:
        raise DomainError("degree must be nonnegative")
    return _family(family, n)


def continuous_q_hermite(n: int) -> XPolynomial:
    """``H_n^q`` with ``x H_n = H_{n+1} + [n]_q H_{n-1}``."""
    return _build("continuous", n)


def discrete_q_hermite_I(n: int) -> XPolynomial:
    """``h_n`` with ``x h_n = h_{n+1} + q^{n-1}[n]_q h_{n-1}``."""
    return _build("discrete_I", n)


def discrete_q_hermite_II(n: int) -> XPolynomial:
    """``h~_n(x; q) = i^{-n} h_n(ix; 1/q)``, Laurent coefficients in ``q``."""
    return _build("discrete_II", n)


def standard_q_hermite_I(n: int) -> XPolynomial:
    """Type I in the ``(1 - q^n)`` normalization."""
    return _build("standard_I", n)


def standard_q_hermite_II(n: int) -> XPolynomial:
    """Type II in the ``(1 - q^n)`` normalization."""
    return _build("standard_II", n)


def moments_from_jacobi(j: JacobiData, two_n: int):
    """``<x^{two_n} e_0, e_0>`` of the Jacobi operator: a weighted Dyck-path sum.

    A down-step from height ``h`` carries ``b_h``.  Odd moments vanish.
    """
    if two_n < 0:
        raise DomainError("moment index must be nonnegative")
    if two_n % 2:
        return 0
    n = two_n // 2
    if len(j) < n:
        raise DomainError(f"need {n} recurrence weights, have {len(j)}")
    heights = [1] + [0] * n
    for step in range(two_n):
        remaining = two_n - step - 1
        new = [0] * (n + 1)
        for h, w in enumerate(heights):
            if _is_zero(w):
                continue
            if h + 1 <= min(n, remaining):
                new[h + 1] = new[h + 1] + w
            if h >= 1:
                new[h - 1] = new[h - 1] + w * j[h]
        heights = new
    return heights[0]


def mu_qI_moment(n: int) -> QPoly:
    """``[1]_q [3]_q ... [2n-1]_q``."""
    out = QPoly(1)
    for k in range(1, n + 1):
        out = out * q_integer(2 * k - 1)
    return out


# ---------------------------------------------------------------------------
# continuous density
# ---------------------------------------------------------------------------

def _check_q_unit(q):
    if not 0 <= q < 1:
        raise DomainError(f"need 0 <= q < 1, got {q}")


def _density_theta(theta: np.ndarray, q: float, tol: float) -> np.ndarray:
    """Density in ``x`` expressed through ``theta`` (``2 cos theta = x sqrt(1-q)``)."""
    c2 = np.cos(2 * theta)
    prod = np.ones_like(theta)
    qn = q
    while qn > tol:
        prod *= (1 - qn) * (1 - 2 * qn * c2 + qn * qn)
        qn *= q
    return math.sqrt(1 - q) * np.sin(theta) * prod / math.pi


def continuous_density(x: float, q: float, tol: float = 1e-17) -> float:
    """Density of the continuous q-Hermite orthogonality measure on
    ``[-2/sqrt(1-q), 2/sqrt(1-q)]``.

    Parameters
    ----------
    x : float
        Point in the support.
    q : float
        ``0 <= q < 1``.
    tol : float
        The infinite product stops once ``q^n < tol``.
    """
    _check_q_unit(q)
    edge = 2 / math.sqrt(1 - q)
    if abs(x) > edge * (1 + 1e-14):
        raise DomainError(f"x={x} outside the support [-{edge}, {edge}]")
    c = max(-1.0, min(1.0, x * math.sqrt(1 - q) / 2))
    theta = np.array([math.acos(c)])
    return float(_density_theta(theta, q, tol)[0])


def _theta_rule(q: float, quad_points: int):
    """Gauss-Legendre nodes in ``theta`` carrying the density times ``dx/dtheta``."""
    t, w = np.polynomial.legendre.leggauss(quad_points)
    theta = (t + 1) * math.pi / 2
    w = w * math.pi / 2
    x = 2 * np.cos(theta) / math.sqrt(1 - q)
    jac = 2 * np.sin(theta) / math.sqrt(1 - q)
    return x, w * jac * _density_theta(theta, q, 1e-17)


def continuous_mass(q: float, quad_points: int = 200) -> float:
    _check_q_unit(q)
    _, w = _theta_rule(q, quad_points)
    return float(w.sum())


def orthogonality_check_continuous(n: int, m: int, q: float, quad_points: int = 200) -> float:
    """``|int H_n H_m dmu - [n]_q! delta_{nm}|`` by Gauss-Legendre in ``theta``.

    The integrand in ``theta`` is a trigonometric polynomial times the
    smooth product, so a few hundred nodes reach machine precision.
    """
    _check_q_unit(q)
    x, w = _theta_rule(q, quad_points)
    hn = continuous_q_hermite(n).numeric(q)(x)
    hm = continuous_q_hermite(m).numeric(q)(x)
    integral = float(np.dot(w, hn * hm))
    target = float(eval_at_q(q_factorial(n), float(q))) if n == m else 0.0
    return abs(integral - target)


# ---------------------------------------------------------------------------
# discrete orthogonality via Jackson integrals
# ---------------------------------------------------------------------------

def weight_type_I(x: float, q: float) -> float:
    """``E_{q^2}(-q^2 x^2)`` on ``[-1, 1]``, zero outside."""
    if abs(x) > 1:
        return 0.0
    return numeric_E_product(-q * q * x * x, q * q)


def weight_type_II(x: float, q: float) -> float:
    """``e_{q^2}(-x^2) = 1 / E_{q^2}(x^2)``."""
    return 1.0 / numeric_E_product(x * x, q * q)


@dataclass
class DiscreteOrthogonality:
    kind: str
    n: int
    m: int
    q: float
    gram: float
    offdiag_residual: float | None = None
    diag_ratio: float | None = None


def _jackson_gram(kind, n, m, q, tol):
    poly = standard_q_hermite_I if kind == "I" else standard_q_hermite_II
    weight = weight_type_I if kind == "I" else weight_type_II
    pn, pm = poly(n).numeric(q), poly(m).numeric(q)

    def f(x):
        w = weight(x, q)
        return 0.0 if w == 0 else pn(x) * pm(x) * w

    return jackson_integral_bilateral(f, q, tol=tol)


def orthogonality_check_discrete(kind: str, n: int, m: int, q: float,
                                 tol: float = 1e-15) -> DiscreteOrthogonality:
    """Jackson-integral Gram entry of the standard-normalized polynomials.

    Off the diagonal the residual is ``|G_nm| / sqrt(G_nn G_mm)``.  On the
    diagonal the ratio is ``G_nn / (q^{binom(n,2)} (q;q)_n)`` for type I and
    ``G_nn / (q^{-n^2} (q;q)_n)`` for type II; it should not depend on ``n``.
    """
    if kind not in ("I", "II"):
        raise DomainError("kind must be 'I' or 'II'")
    if not 0 < q < 1:
        raise DomainError(f"need 0 < q < 1, got {q}")
    g = _jackson_gram(kind, n, m, q, tol)
    rep = DiscreteOrthogonality(kind, n, m, q, g)
    if n != m:
        scale = math.sqrt(_jackson_gram(kind, n, n, q, tol) * _jackson_gram(kind, m, m, q, tol))
        rep.offdiag_residual = abs(g) / scale
    else:
        poch = float(eval_at_q(q_pochhammer(n), float(q)))
        exponent = math.comb(n, 2) if kind == "I" else -n * n
        rep.diag_ratio = g / (q**exponent * poch)
    return rep
