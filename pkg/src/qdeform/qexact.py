"""Exact arithmetic in the deformation parameter ``q``.

Polynomials carry arbitrary-precision rational coefficients (``int`` or
``fractions.Fraction``); nothing in this module rounds.  A float evaluation
path exists (:func:`eval_at_q` with a float argument, :func:`numeric_E_product`)
but identity checks should stay on the exact side.

The two-variable :class:`QSPoly` exists for the ``(q, s)`` deformations of the
Fock-space layer; it shares the arithmetic of :class:`QPoly`.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Union

from .errors import DomainError, PoleError

Scalar = Union[int, Fraction]

__all__ = [
    "QPoly",
    "QSPoly",
    "QRational",
    "QSeries",
    "q_integer",
    "q_factorial",
    "gauss_binomial",
    "q_pochhammer",
    "e_q_series",
    "E_q_series",
    "eval_at_q",
    "numeric_E_product",
    "numeric_e",
    "to_fraction",
]


def to_fraction(value) -> Scalar:
    """Coerce ``value`` to an exact scalar; strings like ``"3/4"`` are accepted."""
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, Rational):
        return _norm(Fraction(value.numerator, value.denominator))
    if isinstance(value, str):
        return _norm(Fraction(value))
    raise TypeError(f"exact coefficient required, got {type(value).__name__}")


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class _SparsePoly:
    """Sparse polynomial: a dict from exponent key to nonzero exact coefficient."""

    __slots__ = ("_t", "_hash")
    _zero_key = 0

    def __init__(self, terms=None):
        t = {}
        if terms is None:
            pass
        elif isinstance(terms, dict):
            for k, c in terms.items():
                c = to_fraction(c)
                if c:
                    t[self._check_key(k)] = c
        elif isinstance(terms, type(self)):
            t = dict(terms._t)
        else:
            c = to_fraction(terms)
            if c:
                t[self._zero_key] = c
        self._t = t
        self._hash = None

    @classmethod
    def _from_terms(cls, t):
        obj = cls.__new__(cls)
        obj._t = t
        obj._hash = None
        return obj

    @staticmethod
    def _check_key(k):
        raise NotImplementedError

    @staticmethod
    def _kadd(a, b):
        raise NotImplementedError

    def _coerce(self, other):
        if isinstance(other, type(self)):
            return other
        if isinstance(other, (int, Fraction)):
            return type(self)(other)
        return None

    # -- container protocol ------------------------------------------------
    def terms(self):
        return self._t.items()

    def __iter__(self):
        return iter(sorted(self._t.items()))

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self):
        return bool(self._t)

    def constant_term(self) -> Scalar:
        return self._t.get(self._zero_key, 0)

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        t = dict(self._t)
        for k, c in o._t.items():
            v = t.get(k, 0) + c
            if v:
                t[k] = v
            else:
                t.pop(k, None)
        return self._from_terms(t)

    __radd__ = __add__

    def __neg__(self):
        return self._from_terms({k: -c for k, c in self._t.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return self._from_terms({})
            return self._from_terms({k: _norm(c * other) for k, c in self._t.items()})
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        kadd = self._kadd
        t = {}
        for ka, ca in self._t.items():
            for kb, cb in o._t.items():
                k = kadd(ka, kb)
                t[k] = t.get(k, 0) + ca * cb
        return self._from_terms({k: _norm(c) for k, c in t.items() if c})

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise DomainError("only nonnegative integer powers are supported")
        result = type(self)(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division by zero scalar")
            return self._from_terms({k: _norm(Fraction(c) / other) for k, c in self._t.items()})
        return NotImplemented

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._t == o._t

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._t.items()))
        return self._hash


class QPoly(_SparsePoly):
    """Polynomial in ``q`` with exact rational coefficients.

    ``QPoly({0: 1, 2: Fraction(1, 2)})`` is ``1 + q^2/2``.  A dense list is also
    accepted: ``QPoly.from_list([1, 1, 1])`` is ``1 + q + q^2``.
    """

    __slots__ = ()

    @staticmethod
    def _check_key(k):
        if not isinstance(k, int) or k < 0:
            raise DomainError(f"QPoly exponents must be nonnegative ints, got {k!r}")
        return k

    @staticmethod
    def _kadd(a, b):
        return a + b

    @classmethod
    def q(cls) -> "QPoly":
        return cls._from_terms({1: 1})

    @classmethod
    def monomial(cls, exponent: int, coeff: Scalar = 1) -> "QPoly":
        return cls({exponent: coeff})

    @classmethod
    def from_list(cls, coeffs: Iterable) -> "QPoly":
        return cls({i: c for i, c in enumerate(coeffs)})

    @property
    def coeffs(self) -> dict:
        """Copy of the exponent -> coefficient map."""
        return dict(self._t)

    def coeff(self, k: int) -> Scalar:
        return self._t.get(k, 0)

    @property
    def degree(self) -> int:
        """Degree; ``-1`` for the zero polynomial."""
        return max(self._t) if self._t else -1

    @property
    def low_degree(self) -> int:
        return min(self._t) if self._t else -1

    def to_list(self) -> list:
        return [self._t.get(i, 0) for i in range(self.degree + 1)]

    def shift(self, k: int) -> "QPoly":
        """Multiply by ``q**k``."""
        return self._from_terms({e + k: c for e, c in self._t.items()})

    def substitute_power(self, k: int) -> "QPoly":
        """Return ``p(q**k)``."""
        return self._from_terms({e * k: c for e, c in self._t.items()})

    def reversed_laurent(self) -> "QRational":
        """Return ``p(1/q)`` as a rational function ``q^{-d} * reversed(p)``."""
        d = max(self.degree, 0)
        num = self._from_terms({d - e: c for e, c in self._t.items()})
        return QRational(num, QPoly.monomial(d))

    def __call__(self, value):
        return eval_at_q(self, value)

    def divmod(self, other: "QPoly"):
        """Polynomial long division over the rationals."""
        if not isinstance(other, QPoly):
            other = QPoly(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        rem = self.to_list()
        dv = other.to_list()
        dd = len(dv) - 1
        lead = dv[-1]
        if len(rem) - 1 < dd:
            return QPoly(), self
        quot = [0] * (len(rem) - dd)
        unit = lead in (1, -1)
        for i in range(len(rem) - 1 - dd, -1, -1):
            c = rem[i + dd]
            if not c:
                continue
            c = c * lead if unit else Fraction(c) / lead
            quot[i] = c
            for j, d in enumerate(dv):
                if d:
                    rem[i + j] -= c * d
        return QPoly.from_list(quot), QPoly.from_list(rem[:dd])

    def exact_div(self, other: "QPoly") -> "QPoly":
        """Quotient when ``other`` divides ``self``; ``ArithmeticError`` otherwise."""
        quot, rem = self.divmod(other)
        if rem:
            raise ArithmeticError("polynomial division is not exact")
        return quot

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return super().__truediv__(other)
        if isinstance(other, QPoly):
            return QRational(self, other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return QRational(QPoly(other), self)
        return NotImplemented

    def _coerce(self, other):
        if isinstance(other, QSPoly):
            return None
        return super()._coerce(other)

    def to_json(self) -> dict:
        """``{"exp": "num/den"}`` map, exponents as strings."""
        return {str(e): str(Fraction(c)) for e, c in sorted(self._t.items())}

    @classmethod
    def from_json(cls, data: dict) -> "QPoly":
        return cls({int(k): Fraction(v) for k, v in data.items()})

    def __repr__(self):
        if not self._t:
            return "0"
        parts = []
        for e, c in sorted(self._t.items()):
            mono = "" if e == 0 else ("q" if e == 1 else f"q^{e}")
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


class QSPoly(_SparsePoly):
    """Polynomial in two commuting variables ``q`` and ``s``.

    Keys are exponent pairs ``(i, j)`` standing for ``q^i s^j``.
    """

    __slots__ = ()
    _zero_key = (0, 0)

    @staticmethod
    def _check_key(k):
        if not (isinstance(k, tuple) and len(k) == 2 and all(isinstance(x, int) and x >= 0 for x in k)):
            raise DomainError(f"QSPoly keys must be pairs of nonnegative ints, got {k!r}")
        return k

    @staticmethod
    def _kadd(a, b):
        return (a[0] + b[0], a[1] + b[1])

    def _coerce(self, other):
        if isinstance(other, QPoly):
            return QSPoly._from_terms({(e, 0): c for e, c in other.terms()})
        return super()._coerce(other)

    @classmethod
    def q(cls) -> "QSPoly":
        return cls._from_terms({(1, 0): 1})

    @classmethod
    def s(cls) -> "QSPoly":
        return cls._from_terms({(0, 1): 1})

    @classmethod
    def monomial(cls, i: int, j: int, coeff: Scalar = 1) -> "QSPoly":
        return cls({(i, j): coeff})

    @property
    def coeffs(self) -> dict:
        return dict(self._t)

    def coeff(self, i: int, j: int) -> Scalar:
        return self._t.get((i, j), 0)

    def evaluate(self, q, s):
        total = 0
        for (i, j), c in self._t.items():
            total += c * q**i * s**j
        return total

    def specialize_s(self, s: Scalar) -> QPoly:
        out = {}
        for (i, j), c in self._t.items():
            out[i] = out.get(i, 0) + c * s**j
        return QPoly(out)

    def as_qpoly(self) -> QPoly:
        """Drop to :class:`QPoly`; raises if ``s`` occurs."""
        if any(j for (_, j) in self._t):
            raise DomainError("polynomial depends on s")
        return QPoly({i: c for (i, _), c in self._t.items()})

    def to_json(self) -> dict:
        return {f"{i},{j}": str(Fraction(c)) for (i, j), c in sorted(self._t.items())}

    def __repr__(self):
        if not self._t:
            return "0"
        parts = []
        for (i, j), c in sorted(self._t.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            mono = "*".join(
                p for p in (
                    "" if i == 0 else ("q" if i == 1 else f"q^{i}"),
                    "" if j == 0 else ("s" if j == 1 else f"s^{j}"),
                ) if p
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


_ONE = QPoly(1)


class QRational:
    """Quotient of two :class:`QPoly`; not reduced, equality by cross-multiplication."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        num = num if isinstance(num, QPoly) else QPoly(num)
        den = den if isinstance(den, QPoly) else QPoly(den)
        if den.is_zero():
            raise ZeroDivisionError("QRational with zero denominator")
        self.num = num
        self.den = den

    @staticmethod
    def _lift(x):
        if isinstance(x, QRational):
            return x
        if isinstance(x, (QPoly, int, Fraction)):
            return QRational(x)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return QRational(self.num + o.num, self.den)
        if o.den == _ONE:
            return QRational(self.num + o.num * self.den, self.den)
        if self.den == _ONE:
            return QRational(self.num * o.den + o.num, o.den)
        # keep the larger denominator when the smaller one divides it
        big, small = (self, o) if self.den.degree >= o.den.degree else (o, self)
        quot, rem = big.den.divmod(small.den)
        if not rem:
            return QRational(big.num + small.num * quot, big.den)
        return QRational(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return QRational(-self.num, self.den)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QRational(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QRational(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, e: int):
        if e < 0:
            return QRational(self.den**(-e), self.num**(-e))
        return QRational(self.num**e, self.den**e)

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.num * o.den == o.num * self.den

    def __hash__(self):
        # equal values may have different representations; hash the float shadow
        return hash(("QRational", self.num.is_zero()))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def to_poly(self) -> QPoly:
        """Exact polynomial value; ``ArithmeticError`` when not a polynomial."""
        return self.num.exact_div(self.den)

    def __call__(self, value):
        return eval_at_q(self, value)

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    def __repr__(self):
        if self.den == _ONE:
            return repr(self.num)
        return f"({self.num!r})/({self.den!r})"


class QSeries:
    """Power series in ``z`` truncated at ``order`` with exact coefficients."""

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs, order: int | None = None):
        coeffs = list(coeffs)
        if order is None:
            order = len(coeffs) - 1
        if order < 0:
            raise DomainError("order must be nonnegative")
        coeffs = coeffs[: order + 1] + [0] * (order + 1 - len(coeffs))
        self.order = order
        self.coeffs = [QRational._lift(c) for c in coeffs]

    def __getitem__(self, k):
        return self.coeffs[k]

    def __len__(self):
        return self.order + 1

    def _check(self, other):
        if not isinstance(other, QSeries):
            return None
        if other.order != self.order:
            raise DomainError("series truncation orders differ")
        return other

    def __add__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return QSeries([a + b for a, b in zip(self.coeffs, o.coeffs)], self.order)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, QPoly, QRational)):
            return QSeries([c * other for c in self.coeffs], self.order)
        o = self._check(other)
        if o is None:
            return NotImplemented
        out = []
        for n in range(self.order + 1):
            acc = QRational(0)
            for k in range(n + 1):
                a, b = self.coeffs[k], o.coeffs[n - k]
                if a.is_zero() or b.is_zero():
                    continue
                acc = acc + a * b
            out.append(acc)
        return QSeries(out, self.order)

    __rmul__ = __mul__

    def negate_argument(self) -> "QSeries":
        """The series of ``f(-z)``."""
        return QSeries([c if k % 2 == 0 else -c for k, c in enumerate(self.coeffs)], self.order)

    def __eq__(self, other):
        if isinstance(other, QSeries):
            if other.order != self.order:
                return False
            return all(a == b for a, b in zip(self.coeffs, other.coeffs))
        if isinstance(other, (int, Fraction, QPoly, QRational)):
            return self == QSeries([other], self.order)
        return NotImplemented

    def __repr__(self):
        return f"QSeries(order={self.order}, coeffs={self.coeffs!r})"


# ---------------------------------------------------------------------------
# q-analogues
# ---------------------------------------------------------------------------

def _check_nat(n, name="n"):
    if not isinstance(n, int) or n < 0:
        raise DomainError(f"{name} must be a nonnegative int, got {n!r}")


def q_integer(n: int) -> QPoly:
    """``[n]_q = 1 + q + ... + q^{n-1}``; ``[0]_q = 0``."""
    _check_nat(n)
    return QPoly._from_terms({k: 1 for k in range(n)})


def q_factorial(n: int) -> QPoly:
    """``[n]_q! = [1]_q [2]_q ... [n]_q``."""
    _check_nat(n)
    out = QPoly(1)
    for k in range(2, n + 1):
        out = out * q_integer(k)
    return out


def gauss_binomial(n: int, k: int) -> QPoly:
    """Gaussian binomial coefficient, built by the q-Pascal rule (no division)."""
    _check_nat(n)
    _check_nat(k, "k")
    if k > n:
        raise DomainError(f"gauss_binomial needs k <= n, got n={n}, k={k}")
    return _gauss_rows(n)[k]


_GAUSS_CACHE: list[list[QPoly]] = [[QPoly(1)]]


def _gauss_rows(n: int) -> list[QPoly]:
    while len(_GAUSS_CACHE) <= n:
        prev = _GAUSS_CACHE[-1]
        m = len(prev)
        row = [QPoly(1)]
        for k in range(1, m):
            row.append(prev[k - 1] + prev[k].shift(k))
        row.append(QPoly(1))
        _GAUSS_CACHE.append(row)
    return _GAUSS_CACHE[n]


def q_pochhammer(k: int, a: QPoly | Scalar | None = None) -> QPoly:
    """``(a; q)_k = (1 - a)(1 - a q)...(1 - a q^{k-1})``; ``a`` defaults to ``q``."""
    _check_nat(k, "k")
    a = QPoly.q() if a is None else (a if isinstance(a, QPoly) else QPoly(a))
    out = QPoly(1)
    for j in range(k):
        out = out * (1 - a.shift(j))
    return out


def e_q_series(order: int) -> QSeries:
    """Truncation of ``e_q(z) = sum_k z^k / (q; q)_k``."""
    _check_nat(order, "order")
    return QSeries([QRational(1, q_pochhammer(k)) for k in range(order + 1)], order)


def E_q_series(order: int) -> QSeries:
    """Truncation of ``E_q(z) = sum_k q^{k(k-1)/2} z^k / (q; q)_k``."""
    _check_nat(order, "order")
    return QSeries(
        [QRational(QPoly.monomial(k * (k - 1) // 2), q_pochhammer(k)) for k in range(order + 1)],
        order,
    )


def _eval_sparse(terms, x):
    total = 0
    for e, c in terms:
        total += c * x**e
    return total


def eval_at_q(p, q_value):
    """Evaluate a :class:`QPoly` or :class:`QRational` at ``q_value``.

    Exact for ``int``/``Fraction`` arguments; float and complex arguments
    give a float/complex result and are meant for plotting and numerics only.
    """
    if isinstance(q_value, str):
        q_value = Fraction(q_value)
    if isinstance(q_value, Fraction) or isinstance(q_value, int):
        x = q_value
    elif isinstance(q_value, (float, complex)):
        x = q_value
    else:
        raise TypeError(f"cannot evaluate at {type(q_value).__name__}")
    if isinstance(p, (int, Fraction)):
        return p
    if isinstance(p, QPoly):
        if isinstance(x, (float, complex)):
            return _eval_sparse(((e, float(c)) for e, c in p.terms()), x)
        return _norm(Fraction(_eval_sparse(p.terms(), x)))
    if isinstance(p, QRational):
        den = eval_at_q(p.den, x)
        if den == 0:
            raise PoleError(f"denominator vanishes at q={q_value}")
        num = eval_at_q(p.num, x)
        if isinstance(den, (float, complex)):
            return num / den
        return _norm(Fraction(num) / den)
    raise TypeError(f"cannot evaluate {type(p).__name__}")


def numeric_E_product(z, q: float, tol: float = 1e-17, max_terms: int = 100000):
    """``E_q(z) = prod_{n>=0} (1 + q^n z)``, stopped once ``|q^n z| < tol``."""
    if not 0 <= q < 1:
        raise DomainError(f"numeric_E_product needs 0 <= q < 1, got {q}")
    prod = 1.0 + z
    if q == 0 or z == 0:
        return prod
    term = z * q
    n = 1
    while abs(term) >= tol:
        prod *= 1.0 + term
        term *= q
        n += 1
        if n > max_terms:
            break
    return prod


def numeric_e(w, q: float, tol: float = 1e-17):
    """``e_q(w)`` through ``1 / E_q(-w)``; valid wherever ``E_q(-w) != 0``."""
    den = numeric_E_product(-w, q, tol)
    if den == 0:
        raise PoleError(f"e_q has a pole at w={w}")
    return 1.0 / den


def series_e_q_direct(w: float, q: float, terms: int = 400) -> float:
    """Partial sum of the e_q series; convergent only for ``|w| < 1``."""
    if abs(w) >= 1:
        raise DomainError("e_q series converges only for |w| < 1")
    total, coeff, poch = 0.0, 1.0, 1.0
    for k in range(terms):
        total += coeff / poch
        coeff *= w
        poch *= 1.0 - q ** (k + 1)
        if abs(coeff) < 1e-300:
            break
    return total


def double_factorial(n: int) -> int:
    """``(2n-1)!!`` for ``n >= 0`` -- the number of pair partitions of 2n points."""
    return math.prod(range(1, 2 * n, 2))
