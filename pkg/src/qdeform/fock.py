"""Truncated deformed Fock spaces over a ``dim_h``-dimensional one-particle space.

Level ``n`` is spanned by ``e_I``, ``I`` a word of length ``n`` over
``{0..dim_h-1}``; levels run from 0 (the vacuum) to ``cutoff``.  Flavors:

``generic``
    Gram ``s^{binom(n,2)} sum_sigma q^{inv sigma}``; annihilation on level
    ``n`` is ``s^{n-1} sum_k q^{k-1} <x_k|f>`` (delete the ``k``-th letter).
    Then ``A(f)A+(g) - sq A+(g)A(f) = s^N <f,g>``.
``qccr``
    ``s = 1``.
``qdisc``
    ``s = q``: Gram ``q^{binom(n,2)} sum q^{inv}`` and
    ``A A+ - q^2 A+ A = q^N <f,g>``.  At ``q = 0`` this is the Boolean Fock space.
``inverse``
    deformation ``1/q`` with ``s = q``: Gram ``q^{binom(n,2) - inv}``,
    annihilation ``sum_k q^{n-k}``, and ``B B+ - B+ B = q^N <f,g>``.

Coefficients live in whatever ring ``q`` and ``s`` live in: :class:`QSPoly`
(symbolic), ``Fraction`` or ``float``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import block_diag

from .errors import DomainError, VerificationError
from .qexact import QPoly, QSPoly, eval_at_q, to_fraction
from .orthopoly import mu_qI_moment

FLAVORS = ("generic", "qccr", "qdisc", "inverse")
BACKENDS = ("exact", "float")
DEFAULT_CAP = 100_000
# permutation-sum Gram is used while dim_h^n * n! stays below this
PERMUTATION_BUDGET = 50_000


def _is_zero(c) -> bool:
    if isinstance(c, (QSPoly, QPoly)):
        return c.is_zero()
    return c == 0


def _conj(c):
    return c.conjugate() if isinstance(c, complex) else c


def _inversions(perm) -> int:
    return sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j])


@dataclass
class FockRep:
    """A truncated Fock space.  Build with :func:`build_fock`."""

    dim_h: int
    cutoff: int
    q: object
    s: object
    flavor: str
    backend: str
    basis: tuple = field(repr=False)
    index: dict = field(repr=False)
    _gram: dict = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return len(self.index)

    def level_basis(self, n: int) -> tuple:
        return self.basis[n]

    # -- flavor coefficients -------------------------------------------------
    def ann_coef(self, n: int, k: int):
        """Weight of deleting letter ``k`` (1-based) from a level-``n`` word."""
        if self.flavor == "inverse":
            return self.q ** (n - k)
        return self.s ** (n - 1) * self.q ** (k - 1)

    def perm_coef(self, n: int, inv: int):
        if self.flavor == "inverse":
            return self.q ** (math.comb(n, 2) - inv)
        return self.s ** math.comb(n, 2) * self.q**inv

    def number_coef(self, n: int):
        """Eigenvalue of ``s^N`` (or ``q^N``) on level ``n``."""
        return self.s**n

    @property
    def relation_constant(self):
        """``c`` in ``A(f)A+(g) - c A+(g)A(f) = s^N <f,g>``."""
        return 1 if self.flavor == "inverse" else self.s * self.q

    def zero(self):
        return 0.0 if self.backend == "float" else 0

    # -- Gram ------------------------------------------------------------------
    def gram(self, n: int, method: str = "auto") -> dict:
        """Sparse Gram matrix of level ``n``: ``{I: {J: <e_I|e_J>}}``."""
        if not 0 <= n <= self.cutoff:
            raise DomainError(f"level {n} outside 0..{self.cutoff}")
        if method == "auto":
            method = "permutations" if self.dim_h**n * math.factorial(n) <= PERMUTATION_BUDGET else "recursive"
        key = (n, method)
        if key not in self._gram:
            if method == "permutations":
                self._gram[key] = self._gram_permutations(n)
            elif method == "recursive":
                self._gram[key] = self._gram_recursive(n)
            else:
                raise DomainError(f"unknown Gram method {method!r}")
        return self._gram[key]

    def _gram_permutations(self, n):
        perms = [(p, self.perm_coef(n, _inversions(p))) for p in itertools.permutations(range(n))]
        out = {}
        for word in self.basis[n]:
            row: dict = {}
            for p, c in perms:
                j = tuple(word[p[i]] for i in range(n))
                row[j] = row.get(j, 0) + c
            out[word] = {j: v for j, v in row.items() if not _is_zero(v)}
        return out

    def _gram_recursive(self, n):
        """``<e_i (x) e_I', e_J> = <e_I', A(e_i) e_J>``, unrolled level by level."""
        if n == 0:
            return {(): {(): 1.0 if self.backend == "float" else 1}}
        prev = self.gram(n - 1, "recursive")
        out = {}
        for word in self.basis[n]:
            i, rest = word[0], word[1:]
            row: dict = {}
            for j_rest, g in prev[rest].items():
                for k in range(1, n + 1):
                    j = j_rest[: k - 1] + (i,) + j_rest[k - 1:]
                    row[j] = row.get(j, 0) + self.ann_coef(n, k) * g
            out[word] = {j: v for j, v in row.items() if not _is_zero(v)}
        return out

    def gram_dense(self, n: int) -> np.ndarray:
        g = self.gram(n)
        idx = {w: a for a, w in enumerate(self.basis[n])}
        mat = np.zeros((len(idx), len(idx)), dtype=float if self.backend == "float" else object)
        for w, row in g.items():
            for j, v in row.items():
                mat[idx[w], idx[j]] = v
        return mat

    def inner(self, u: dict, v: dict):
        """Deformed inner product of two sparse states (antilinear in ``u``)."""
        total = self.zero()
        for word, a in u.items():
            row = self.gram(len(word))[word]
            for j, g in row.items():
                b = v.get(j)
                if b is not None:
                    total = total + _conj(a) * g * b
        return total


def _resolve_params(flavor, q, s, backend):
    if flavor not in FLAVORS:
        raise DomainError(f"unknown flavor {flavor!r}; choose from {FLAVORS}")
    if backend not in BACKENDS:
        raise DomainError(f"unknown backend {backend!r}")
    if flavor != "generic" and s is not None and s != "symbolic":
        raise DomainError(f"flavor {flavor!r} fixes s; do not pass it")
    if q is None or q == "symbolic":
        if backend == "float":
            raise DomainError("symbolic q needs the exact backend")
        q = QSPoly.q()
    elif backend == "float":
        q = float(q)
    elif not isinstance(q, (QSPoly, QPoly)):
        q = to_fraction(q)
    if flavor == "generic":
        if s is None or s == "symbolic":
            if backend == "float":
                raise DomainError("symbolic s needs the exact backend")
            s = QSPoly.s()
        elif backend == "float":
            s = float(s)
        elif not isinstance(s, (QSPoly, QPoly)):
            s = to_fraction(s)
    else:
        s = (1.0 if backend == "float" else 1) if flavor == "qccr" else q
    return q, s


def build_fock(dim_h: int, cutoff: int, q=None, s=None, flavor: str = "generic",
               backend: str = "exact", cap: int = DEFAULT_CAP) -> FockRep:
    """Basis and parameters of a truncated Fock space.

    Parameters
    ----------
    dim_h : int
        One-particle dimension.
    cutoff : int
        Highest tensor level kept.
    q, s
        Deformation parameters; ``None`` means symbolic (exact backend only).
        ``qccr`` fixes ``s = 1``; ``qdisc`` and ``inverse`` fix ``s = q``.
    flavor : {'generic', 'qccr', 'qdisc', 'inverse'}
    backend : {'exact', 'float'}
    cap : int
        Maximum number of basis vectors.
    """
    if dim_h < 1 or cutoff < 0:
        raise DomainError("need dim_h >= 1 and cutoff >= 0")
    total = sum(dim_h**n for n in range(cutoff + 1))
    if total > cap:
        raise DomainError(f"{total} basis vectors exceed the cap {cap}")
    q, s = _resolve_params(flavor, q, s, backend)
    basis = tuple(tuple(itertools.product(range(dim_h), repeat=n)) for n in range(cutoff + 1))
    index = {w: a for a, w in enumerate(w for level in basis for w in level)}
    return FockRep(dim_h, cutoff, q, s, flavor, backend, basis, index)


# ---------------------------------------------------------------------------
# operators on sparse states
# ---------------------------------------------------------------------------

def _vector(rep, f):
    f = list(f)
    if len(f) != rep.dim_h:
        raise DomainError(f"one-particle vector needs {rep.dim_h} components")
    if rep.backend == "float":
        return [complex(x) if isinstance(x, complex) else float(x) for x in f]
    return [x if isinstance(x, (QSPoly, QPoly)) else to_fraction(x) for x in f]


def _add(out, key, val):
    cur = out.get(key)
    out[key] = val if cur is None else cur + val


def _clean(state):
    return {k: v for k, v in state.items() if not _is_zero(v)}


def apply_creation(rep: FockRep, f, state: dict) -> dict:
    """``A+(f)``: prepend a letter; the top level maps to zero."""
    f = _vector(rep, f)
    out: dict = {}
    for word, c in state.items():
        if len(word) >= rep.cutoff:
            continue
        for i, fi in enumerate(f):
            if not _is_zero(fi):
                _add(out, (i,) + word, fi * c)
    return _clean(out)


def apply_annihilation(rep: FockRep, f, state: dict) -> dict:
    """``A(f)``: delete letter ``k`` with weight ``ann_coef(n, k) <x_k|f>``."""
    f = [_conj(x) for x in _vector(rep, f)]
    out: dict = {}
    for word, c in state.items():
        n = len(word)
        for k in range(1, n + 1):
            fi = f[word[k - 1]]
            if _is_zero(fi):
                continue
            _add(out, word[: k - 1] + word[k:], rep.ann_coef(n, k) * fi * c)
    return _clean(out)


def apply_gaussian(rep: FockRep, f, state: dict) -> dict:
    out = dict(apply_creation(rep, f, state))
    for k, v in apply_annihilation(rep, f, state).items():
        _add(out, k, v)
    return _clean(out)


@dataclass
class OperatorMatrix:
    """Sparse matrix over the graded basis: ``entries[(row, col)]``."""

    rep: FockRep = field(repr=False)
    entries: dict
    grading: str = "mixed"

    @classmethod
    def from_action(cls, rep: FockRep, action, grading: str = "mixed") -> "OperatorMatrix":
        entries = {}
        for word, col in rep.index.items():
            for w, v in action({word: 1.0 if rep.backend == "float" else 1}).items():
                entries[(rep.index[w], col)] = v
        return cls(rep, entries, grading)

    def apply(self, vec: dict) -> dict:
        """Apply to ``{basis index: coefficient}``."""
        out: dict = {}
        for (r, c), v in self.entries.items():
            x = vec.get(c)
            if x is not None:
                _add(out, r, v * x)
        return _clean(out)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        by_row: dict = {}
        for (r, c), v in other.entries.items():
            by_row.setdefault(r, []).append((c, v))
        out: dict = {}
        for (r, m), v in self.entries.items():
            for c, w in by_row.get(m, ()):
                _add(out, (r, c), v * w)
        return OperatorMatrix(self.rep, _clean(out))

    def to_dense(self) -> np.ndarray:
        n = self.rep.size
        dtype = float if self.rep.backend == "float" else object
        if any(isinstance(v, complex) for v in self.entries.values()):
            dtype = complex
        mat = np.zeros((n, n), dtype=dtype)
        for (r, c), v in self.entries.items():
            mat[r, c] = v
        return mat


def creation(rep: FockRep, f) -> OperatorMatrix:
    return OperatorMatrix.from_action(rep, lambda st: apply_creation(rep, f, st), "raising")


def annihilation(rep: FockRep, f, verify: bool = False) -> OperatorMatrix:
    """Explicit annihilation operator; ``verify=True`` also asserts it is the
    Gram adjoint of :func:`creation`."""
    op = OperatorMatrix.from_action(rep, lambda st: apply_annihilation(rep, f, st), "lowering")
    if verify:
        res = adjoint_residual(rep, f)
        if res > (1e-12 if rep.backend == "float" else 0):
            raise VerificationError(f"annihilation is not the adjoint of creation (residual {res})")
    return op


def gaussian(rep: FockRep, f) -> OperatorMatrix:
    return OperatorMatrix.from_action(rep, lambda st: apply_gaussian(rep, f, st))


def _residual_value(rep, values) -> float:
    values = [v for v in values if not _is_zero(v)]
    if not values:
        return 0.0
    if any(isinstance(v, (QSPoly, QPoly)) for v in values):
        return math.inf
    return max(abs(complex(v)) for v in values)


def adjoint_residual(rep: FockRep, f) -> float:
    """``max |<A+(f) xi, eta> - <xi, A(f) eta>|`` over basis words ``xi, eta``.

    Exact zero for exact builds when the formulas are consistent; ``inf``
    flags a symbolic mismatch.
    """
    defects = []
    one = 1.0 if rep.backend == "float" else 1
    for n in range(rep.cutoff):
        for xi in rep.basis[n]:
            up = apply_creation(rep, f, {xi: one})
            for eta in rep.basis[n + 1]:
                down = apply_annihilation(rep, f, {eta: one})
                lhs = rep.inner(up, {eta: one})
                rhs = rep.inner({xi: one}, down)
                defects.append(lhs - rhs)
    return _residual_value(rep, defects)


def _pairing(f, g):
    return sum((_conj(a) * b for a, b in zip(f, g)), 0)


def commutation_residual(rep: FockRep, f, g) -> float:
    """Size of ``A(f)A+(g) - c A+(g)A(f) - s^N <f,g>`` on levels ``<= cutoff - 2``.

    Exact builds return ``0.0`` exactly when the relation holds (``inf`` for
    a nonzero symbolic defect); float builds return the spectral norm of the
    defect block.
    """
    fv, gv = _vector(rep, f), _vector(rep, g)
    fg = _pairing(fv, gv)
    c = rep.relation_constant
    one = 1.0 if rep.backend == "float" else 1
    words = [w for n in range(max(rep.cutoff - 1, 0)) for w in rep.basis[n]]
    col_index = {w: a for a, w in enumerate(words)}
    cols = []
    for w in words:
        st = {w: one}
        first = apply_annihilation(rep, fv, apply_creation(rep, gv, st))
        second = apply_creation(rep, gv, apply_annihilation(rep, fv, st))
        defect = dict(first)
        for k, v in second.items():
            _add(defect, k, -c * v)
        _add(defect, w, -rep.number_coef(len(w)) * fg)
        cols.append(_clean(defect))
    if rep.backend == "exact":
        return _residual_value(rep, [v for col in cols for v in col.values()])
    mat = np.zeros((len(words), len(words)), dtype=complex)
    for j, col in enumerate(cols):
        for k, v in col.items():
            mat[col_index[k], j] = v
    return float(np.linalg.norm(mat, 2)) if mat.size else 0.0


def vacuum_wick(rep: FockRep, fs: Sequence) -> object:
    """``<G(f_1) ... G(f_2n) Omega | Omega>`` with ``G = A + A+``.

    Components above the number of operators still to be applied cannot
    return to the vacuum and are dropped, so ``cutoff >= n`` is enough.
    """
    m = len(fs)
    if m % 2:
        return rep.zero()
    if rep.cutoff < m // 2:
        raise DomainError(f"cutoff {rep.cutoff} is below n = {m // 2}")
    one = 1.0 if rep.backend == "float" else 1
    state = {(): one}
    for j, f in enumerate(reversed(fs)):
        state = apply_gaussian(rep, f, state)
        remaining = m - j - 1
        state = {w: v for w, v in state.items() if len(w) <= remaining}
        if not state:
            return rep.zero()
    return state.get((), rep.zero())


def wick_table(rep: FockRep, two_n: int, vectors: Sequence | None = None) -> dict:
    """Vacuum moments for every word ``(i_1..i_2n)`` of basis vectors.

    States are shared between words with a common suffix.
    """
    if vectors is None:
        vectors = [[int(i == j) for j in range(rep.dim_h)] for i in range(rep.dim_h)]
    if rep.cutoff < two_n // 2:
        raise DomainError(f"cutoff {rep.cutoff} is below n = {two_n // 2}")
    one = 1.0 if rep.backend == "float" else 1
    out = {}

    def walk(suffix, state):
        depth = len(suffix)
        if depth == two_n:
            out[suffix] = state.get((), rep.zero())
            return
        remaining = two_n - depth - 1
        for i, v in enumerate(vectors):
            nxt = {w: c for w, c in apply_gaussian(rep, v, state).items() if len(w) <= remaining}
            if nxt:
                walk((i,) + suffix, nxt)
            else:
                _fill_zero((i,) + suffix)

    def _fill_zero(suffix):
        for head in itertools.product(range(len(vectors)), repeat=two_n - len(suffix)):
            out[head + suffix] = rep.zero()

    walk((), {(): one})
    return out


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------

def gram_min_eigenvalue(rep: FockRep, n: int) -> float:
    mat = np.array(rep.gram_dense(n), dtype=float)
    return float(np.linalg.eigvalsh(mat).min()) if mat.size else 0.0


def _quotient_maps(rep: FockRep, rel_tol: float = 1e-12):
    """Per-level ``R`` with ``G = R^T R`` on the Gram range, and its pseudo-inverse."""
    rs, rinv = [], []
    for n in range(rep.cutoff + 1):
        g = np.array(rep.gram_dense(n), dtype=float)
        w, v = np.linalg.eigh((g + g.T) / 2)
        keep = w > rel_tol * max(1.0, float(np.abs(w).max()))
        rs.append((np.sqrt(w[keep])[:, None] * v[:, keep].T))
        rinv.append(v[:, keep] / np.sqrt(w[keep])[None, :])
    return block_diag(*rs), block_diag(*rinv)


def truncated_gaussian_norm(rep: FockRep, f) -> float:
    """Largest ``|eigenvalue|`` of ``G(f)`` on the truncated space, in
    Gram-orthonormal coordinates (null directions of the Gram removed)."""
    if rep.backend != "float":
        raise DomainError("norm estimates need the float backend")
    x = gaussian(rep, f).to_dense().real.astype(float)
    r, rinv = _quotient_maps(rep)
    y = r @ x @ rinv
    y = (y + y.T) / 2
    return float(np.abs(np.linalg.eigvalsh(y)).max()) if y.size else 0.0


@dataclass
class NormReport:
    """Truncated spectra at several cutoffs plus an extrapolation.

    ``extrapolated`` fits ``lam + a/M^2 + b/M^3 + c/M^4``; ``converged`` is
    set when successive differences decay faster than ``M^{-1.5}``.  This is
    an estimate of an open quantity, never a computed norm.
    """

    cutoffs: list
    values: list
    extrapolated: float | None
    slope: float | None
    converged: bool
    kind: str = "estimate"

    def to_json(self) -> dict:
        return {"cutoffs": self.cutoffs, "values": self.values, "extrapolated": self.extrapolated,
                "slope": self.slope, "converged": self.converged, "kind": self.kind}


def gaussian_norm_estimate(rep: FockRep, f, cutoffs: Sequence[int] | None = None) -> NormReport:
    """Norm estimate for ``G(f)`` from spaces truncated at ``cutoffs``
    (default: eight cutoffs ending at ``rep.cutoff``)."""
    if rep.backend != "float":
        raise DomainError("norm estimates need the float backend")
    if cutoffs is None:
        top = rep.cutoff
        cutoffs = sorted({max(1, top - 2 * k) for k in range(8)})
    values = []
    for m in cutoffs:
        sub = build_fock(rep.dim_h, m, rep.q, None if rep.flavor != "generic" else rep.s,
                         rep.flavor, "float")
        values.append(truncated_gaussian_norm(sub, f))
    extrap = slope = None
    converged = False
    if len(cutoffs) >= 5:
        ms = np.array(cutoffs, dtype=float)
        design = np.column_stack([np.ones_like(ms), ms**-2, ms**-3, ms**-4])
        coef, *_ = np.linalg.lstsq(design, np.array(values), rcond=None)
        extrap = float(coef[0])
        diffs = np.abs(np.diff(values))
        mids = (ms[1:] + ms[:-1]) / 2
        if np.all(diffs[-3:] < 1e-14):
            slope, converged = -math.inf, True
        elif np.all(diffs[-3:] > 0):
            slope = float(np.polyfit(np.log(mids[-3:]), np.log(diffs[-3:]), 1)[0])
            converged = slope < -1.5
    return NormReport(list(cutoffs), values, extrap, slope, converged)


# ---------------------------------------------------------------------------
# q-discrete Brownian motion
# ---------------------------------------------------------------------------

def bm_covariance(s_time, t_time):
    """``<chi_[0,s) | chi_[0,t)> = min(s, t)``."""
    if s_time < 0 or t_time < 0:
        raise DomainError("times must be nonnegative")
    return min(s_time, t_time)


def bm_moment(t, two_n: int, q=None):
    """``E[BM_t^{2n}] = t^n [1]_q [3]_q ... [2n-1]_q``; odd moments vanish."""
    if t < 0:
        raise DomainError("time must be nonnegative")
    if two_n % 2:
        return 0
    n = two_n // 2
    poly = mu_qI_moment(n)
    val = poly if q is None or q == "symbolic" else eval_at_q(poly, q)
    return val * t**n
