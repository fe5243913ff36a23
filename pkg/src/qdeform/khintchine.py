"""Matrix Khintchine experiments.

For matrices ``alpha_1..alpha_N`` and self-adjoint ``X_1..X_N`` compare

    lhs = || sum_j X_j (x) alpha_j ||
    rhs = max(|| sum alpha_j alpha_j^* ||, || sum alpha_j^* alpha_j ||)^{1/2}

For Boolean Gaussians the two agree exactly.  For the deformed Gaussians the
ratio is measured, not asserted.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.sparse.linalg import svds

from .errors import DomainError
from .fock import _quotient_maps, build_fock, gaussian

# dense SVD below this many rows, iterative above
DENSE_LIMIT = 2000
FLAVORS = ("boolean", "free", "qccr", "qdisc")


def boolean_omegas(N: int) -> list[np.ndarray]:
    """``omega_i`` on ``C Omega + span(e_1..e_N)``: swaps ``Omega`` and ``e_i``, kills ``e_k``, ``k != i``.

    ``omega_i^2`` is the projection onto ``span(Omega, e_i)``.
    """
    if N < 1:
        raise DomainError("need N >= 1")
    out = []
    for i in range(1, N + 1):
        w = np.zeros((N + 1, N + 1), dtype=int)
        w[0, i] = w[i, 0] = 1
        out.append(w)
    return out


def _as_matrices(alphas) -> list[np.ndarray]:
    mats = [np.atleast_2d(np.asarray(a)) for a in alphas]
    if not mats:
        raise DomainError("need at least one coefficient matrix")
    shape = mats[0].shape
    if any(m.shape != shape for m in mats):
        raise DomainError("all coefficient matrices must share a shape")
    return mats


def operator_norm(m: np.ndarray) -> float:
    """Largest singular value."""
    m = np.asarray(m, dtype=complex)
    if m.size == 0:
        return 0.0
    if max(m.shape) <= DENSE_LIMIT:
        return float(np.linalg.norm(m, 2))
    return float(svds(m, k=1, return_singular_vectors=False)[0])


def khintchine_rhs(alphas) -> float:
    """``max(||sum a a^*||, ||sum a^* a||)^{1/2}``."""
    mats = _as_matrices(alphas)
    row = sum(a @ a.conj().T for a in mats)
    col = sum(a.conj().T @ a for a in mats)
    return math.sqrt(max(operator_norm(row), operator_norm(col)))


def _dense(x) -> np.ndarray:
    if hasattr(x, "to_dense"):
        return np.asarray(x.to_dense(), dtype=complex)
    return np.atleast_2d(np.asarray(x, dtype=complex))


def kronecker_sum(alphas, xs) -> np.ndarray:
    """``T = sum_j X_j (x) alpha_j`` (block ``(r, c)`` of ``T`` is ``sum_j X_j[r, c] alpha_j``)."""
    mats = _as_matrices(alphas)
    xs = [_dense(x) for x in xs]
    if len(xs) != len(mats):
        raise DomainError(f"{len(mats)} coefficients but {len(xs)} operators")
    shape = xs[0].shape
    if any(x.shape != shape for x in xs):
        raise DomainError("all operators must share a shape")
    return sum(np.kron(x, a) for x, a in zip(xs, mats))


def khintchine_lhs(alphas, xs) -> float:
    """``|| sum_j X_j (x) alpha_j ||``."""
    return operator_norm(kronecker_sum(alphas, xs))


def _conj_t(m):
    if m.dtype == object:
        return np.vectorize(lambda z: z.conjugate(), otypes=[object])(m).T
    return m.conj().T


def tt_star_blocks(alphas):
    """``T T^*`` for Boolean ``T`` and the predicted blocks.

    Returns ``(TT*, A, B)`` with ``A = sum a_i a_i^*`` and ``B = (a_i a_j^*)_{ij}``.
    Exact when the entries are exact (object arrays of rationals or
    Gaussian rationals).
    """
    mats = [np.asarray(a) for a in alphas]
    mats = [m if m.ndim == 2 else np.atleast_2d(m) for m in mats]
    dtype = object if any(m.dtype == object for m in mats) else complex
    mats = [m.astype(dtype) for m in mats]
    omegas = [w.astype(dtype) for w in boolean_omegas(len(mats))]
    t = sum(np.kron(w, a) for w, a in zip(omegas, mats))
    tts = t.dot(_conj_t(t))
    a_block = sum(a.dot(_conj_t(a)) for a in mats)
    b_block = np.block([[ai.dot(_conj_t(aj)) for aj in mats] for ai in mats])
    return tts, a_block, b_block


def column_factor_norm(alphas) -> float:
    """``|| C C^* ||`` with ``C`` the column stacking of the ``alpha_i``; equals ``||B||``."""
    c = np.vstack(_as_matrices(alphas)).astype(complex)
    return operator_norm(c @ c.conj().T)


def _gaussian_family(flavor: str, N: int, cutoff: int, q) -> list[np.ndarray]:
    """``G(e_1)..G(e_N)`` in Gram-orthonormal coordinates of the truncated space."""
    if flavor == "boolean":
        return [w.astype(float) for w in boolean_omegas(N)]
    if flavor == "free":
        rep = build_fock(N, cutoff, 0.0, flavor="qccr", backend="float")
    elif flavor in ("qccr", "qdisc"):
        if q is None:
            raise DomainError(f"flavor {flavor!r} needs q")
        rep = build_fock(N, cutoff, float(q), flavor=flavor, backend="float")
    else:
        raise DomainError(f"unknown flavor {flavor!r}; choose from {FLAVORS}")
    r, rinv = _quotient_maps(rep)
    out = []
    for j in range(N):
        e = [0.0] * N
        e[j] = 1.0
        x = gaussian(rep, e).to_dense().astype(float)
        y = r @ x @ rinv
        out.append((y + y.T) / 2)
    return out


def random_alphas(rng: np.random.Generator, N: int, size: int) -> list[np.ndarray]:
    """Independent standard complex Gaussian entries."""
    return [(rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))) / math.sqrt(2)
            for _ in range(N)]


@dataclass
class RatioReport:
    flavor: str
    N: int
    q: float | None
    cutoff: int
    matrix_size: int
    trials: int
    seed: int
    ratios: dict
    per_trial: list = field(repr=False)
    cutoff_drift: float | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def ratio_experiment(flavor: str, N: int, matrix_size: int, cutoff: int = 4, q=None,
                     trials: int = 20, seed: int = 0) -> RatioReport:
    """Ratios ``lhs / rhs`` over seeded random ``alpha``.

    Each trial draws from its own stream spawned from ``seed``.
    ``cutoff_drift`` is the largest relative change of ``lhs`` between
    ``cutoff - 1`` and ``cutoff`` (``None`` for the Boolean flavor, whose
    space is exact at level 1).
    """
    xs = _gaussian_family(flavor, N, cutoff, q)
    xs_prev = _gaussian_family(flavor, N, cutoff - 1, q) if flavor != "boolean" and cutoff > 1 else None
    streams = np.random.SeedSequence(seed).spawn(trials)
    ratios, drift = [], 0.0
    for ss in streams:
        alphas = random_alphas(np.random.default_rng(ss), N, matrix_size)
        lhs = khintchine_lhs(alphas, xs)
        ratios.append(lhs / khintchine_rhs(alphas))
        if xs_prev is not None:
            prev = khintchine_lhs(alphas, xs_prev)
            drift = max(drift, abs(lhs - prev) / lhs)
    summary = {"min": min(ratios), "max": max(ratios), "mean": float(np.mean(ratios))}
    return RatioReport(flavor, N, None if q is None else float(q), cutoff, matrix_size, trials, seed,
                       summary, ratios, drift if xs_prev is not None else None)
