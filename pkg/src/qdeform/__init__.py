"""Exact and numeric tools for q-deformed probability.

Submodules
----------
qexact       q-integers, Gauss binomials, Pochhammer symbols, q-exponentials
partitions   pair and set partitions with crossing and nesting statistics
cumulants    q-cumulants, the induced additive convolutions, Hankel scans
orthopoly    q-Hermite families, Jacobi data, orthogonality checks
jackson      q-derivative and Jackson integrals
qconv        q-convolution of moments, functions and braided-line elements
fock         truncated deformed Fock spaces
khintchine   matrix Khintchine experiments
verify       cross-validation checks behind ``qdeform verify``
"""

from ._backend import BACKEND
from .errors import DomainError, NonConvergenceError, PoleError, VerificationError
from .qexact import QPoly, QRational, QSeries, QSPoly, gauss_binomial, q_factorial, q_integer, q_pochhammer

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DomainError",
    "NonConvergenceError",
    "PoleError",
    "QPoly",
    "QRational",
    "QSPoly",
    "QSeries",
    "VerificationError",
    "gauss_binomial",
    "q_factorial",
    "q_integer",
    "q_pochhammer",
]
