"""Scalar special functions: log-gamma, Pochhammer symbols, generalized
Laguerre polynomials and the terminating Gauss hypergeometric series.

Array inputs are accepted wherever a real or complex argument is; the
heavy lifting is done by :mod:`lagtime.kernels`.
"""

import math
from fractions import Fraction

import numpy as np

from ._errors import DomainError
from .kernels import hyp2f1_terminating_array, laguerre_array

__all__ = [
    "log_gamma",
    "gamma_ratio",
    "pochhammer",
    "laguerre",
    "laguerre_explicit",
    "hyp2f1_terminating",
]

_POCH_DIRECT_MAX = 64


def log_gamma(x):
    """Natural log of the Gamma function for positive finite ``x``."""
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"log_gamma requires finite x > 0, got {x}")
    return math.lgamma(x)


def gamma_ratio(num, den):
    """``prod(Gamma(a) for a in num) / prod(Gamma(b) for b in den)``.

    Evaluated as the exponential of a log-gamma difference so that large
    arguments do not overflow.
    """
    return math.exp(sum(log_gamma(a) for a in num) - sum(log_gamma(b) for b in den))


def _is_nonpositive_int(a):
    return a <= 0 and a == math.floor(a)


def pochhammer(a, m):
    """Rising factorial ``a (a+1) ... (a+m-1)``; 1 when ``m == 0``."""
    a = float(a)
    if not math.isfinite(a):
        raise DomainError(f"pochhammer requires finite a, got {a}")
    m = int(m)
    if m < 0:
        raise DomainError(f"pochhammer requires m >= 0, got {m}")
    if m == 0:
        return 1.0
    if _is_nonpositive_int(a) and -a < m:
        return 0.0
    if m > _POCH_DIRECT_MAX and a > 0:
        return math.exp(math.lgamma(a + m) - math.lgamma(a))
    out = 1.0
    for k in range(m):
        out *= a + k
    return out


def _check_laguerre_args(n, alpha):
    if int(n) != n or n < 0:
        raise DomainError(f"Laguerre degree must be a non-negative integer, got {n}")
    if not alpha > -1.0:
        raise DomainError(f"Laguerre parameter must satisfy alpha > -1, got {alpha}")


def laguerre(n, alpha, x):
    """Generalized Laguerre polynomial ``L_n^alpha(x)`` by upward recurrence.

    Returns a float for scalar ``x`` and an ndarray otherwise.
    """
    _check_laguerre_args(n, alpha)
    xa = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(xa)):
        raise DomainError("laguerre requires finite x")
    out = laguerre_array(int(n), float(alpha), xa.ravel()).reshape(xa.shape)
    return float(out) if out.ndim == 0 else out


def laguerre_explicit(n, alpha, x):
    """``L_n^alpha(x)`` from its explicit power sum, in exact arithmetic.

    ``sum_m (-1)**m binom(n+alpha, n-m) x**m / m!`` with ``alpha`` and ``x``
    taken as the exact rationals their floats represent, so the heavy
    cancellation of the sum costs nothing; the result is correctly rounded.
    An independent check on :func:`laguerre`, not a fast path.
    """
    _check_laguerre_args(n, alpha)
    n = int(n)
    a = Fraction(float(alpha))
    xq = Fraction(float(x))
    # binom(n+a, n-m) for m = n, n-1, ..., 0 by ratio updates
    coef = Fraction(1)
    total = Fraction(0)
    power = [Fraction(1)]
    for _ in range(n):
        power.append(power[-1] * xq)
    for m in range(n, -1, -1):
        total += (-1) ** m * coef * power[m] / math.factorial(m)
        # binom(n+a, n-m+1) = binom(n+a, n-m) * (a+m) / (n-m+1)
        coef = coef * (a + m) / (n - m + 1)
    return float(total)


def hyp2f1_terminating(n, b, c, z):
    """Terminating series ``2F1(-n, b; c; z)`` summed over its n+1 terms.

    ``z`` may be a complex scalar or array. Raises :class:`DomainError` if
    ``c`` is a non-positive integer whose Pochhammer symbol vanishes within
    the retained terms.
    """
    if int(n) != n or n < 0:
        raise DomainError(f"first parameter must encode -n with n >= 0, got n={n}")
    n = int(n)
    b = float(b)
    c = float(c)
    if _is_nonpositive_int(c) and -c < n:
        raise DomainError(f"(c)_m vanishes for c={c} within {n + 1} terms")
    za = np.asarray(z, dtype=np.complex128)
    if not np.all(np.isfinite(za)):
        raise DomainError("hyp2f1_terminating requires finite z")
    out = hyp2f1_terminating_array(n, b, c, za.ravel()).reshape(za.shape)
    return complex(out) if out.ndim == 0 else out
