"""Orthonormal energy modes on the positive half-line and their packets.

A mode is ``phi_n(omega) = c_n (omega/omega0)**(alpha/2) exp(-omega/(2 omega0))
L_n^alpha(omega/omega0)`` for ``omega >= 0`` and zero below. Multiplying by
``exp(i omega tau)`` shifts its time-representation centre to ``tau``.

Internally everything is evaluated with ``omega0 = 1`` and rescaled at the
boundary: ``phi(omega) = omega0**-0.5 * phi_unit(omega / omega0)``.

Also holds the ``g_nu``/``f_nu`` Fourier pair, the simplest functions on
which ``t`` and ``omega`` act as a conjugate pair.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._errors import DomainError
from .kernels import laguerre_array, laguerre_table

__all__ = [
    "ModeSpec",
    "PacketSpec",
    "DerivativeExpansion",
    "normalization",
    "log_normalization",
    "mode_energy",
    "mode_table",
    "packet_energy",
    "derivative_expansion",
    "mode_derivative",
    "gnu",
    "fnu",
]


@dataclass(frozen=True)
class ModeSpec:
    """Labels ``(n, alpha, omega0)`` of one mode."""

    n: int
    alpha: float
    omega0: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise DomainError(f"mode index must be a non-negative integer, got {self.n}")
        if not (math.isfinite(self.alpha) and self.alpha > -1.0):
            raise DomainError(f"alpha must be > -1, got {self.alpha}")
        if not (math.isfinite(self.omega0) and self.omega0 > 0.0):
            raise DomainError(f"omega0 must be > 0, got {self.omega0}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "omega0", float(self.omega0))

    def with_n(self, n):
        return ModeSpec(n, self.alpha, self.omega0)


@dataclass(frozen=True)
class PacketSpec:
    """A mode shifted to mean time ``tau`` (units of 1/omega0)."""

    mode: ModeSpec
    tau: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.tau):
            raise DomainError(f"tau must be finite, got {self.tau}")
        object.__setattr__(self, "tau", float(self.tau))


def log_normalization(n, alpha, omega0=1.0):
    return 0.5 * (math.lgamma(n + 1) - math.lgamma(alpha + n + 1) - math.log(omega0))


def normalization(mode):
    """``c_n = sqrt(n! / (omega0 Gamma(alpha + n + 1)))``."""
    return math.exp(log_normalization(mode.n, mode.alpha, mode.omega0))


def _envelope_log(x, alpha):
    """``log(x**(alpha/2) exp(-x/2))``, with ``x = 0`` handled per alpha."""
    with np.errstate(divide="ignore"):
        logx = np.log(x)
    if alpha == 0.0:
        return -0.5 * x
    return np.where(x > 0, 0.5 * alpha * logx - 0.5 * x, -np.inf if alpha > 0 else np.inf)


def _unit_modes(nmax, alpha, x):
    """Rows ``phi_k(x)``, k = 0..nmax, for omega0 = 1 and x >= 0."""
    table = laguerre_table(nmax, alpha, x)
    logc = np.array([log_normalization(k, alpha) for k in range(nmax + 1)])
    # c_k and the envelope are combined in log space so large alpha cannot overflow
    with np.errstate(over="ignore", invalid="ignore"):
        scale = np.exp(logc[:, None] + _envelope_log(x, alpha)[None, :])
    return scale * table


def _unit_mode(n, alpha, x):
    logc = log_normalization(n, alpha)
    with np.errstate(over="ignore", invalid="ignore"):
        scale = np.exp(logc + _envelope_log(x, alpha))
    return scale * laguerre_array(n, alpha, x)


def mode_energy(mode, omega):
    """Mode amplitude ``phi_n^alpha(omega)``; zero for ``omega < 0``."""
    om = np.asarray(omega, dtype=np.float64)
    x = np.ravel(om) / mode.omega0
    out = np.zeros(x.shape)
    pos = x >= 0
    out[pos] = _unit_mode(mode.n, mode.alpha, x[pos]) / math.sqrt(mode.omega0)
    out = out.reshape(om.shape)
    return float(out) if out.ndim == 0 else out


def mode_table(nmax, alpha, omega0, omega):
    """All modes ``0..nmax`` at once; shape ``(nmax + 1, len(omega))``."""
    x = np.atleast_1d(np.asarray(omega, dtype=np.float64)) / omega0
    out = np.zeros((nmax + 1, x.size))
    pos = x >= 0
    out[:, pos] = _unit_modes(nmax, alpha, x[pos]) / math.sqrt(omega0)
    return out


def packet_energy(packet, omega):
    """``exp(i omega tau) phi_n(omega)``."""
    om = np.asarray(omega, dtype=np.float64)
    out = np.exp(1j * om * packet.tau) * mode_energy(packet.mode, om)
    return complex(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class DerivativeExpansion:
    """Coefficients of ``d phi_n^alpha / d omega`` (omega0 = 1 units).

    ``dphi_n = sum_l N_nl phi_l^(alpha-2) + self_coefficient * phi_n
    - sum_k b_k phi_k^alpha`` with ``b_k = c_n / c_k`` for every ``k < n``.

    ``lower_coefficient`` is ``c_n / c_(n-1)`` (0 for n = 0), the only
    lower term kept by the single-term form of the identity. That form is
    exact for n <= 1; for larger n the pointwise derivative needs all of
    ``lower_terms``. The discarded terms integrate away in
    ``int (dphi)^2``, which is why the closed form of the time variance is
    unaffected.
    """

    mode: ModeSpec
    cross_terms: tuple
    self_coefficient: float
    lower_coefficient: float
    lower_terms: tuple

    def evaluate(self, omega, single_lower_term=False):
        """``d phi / d omega`` at physical ``omega`` from the expansion."""
        a, w0 = self.mode.alpha, self.mode.omega0
        x = np.atleast_1d(np.asarray(omega, dtype=np.float64)) / w0
        total = np.zeros(x.shape)
        for l, coef in self.cross_terms:
            total += coef * _unit_mode(l, a - 2.0, x)
        total += self.self_coefficient * _unit_mode(self.mode.n, a, x)
        if single_lower_term:
            if self.mode.n > 0:
                total -= self.lower_coefficient * _unit_mode(self.mode.n - 1, a, x)
        else:
            for k, coef in self.lower_terms:
                total -= coef * _unit_mode(k, a, x)
        total = np.where(x >= 0, total, 0.0) * w0**-1.5
        return float(total[0]) if np.ndim(omega) == 0 else total


def derivative_expansion(mode):
    """Expansion of the mode derivative over ``phi^(alpha-2)`` and ``phi^alpha``.

    Requires ``alpha >= 2`` so the ``alpha - 2`` family is normalizable.
    """
    a, n = mode.alpha, mode.n
    if a < 2.0:
        raise DomainError(f"derivative expansion needs alpha >= 2, got {a}")
    logc_n = log_normalization(n, a)
    cross = tuple(
        (l, 0.5 * a * math.exp(logc_n - log_normalization(l, a - 2.0)) * (n - l + 1))
        for l in range(n + 1)
    )
    lower = tuple((k, math.exp(logc_n - log_normalization(k, a))) for k in range(n))
    lower_coefficient = lower[-1][1] if n > 0 else 0.0
    return DerivativeExpansion(mode, cross, -0.5, lower_coefficient, lower)


def mode_derivative(mode, omega):
    """``d phi_n / d omega`` directly from the polynomial identity
    ``d/dx L_n^a = -L_(n-1)^(a+1)``; independent of the expansion.

    At ``omega = 0`` the right derivative is returned: finite for
    ``alpha = 0`` and ``alpha >= 2``, infinite for ``0 < alpha < 2``.
    """
    a, n, w0 = mode.alpha, mode.n, mode.omega0
    om = np.atleast_1d(np.asarray(omega, dtype=np.float64))
    x = om / w0
    out = np.zeros(x.shape)
    pos = x > 0
    xp = x[pos]
    poly = (0.5 * a / xp - 0.5) * laguerre_array(n, a, xp)
    if n > 0:
        poly -= laguerre_array(n - 1, a + 1.0, xp)
    out[pos] = np.exp(log_normalization(n, a) + _envelope_log(xp, a)) * poly
    origin = x == 0
    if np.any(origin):
        # c [ (a/2) x^(a/2-1) L_n - x^(a/2) (L_n / 2 + L_(n-1)^(a+1)) ] at x = 0
        c = math.exp(log_normalization(n, a))
        ln0 = float(laguerre_array(n, a, np.zeros(1))[0])
        if a == 0.0:
            low = float(laguerre_array(n - 1, 1.0, np.zeros(1))[0]) if n > 0 else 0.0
            val = c * (-0.5 * ln0 - low)
        elif a == 2.0:
            val = c * ln0
        elif a < 2.0:
            val = math.inf
        else:
            val = 0.0
        out[origin] = val
    out = out * w0**-1.5
    return float(out[0]) if np.ndim(omega) == 0 else out


def gnu(t, nu, beta=1.0):
    """``(beta + i t)**-nu``."""
    if int(nu) != nu or nu < 1:
        raise DomainError(f"nu must be a positive integer, got {nu}")
    if not beta > 0:
        raise DomainError(f"beta must be > 0, got {beta}")
    out = (beta + 1j * np.asarray(t, dtype=np.float64)) ** (-int(nu))
    return complex(out) if np.ndim(out) == 0 else out


def fnu(omega, nu, beta=1.0):
    """``sqrt(2 pi)/Gamma(nu) omega**(nu-1) exp(-beta omega)`` for omega > 0."""
    if int(nu) != nu or nu < 1:
        raise DomainError(f"nu must be a positive integer, got {nu}")
    if not beta > 0:
        raise DomainError(f"beta must be > 0, got {beta}")
    om = np.asarray(omega, dtype=np.float64)
    pos = om > 0
    safe = np.where(pos, om, 1.0)
    val = np.exp(0.5 * math.log(2 * math.pi) - math.lgamma(nu) + (nu - 1) * np.log(safe) - beta * safe)
    out = np.where(pos, val, 0.0)
    return float(out) if out.ndim == 0 else out
