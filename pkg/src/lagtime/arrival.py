"""Time-of-arrival amplitudes for massless particles in one dimension.

The amplitude that a state ``sum_m phi_m |m>`` arrives at detector position
``x`` around time ``tau`` with direction ``s`` is

    <n tau x s|Psi> = (2 pi)**-0.5 int_0^inf exp(i s omega x) exp(-i omega tau)
                      phi_n(omega) <omega|Psi> d omega.

With ``u = omega0 (tau - s x)`` each mode contributes

    psi_nm (i u)**(m+n) / (1 + i u)**(m+n+alpha+1)
        * 2F1(-m, -n; -m-n-alpha; (1 + u**2)/u**2),
    psi_nm = omega0/sqrt(2 pi) c_n c_m Gamma(m+n+alpha+1) / (m! n!).

The power of the denominator includes ``alpha``; this is what the
quadrature of the defining integral reproduces (already for m = n = 0 the
integral is ``Gamma(alpha+1)/(1+iu)**(alpha+1)``). The hypergeometric
argument blows up at ``u = 0``, so the series is regrouped term by term
into ``i**(m+n) u**(m+n-2k) (1+u**2)**k``, which is finite everywhere and
makes the zero at ``u = 0`` for ``m != n`` exact.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._errors import DomainError, UsageError
from .modes import ModeSpec, PacketSpec, log_normalization, mode_table
from .quadrature import Grid1D
from .specfun import hyp2f1_terminating, pochhammer
from .timerep import fourier_halfline, halfline_cutoff

__all__ = [
    "ArrivalQuery",
    "StateCoefficients",
    "toa_amplitude_mode",
    "toa_amplitude_state",
    "toa_amplitude_quadrature",
    "toa_amplitude_unregrouped",
    "toa_density_scan",
]


@dataclass(frozen=True)
class ArrivalQuery:
    """Detector packet ``|n tau x s>``: mode n shifted to tau, at x, moving along s."""

    packet: PacketSpec
    x: float = 0.0
    s: int = 1

    def __post_init__(self):
        if self.s not in (1, -1):
            raise DomainError(f"direction s must be +1 or -1, got {self.s}")
        if not math.isfinite(self.x):
            raise DomainError(f"x must be finite, got {self.x}")
        object.__setattr__(self, "s", int(self.s))
        object.__setattr__(self, "x", float(self.x))

    @classmethod
    def build(cls, n, alpha, omega0=1.0, tau=0.0, x=0.0, s=1):
        return cls(PacketSpec(ModeSpec(n, alpha, omega0), tau), x, s)

    @property
    def mode(self):
        return self.packet.mode

    @property
    def u(self):
        """Dimensionless lag ``omega0 (tau - s x)``."""
        return self.mode.omega0 * (self.packet.tau - self.s * self.x)

    def at_tau(self, tau):
        return ArrivalQuery(PacketSpec(self.mode, tau), self.x, self.s)


@dataclass(frozen=True)
class StateCoefficients:
    """Expansion coefficients of a state in the modes of the detector basis."""

    coefficients: np.ndarray
    alpha: float
    omega0: float = 1.0
    normalized: bool = False

    def __post_init__(self):
        coef = np.atleast_1d(np.asarray(self.coefficients, dtype=np.complex128))
        if coef.ndim != 1 or coef.size == 0:
            raise UsageError("a state needs at least one coefficient")
        if not np.all(np.isfinite(coef)):
            raise DomainError("state coefficients must be finite")
        ModeSpec(0, self.alpha, self.omega0)
        if self.normalized and abs(np.sum(np.abs(coef) ** 2) - 1.0) > 1e-10:
            raise DomainError("coefficients flagged normalized do not have unit norm")
        coef.flags.writeable = False
        object.__setattr__(self, "coefficients", coef)

    @classmethod
    def single(cls, m, alpha, omega0=1.0):
        coef = np.zeros(m + 1, dtype=np.complex128)
        coef[m] = 1.0
        return cls(coef, alpha, omega0, normalized=True)


def _log_psi_nm(n, m, alpha, omega0):
    return (
        math.log(omega0)
        - 0.5 * math.log(2 * math.pi)
        + log_normalization(n, alpha, omega0)
        + log_normalization(m, alpha, omega0)
        + math.lgamma(m + n + alpha + 1)
        - math.lgamma(m + 1)
        - math.lgamma(n + 1)
    )


def _regrouped(n, m, alpha, u):
    """``sum_k coef_k i**(m+n) u**(m+n-2k) (1+u**2)**k / (1+iu)**(m+n+alpha+1)``."""
    u = np.asarray(u, dtype=np.float64)
    total = np.zeros(u.shape, dtype=np.complex128)
    c = -m - n - alpha
    for k in range(min(m, n) + 1):
        coef = pochhammer(-m, k) * pochhammer(-n, k) / (pochhammer(c, k) * math.factorial(k))
        total = total + coef * u ** (m + n - 2 * k) * (1.0 + u * u) ** k
    phase = 1j ** ((m + n) % 4)
    return phase * total / (1.0 + 1j * u) ** (m + n + alpha + 1)


def toa_amplitude_mode(query, m):
    """Amplitude ``<n tau x s|m>`` for the single-mode state ``|m>``."""
    if int(m) != m or m < 0:
        raise DomainError(f"m must be a non-negative integer, got {m}")
    mode = query.mode
    n, a, w0 = mode.n, mode.alpha, mode.omega0
    return complex(math.exp(_log_psi_nm(n, int(m), a, w0)) * _regrouped(n, int(m), a, query.u))


def toa_amplitude_unregrouped(query, m):
    """Same amplitude through ``u**(m+n) 2F1(..., (1+u**2)/u**2)`` directly.

    Undefined at ``u = 0``; kept to check the regrouping away from it.
    """
    mode = query.mode
    n, a, w0 = mode.n, mode.alpha, mode.omega0
    u = query.u
    if u == 0:
        raise DomainError("the unregrouped form is singular at u = 0")
    # 2F1(-m, -n; c; z) with the shorter parameter as the terminating one
    lo, hi = sorted((int(m), n))
    series = hyp2f1_terminating(lo, -hi, -m - n - a, (1 + u * u) / (u * u))
    val = (1j * u) ** (m + n) / (1 + 1j * u) ** (m + n + a + 1) * series
    return complex(math.exp(_log_psi_nm(n, int(m), a, w0)) * val)


def _check_state(query, state):
    if abs(state.alpha - query.mode.alpha) > 0 or abs(state.omega0 - query.mode.omega0) > 0:
        raise UsageError("state and detector must share alpha and omega0")


def toa_amplitude_state(query, state):
    """``sum_m phi_m <n tau x s|m>`` over the state's coefficients."""
    _check_state(query, state)
    total = 0j
    for m, coef in enumerate(state.coefficients):
        if coef != 0:
            total += coef * toa_amplitude_mode(query, m)
    return total


def toa_amplitude_quadrature(query, state, dispersion=None, slope_bound=1.0):
    """Amplitude by direct quadrature of the defining half-line integral.

    ``dispersion`` maps omega to momentum ``p(omega)``; the default is the
    massless ``p = s omega``. For other dispersions the phase
    ``p(omega) x - s omega x`` is folded into the integrand and
    ``slope_bound`` must bound ``|dp/d omega|`` so panels resolve it.
    """
    _check_state(query, state)
    mode = query.mode
    n, a, w0 = mode.n, mode.alpha, mode.omega0
    mmax = state.coefficients.size - 1
    top = max(n, mmax)

    def integrand(om):
        table = mode_table(top, a, w0, om)
        val = table[n] * (state.coefficients @ table[: mmax + 1])
        if dispersion is not None:
            val = val * np.exp(1j * (dispersion(om) - query.s * om) * query.x)
        return val

    start = w0 * (2 * a + 8 * top + 8)
    cutoff, _ = halfline_cutoff(lambda om: np.abs(integrand(om)), w0 / 2, start, tol=1e-13)
    extra = 0.0 if dispersion is None else (slope_bound + 1) * abs(query.x)
    out = fourier_halfline(integrand, [query.u / w0], cutoff, w0, extra_frequency=extra)
    return complex(out[0]) / math.sqrt(2 * math.pi)


def toa_density_scan(n, alpha, omega0, x, s, state, tau_grid):
    """``|<n tau x s|Psi>|^2`` for every tau on ``tau_grid``."""
    if not isinstance(tau_grid, Grid1D):
        tau_grid = Grid1D(tau_grid)
    base = ArrivalQuery.build(n, alpha, omega0, 0.0, x, s)
    _check_state(base, state)
    u = omega0 * (tau_grid.points - s * x)
    mode_part = np.zeros(u.shape, dtype=np.complex128)
    for m, coef in enumerate(state.coefficients):
        if coef != 0:
            mode_part += coef * math.exp(_log_psi_nm(n, m, alpha, omega0)) * _regrouped(n, m, alpha, u)
    return np.abs(mode_part) ** 2
