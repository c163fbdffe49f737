"""The Hamiltonian in the mode basis and the moments built from it.

Multiplication by ``omega`` is tridiagonal in the ``phi_n^alpha`` basis
and its square pentadiagonal; both follow from the Laguerre three-term
recurrence ``x L_n = (2n+a+1) L_n - (n+1) L_(n+1) - (n+a) L_(n-1)``.
Every closed form here has a quadrature twin in this module so the two can
be compared.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._errors import DomainError, NumericError
from .kernels import laguerre_array
from .modes import ModeSpec, PacketSpec, derivative_expansion, log_normalization
from .quadrature import (
    gauss_laguerre_rule,
    integrate_weighted,
    moment_matrix,
    orthonormal_table,
    symmetric_tridiagonal_eigen,
)

__all__ = [
    "BandedOperator",
    "EnergyMoments",
    "TimeMoments",
    "SpectrumResult",
    "UncertaintyReport",
    "hamiltonian_matrix",
    "hamiltonian_sq_matrix",
    "matrix_element_quadrature",
    "element_table_quadrature",
    "energy_moments",
    "energy_moments_quadrature",
    "spectrum_truncated",
    "cross_alpha_overlap",
    "time_variance_closed_form",
    "time_variance_quadrature",
    "time_moments",
    "uncertainty_report",
    "TIME_VARIANCE_RTOL",
]

TIME_VARIANCE_RTOL = 1e-9
ORACLE_EXTRA_ORDER = 8


@dataclass(frozen=True)
class BandedOperator:
    """Symmetric band matrix stored by diagonals.

    ``bands[k][i]`` is the element ``(i, i + k)``; ``unit`` is the power of
    omega0 already multiplied in.
    """

    dim: int
    half_bandwidth: int
    bands: tuple
    unit: int = 1

    def element(self, m, n):
        k = abs(m - n)
        if not (0 <= m < self.dim and 0 <= n < self.dim):
            raise IndexError(f"({m}, {n}) outside a {self.dim}x{self.dim} operator")
        if k > self.half_bandwidth:
            return 0.0
        return float(self.bands[k][min(m, n)])

    def diagonal(self):
        return np.array(self.bands[0])

    def to_dense(self):
        out = np.zeros((self.dim, self.dim))
        for k, band in enumerate(self.bands):
            idx = np.arange(self.dim - k)
            out[idx, idx + k] = band
            out[idx + k, idx] = band
        return out


def _check_dims(nmax, alpha, omega0):
    if int(nmax) != nmax or nmax < 1:
        raise DomainError(f"nmax must be a positive integer, got {nmax}")
    ModeSpec(0, alpha, omega0)


def _offdiag(k, alpha):
    """Magnitude of the coupling between modes k and k+1."""
    return np.sqrt((k + 1.0) * (k + alpha + 1.0))


def hamiltonian_matrix(nmax, alpha, omega0=1.0):
    """Multiplication by omega on modes ``0..nmax-1`` (units of omega0)."""
    _check_dims(nmax, alpha, omega0)
    k = np.arange(nmax, dtype=np.float64)
    diag = (alpha + 2.0 * k + 1.0) * omega0
    off = -_offdiag(k[:-1], alpha) * omega0
    return BandedOperator(int(nmax), 1, (diag, off), unit=1)


def hamiltonian_sq_matrix(nmax, alpha, omega0=1.0):
    """Multiplication by omega**2 on modes ``0..nmax-1``.

    Not the elementwise square of :func:`hamiltonian_matrix`: each entry is
    the full matrix product over the untruncated basis.
    """
    _check_dims(nmax, alpha, omega0)
    k = np.arange(nmax, dtype=np.float64)
    w2 = omega0 * omega0
    diag = ((k + 1) * (alpha + k + 1) + (alpha + 2 * k + 1) ** 2 + k * (alpha + k)) * w2
    k1 = k[:-1]
    off1 = -2.0 * (alpha + 2 * k1 + 2) * _offdiag(k1, alpha) * w2
    k2 = k[:-2]
    off2 = _offdiag(k2, alpha) * _offdiag(k2 + 1, alpha) * w2
    return BandedOperator(int(nmax), 2, (diag, off1, off2), unit=2)


def matrix_element_quadrature(power, m, n, alpha, omega0=1.0):
    """``int omega**power phi_m phi_n d omega`` by an exact Gauss rule.

    Built from the normalized extended-precision table, so elements that
    vanish analytically come out at the 1e-15 level even where the diagonal
    is in the thousands.
    """
    top = max(m, n)
    mat = moment_matrix(top, alpha, power, order=top + 1 + power // 2)
    return float((-1) ** (m + n) * mat[m, n]) * omega0**power


def element_table_quadrature(power, nmax, alpha, omega0=1.0):
    """All elements of :func:`matrix_element_quadrature` for m, n <= nmax."""
    mat = moment_matrix(nmax, alpha, power)
    sign = (-1.0) ** np.arange(nmax + 1)
    return mat * np.outer(sign, sign) * omega0**power


@dataclass(frozen=True)
class EnergyMoments:
    mean: float
    second: float
    var: float


def energy_moments(mode):
    """Mean, second moment and variance of omega in one mode (closed form)."""
    n, a, w0 = mode.n, mode.alpha, mode.omega0
    mean = (a + 2 * n + 1) * w0
    var = ((n + 1) * (a + n + 1) + n * (a + n)) * w0 * w0
    second = ((n + 1) * (a + n + 1) + (a + 2 * n + 1) ** 2 + n * (a + n)) * w0 * w0
    return EnergyMoments(mean, second, var)


def energy_moments_quadrature(mode):
    """Same moments as :func:`energy_moments`, by quadrature of the mode."""
    n, a, w0 = mode.n, mode.alpha, mode.omega0
    rule = gauss_laguerre_rule(n + 2, a)
    x, v = orthonormal_table(rule, n)
    dens = v[n] ** 2
    m1 = np.sum(x * dens)
    m2 = np.sum(x * x * dens)
    # central moment directly; m2 - m1**2 cancels badly at large alpha
    var = np.sum((x - m1) ** 2 * dens)
    return EnergyMoments(float(m1) * w0, float(m2) * w0 * w0, float(var) * w0 * w0)


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    truncation_dim: int
    max_residual: float

    @property
    def orthonormality_residual(self):
        v = self.eigenvectors
        return float(np.max(np.abs(v.T @ v - np.eye(v.shape[1]))))


def spectrum_truncated(nmax, alpha, omega0=1.0):
    """Eigenpairs of the Hamiltonian truncated to modes ``0..nmax-1``.

    The eigenvalues of this truncation coincide with the nodes of the
    ``nmax``-point Gauss-Laguerre rule (times omega0).
    """
    if int(nmax) != nmax or not 2 <= nmax <= 2048:
        raise DomainError(f"nmax must be an integer in [2, 2048], got {nmax}")
    h = hamiltonian_matrix(nmax, alpha, omega0)
    diag, off = h.bands
    evals, evecs = symmetric_tridiagonal_eigen(diag, off, vectors="full")
    dense = h.to_dense()
    norm = np.linalg.norm(dense, 2)
    resid = np.linalg.norm(dense @ evecs - evecs * evals, axis=0)
    worst = int(np.argmax(resid))
    if resid[worst] > 1e-9 * norm:
        raise NumericError(f"eigenpair {worst} residual {resid[worst]:.3e} exceeds 1e-9*||H||")
    return SpectrumResult(evals, evecs, int(nmax), float(resid[worst] / norm))


def cross_alpha_overlap(l, n, alpha, omega0=1.0):
    """``int phi_l^(alpha-2) phi_n^alpha d omega``; dimensionless.

    ``omega0`` is accepted for symmetry with the other operations; the
    overlap does not depend on it.
    """
    if alpha < 2.0:
        raise DomainError(f"cross-alpha overlaps need alpha >= 2, got {alpha}")
    ModeSpec(n, alpha, omega0)
    ModeSpec(l, alpha - 2.0, omega0)
    rule = gauss_laguerre_rule(l + n + ORACLE_EXTRA_ORDER, alpha - 1.0)
    x = rule.nodes
    g = laguerre_array(l, alpha - 2.0, x) * laguerre_array(n, alpha, x)
    logc = log_normalization(l, alpha - 2.0) + log_normalization(n, alpha)
    return float(integrate_weighted(g, rule, logc))


def time_variance_closed_form(mode):
    """Time variance from the expansion of the mode derivative.

    ``1/4 + sum N_nl^2 + (c_n/c_(n-1))^2 - sum_l N_nl <l|n>
    - 2 (c_n/c_(n-1)) sum_l N_nl <l|n-1>``, with ``<l|k>`` the cross-alpha
    overlaps; returned in units of omega0**-2.
    """
    n, a = mode.n, mode.alpha
    exp = derivative_expansion(mode)
    nl = np.array([coef for _, coef in exp.cross_terms])
    total = 0.25 + float(np.sum(nl * nl))
    total -= sum(nl[l] * cross_alpha_overlap(l, n, a) for l in range(n + 1))
    if n > 0:
        r = exp.lower_coefficient
        total += r * r
        total -= 2.0 * r * sum(nl[l] * cross_alpha_overlap(l, n - 1, a) for l in range(n + 1))
    return total / mode.omega0**2


def time_variance_quadrature(mode):
    """``int (d phi_n / d omega)^2 d omega`` by an exact Gauss rule.

    The derivative comes from ``d/dx L_n^a = -L_(n-1)^(a+1)`` rather than
    from the mode expansion, so this is an independent check on
    :func:`time_variance_closed_form`.
    """
    n, a = mode.n, mode.alpha
    if a <= 1.0:
        raise DomainError(f"the time variance is infinite for alpha <= 1, got {a}")
    rule = gauss_laguerre_rule(n + 2 + ORACLE_EXTRA_ORDER, a - 2.0)
    x = rule.nodes
    # (dphi/dx)^2 = c^2 x^(a-2) e^(-x) g(x)^2
    g = 0.5 * (a - x) * laguerre_array(n, a, x)
    if n > 0:
        g -= x * laguerre_array(n - 1, a + 1.0, x)
    return float(integrate_weighted(g * g, rule, 2.0 * log_normalization(n, a))) / mode.omega0**2


@dataclass(frozen=True)
class TimeMoments:
    """Time moments of a packet (units of 1/omega0).

    ``var`` is the closed form when it agrees with the quadrature within
    ``TIME_VARIANCE_RTOL`` and the quadrature value otherwise; both are
    kept.
    """

    mean: float
    second: float
    var: float
    var_closed_form: float
    var_quadrature: float

    @property
    def relative_discrepancy(self):
        return abs(self.var_closed_form - self.var_quadrature) / abs(self.var_quadrature)

    @property
    def agrees(self):
        return self.relative_discrepancy <= TIME_VARIANCE_RTOL


def time_moments(packet):
    mode = packet.mode
    if mode.alpha < 2.0:
        raise DomainError(
            f"closed-form time moments need alpha >= 2 (got {mode.alpha}); "
            "use lagtime.timerep.time_moments_numeric for the time-domain estimate"
        )
    closed = time_variance_closed_form(mode)
    quad = time_variance_quadrature(mode)
    var = closed
    if abs(closed - quad) > TIME_VARIANCE_RTOL * abs(quad):
        warnings.warn(
            f"time variance closed form {float(closed)!r} disagrees with quadrature {float(quad)!r}; "
            "using the quadrature value",
            RuntimeWarning,
            stacklevel=2,
        )
        var = quad
    tau = packet.tau
    return TimeMoments(tau, tau * tau + var, var, closed, quad)


@dataclass(frozen=True)
class UncertaintyReport:
    mode: ModeSpec
    tau: float
    mean_H: float
    second_H: float
    var_H: float
    mean_T: float
    second_T: float
    var_T: float
    product: float
    oracle_residuals: dict = field(default_factory=dict)

    @property
    def delta_H(self):
        return math.sqrt(self.var_H)

    @property
    def delta_T(self):
        return math.sqrt(self.var_T)

    def as_dict(self):
        out = {
            "n": self.mode.n,
            "alpha": self.mode.alpha,
            "omega0": self.mode.omega0,
            "tau": self.tau,
            "mean_H": self.mean_H,
            "second_H": self.second_H,
            "var_H": self.var_H,
            "delta_H": self.delta_H,
            "mean_T": self.mean_T,
            "second_T": self.second_T,
            "var_T": self.var_T,
            "delta_T": self.delta_T,
            "product": self.product,
        }
        out.update({f"residual_{k}": v for k, v in self.oracle_residuals.items()})
        return out


def uncertainty_report(mode, tau=0.0):
    """Energy and time moments of ``|n, tau>`` with their oracle residuals."""
    if mode.alpha < 2.0:
        raise DomainError(f"uncertainty reports need alpha >= 2, got {mode.alpha}")
    em = energy_moments(mode)
    eq = energy_moments_quadrature(mode)
    tm = time_moments(PacketSpec(mode, tau))
    residuals = {
        "mean_H": abs(em.mean - eq.mean) / abs(em.mean),
        "second_H": abs(em.second - eq.second) / abs(em.second),
        "var_H": abs(em.var - eq.var) / abs(em.var),
        "var_T": tm.relative_discrepancy,
    }
    product = math.sqrt(em.var * tm.var)
    return UncertaintyReport(
        mode, float(tau), em.mean, em.second, em.var, tm.mean, tm.second, tm.var, product, residuals
    )
