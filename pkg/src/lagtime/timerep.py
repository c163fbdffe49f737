"""Time representation of the modes.

``psi(t) = (2 pi)**-0.5 * int_0^inf exp(-i omega (t - tau)) phi_n(omega) d omega``
has the closed form

    psi(t) = omega0/sqrt(2 pi) c_n Gamma(a/2+1) Gamma(a+n+1) / (n! Gamma(a+1))
             * 2F1(-n, a/2+1; a+1; 1/p) / p**(a/2+1),   p = 1/2 + i omega0 (t - tau)

which :func:`psi_closed_form` evaluates and :func:`psi_numeric` checks by
direct panel quadrature of the Fourier integral.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._errors import DomainError, NumericError, UsageError
from .modes import ModeSpec, log_normalization, mode_energy, mode_table
from .quadrature import Grid1D, gauss_laguerre_rule, integrate_grid
from .specfun import hyp2f1_terminating

__all__ = [
    "ComplexSamples",
    "psi_closed_form",
    "psi_numeric",
    "fourier_halfline",
    "halfline_cutoff",
    "completeness_kernel",
    "time_moments_numeric",
    "TAIL_TOL",
    "BUDGET_TOL",
]

TAIL_TOL = 1e-10
BUDGET_TOL = 1e-8
_PANEL_NODES, _PANEL_WEIGHTS = np.polynomial.legendre.leggauss(24)


@dataclass(frozen=True)
class ComplexSamples:
    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != (len(self.grid),):
            raise UsageError(f"{vals.size} values for a grid of {len(self.grid)} points")
        if not np.all(np.isfinite(vals)):
            raise NumericError("samples must be finite")
        object.__setattr__(self, "values", vals)

    @property
    def points(self):
        return self.grid.points

    def density(self):
        return np.abs(self.values) ** 2


def _log_prefactor(n, alpha):
    return (
        log_normalization(n, alpha)
        + math.lgamma(alpha / 2 + 1)
        + math.lgamma(alpha + n + 1)
        - math.lgamma(n + 1)
        - math.lgamma(alpha + 1)
    )


def psi_closed_form(packet, t):
    """Closed-form time wavefunction of ``packet`` at ``t`` (scalar or array)."""
    mode = packet.mode
    n, a, w0 = mode.n, mode.alpha, mode.omega0
    if not a > -2.0:
        raise DomainError(f"closed form needs alpha > -2, got {a}")
    ta = np.asarray(t, dtype=np.float64)
    p = 0.5 + 1j * w0 * (np.ravel(ta) - packet.tau)
    # principal branch; Re p = 1/2 keeps us off the cut
    assert np.all(p.real > 0)
    series = hyp2f1_terminating(n, a / 2 + 1, a + 1, 1.0 / p)
    pref = w0 * math.exp(_log_prefactor(n, a) - 0.5 * math.log(w0)) / math.sqrt(2 * math.pi)
    out = (pref * series * p ** (-(a / 2 + 1))).reshape(ta.shape)
    return complex(out) if out.ndim == 0 else out


def halfline_cutoff(func, scale, start, tol=TAIL_TOL, growth=1.25, max_steps=400):
    """Find ``X >= start`` with ``int_X^inf |func| <= tol``.

    ``func`` must decay like ``exp(-omega / (2 scale))`` beyond its last sign
    change. The tail is estimated with a Gauss-Laguerre rule in the
    substitution ``omega = X + 2 scale y``. Returns ``(X, tail_estimate)``.
    """
    rule = gauss_laguerre_rule(40, 0.0)
    y = rule.nodes
    w = rule.folded_weights
    x = float(start)
    for _ in range(max_steps):
        tail = 2 * scale * float(np.sum(w * np.abs(func(x + 2 * scale * y))))
        if tail <= tol:
            return x, tail
        x = x * growth + scale
    raise NumericError(f"tail of the half-line integrand did not fall below {tol}")


def fourier_halfline(func, s, cutoff, scale=1.0, nodes_per_panel=None, extra_frequency=0.0):
    """``int_0^cutoff func(omega) exp(-i omega s) d omega`` for each ``s``.

    The interval is cut into panels no longer than ``min(scale, 2 pi/f)``
    with ``f = |s| + extra_frequency`` and a fixed Gauss-Legendre rule on
    each, so every panel sees at most one oscillation of the phase.
    ``extra_frequency`` bounds any oscillation carried by ``func`` itself.
    """
    if nodes_per_panel is None:
        xg, wg = _PANEL_NODES, _PANEL_WEIGHTS
    else:
        xg, wg = np.polynomial.legendre.leggauss(int(nodes_per_panel))
    s_arr = np.atleast_1d(np.asarray(s, dtype=np.float64))
    out = np.empty(s_arr.shape, dtype=np.complex128)
    cache = {}
    for idx, sv in enumerate(s_arr):
        freq = abs(sv) + extra_frequency
        length = scale if freq == 0 else min(scale, 2 * math.pi / freq)
        count = max(1, int(math.ceil(cutoff / length)))
        if count not in cache:
            edges = np.linspace(0.0, cutoff, count + 1)
            half = 0.5 * (edges[1:] - edges[:-1])
            mid = 0.5 * (edges[1:] + edges[:-1])
            nodes = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
            weights = (half[:, None] * wg[None, :]).ravel()
            cache[count] = (nodes, weights * func(nodes))
        nodes, fw = cache[count]
        out[idx] = np.sum(fw * np.exp(-1j * sv * nodes))
    return out


def psi_numeric(packet, grid, quad_order=None):
    """Time wavefunction on ``grid`` by direct quadrature of the Fourier integral.

    ``quad_order`` is the number of Gauss-Legendre nodes per panel and must
    be at least ``n + 20`` (default ``n + 24``). Raises
    :class:`NumericError` if the estimated truncation error exceeds
    ``BUDGET_TOL``.
    """
    mode = packet.mode
    n, a, w0 = mode.n, mode.alpha, mode.omega0
    if quad_order is None:
        quad_order = n + 24
    if quad_order < n + 20:
        raise DomainError(f"quad_order must be >= n + 20 = {n + 20}, got {quad_order}")
    if not isinstance(grid, Grid1D):
        grid = Grid1D(grid)

    def phi(om):
        return mode_energy(mode, om)

    # start beyond the envelope peak and the last zero of L_n
    start = w0 * (a + 4 * n + 4 + 6 * math.sqrt(a + 2 * n + 1))
    cutoff, tail = halfline_cutoff(phi, w0, start)
    if tail / math.sqrt(2 * math.pi) > BUDGET_TOL:
        raise NumericError(f"truncation error estimate {tail:.2e} exceeds {BUDGET_TOL}")
    vals = fourier_halfline(phi, grid.points - packet.tau, cutoff, w0, quad_order)
    return ComplexSamples(grid, vals / math.sqrt(2 * math.pi))


def completeness_kernel(N, alpha, omega0, omega, omega_prime):
    """``sum_(n=0)^N phi_n(omega) phi_n(omega')``.

    ``omega`` and ``omega_prime`` broadcast against each other.
    """
    if int(N) != N or N < 1:
        raise DomainError(f"N must be a positive integer, got {N}")
    ModeSpec(0, alpha, omega0)
    om, omp = np.broadcast_arrays(
        np.asarray(omega, dtype=np.float64), np.asarray(omega_prime, dtype=np.float64)
    )
    a = mode_table(int(N), alpha, omega0, om.ravel())
    b = mode_table(int(N), alpha, omega0, omp.ravel())
    out = np.sum(a * b, axis=0).reshape(om.shape)
    return float(out) if out.ndim == 0 else out


def time_moments_numeric(packet, grid, closed_form=True):
    """Mean time and variance from the sampled density ``|psi(t)|^2``.

    Both are normalized by the grid integral of the density, so the result
    does not depend on how much probability the grid truncates. Returns
    ``(mean, var, norm)``.
    """
    if not isinstance(grid, Grid1D):
        grid = Grid1D(grid)
    if closed_form:
        vals = psi_closed_form(packet, grid.points)
    else:
        vals = psi_numeric(packet, grid).values
    dens = np.abs(vals) ** 2
    t = grid.points
    norm = integrate_grid(dens, grid)
    mean = packet.tau + integrate_grid((t - packet.tau) * dens, grid) / norm
    var = integrate_grid((t - mean) ** 2 * dens, grid) / norm
    return mean, var, norm
