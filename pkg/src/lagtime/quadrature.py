"""Gauss-Laguerre rules and simple grid integrators.

Nodes come from the eigenvalues of the Laguerre Jacobi matrix (the same
tridiagonal QL solver used by :mod:`lagtime.operators`), polished by Newton
steps on the orthonormal recurrence. Weights are taken from the Christoffel
function evaluated in log space, which keeps their relative accuracy at the
far nodes where the eigenvector route loses it.
"""

import functools
import math
from dataclasses import dataclass

import numpy as np

from ._errors import DomainError, NumericError, UsageError
from .kernels import tridiag_ql

__all__ = [
    "QuadratureRule",
    "Grid1D",
    "gauss_laguerre_rule",
    "symmetric_tridiagonal_eigen",
    "integrate_halfline",
    "integrate_weighted",
    "integrate_grid",
    "orthonormal_table",
    "moment_matrix",
    "MAX_ORDER",
]

MAX_ORDER = 512
EIGEN_TOL = 1e-14
_RESCALE = 1e100


def symmetric_tridiagonal_eigen(diag, offdiag, vectors="full", tol=EIGEN_TOL, maxiter=60):
    """Eigen-decomposition of a symmetric tridiagonal matrix.

    Parameters
    ----------
    diag, offdiag : array_like
        Main diagonal (length n) and first off-diagonal (length n-1).
    vectors : {"full", "first", "none"}
        How much of the eigenvector matrix to accumulate. ``"first"`` keeps
        only the first component of each eigenvector (O(n^2) work).

    Returns
    -------
    eigenvalues : ndarray, ascending
    vectors : ndarray
        Columns are eigenvectors (``"full"``), a single row of first
        components (``"first"``), or an empty array.
    """
    mode = {"none": 0, "first": 1, "full": 2}[vectors]
    diag = np.asarray(diag, dtype=np.float64)
    offdiag = np.asarray(offdiag, dtype=np.float64)
    if offdiag.shape != (max(diag.size - 1, 0),):
        raise UsageError("offdiag must have length len(diag) - 1")
    evals, z, fail = tridiag_ql(diag, offdiag, mode, tol, maxiter)
    if fail >= 0:
        raise NumericError(f"tridiagonal QL failed to converge for eigenvalue index {fail}")
    order = np.argsort(evals, kind="stable")
    return np.asarray(evals)[order], np.asarray(z)[:, order]


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss rule for ``int_0^inf g(x) x**alpha_weight exp(-x) dx``.

    ``log_weights`` is the authoritative representation; ``weights`` may
    overflow for very large ``alpha_weight``.
    """

    order: int
    alpha_weight: float
    nodes: np.ndarray
    log_weights: np.ndarray

    @property
    def weights(self):
        return np.exp(self.log_weights)

    @property
    def folded_weights(self):
        """Weights with ``x**alpha exp(-x)`` divided out (plain integration)."""
        return np.exp(self.log_weights + self.nodes - self.alpha_weight * np.log(self.nodes))


@dataclass(frozen=True)
class Grid1D:
    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64)
        if pts.ndim != 1 or pts.size < 2:
            raise UsageError("a grid needs at least two points")
        if not np.all(np.diff(pts) > 0):
            raise UsageError("grid points must be strictly increasing")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @classmethod
    def linspace(cls, start, stop, count):
        return cls(np.linspace(start, stop, int(count)))

    def __len__(self):
        return self.points.size


def _jacobi(order, alpha):
    k = np.arange(order, dtype=np.float64)
    diag = 2.0 * k + alpha + 1.0
    off = np.sqrt(k[1:] * (k[1:] + alpha))
    return diag, off


def _orthonormal_sums(x, order, alpha):
    """Return ``(log sum_k q_k(x)^2, q_N(x)/q_N'(x))`` for k < order.

    ``q_k`` are the orthonormal Laguerre polynomials times ``sqrt(mu0)``
    (so ``q_0 = 1``); values are rescaled as they grow so nothing overflows.
    """
    q_prev = np.zeros_like(x)
    q = np.ones_like(x)
    dq_prev = np.zeros_like(x)
    dq = np.zeros_like(x)
    total = np.ones_like(x)
    log_scale = np.zeros_like(x)  # log of the factor already removed from q (not q^2)
    for k in range(order):
        a_k = 2.0 * k + alpha + 1.0
        b_k = math.sqrt(k * (k + alpha))
        b_next = math.sqrt((k + 1) * (k + 1 + alpha))
        q_next = ((x - a_k) * q - b_k * q_prev) / b_next
        dq_next = ((x - a_k) * dq + q - b_k * dq_prev) / b_next
        q_prev, q, dq_prev, dq = q, q_next, dq, dq_next
        if k + 1 < order:
            total = total + q * q
        big = np.abs(q) > _RESCALE
        if np.any(big):
            f = np.where(big, 1.0 / _RESCALE, 1.0)
            q, q_prev, dq, dq_prev = q * f, q_prev * f, dq * f, dq_prev * f
            total = total * f * f
            log_scale = log_scale + np.where(big, math.log(_RESCALE), 0.0)
    return np.log(total) + 2.0 * log_scale, q / dq


def _build_rule(order, alpha):
    diag, off = _jacobi(order, alpha)
    nodes, _ = symmetric_tridiagonal_eigen(diag, off, vectors="none")
    for _ in range(3):
        _, step = _orthonormal_sums(nodes, order, alpha)
        # guard against a wild step if a node was not yet in its basin
        step = np.where(np.abs(step) < 1e-6 * np.maximum(nodes, 1.0), step, 0.0)
        nodes = nodes - step
        if np.all(np.abs(step) <= 4 * np.finfo(float).eps * nodes):
            break
    log_sum, _ = _orthonormal_sums(nodes, order, alpha)
    log_weights = math.lgamma(alpha + 1.0) - log_sum
    nodes.flags.writeable = False
    log_weights.flags.writeable = False
    return QuadratureRule(order, alpha, nodes, log_weights)


def _recurrence_rows(x, alpha, top, order):
    """Rows ``q_0..q_top`` at ``x`` and ``log ||(q_0..q_(order-1))||``.

    Works in the dtype of ``x``; rows are rescaled as they grow, with the
    removed log-factor kept per row.
    """
    one = x.dtype.type(1)
    rows = np.empty((top + 1, x.size), dtype=x.dtype)
    logs = np.zeros((top + 1, x.size))
    q_prev = np.zeros_like(x)
    q = np.ones_like(x)
    total = np.ones_like(x)
    log_scale = np.zeros(x.size)
    rows[0] = q
    for k in range(top):
        b_k = np.sqrt(one * k * (k + alpha))
        b_next = np.sqrt(one * (k + 1) * (k + 1 + alpha))
        q_prev, q = q, ((x - (2 * k + alpha + 1) * one) * q - b_k * q_prev) / b_next
        if k + 1 < order:
            total = total + q * q
        big = np.abs(q) > _RESCALE
        if np.any(big):
            f = np.where(big, one / _RESCALE, one)
            q, q_prev, total = q * f, q_prev * f, total * f * f
            log_scale = log_scale + np.where(big, math.log(_RESCALE), 0.0)
        rows[k + 1] = q
        logs[k + 1] = log_scale
    return rows, logs, log_scale, total


def _polish_extended(rule):
    """Nodes of ``rule`` refined by Newton steps in extended precision."""
    x = rule.nodes.astype(np.longdouble)
    one = np.longdouble(1)
    a = rule.alpha_weight
    for _ in range(3):
        q_prev, q = np.zeros_like(x), np.ones_like(x)
        dq_prev, dq = np.zeros_like(x), np.zeros_like(x)
        for k in range(rule.order):
            b_k = np.sqrt(one * k * (k + a))
            b_next = np.sqrt(one * (k + 1) * (k + 1 + a))
            shift = x - (2 * k + a + 1) * one
            q_next = (shift * q - b_k * q_prev) / b_next
            dq_next = (shift * dq + q - b_k * dq_prev) / b_next
            q_prev, q, dq_prev, dq = q, q_next, dq, dq_next
            big = np.abs(q) > _RESCALE
            if np.any(big):
                f = np.where(big, one / _RESCALE, one)
                q, q_prev, dq, dq_prev = q * f, q_prev * f, dq * f, dq_prev * f
        x = x - q / dq
    return x


def orthonormal_table(rule, nmax, extended=True):
    """Nodes and ``V[j, k] = sqrt(w_k) p_j(x_k)`` for ``j = 0..nmax``.

    ``p_j`` are the orthonormal polynomials of the rule's weight with
    positive leading coefficient, i.e. ``(-1)**j c_j L_j^alpha``. Each entry
    is ``q_j(x_k) / ||q(x_k)||``, formed without the tiny weights, so for
    ``j < order`` the columns are unit vectors and
    ``sum_k V[m, k] V[n, k] x_k**p`` gives moments to absolute precision.

    With ``extended`` the nodes are re-polished and the table built in
    ``np.longdouble``; both are returned in that dtype. Where longdouble is
    plain double this degrades gracefully to double accuracy.
    """
    x = _polish_extended(rule) if extended else rule.nodes.astype(np.float64)
    top = max(int(nmax), rule.order - 1)
    rows, logs, log_scale, total = _recurrence_rows(x, rule.alpha_weight, top, rule.order)
    with np.errstate(under="ignore"):
        scale = np.exp((logs - log_scale).astype(x.dtype)) / np.sqrt(total)
    return x, (rows * scale)[: int(nmax) + 1]


def moment_matrix(nmax, alpha, power=0, order=None):
    """``M[m, n] = int x**power p_m p_n x**alpha exp(-x) dx`` for m, n <= nmax.

    Uses the smallest Gauss rule that is exact (``order = nmax + 1 +
    power // 2``) unless ``order`` is given, and the extended-precision
    table of :func:`orthonormal_table`. Returned as float64.
    """
    need = int(nmax) + 1 + int(power) // 2
    rule = gauss_laguerre_rule(need if order is None else max(int(order), need), alpha)
    x, v = orthonormal_table(rule, nmax)
    return np.asarray((v * x ** int(power)) @ v.T, dtype=np.float64)


@functools.lru_cache(maxsize=256)
def _cached_rule(order, alpha):
    return _build_rule(order, alpha)


def gauss_laguerre_rule(order, alpha_weight=0.0):
    """Generalized Gauss-Laguerre rule with weight ``x**alpha_weight exp(-x)``.

    Exact for polynomials of degree ``2*order - 1``. Rules are cached and
    their arrays are read-only.
    """
    if int(order) != order or not 1 <= order <= MAX_ORDER:
        raise DomainError(f"order must be an integer in [1, {MAX_ORDER}], got {order}")
    alpha_weight = float(alpha_weight)
    if not alpha_weight > -1.0 or not math.isfinite(alpha_weight):
        raise DomainError(f"alpha_weight must be > -1, got {alpha_weight}")
    return _cached_rule(int(order), alpha_weight)


def integrate_weighted(g, rule, log_scale=0.0):
    """``exp(log_scale) * int_0^inf g(x) x**alpha exp(-x) dx`` by the rule.

    ``g`` is a callable on the node array, or precomputed node values. The
    scale is folded into the log-weights so large Gamma prefactors cancel
    before exponentiation.
    """
    vals = g(rule.nodes) if callable(g) else np.asarray(g)
    w = np.exp(rule.log_weights + log_scale)
    return np.sum(w * vals, axis=-1)


def integrate_halfline(f, rule, omega0=1.0):
    """``int_0^inf f(omega) d omega`` with ``omega = omega0 * x``.

    ``f`` must include its own decay; the rule's weight is divided out
    analytically, i.e. the sum is ``omega0 * sum_k w_k f(omega0 x_k) /
    (x_k**alpha exp(-x_k))``. Exact when ``f(omega0 x)`` is a polynomial
    times ``x**alpha exp(-x)``.
    """
    vals = np.asarray(f(omega0 * rule.nodes))
    if not np.all(np.isfinite(vals)):
        raise NumericError("integrand is not finite at every quadrature node")
    out = omega0 * np.sum(rule.folded_weights * vals)
    return complex(out) if np.iscomplexobj(out) else float(out)


def integrate_grid(samples, grid=None):
    """Trapezoid integral of samples over a grid.

    ``samples`` may be a :class:`~lagtime.timerep.ComplexSamples` (then
    ``grid`` is taken from it) or a plain array paired with ``grid``.
    """
    if grid is None:
        grid = samples.grid
        values = samples.values
    else:
        values = getattr(samples, "values", samples)
    values = np.asarray(values)
    pts = grid.points if isinstance(grid, Grid1D) else np.asarray(grid, dtype=float)
    if values.shape[-1] != pts.size:
        raise UsageError(f"{values.shape[-1]} samples for a grid of {pts.size} points")
    out = np.trapezoid(values, pts, axis=-1)
    if np.ndim(out) == 0:
        return complex(out) if np.iscomplexobj(out) else float(out)
    return out
