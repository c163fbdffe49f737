import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lagtime._errors import DomainError
from lagtime.modes import (
    ModeSpec,
    PacketSpec,
    derivative_expansion,
    fnu,
    gnu,
    mode_derivative,
    mode_energy,
    mode_table,
    normalization,
    packet_energy,
)
from lagtime.quadrature import Grid1D, gauss_laguerre_rule, integrate_grid, integrate_halfline
from lagtime.specfun import laguerre
from lagtime.timerep import completeness_kernel


def test_normalization_examples():
    assert normalization(ModeSpec(0, 2.0)) == pytest.approx(1 / math.sqrt(2), rel=1e-15)
    assert normalization(ModeSpec(0, 0.0)) == 1.0
    assert normalization(ModeSpec(3, 20.0)) == pytest.approx(math.sqrt(6 / math.gamma(24)), rel=1e-14)


def test_normalization_scales_with_omega0():
    assert normalization(ModeSpec(2, 3.0, 4.0)) == pytest.approx(normalization(ModeSpec(2, 3.0)) / 2, rel=1e-15)


def test_normalization_of_mode_by_quadrature():
    mode = ModeSpec(3, 20.0)
    rule = gauss_laguerre_rule(12, 20.0)
    assert integrate_halfline(lambda w: mode_energy(mode, w) ** 2, rule) == pytest.approx(1.0, rel=1e-13)


@pytest.mark.parametrize("n, alpha, omega0", [(-1, 2.0, 1.0), (1.5, 2.0, 1.0), (0, -1.0, 1.0),
                                              (0, math.nan, 1.0), (0, 2.0, 0.0), (0, 2.0, -3.0)])
def test_modespec_validation(n, alpha, omega0):
    with pytest.raises(DomainError):
        ModeSpec(n, alpha, omega0)


def test_packetspec_validation():
    with pytest.raises(DomainError):
        PacketSpec(ModeSpec(0, 2.0), math.inf)


def test_mode_energy_examples():
    for n in (0, 3):
        assert mode_energy(ModeSpec(n, 2.0), -1.0) == 0.0
    assert mode_energy(ModeSpec(0, 2.0), 0.0) == 0.0
    # alpha = 0 is finite at the origin: c_n L_n(0)
    assert mode_energy(ModeSpec(4, 0.0), 0.0) == pytest.approx(1.0, rel=1e-15)


def test_mode_energy_unit_norm_n5():
    mode = ModeSpec(5, 2.0)
    rule = gauss_laguerre_rule(11, 2.0)
    assert integrate_halfline(lambda w: mode_energy(mode, w) ** 2, rule) == pytest.approx(1.0, rel=1e-13)


def test_mode_energy_direct_formula():
    mode = ModeSpec(3, 2.5, 1.7)
    om = np.array([0.2, 1.0, 4.0, 11.0])
    x = om / 1.7
    ref = normalization(mode) * x ** 1.25 * np.exp(-x / 2) * laguerre(3, 2.5, x)
    assert np.allclose(mode_energy(mode, om), ref, rtol=1e-13)


def test_mode_energy_large_alpha_no_overflow():
    mode = ModeSpec(3, 1e4)
    om = np.linspace(9000, 11000, 5)
    vals = mode_energy(mode, om)
    assert np.all(np.isfinite(vals))
    assert np.max(np.abs(vals)) > 1e-3


def test_mode_table_matches_single_modes():
    om = np.linspace(-1.0, 30.0, 50)
    table = mode_table(6, 2.0, 1.3, om)
    for n in range(7):
        assert np.allclose(table[n], mode_energy(ModeSpec(n, 2.0, 1.3), om), rtol=1e-14, atol=1e-300)


def test_packet_energy_examples():
    mode = ModeSpec(2, 2.0)
    om = np.linspace(0.0, 10.0, 11)
    assert np.array_equal(packet_energy(PacketSpec(mode, 0.0), om), mode_energy(mode, om).astype(complex))
    assert abs(packet_energy(PacketSpec(mode, 7.0), 3.0)) == pytest.approx(abs(mode_energy(mode, 3.0)), rel=1e-15)
    val = packet_energy(PacketSpec(ModeSpec(0, 2.0), 0.5), 2.0)
    assert val / mode_energy(ModeSpec(0, 2.0), 2.0) == pytest.approx(np.exp(1j), rel=1e-15)


def _central_difference(mode, w, h=1e-5):
    return (mode_energy(mode, w + h) - mode_energy(mode, w - h)) / (2 * h)


def test_derivative_expansion_n0():
    for a in (2.0, 4.0, 20.0):
        exp = derivative_expansion(ModeSpec(0, a))
        assert exp.lower_coefficient == 0.0
        assert len(exp.cross_terms) == 1
        c0a = normalization(ModeSpec(0, a))
        c0am2 = normalization(ModeSpec(0, a - 2.0))
        assert exp.cross_terms[0][1] == pytest.approx(0.5 * a * c0a / c0am2, rel=1e-14)
        assert exp.self_coefficient == -0.5


@pytest.mark.parametrize("n", range(7))
def test_derivative_expansion_shape(n):
    exp = derivative_expansion(ModeSpec(n, 4.0))
    assert [l for l, _ in exp.cross_terms] == list(range(n + 1))
    assert (exp.lower_coefficient == 0.0) == (n == 0)
    if n:
        ratio = normalization(ModeSpec(n, 4.0)) / normalization(ModeSpec(n - 1, 4.0))
        assert exp.lower_coefficient == pytest.approx(ratio, rel=1e-14)


def test_derivative_expansion_pointwise_example():
    mode = ModeSpec(3, 20.0)
    exp = derivative_expansion(mode)
    assert abs(exp.evaluate(1.7) - _central_difference(mode, 1.7)) <= 1e-7


@pytest.mark.parametrize("alpha", [2.0, 4.0, 20.0])
@pytest.mark.parametrize("n", range(7))
def test_derivative_expansion_matches_difference_quotient(alpha, n):
    mode = ModeSpec(n, alpha)
    exp = derivative_expansion(mode)
    om = np.linspace(0.3, 4 * n + 2 * alpha + 10, 23)
    fd = np.array([_central_difference(mode, w) for w in om])
    assert np.max(np.abs(exp.evaluate(om) - fd)) <= 1e-7
    assert np.max(np.abs(mode_derivative(mode, om) - fd)) <= 1e-7


def test_single_lower_term_form_only_holds_below_n2():
    om = np.linspace(0.5, 30.0, 40)
    for n in range(5):
        mode = ModeSpec(n, 4.0)
        exact = mode_derivative(mode, om)
        short = derivative_expansion(mode).evaluate(om, single_lower_term=True)
        gap = np.max(np.abs(short - exact))
        if n <= 1:
            assert gap <= 1e-13
        else:
            assert gap > 1e-3


@pytest.mark.parametrize("alpha", [0.0, 2.0, 4.0])
def test_mode_derivative_at_origin(alpha):
    for n in (0, 1, 4):
        mode = ModeSpec(n, alpha, 1.5)
        h = 1e-7
        one_sided = (mode_energy(mode, h) - mode_energy(mode, 0.0)) / h
        assert mode_derivative(mode, 0.0) == pytest.approx(one_sided, abs=1e-5)


def test_derivative_with_omega0():
    mode = ModeSpec(2, 4.0, 2.5)
    om = np.array([1.0, 5.0, 12.0])
    fd = np.array([_central_difference(mode, w) for w in om])
    assert np.allclose(derivative_expansion(mode).evaluate(om), fd, atol=1e-8)


def test_derivative_expansion_domain():
    with pytest.raises(DomainError):
        derivative_expansion(ModeSpec(1, 1.5))


def test_gnu_examples():
    assert gnu(0.0, 2, 1.0) == 1.0
    assert gnu(1.0, 2, 1.0) == pytest.approx(-0.5j, abs=1e-16)
    t = np.linspace(-7, 7, 29)
    assert np.array_equal(np.abs(gnu(t, 3, 0.7)), np.abs(gnu(-t, 3, 0.7)))


def test_fnu_examples():
    assert fnu(-2.0, 2, 1.0) == 0.0
    assert fnu(1.0, 2, 1.0) == pytest.approx(math.sqrt(2 * math.pi) / math.e, rel=1e-15)
    assert 3.0 * fnu(3.0, 2, 1.0) == pytest.approx(2 * fnu(3.0, 3, 1.0), rel=1e-14)


@pytest.mark.parametrize("nu", [0, -1, 2.5])
def test_gnu_fnu_domain(nu):
    with pytest.raises(DomainError):
        gnu(1.0, nu)
    with pytest.raises(DomainError):
        fnu(1.0, nu)


def test_gnu_recurrence_random_points():
    rng = np.random.default_rng(11)
    t = rng.uniform(-20, 20, 100)
    for nu in (2, 3, 5):
        for beta in (0.5, 1.0, 2.0):
            lhs = t * gnu(t, nu, beta)
            rhs = 1j * beta * gnu(t, nu, beta) - 1j * gnu(t, nu - 1, beta)
            assert np.allclose(lhs, rhs, rtol=1e-13, atol=0)


@given(st.floats(0.01, 40.0), st.integers(2, 8), st.floats(0.2, 3.0))
@settings(max_examples=50, deadline=None)
def test_fnu_multiplication_recurrence(w, nu, beta):
    # omega f_nu = (nu / beta) f_(nu+1) scaled: f_(nu+1) carries 1/Gamma(nu+1)
    assert w * fnu(w, nu, beta) == pytest.approx(nu * fnu(w, nu + 1, beta), rel=1e-12)


@pytest.mark.parametrize("nu", [2, 3])
def test_fourier_pair(nu):
    # dense trapezoid of the unitary transform of f_nu against g_nu
    om = np.linspace(0.0, 60.0, 240001)
    f = fnu(om, nu, 1.0)
    grid = Grid1D(om)
    worst = 0.0
    for t in np.linspace(-10, 10, 41):
        val = integrate_grid(f * np.exp(-1j * om * t), grid) / math.sqrt(2 * math.pi)
        worst = max(worst, abs(val - gnu(t, nu, 1.0)))
    assert worst <= 1e-4


@pytest.mark.parametrize("n", range(7))
def test_zero_and_maxima_count(n):
    mode = ModeSpec(n, 2.0)
    om = np.linspace(1e-6, 4 * n + 60, 10000)
    v = mode_energy(mode, om)
    assert np.count_nonzero(np.diff(np.sign(v)) != 0) == n
    d = np.abs(v) ** 2
    peaks = np.count_nonzero((d[1:-1] > d[:-2]) & (d[1:-1] > d[2:]))
    assert peaks == n + 1


def test_kernel_symmetry():
    assert completeness_kernel(40, 2.0, 1.0, 1.0, 2.5) == pytest.approx(
        completeness_kernel(40, 2.0, 1.0, 2.5, 1.0), rel=1e-15)


def test_kernel_reproduces_basis_element():
    alpha = 2.0
    rule = gauss_laguerre_rule(30, alpha)
    target = ModeSpec(3, alpha)
    for w in (0.5, 2.0, 7.0):
        for N in (3, 5, 12):
            val = integrate_halfline(
                lambda wp: completeness_kernel(N, alpha, 1.0, w, wp) * mode_energy(target, wp), rule)
            assert val == pytest.approx(mode_energy(target, w), abs=1e-13)


def _smoothed(N, alpha, w):
    # f = phi_0^(alpha+1): the product with phi_n^alpha is x^(alpha+1/2) e^-x times a polynomial
    f_mode = ModeSpec(0, alpha + 1.0)
    rule = gauss_laguerre_rule(N + 10, alpha + 0.5)
    return integrate_halfline(lambda wp: completeness_kernel(N, alpha, 1.0, w, wp) * mode_energy(f_mode, wp), rule)


@pytest.mark.parametrize("alpha", [2.0, 20.0])
def test_kernel_acts_as_identity(alpha):
    f_mode = ModeSpec(0, alpha + 1.0)
    points = [0.5, 1.0, 3.0, 8.0]
    errs = {}
    for N in (20, 40, 60):
        errs[N] = max(abs(_smoothed(N, alpha, w) / mode_energy(f_mode, w) - 1.0) for w in points)
    assert errs[60] <= 0.02
    assert errs[20] > errs[40] > errs[60]
