import os
import subprocess
import sys

import numpy as np
import pytest
from scipy.linalg import eigh_tridiagonal

from lagtime import kernels

BACKENDS = kernels.backends()
needs_cython = pytest.mark.skipif("cython" not in BACKENDS, reason="compiled extension not built")


@pytest.fixture(params=sorted(BACKENDS))
def impl(request):
    return BACKENDS[request.param]


def test_selected_backend_is_reported():
    assert kernels.BACKEND in ("cython", "python")
    assert kernels.BACKEND in BACKENDS


def test_pure_python_switch():
    env = dict(os.environ, LAGTIME_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import lagtime.kernels as k; print(k.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


def test_laguerre_table_rows_match_single(impl):
    x = np.linspace(0.0, 60.0, 37)
    table = impl.laguerre_table(12, 3.5, x)
    for n in range(13):
        assert np.array_equal(table[n], impl.laguerre_array(n, 3.5, x))


def test_readonly_inputs(impl):
    x = np.linspace(0.0, 5.0, 9)
    x.flags.writeable = False
    z = np.array([0.5 + 0.1j, 1.0 + 0j])
    z.flags.writeable = False
    impl.laguerre_array(4, 2.0, x)
    impl.hyp2f1_terminating_array(3, 2.0, 4.0, z)


@needs_cython
def test_backends_agree_on_laguerre():
    c, p = BACKENDS["cython"], BACKENDS["python"]
    x = np.linspace(0.0, 150.0, 301)
    for alpha in (0.0, 2.0, 20.0):
        tc = c.laguerre_table(40, alpha, x)
        tp = p.laguerre_table(40, alpha, x)
        scale = np.maximum(np.abs(tp), 1.0)
        assert np.max(np.abs(tc - tp) / scale) <= 1e-13


@needs_cython
def test_backends_agree_on_hyp2f1():
    c, p = BACKENDS["cython"], BACKENDS["python"]
    t = np.linspace(-30.0, 30.0, 121)
    z = 1.0 / (0.5 + 1j * t)
    for n, b, cc in ((0, 2.0, 3.0), (6, 11.0, 21.0), (12, 2.0, 3.0)):
        hc = c.hyp2f1_terminating_array(n, b, cc, z)
        hp = p.hyp2f1_terminating_array(n, b, cc, z)
        assert np.max(np.abs(hc - hp)) <= 1e-12 * max(1.0, np.max(np.abs(hp)))


def _random_tridiagonal(n, seed):
    rng = np.random.default_rng(seed)
    return rng.normal(size=n), rng.normal(size=n - 1)


@pytest.mark.parametrize("n", [1, 2, 7, 60])
def test_tridiag_ql_against_scipy(impl, n):
    d, e = _random_tridiagonal(n, n)
    evals, z, fail = impl.tridiag_ql(d, e, 2, 1e-14, 60)
    assert fail == -1
    order = np.argsort(evals)
    ref_vals, ref_vecs = eigh_tridiagonal(d, e)
    assert np.allclose(np.asarray(evals)[order], ref_vals, atol=1e-12)
    vecs = np.asarray(z)[:, order]
    # eigenvectors up to sign
    overlap = np.abs(np.sum(vecs * ref_vecs, axis=0))
    assert np.allclose(overlap, 1.0, atol=1e-10)


def test_tridiag_ql_first_components(impl):
    d, e = _random_tridiagonal(30, 3)
    ev_full, z_full, _ = impl.tridiag_ql(d, e, 2, 1e-14, 60)
    ev_first, z_first, _ = impl.tridiag_ql(d, e, 1, 1e-14, 60)
    assert np.allclose(ev_full, ev_first, atol=1e-13)
    assert np.allclose(np.asarray(z_full)[0], np.asarray(z_first)[0], atol=1e-12)


def test_tridiag_ql_reports_failure(impl):
    d, e = _random_tridiagonal(40, 4)
    _, _, fail = impl.tridiag_ql(d, e, 0, 1e-14, 0)
    assert fail >= 0


@needs_cython
def test_backends_agree_on_tridiag():
    c, p = BACKENDS["cython"], BACKENDS["python"]
    k = np.arange(80.0)
    d = 2 * k + 3.0
    e = -np.sqrt((k[1:]) * (k[1:] + 2.0))
    ec, zc, _ = c.tridiag_ql(d, e, 2, 1e-14, 60)
    ep, zp, _ = p.tridiag_ql(d, e, 2, 1e-14, 60)
    assert np.max(np.abs(np.sort(ec) - np.sort(ep)) / np.sort(ep)) <= 1e-12
