import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import eigh_tridiagonal
from scipy.special import eval_genlaguerre, gammaln

from conftest import random_amps
from transco import kernels

BACKENDS = ["python"]
try:
    kernels.backend_module("cython")
    BACKENDS.append("cython")
except ImportError:
    pass


def test_backend_selected():
    assert kernels.BACKEND in ("python", "cython")


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.backend_module("fortran")


@pytest.mark.parametrize("name", BACKENDS)
@pytest.mark.parametrize("n", [1, 2, 3, 7, 17])
def test_ql_vs_scipy(rng, name, n):
    mod = kernels.backend_module(name)
    d = rng.normal(size=(5, n))
    e = rng.normal(size=(5, n - 1))
    w, z = mod.tridiag_eigh_batch(d, e)
    for b in range(5):
        w_ref = eigh_tridiagonal(d[b], e[b], eigvals_only=True)
        np.testing.assert_allclose(w[b], w_ref, atol=1e-12)
        T = np.diag(d[b]) + np.diag(e[b], 1) + np.diag(e[b], -1)
        np.testing.assert_allclose(T @ z[b], z[b] * w[b], atol=1e-11)
        np.testing.assert_allclose(z[b].T @ z[b], np.eye(n), atol=1e-12)


@pytest.mark.parametrize("name", BACKENDS)
def test_ql_degenerate_and_zero_coupling(name):
    mod = kernels.backend_module(name)
    w, z = mod.tridiag_eigh_batch(np.array([[1.0, 1.0, 2.0]]), np.array([[0.0, 0.0]]))
    np.testing.assert_allclose(w[0], [1.0, 1.0, 2.0])
    w, _ = mod.tridiag_eigh_batch(np.zeros((1, 3)), np.array([[math.sqrt(2) * 2, math.sqrt(2)]]))
    # E = 2 excitation block of three atoms, spectrum symmetric about zero
    np.testing.assert_allclose(w[0], [-math.sqrt(10), 0.0, math.sqrt(10)], atol=1e-13)


def test_cython_matches_python_ql(rng):
    if "cython" not in BACKENDS:
        pytest.skip("extension not built")
    d = rng.normal(size=(20, 9))
    e = rng.normal(size=(20, 8))
    wp, zp = kernels.backend_module("python").tridiag_eigh_batch(d, e)
    wc, zc = kernels.backend_module("cython").tridiag_eigh_batch(d, e)
    np.testing.assert_allclose(wp, wc, atol=1e-13)
    # eigenvectors agree up to sign
    signs = np.sign(np.sum(zp * zc, axis=1))
    np.testing.assert_allclose(zp * signs[:, None, :], zc, atol=1e-11)


def laguerre_ref(k, count, x):
    n = np.arange(count)
    log_norm = 0.5 * (gammaln(n + 1) - gammaln(n + k + 1))
    return np.exp(log_norm + 0.5 * k * math.log(x) - 0.5 * x) * eval_genlaguerre(n, k, x)


@pytest.mark.parametrize("name", BACKENDS)
@pytest.mark.parametrize("k", [0, 1, 5, 30])
@pytest.mark.parametrize("x", [1e-3, 0.7, 12.0, 80.0])
def test_laguerre_vs_scipy(name, k, x):
    mod = kernels.backend_module(name)
    got = mod.laguerre_kernel(k, 40, x)
    np.testing.assert_allclose(got, laguerre_ref(k, 40, x), atol=1e-11, rtol=1e-8)


@pytest.mark.parametrize("name", BACKENDS)
def test_laguerre_edges(name):
    mod = kernels.backend_module(name)
    assert mod.laguerre_kernel(0, 0, 1.0).size == 0
    np.testing.assert_array_equal(mod.laguerre_kernel(0, 4, 0.0), np.ones(4))
    np.testing.assert_array_equal(mod.laguerre_kernel(2, 4, 0.0), np.zeros(4))
    # the seed underflows, later terms must not
    out = mod.laguerre_kernel(0, 3000, 1800.0)
    assert np.all(np.isfinite(out))
    assert np.max(np.abs(out)) > 1e-3


def test_wigner_backends_agree(rng):
    if "cython" not in BACKENDS:
        pytest.skip("extension not built")
    psi = random_amps(rng, 25)
    x = rng.uniform(0, 200, size=300)
    x[:3] = 0.0
    phi = rng.uniform(0, 2 * math.pi, size=300)
    a = kernels.backend_module("python").wigner_points(psi, x, phi)
    b = kernels.backend_module("cython").wigner_points(psi, x, phi)
    np.testing.assert_allclose(a, b, atol=1e-13)


@given(st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_ql_trace_invariant(n, seed):
    r = np.random.default_rng(seed)
    d = r.normal(size=(1, n))
    e = r.normal(size=(1, n - 1))
    w, _ = kernels.tridiag_eigh_batch(d, e)
    assert w.sum() == pytest.approx(d.sum(), abs=1e-10)
    assert np.all(np.diff(w[0]) >= 0)


def test_env_forces_pure_python():
    import os
    import subprocess
    import sys

    env = dict(os.environ, TRANSCO_PURE_PYTHON="1")
    res = subprocess.run(
        [sys.executable, "-c", "from transco import kernels; print(kernels.BACKEND)"],
        capture_output=True,
        text=True,
        env=env,
    )
    assert res.stdout.strip() == "python"
