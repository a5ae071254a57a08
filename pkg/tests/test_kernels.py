import os
import subprocess
import sys

import numpy as np
import pytest

from _util import random_sym
from siep import _backend, _pykernels


def test_python_backend_always_available():
    assert _backend.BACKENDS["python"] is _pykernels
    assert _backend.BACKEND in _backend.BACKENDS


def test_env_forces_python_backend():
    env = dict(os.environ, SIEP_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import siep; print(siep.BACKEND)"], env=env, capture_output=True, text=True, check=True
    )
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("n", [1, 2, 5, 17])
def test_jacobi_eigh_against_lapack(backend, n):
    rng = np.random.default_rng(n)
    a = random_sym(rng, n, -3, 3)
    w, v, sweeps = _backend.BACKENDS[backend].jacobi_eigh(a)
    assert np.all(np.diff(w) >= 0)
    assert sweeps <= 100
    assert np.allclose(w, np.linalg.eigvalsh(a), atol=1e-12 * max(1.0, np.abs(w).max()))
    assert np.max(np.abs(v.T @ v - np.eye(n))) <= 1e-12 * n
    assert np.max(np.abs(v @ np.diag(w) @ v.T - a)) <= 1e-10 * n * max(1.0, np.abs(w).max())


def test_jacobi_eigh_does_not_touch_input(backend):
    a = random_sym(np.random.default_rng(0), 4)
    before = a.copy()
    _backend.BACKENDS[backend].jacobi_eigh(a)
    assert np.array_equal(a, before)


def test_jacobi_eigh_diagonal_needs_no_sweep(backend):
    w, v, sweeps = _backend.BACKENDS[backend].jacobi_eigh(np.diag([3.0, 1.0, 2.0]))
    assert list(w) == [1.0, 2.0, 3.0]
    assert sweeps == 0


@pytest.mark.parametrize("shape", [(1, 1), (3, 3), (6, 6), (10, 10), (8, 5)])
def test_jacobi_svd_against_lapack(backend, shape):
    rng = np.random.default_rng(sum(shape))
    m = rng.normal(size=shape)
    s, v = _backend.BACKENDS[backend].jacobi_svd(m)
    ref = np.linalg.svd(m, compute_uv=False)
    assert np.allclose(s, ref, atol=1e-13 * ref[0])
    assert np.allclose(v.T @ v, np.eye(shape[1]), atol=1e-12)
    # columns of m @ v are orthogonal with norms s
    mv = m @ v
    assert np.allclose(mv.T @ mv, np.diag(s**2), atol=1e-12 * ref[0] ** 2)


def test_jacobi_svd_resolves_tiny_singular_values(backend):
    # squaring would put the floor near 1e-8; one-sided Jacobi keeps ~1e-16 relative accuracy
    u, _ = np.linalg.qr(np.random.default_rng(1).normal(size=(5, 5)))
    vt, _ = np.linalg.qr(np.random.default_rng(2).normal(size=(5, 5)))
    sig = np.array([1.0, 0.5, 1e-3, 1e-11, 1e-14])
    m = u @ np.diag(sig) @ vt.T
    s, _ = _backend.BACKENDS[backend].jacobi_svd(m)
    assert abs(s[3] - 1e-11) < 1e-14
    assert s[4] < 1e-13


def test_power_diagonals_against_matrix_powers(backend):
    a = random_sym(np.random.default_rng(3), 6)
    d = _backend.BACKENDS[backend].power_diagonals(a, 7)
    p = np.eye(6)
    for k in range(7):
        assert np.allclose(d[k], np.diag(p), rtol=1e-13, atol=1e-14)
        p = p @ a


def test_backends_agree():
    if len(_backend.BACKENDS) < 2:
        pytest.skip("compiled extension not built")
    py, cy = _backend.BACKENDS["python"], _backend.BACKENDS["cython"]
    rng = np.random.default_rng(7)
    for n in range(1, 12):
        a = random_sym(rng, n)
        assert np.allclose(py.jacobi_eigh(a)[0], cy.jacobi_eigh(a)[0], atol=1e-13)
        m = rng.normal(size=(n, n))
        assert np.allclose(py.jacobi_svd(m)[0], cy.jacobi_svd(m)[0], atol=1e-13 * max(1, n))
        dp, dc = py.power_diagonals(a, n), cy.power_diagonals(a, n)
        # entries of high powers cancel, so compare against each row's scale
        assert np.all(np.abs(dp - dc) <= 1e-13 * np.max(np.abs(dp), axis=1, keepdims=True))


def test_large_power_diagonals_use_blas_path():
    if len(_backend.BACKENDS) < 2:
        pytest.skip("compiled extension not built")
    py, cy = _backend.BACKENDS["python"], _backend.BACKENDS["cython"]
    n = cy.BLAS_CROSSOVER + 1
    a = random_sym(np.random.default_rng(11), n)
    assert np.array_equal(py.power_diagonals(a, 5), cy.power_diagonals(a, 5))
