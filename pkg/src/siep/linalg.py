"""Dense symmetric linear algebra used by every other module.

Matrices are plain read-only ``float64`` numpy arrays. ``sym_matrix``
validates and freezes them; the other functions accept anything it accepts.
"""
from dataclasses import dataclass

import numpy as np

from ._backend import kernels

EIG_REL_TOL = 1e-14
EIG_MAX_SWEEPS = 100


def sym_matrix(a):
    """Return a frozen float64 copy of ``a`` after checking it is a valid symmetric matrix.

    Symmetry is checked bit-for-bit.
    """
    m = np.array(a, dtype=np.float64, copy=True)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"expected a nonempty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    if not np.array_equal(m, m.T):
        raise ValueError("matrix is not exactly symmetric")
    m.setflags(write=False)
    return m


def _frozen(a):
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class EigenDecomposition:
    values: np.ndarray
    vectors: np.ndarray
    sweeps: int = 0

    def reconstruct(self):
        return (self.vectors * self.values) @ self.vectors.T


def sym_eigen(a):
    """Eigenvalues (ascending) and orthonormal eigenvectors by cyclic Jacobi."""
    a = sym_matrix(a)
    w, v, sweeps = kernels.jacobi_eigh(a, EIG_REL_TOL, EIG_MAX_SWEEPS)
    return EigenDecomposition(_frozen(w), _frozen(v), int(sweeps))


def eigenvalues(a):
    return sym_eigen(a).values


def operator_norm(a):
    """Spectral norm; for a symmetric matrix this is the largest ``|eigenvalue|``."""
    w = sym_eigen(a).values
    return float(max(abs(w[0]), abs(w[-1])))


def commutator(x, a):
    """``x @ a - a @ x``."""
    x = np.asarray(x, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    if x.shape != a.shape:
        raise ValueError(f"order mismatch: {x.shape} vs {a.shape}")
    return x @ a - a @ x


def schur(x, y):
    """Entrywise product."""
    return np.multiply(x, y)


def power_diagonals(a, k_max):
    """Diagonals of ``a**0 .. a**(k_max-1)`` as the rows of a ``(k_max, n)`` array."""
    if k_max < 1:
        raise ValueError("k_max must be positive")
    a = np.asarray(a, dtype=np.float64)
    return kernels.power_diagonals(a, int(k_max))


def direct_sum(*blocks):
    blocks = [np.atleast_2d(np.asarray(b, dtype=np.float64)) for b in blocks]
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n))
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i:i + k, i:i + k] = b
        i += k
    return out


def hausdorff_distance(s, t):
    """Hausdorff distance between two finite nonempty sets of reals."""
    s = np.sort(np.asarray(s, dtype=np.float64).ravel())
    t = np.sort(np.asarray(t, dtype=np.float64).ravel())
    if s.size == 0 or t.size == 0:
        raise ValueError("hausdorff_distance needs two nonempty sets")
    return max(_directed(s, t), _directed(t, s))


def _directed(s, t):
    # sup over s of the distance to the sorted set t
    idx = np.searchsorted(t, s)
    left = t[np.clip(idx - 1, 0, t.size - 1)]
    right = t[np.clip(idx, 0, t.size - 1)]
    return float(np.max(np.minimum(np.abs(s - left), np.abs(s - right))))
