"""Weak Spectral Property test.

A symmetric ``A`` has the WSP when the only symmetric ``X`` with zero
diagonal and ``[X, A] = 0`` is ``X = 0``. The conditions are linear in the
``n(n-1)/2`` free entries of ``X``, so the test is a kernel computation.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._backend import kernels
from .linalg import commutator, operator_norm, sym_matrix

DEFAULT_TOL = 1e-9


def upper_pairs(n):
    return [(p, q) for p in range(n) for q in range(p + 1, n)]


def unknowns_to_matrix(x, n):
    """Zero-diagonal symmetric matrix whose upper entries (row-major) are ``x``."""
    out = np.zeros((n, n))
    iu = np.triu_indices(n, 1)
    out[iu] = x
    out[(iu[1], iu[0])] = x
    return out


def wsp_constraint_matrix(a):
    """Coefficients of the free entries ``x_pq`` in the strictly upper entries of ``[X, A]``.

    Column ``(p, q)`` is the upper part of ``[E_pq + E_qp, A]``; the lower
    part carries no extra information because the commutator of two
    symmetric matrices is skew-symmetric.
    """
    a = sym_matrix(a)
    n = a.shape[0]
    if n < 2:
        raise ValueError("constraint system is empty for 1x1 matrices (they always have the WSP)")
    pairs = upper_pairs(n)
    iu = np.triu_indices(n, 1)
    m = np.empty((len(pairs), len(pairs)))
    for col, (p, q) in enumerate(pairs):
        # [E_pq + E_qp, A]_ij = [i=p]A_qj + [i=q]A_pj - [j=q]A_ip - [j=p]A_iq
        c = np.zeros((n, n))
        c[p, :] += a[q, :]
        c[q, :] += a[p, :]
        c[:, q] -= a[:, p]
        c[:, p] -= a[:, q]
        m[:, col] = c[iu]
    return m


@dataclass(frozen=True)
class WspCertificate:
    holds: bool
    kernel_dimension: int
    witness: Optional[np.ndarray]
    smallest_kept_singular_value: float
    largest_dropped_singular_value: float
    exact: bool = False

    def summary(self):
        return {
            "holds": self.holds,
            "kernel_dimension": self.kernel_dimension,
            "smallest_kept_singular_value": self.smallest_kept_singular_value,
            "largest_dropped_singular_value": self.largest_dropped_singular_value,
            "exact": self.exact,
        }


def _normalized_witness(x, n):
    x = np.asarray(x, dtype=np.float64)
    # first entry of (nearly) maximal size is made positive; ties are common
    mag = np.abs(x)
    k = int(np.flatnonzero(mag >= (1.0 - 1e-8) * mag.max())[0])
    if x[k] < 0:
        x = -x
    w = unknowns_to_matrix(x, n)
    w /= np.linalg.norm(w)
    w.setflags(write=False)
    return w


def has_wsp(a, tol=DEFAULT_TOL, exact=False):
    """Decide the WSP for ``a``.

    Singular values of the constraint matrix at most ``tol`` times the
    largest (or ``tol`` when all vanish) count as kernel directions. The
    certificate keeps the gap between the smallest kept and largest dropped
    singular values so that borderline verdicts are visible.

    With ``exact=True`` the verdict and witness come from rational Gaussian
    elimination instead (see ``siep.oracle.wsp_exact``).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = sym_matrix(a)
    n = a.shape[0]
    if n == 1:
        return WspCertificate(True, 0, None, 0.0, 0.0, exact)
    s, v = kernels.jacobi_svd(wsp_constraint_matrix(a))
    thresh = tol * (s[0] if s[0] > 0 else 1.0)
    dropped = s <= thresh
    kept_min = float(s[~dropped].min()) if (~dropped).any() else 0.0
    dropped_max = float(s[dropped].max()) if dropped.any() else 0.0

    if exact:
        from .oracle import wsp_exact

        dim, basis = wsp_exact(a)
        witness = None
        if dim:
            x = [float(basis[0][p][q]) for p, q in upper_pairs(n)]
            witness = _normalized_witness(x, n)
        return WspCertificate(dim == 0, dim, witness, kept_min, dropped_max, True)

    dim = int(dropped.sum())
    witness = _normalized_witness(v[:, -1], n) if dim else None
    return WspCertificate(dim == 0, dim, witness, kept_min, dropped_max, False)


def witness_residual(cert, a):
    """``||[W, A]||_max / max(1, ||A||_op)`` for the certificate's witness."""
    if cert.witness is None:
        return 0.0
    return float(np.max(np.abs(commutator(cert.witness, a)))) / max(1.0, operator_norm(a))
