"""Numpy implementations of the dense kernels.

This is the fallback used when the compiled ``_ckernels`` module is not
available. Both modules expose the same three functions with the same
algorithms, so results agree to rounding.
"""
import numpy as np


def jacobi_eigh(a, rel_tol=1e-14, max_sweeps=100):
    """Cyclic Jacobi eigensolver for a dense symmetric matrix.

    Returns ``(w, v, sweeps)`` with ``w`` ascending and the columns of ``v``
    the matching orthonormal eigenvectors. Sweeps stop once the off-diagonal
    Frobenius mass is at most ``rel_tol * ||a||_F``.
    """
    a = np.array(a, dtype=np.float64, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    fro = np.sqrt(np.sum(a * a))
    upper = np.triu_indices(n, 1)
    sweeps = 0
    if fro > 0.0:
        while sweeps < max_sweeps:
            if np.sqrt(2.0 * np.sum(a[upper] ** 2)) <= rel_tol * fro:
                break
            sweeps += 1
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    if apq == 0.0:
                        continue
                    app = a[p, p]
                    aqq = a[q, q]
                    theta = (aqq - app) / (2.0 * apq)
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                    c = 1.0 / np.sqrt(t * t + 1.0)
                    s = t * c
                    x = a[:, p].copy()
                    y = a[:, q].copy()
                    a[:, p] = c * x - s * y
                    a[:, q] = s * x + c * y
                    a[p, :] = a[:, p]
                    a[q, :] = a[:, q]
                    a[p, p] = app - t * apq
                    a[q, q] = aqq + t * apq
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    x = v[:, p].copy()
                    y = v[:, q].copy()
                    v[:, p] = c * x - s * y
                    v[:, q] = s * x + c * y
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order], sweeps


def jacobi_svd(m, rel_tol=None, max_sweeps=100):
    """One-sided (Hestenes) Jacobi SVD.

    Returns ``(s, v)``: singular values in descending order and the matching
    right singular vectors as columns of ``v``. Singular values are column
    norms of ``m @ v``, which keeps tiny ones accurate relative to the
    largest (no squaring of the matrix).
    """
    u = np.array(m, dtype=np.float64, copy=True)
    rows, cols = u.shape
    v = np.eye(cols)
    tol = rows * np.finfo(np.float64).eps if rel_tol is None else rel_tol
    for _ in range(max_sweeps):
        rotated = False
        for p in range(cols - 1):
            for q in range(p + 1, cols):
                up = u[:, p]
                uq = u[:, q]
                alpha = float(up @ up)
                beta = float(uq @ uq)
                gamma = float(up @ uq)
                if gamma == 0.0 or abs(gamma) <= tol * np.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = 1.0 / (abs(zeta) + np.sqrt(zeta * zeta + 1.0))
                if zeta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                x = up.copy()
                u[:, p] = c * x - s * uq
                u[:, q] = s * x + c * uq
                x = v[:, p].copy()
                y = v[:, q].copy()
                v[:, p] = c * x - s * y
                v[:, q] = s * x + c * y
        if not rotated:
            break
    sv = np.sqrt(np.einsum("ij,ij->j", u, u))
    order = np.argsort(-sv, kind="stable")
    return sv[order], v[:, order]


def power_diagonals(a, k_max):
    """Rows ``k = 0..k_max-1`` hold ``diag(a**k)``, with ``a**0 = I``."""
    a = np.asarray(a, dtype=np.float64)
    n = a.shape[0]
    out = np.empty((k_max, n))
    out[0] = 1.0
    cur = a.copy()
    for k in range(1, k_max):
        out[k] = np.diag(cur)
        if k + 1 < k_max:
            cur = cur @ a
    return out
