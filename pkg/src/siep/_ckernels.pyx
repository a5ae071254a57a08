# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the dense kernels in ``siep._pykernels``.

Same algorithms, same rotation formulas, same stopping rules; only the
loops are in C. ``power_diagonals`` hands large orders back to BLAS.
"""
import numpy as np
from libc.math cimport sqrt, fabs

from . import _pykernels


cdef double _offdiag_norm(double[:, ::1] a, Py_ssize_t n) nogil:
    cdef double s = 0.0
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(i + 1, n):
            s += a[i, j] * a[i, j]
    return sqrt(2.0 * s)


def jacobi_eigh(a_in, double rel_tol=1e-14, int max_sweeps=100):
    a_np = np.array(a_in, dtype=np.float64, order="C", copy=True)
    cdef double[:, ::1] a = a_np
    cdef Py_ssize_t n = a.shape[0]
    v_np = np.eye(n, dtype=np.float64)
    cdef double[:, ::1] v = v_np
    cdef Py_ssize_t p, q, r
    cdef double fro = 0.0, apq, app, aqq, theta, t, c, s, x, y
    cdef int sweeps = 0

    for p in range(n):
        for q in range(n):
            fro += a[p, q] * a[p, q]
    fro = sqrt(fro)

    if fro > 0.0:
        with nogil:
            while sweeps < max_sweeps:
                if _offdiag_norm(a, n) <= rel_tol * fro:
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
                        t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                        if theta < 0.0:
                            t = -t
                        c = 1.0 / sqrt(t * t + 1.0)
                        s = t * c
                        for r in range(n):
                            if r != p and r != q:
                                x = a[r, p]
                                y = a[r, q]
                                a[r, p] = c * x - s * y
                                a[p, r] = a[r, p]
                                a[r, q] = s * x + c * y
                                a[q, r] = a[r, q]
                        a[p, p] = app - t * apq
                        a[q, q] = aqq + t * apq
                        a[p, q] = 0.0
                        a[q, p] = 0.0
                        for r in range(n):
                            x = v[r, p]
                            y = v[r, q]
                            v[r, p] = c * x - s * y
                            v[r, q] = s * x + c * y

    w = np.array([a[i, i] for i in range(n)], dtype=np.float64)
    order = np.argsort(w, kind="stable")
    return w[order], v_np[:, order], sweeps


def jacobi_svd(m_in, rel_tol=None, int max_sweeps=100):
    u_np = np.array(m_in, dtype=np.float64, order="F", copy=True)
    cdef double[::1, :] u = u_np
    cdef Py_ssize_t rows = u.shape[0], cols = u.shape[1]
    v_np = np.eye(cols, dtype=np.float64, order="F")
    cdef double[::1, :] v = v_np
    cdef double tol = rows * 2.220446049250313e-16 if rel_tol is None else rel_tol
    cdef Py_ssize_t p, q, r
    cdef double alpha, beta, gamma, zeta, t, c, s, x, y
    cdef int sweep
    cdef bint rotated

    with nogil:
        for sweep in range(max_sweeps):
            rotated = False
            for p in range(cols - 1):
                for q in range(p + 1, cols):
                    alpha = 0.0
                    beta = 0.0
                    gamma = 0.0
                    for r in range(rows):
                        alpha = alpha + u[r, p] * u[r, p]
                        beta = beta + u[r, q] * u[r, q]
                        gamma = gamma + u[r, p] * u[r, q]
                    if gamma == 0.0 or fabs(gamma) <= tol * sqrt(alpha * beta):
                        continue
                    rotated = True
                    zeta = (beta - alpha) / (2.0 * gamma)
                    t = 1.0 / (fabs(zeta) + sqrt(zeta * zeta + 1.0))
                    if zeta < 0.0:
                        t = -t
                    c = 1.0 / sqrt(t * t + 1.0)
                    s = t * c
                    for r in range(rows):
                        x = u[r, p]
                        y = u[r, q]
                        u[r, p] = c * x - s * y
                        u[r, q] = s * x + c * y
                    for r in range(cols):
                        x = v[r, p]
                        y = v[r, q]
                        v[r, p] = c * x - s * y
                        v[r, q] = s * x + c * y
            if not rotated:
                break

    sv = np.sqrt(np.einsum("ij,ij->j", u_np, u_np))
    order = np.argsort(-sv, kind="stable")
    return sv[order], np.ascontiguousarray(v_np[:, order])


# Above this order BLAS matmul beats the plain loops below.
BLAS_CROSSOVER = 14


def power_diagonals(a_in, int k_max):
    a_np = np.ascontiguousarray(a_in, dtype=np.float64)
    if a_np.shape[0] > BLAS_CROSSOVER:
        return _pykernels.power_diagonals(a_np, k_max)
    cdef const double[:, ::1] a = a_np
    cdef Py_ssize_t n = a.shape[0]
    out_np = np.empty((k_max, n), dtype=np.float64)
    cdef double[:, ::1] out = out_np
    cur_np = np.array(a_np, copy=True)
    nxt_np = np.empty_like(cur_np)
    cdef double[:, ::1] cur = cur_np
    cdef double[:, ::1] nxt = nxt_np
    cdef double[:, ::1] tmp
    cdef Py_ssize_t i, j, l
    cdef int k
    cdef double acc

    with nogil:
        for i in range(n):
            out[0, i] = 1.0
        for k in range(1, k_max):
            for i in range(n):
                out[k, i] = cur[i, i]
            if k + 1 < k_max:
                # i-l-j order keeps both inner reads on contiguous rows
                for i in range(n):
                    for j in range(n):
                        nxt[i, j] = 0.0
                    for l in range(n):
                        acc = cur[i, l]
                        for j in range(n):
                            nxt[i, j] += acc * a[l, j]
                tmp = cur
                cur = nxt
                nxt = tmp
    return out_np
