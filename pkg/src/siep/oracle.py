"""Independent checks that share no numerical path with the solver.

``wsp_exact`` redoes the WSP kernel computation in rational arithmetic.
``charpoly_spectrum_check`` tests a claimed spectrum against the exact
characteristic polynomial (integer Leverrier-Faddeev) instead of the Jacobi
eigensolver.
"""
import math
from fractions import Fraction

import numpy as np

MAX_EXACT_ORDER = 8
MAX_CHARPOLY_ORDER = 12


def _to_fraction(v):
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (float, np.floating)):
        if not math.isfinite(v):
            raise ValueError(f"non-rational entry {v!r}")
        return Fraction(float(v))
    if isinstance(v, np.integer):
        return Fraction(int(v))
    return Fraction(v)


def _exact_matrix(a):
    rows = [[_to_fraction(v) for v in row] for row in np.asarray(a, dtype=object)]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("matrix must be square")
    for i in range(n):
        for j in range(i + 1, n):
            if rows[i][j] != rows[j][i]:
                raise ValueError("matrix is not symmetric")
    return rows


def _exact_commutator_unit(a, p, q):
    # [X, A] for X = E_pq + E_qp by direct multiplication
    n = len(a)
    x = [[Fraction(0)] * n for _ in range(n)]
    x[p][q] = x[q][p] = Fraction(1)
    xa = [[sum(x[i][k] * a[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    ax = [[sum(a[i][k] * x[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    return [[xa[i][j] - ax[i][j] for j in range(n)] for i in range(n)]


def nullspace(rows, ncols):
    """Exact kernel basis of a rational matrix by reduction to row echelon form."""
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        piv = m[r][c]
        m[r] = [v / piv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [vi - f * vr for vi, vr in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -m[i][f]
        basis.append(vec)
    return basis


def wsp_exact(a):
    """Kernel of the WSP constraint system in exact arithmetic.

    Returns ``(dimension, basis)`` where each basis element is an ``n x n``
    list of ``Fraction`` (zero diagonal, symmetric). Floats are converted to
    the rationals they represent exactly.
    """
    a = _exact_matrix(a)
    n = len(a)
    if n > MAX_EXACT_ORDER:
        raise ValueError(f"order {n} too large for exact mode (max {MAX_EXACT_ORDER})")
    if n == 1:
        return 0, []
    pairs = [(p, q) for p in range(n) for q in range(p + 1, n)]
    cols = []
    for p, q in pairs:
        c = _exact_commutator_unit(a, p, q)
        cols.append([c[i][j] for i in range(n) for j in range(i + 1, n)])
    rows = [list(r) for r in zip(*cols)]
    basis = []
    for vec in nullspace(rows, len(pairs)):
        x = [[Fraction(0)] * n for _ in range(n)]
        for (p, q), v in zip(pairs, vec):
            x[p][q] = x[q][p] = v
        basis.append(x)
    return len(basis), basis


def _matmul_fsum(x, y):
    n = len(x)
    return [[math.fsum(x[i][k] * y[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def faddeev_leverrier(a):
    """Coefficients ``[1, c1, ..., cn]`` of ``det(tI - a)`` in floating point.

    Matrix products and traces use ``math.fsum``. Accurate relative to
    ``||a||**k``, which is enough to cross-check power sums; see
    ``charpoly_exact`` for root-level checks.
    """
    a = np.asarray(a, dtype=np.float64).tolist()
    n = len(a)
    coeffs = [1.0]
    b = [[float(i == j) for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        ak = _matmul_fsum(a, b)
        ck = -math.fsum(ak[i][i] for i in range(n)) / k
        coeffs.append(ck)
        b = [[ak[i][j] + (ck if i == j else 0.0) for j in range(n)] for i in range(n)]
    return coeffs


def power_sums_from_charpoly(coeffs, k_max=None):
    """Newton's identities: ``s_k = sum lambda_i**k`` from monic coefficients."""
    n = len(coeffs) - 1
    k_max = n if k_max is None else k_max
    c = list(coeffs) + [0.0] * max(0, k_max - n)
    s = []
    for k in range(1, k_max + 1):
        s.append(-k * c[k] - math.fsum(c[i] * s[k - i - 1] for i in range(1, k)))
    return s


def charpoly_exact(a):
    """Exact coefficients ``[1, c1, ..., cn]`` (``Fraction``) of ``det(xI - a)``.

    Every float is a dyadic rational, so ``d * a`` is an integer matrix for
    ``d`` the largest denominator. The Leverrier-Faddeev recursion then runs
    in integers (its divisions by ``k`` are exact) and the coefficients are
    rescaled by ``d**-k``.
    """
    fr = [[_to_fraction(v) for v in row] for row in np.asarray(a, dtype=object)]
    n = len(fr)
    d = 1
    for row in fr:
        for x in row:
            d = d * x.denominator // math.gcd(d, x.denominator)
    ai = np.array([[int(x * d) for x in row] for row in fr], dtype=object)
    b = np.array([[int(i == j) for j in range(n)] for i in range(n)], dtype=object)
    coeffs = [1]
    for k in range(1, n + 1):
        ak = ai.dot(b)
        tr = sum(ak[i, i] for i in range(n))
        if tr % k:
            raise ArithmeticError("inexact division in integer Leverrier-Faddeev")
        ck = -tr // k
        coeffs.append(ck)
        b = ak
        for i in range(n):
            b[i, i] += ck
    return [Fraction(c, d ** k) for k, c in enumerate(coeffs)]


def _horner_exact(coeffs, t):
    p = Fraction(0)
    dp = Fraction(0)
    for c in coeffs:
        dp = dp * t + p
        p = p * t + c
    return p, dp


def charpoly_spectrum_check(a, claimed, tol=1e-8):
    """Does ``claimed`` look like the spectrum of ``a``?

    Uses the exact characteristic polynomial ``p`` of the floating-point
    matrix. Each claimed value ``t`` must satisfy ``|p(t)/p'(t)| <= tol * r``
    (``r`` the half-width of the claim), a first-order bound on its distance
    to the nearest root. Between consecutive claimed values ``p`` must take
    the sign forced by having exactly one root in every gap.
    """
    a = np.asarray(a, dtype=np.float64)
    n = a.shape[0]
    if n > MAX_CHARPOLY_ORDER:
        raise ValueError(f"order {n} too large (max {MAX_CHARPOLY_ORDER})")
    mu = np.sort(np.asarray(claimed, dtype=np.float64))
    if mu.size != n or not np.all(np.isfinite(mu)):
        return False
    r = 0.5 * (mu[-1] - mu[0])
    if r <= 0.0:
        r = max(1.0, abs(mu[0]))
    coeffs = charpoly_exact(a)
    bound = Fraction(tol) * Fraction(r)
    for t in mu:
        p, dp = _horner_exact(coeffs, Fraction(float(t)))
        if p != 0 and (dp == 0 or abs(p) > bound * abs(dp)):
            return False
    for i in range(n - 1):
        if mu[i + 1] <= mu[i]:
            return False
        mid = (Fraction(float(mu[i])) + Fraction(float(mu[i + 1]))) / 2
        p, _ = _horner_exact(coeffs, mid)
        want = 1 if (n - 1 - i) % 2 == 0 else -1
        if p * want <= 0:
            return False
    return True
