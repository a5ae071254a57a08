"""Diagonal correction: keep the spectrum while off-diagonal entries move.

``g(M) = (tr M, tr M^2 / 2, ..., tr M^n / n)`` pins down the spectrum (by
Newton's identities), and its derivative in the diagonal entries is
``jac_x``: row ``k`` is the diagonal of ``M^(k-1)``.

``solve_diagonal_correction`` switches new off-diagonal entries on along
``s * values`` for ``s`` from 0 to 1 and, at each continuation point, runs
Newton on the diagonal. Two Newton systems are available:

``"spectral"`` (default)
    residual ``sorted eig(M) - lambdas``, Jacobian ``W[j, i] = V[i, j]**2``
    (derivative of the j-th eigenvalue in ``M_ii``). Near a diagonal matrix
    ``W`` is close to a permutation, so this stays well conditioned when the
    targets cluster.
``"powersum"``
    residual ``target - g(M)``, Jacobian ``jac_x(M)``. Exactly the
    power-sum system, but its conditioning is that of a Vandermonde matrix
    on the targets and it breaks down past roughly ten clustered values.
    Convergence is judged on the power-sum residual alone.

Both solve the same equations: two symmetric matrices share a spectrum iff
their power sums agree. All residuals are measured on ``(M - cI) / r``
with ``c`` and ``r`` the centre and half-width of the target spectrum.
"""
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import BudgetInfeasible, DuplicateEigenvalues, JacobianSingular, NoConvergence
from .linalg import operator_norm, power_diagonals, sym_eigen

METHODS = ("spectral", "powersum")
# a continuation step this much smaller than the goal means the branch ends short of it
STALL_FRACTION = 1e-6


@dataclass(frozen=True)
class PowerSumTarget:
    """Power sums ``p_k = (1/k) sum lambda_i**k`` of a set of distinct reals."""

    lambdas: tuple

    @property
    def n(self):
        return len(self.lambdas)

    @property
    def values(self):
        return _power_sums(np.asarray(self.lambdas))

    def center_scale(self):
        lam = np.asarray(self.lambdas)
        c = 0.5 * (lam.max() + lam.min())
        r = 0.5 * (lam.max() - lam.min())
        if r <= 0.0:
            r = max(1.0, abs(c))
        return float(c), float(r)

    def normalized(self, center, scale):
        return _power_sums((np.asarray(self.lambdas) - center) / scale)


def _power_sums(lam):
    n = lam.size
    k = np.arange(1, n + 1)
    return np.array([np.sum(lam ** kk) for kk in k]) / k


def powersum_targets(lambdas):
    lam = np.asarray(lambdas, dtype=np.float64).ravel()
    if lam.size == 0:
        raise ValueError("need at least one eigenvalue")
    if not np.all(np.isfinite(lam)):
        raise ValueError("eigenvalues must be finite")
    srt = np.sort(lam)
    if np.any(np.diff(srt) <= 0.0):
        raise DuplicateEigenvalues("target eigenvalues are not pairwise distinct")
    return PowerSumTarget(tuple(float(v) for v in lam))


def g_eval(m):
    """``(tr M, tr M^2 / 2, ..., tr M^n / n)``."""
    m = np.asarray(m, dtype=np.float64)
    n = m.shape[0]
    d = power_diagonals(m, n + 1)[1:]
    return d.sum(axis=1) / np.arange(1, n + 1)


def jac_x(a):
    """Derivative of ``g`` in the diagonal entries: row ``k`` is ``diag(A^k)``, ``k = 0..n-1``."""
    a = np.asarray(a, dtype=np.float64)
    return power_diagonals(a, a.shape[0])


@dataclass
class NewtonReport:
    converged: bool = False
    iterations: int = 0
    final_residual: float = float("nan")
    spectral_residual: float = float("nan")
    jacobian_condition_estimate: float = float("nan")
    continuation_steps: int = 0
    scale_reached: float = 0.0
    method: str = "spectral"

    def to_json(self):
        # quantities never computed (no Jacobian formed) are written as null
        return {k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in asdict(self).items()}


@dataclass(frozen=True)
class NewtonOptions:
    tol: float = 1e-12
    max_iterations: int = 50
    max_continuation_steps: int = 60
    condition_limit: float = 1e12
    method: str = "spectral"


class _NewtonFailed(Exception):
    pass


class _Corrector:
    """Newton on the diagonal of ``(M - cI) / r`` for a fixed off-diagonal."""

    def __init__(self, target, opts):
        self.opts = opts
        self.c, self.r = target.center_scale()
        self.p_target = target.normalized(self.c, self.r)
        self.mu_target = np.sort((np.asarray(target.lambdas) - self.c) / self.r)
        self.iterations = 0
        self.cond = 0.0

    def _normalized(self, m):
        return (m - self.c * np.eye(m.shape[0])) / self.r

    def residuals(self, m):
        b = self._normalized(m)
        ps = float(np.max(np.abs(g_eval(b) - self.p_target)))
        eig = sym_eigen(b)
        sp = float(np.max(np.abs(eig.values - self.mu_target)))
        return ps, sp, b, eig

    def _step(self, b, eig):
        if self.opts.method == "spectral":
            jac = (eig.vectors ** 2).T
            rhs = self.mu_target - eig.values
        else:
            jac = jac_x(b)
            rhs = self.p_target - g_eval(b)
        cond = float(np.linalg.cond(jac, 1))
        self.cond = cond
        if not np.isfinite(cond) or cond > self.opts.condition_limit:
            raise JacobianSingular(f"{self.opts.method} Jacobian condition estimate {cond:.3g}")
        return np.linalg.solve(jac, rhs)

    def run(self, m):
        """Correct the diagonal of ``m`` in place; return the final residuals."""
        tol = self.opts.tol
        ps, sp, b, eig = self.residuals(m)
        first = max(ps, sp)
        for _ in range(self.opts.max_iterations + 1):
            if ps <= tol and (sp <= tol or self.opts.method == "powersum"):
                return ps, sp
            if not (np.isfinite(ps) and np.isfinite(sp)) or max(ps, sp) > 1e6 * max(first, 1.0):
                break
            delta = self._step(b, eig)
            self.iterations += 1
            idx = np.diag_indices(m.shape[0])
            m[idx] = m[idx] + self.r * delta
            ps, sp, b, eig = self.residuals(m)
        raise _NewtonFailed(f"residual {max(ps, sp):.3g} after {self.opts.max_iterations} iterations")


def residual_report(m, target, options=None):
    """Report for ``m`` as it stands, without any correction."""
    opts = options or NewtonOptions()
    ps, sp, _, _ = _Corrector(target, opts).residuals(np.asarray(m, dtype=np.float64))
    ok = ps <= opts.tol and (sp <= opts.tol or opts.method == "powersum")
    return NewtonReport(converged=ok, final_residual=ps, spectral_residual=sp, method=opts.method)


def solve_diagonal_correction(a0, new_entries, target, norm_budget, *, edge_floor=0.0, options=None):
    """Switch on ``new_entries`` and restore the power sums by moving the diagonal.

    Parameters
    ----------
    a0 : symmetric matrix
        Reference matrix; the new positions must be zero in it.
    new_entries : dict
        ``{(i, j): value}`` for off-diagonal positions, ``i < j``.
    target : PowerSumTarget
        Spectrum to keep.
    norm_budget : float
        The result must satisfy ``||M - a0||_op < norm_budget``. When the
        full entries overshoot it, the entries are scaled by 1/2, 1/4, ...
        until it holds or they fall below ``edge_floor``.

    Returns
    -------
    (M, NewtonReport)
        Off-diagonal of ``M`` is ``a0`` plus the (possibly scaled) new entries;
        non-edge zeros are never written.
    """
    opts = options or NewtonOptions()
    if opts.method not in METHODS:
        raise ValueError(f"unknown method {opts.method!r}")
    if norm_budget <= 0:
        raise ValueError("norm_budget must be positive")
    a0 = np.array(a0, dtype=np.float64)
    n = a0.shape[0]
    if target.n != n:
        raise ValueError(f"target has {target.n} values for a matrix of order {n}")
    positions = sorted(new_entries)
    for i, j in positions:
        if not (0 <= i < j < n):
            raise ValueError(f"bad off-diagonal position ({i}, {j})")
        if a0[i, j] != 0.0:
            raise ValueError(f"position ({i}, {j}) is already nonzero in the reference")
    values = np.array([new_entries[p] for p in positions], dtype=np.float64)
    min_mag = float(np.min(np.abs(values))) if values.size else np.inf

    corrector = _Corrector(target, opts)
    report = NewtonReport(method=opts.method)

    def at_scale(s, diag):
        m = a0.copy()
        m[np.diag_indices(n)] = diag
        for (i, j), v in zip(positions, values):
            m[i, j] = m[j, i] = s * v
        return m

    def finish(m, s, ps, sp):
        report.converged = True
        report.iterations = corrector.iterations
        report.final_residual = ps
        report.spectral_residual = sp
        report.jacobian_condition_estimate = corrector.cond
        report.scale_reached = s
        m.setflags(write=False)
        return m, report

    # s = 0: the reference itself, polished if needed
    m = a0.copy()
    try:
        ps, sp = corrector.run(m)
    except _NewtonFailed as exc:
        raise NoConvergence(f"reference matrix does not match the target spectrum: {exc}") from None
    if not positions:
        return finish(m, 0.0, ps, sp)

    accepted = [(0.0, np.diag(m).copy())]
    s_goal = 1.0
    s_cur, diag_cur = accepted[0]
    ds = 1.0
    steps = 0
    while True:
        if s_goal * min_mag < edge_floor:
            raise BudgetInfeasible(
                f"entries scaled by {s_goal:.3g} fall below edge floor {edge_floor:g} "
                f"before meeting norm budget {norm_budget:g}"
            )
        s_try = min(s_cur + ds, s_goal)
        m = at_scale(s_try, diag_cur)
        steps += 1
        report.continuation_steps = steps
        try:
            ps, sp = corrector.run(m)
        except (_NewtonFailed, JacobianSingular):
            ds = 0.5 * (s_try - s_cur)
            if steps >= opts.max_continuation_steps or ds < STALL_FRACTION * s_goal:
                raise NoConvergence(
                    f"continuation stalled at s={s_cur:.6g} after {steps} steps "
                    f"(last Jacobian condition {corrector.cond:.3g})"
                ) from None
            continue
        s_cur, diag_cur = s_try, np.diag(m).copy()
        accepted.append((s_cur, diag_cur))
        if s_cur >= s_goal:
            if operator_norm(m - a0) < norm_budget:
                return finish(m, s_cur, ps, sp)
            s_goal *= 0.5
            s_cur, diag_cur = max((p for p in accepted if p[0] <= s_goal), key=lambda p: p[0])
            ds = s_goal - s_cur
        else:
            ds = min(2.0 * ds, s_goal - s_cur)
        if steps >= opts.max_continuation_steps:
            raise NoConvergence(f"continuation used {steps} steps without reaching s={s_goal:.6g}")
