"""Finite structured inverse eigenvalue problem, one vertex at a time.

Start from ``[lambda_0]``. To add vertex ``k``: take ``A ⊕ [lambda_k]``, put
small equal values on the edges from ``k`` back to earlier vertices, and
correct the diagonal so the spectrum is unchanged. Edge values are halved
while the correction fails or the WSP is lost. Every intermediate
matrix is checked for the WSP and for ``||Ã - A ⊕ [lambda_k]||_op`` below
that step's budget (default ``2**-k``).
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import BudgetInfeasible, EigenvalueCollision, NoConvergence, SiepError, WspLost
from .graph import FiniteGraph, validate_pattern
from .linalg import direct_sum, eigenvalues, hausdorff_distance, operator_norm, sym_matrix
from .newton import NewtonOptions, NewtonReport, powersum_targets, residual_report, solve_diagonal_correction
from .wsp import DEFAULT_TOL as WSP_TOL, WspCertificate, has_wsp


@dataclass(frozen=True)
class SolveOptions:
    epsilon: Optional[float] = None
    edge_floor: float = 1e-10
    tol: float = 1e-12
    wsp_tol: float = WSP_TOL
    spectrum_tol: float = 1e-8
    method: str = "spectral"
    collision_gap: float = 1e-6
    budget_schedule: Optional[Callable[[int], float]] = None

    def budget(self, k):
        """Budget for the step that grows order ``k`` to ``k + 1``."""
        if self.budget_schedule is not None:
            return float(self.budget_schedule(k))
        b = 2.0 ** -k
        return b if self.epsilon is None else min(self.epsilon, b)

    def newton(self):
        return NewtonOptions(tol=self.tol, method=self.method)

    def to_json(self):
        return {
            "epsilon": self.epsilon,
            "edge_floor": self.edge_floor,
            "tol": self.tol,
            "wsp_tol": self.wsp_tol,
            "spectrum_tol": self.spectrum_tol,
            "method": self.method,
            "budget_schedule": "custom" if self.budget_schedule else "min(epsilon, 2^-k)",
        }


@dataclass
class StepRecord:
    step_index: int
    appended_eigenvalue: float
    new_edges: list
    edge_values: list
    budget: float
    achieved_norm_delta: float
    wsp: WspCertificate
    newton: NewtonReport

    def to_json(self):
        return {
            "step_index": self.step_index,
            "appended_eigenvalue": self.appended_eigenvalue,
            "new_edges": [list(e) for e in self.new_edges],
            "edge_values": self.edge_values,
            "budget": self.budget,
            "achieved_norm_delta": self.achieved_norm_delta,
            "wsp": self.wsp.summary(),
            "newton": self.newton.to_json(),
        }


def _spread(values):
    v = np.asarray(values, dtype=np.float64)
    return float(v.max() - v.min()) if v.size else 0.0


def step_extend(a_prev, lambda_new, new_edges, budget, options=None, *, prev_lambdas=None, check_prev=True):
    """Grow ``a_prev`` by one vertex adjacent to ``new_edges``, keeping the spectrum.

    ``prev_lambdas`` are the targets ``a_prev`` was built for; the step
    aims at exactly those plus ``lambda_new`` so rounding does not pile up
    across steps. Without them the computed spectrum of ``a_prev`` is used.
    """
    opts = options or SolveOptions()
    a_prev = sym_matrix(a_prev)
    k = a_prev.shape[0]
    edges = sorted(set(int(j) for j in new_edges))
    if any(not (0 <= j < k) for j in edges):
        raise ValueError(f"new edges must join vertex {k} to vertices below it, got {edges}")
    old = list(prev_lambdas) if prev_lambdas is not None else list(eigenvalues(a_prev))
    spread = _spread(old + [lambda_new]) or max(1.0, abs(lambda_new))
    gap = float(np.min(np.abs(np.asarray(old) - lambda_new)))
    if gap <= opts.collision_gap * spread:
        raise EigenvalueCollision(f"{lambda_new!r} is within {gap:.3g} of the existing spectrum")
    if check_prev and not has_wsp(a_prev, opts.wsp_tol).holds:
        raise WspLost(f"matrix of order {k} does not have the WSP")

    a = sym_matrix(direct_sum(a_prev, [[lambda_new]]))
    target = powersum_targets(old + [lambda_new])

    if not edges:
        # nothing to perturb: keep the exact direct sum
        m = a
        report = residual_report(m, target, opts.newton())
        wsp = has_wsp(m, opts.wsp_tol)
        if not wsp.holds:
            raise WspLost(f"direct sum of order {k + 1} lost the WSP")
    else:
        eps_hat = budget / (4.0 * math.sqrt(len(edges)))
        if eps_hat < opts.edge_floor:
            raise BudgetInfeasible(f"budget {budget:g} gives edge values {eps_hat:.3g} below floor {opts.edge_floor:g}")
        scale = 1.0
        while True:
            entries = {(j, k): scale * eps_hat for j in edges}
            try:
                m, report = solve_diagonal_correction(
                    a, entries, target, budget, edge_floor=opts.edge_floor, options=opts.newton()
                )
            except NoConvergence:
                # the solution branch ends before these edge values (close targets); retry smaller
                scale *= 0.5
                if scale * eps_hat < opts.edge_floor:
                    raise
                continue
            wsp = has_wsp(m, opts.wsp_tol)
            if wsp.holds:
                break
            scale *= 0.5
            if scale * eps_hat < opts.edge_floor:
                raise WspLost(f"no edge scale above floor {opts.edge_floor:g} keeps the WSP at order {k + 1}")

    delta = operator_norm(m - a)
    if not delta < budget:
        raise BudgetInfeasible(f"achieved ||Ã - A ⊕ [λ]||_op = {delta:.3g} is not below budget {budget:g}")
    record = StepRecord(
        step_index=k,
        appended_eigenvalue=float(lambda_new),
        new_edges=[(j, k) for j in edges],
        edge_values=[float(m[j, k]) for j in edges],
        budget=float(budget),
        achieved_norm_delta=delta,
        wsp=wsp,
        newton=report,
    )
    return m, record


def grow(lambdas, back_neighbors, options=None, start=None):
    """Yield ``(matrix, record)`` for orders ``1, 2, ...``; ``record`` is ``None`` at order 1.

    ``back_neighbors(k)`` gives the neighbours of vertex ``k`` below ``k``.
    ``start`` resumes from an existing ``(matrix)`` of order ``len`` prefix.
    """
    opts = options or SolveOptions()
    lam = [float(v) for v in lambdas]
    powersum_targets(lam)  # rejects duplicates up front
    if start is None:
        a = sym_matrix([[lam[0]]])
        yield a, None
        first = 1
    else:
        a = sym_matrix(start)
        first = a.shape[0]
    for k in range(first, len(lam)):
        try:
            a, rec = step_extend(
                a, lam[k], back_neighbors(k), opts.budget(k), opts, prev_lambdas=lam[:k], check_prev=False
            )
        except SiepError as exc:
            if exc.step is None:
                raise type(exc)(str(exc), step=k) from exc
            raise
        yield a, rec


@dataclass
class SiepSolution:
    matrix: np.ndarray
    graph: FiniteGraph
    target_spectrum: tuple
    per_step: list = field(default_factory=list)
    levels: list = field(default_factory=list)
    options: SolveOptions = field(default_factory=SolveOptions)

    def spectrum_error(self):
        return hausdorff_distance(eigenvalues(self.matrix), self.target_spectrum)

    def spectrum_tolerance(self):
        return self.options.spectrum_tol * max(1.0, _spread(self.target_spectrum)) if len(self.target_spectrum) > 1 else self.options.spectrum_tol

    def to_json(self):
        return {
            "graph": self.graph.to_json(),
            "target_spectrum": list(self.target_spectrum),
            "options": self.options.to_json(),
            "spectrum_error": self.spectrum_error(),
            "steps": [r.to_json() for r in self.per_step],
        }


def solve_finite(graph, lambdas, options=None):
    """A symmetric matrix with graph ``graph`` and spectrum ``lambdas``.

    Vertex ``k`` receives ``lambdas[k]`` as its appended eigenvalue; the
    order of ``lambdas`` is otherwise irrelevant.
    """
    opts = options or SolveOptions()
    lam = [float(v) for v in lambdas]
    if len(lam) != graph.n:
        raise ValueError(f"{len(lam)} eigenvalues for a graph on {graph.n} vertices")
    levels = []
    records = []
    for a, rec in grow(lam, graph.back_neighbors, opts):
        levels.append(a)
        if rec is not None:
            records.append(rec)
    sol = SiepSolution(levels[-1], graph, tuple(lam), records, levels, opts)
    pattern = validate_pattern(sol.matrix, graph, opts.edge_floor)
    if not pattern.ok:
        raise SiepError("solution violates the graph pattern: " + "; ".join(pattern.violations))
    err = sol.spectrum_error()
    if err > sol.spectrum_tolerance():
        raise SiepError(f"solution spectrum is {err:.3g} from the target")
    return sol
