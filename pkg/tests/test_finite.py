import math

import numpy as np
import pytest

from _util import EXAMPLE_A, random_connected_graph, random_spectrum
from siep.errors import BudgetInfeasible, DuplicateEigenvalues, EigenvalueCollision, SiepError
from siep.finite import SolveOptions, solve_finite, step_extend
from siep.graph import FiniteGraph, validate_pattern
from siep.linalg import eigenvalues, operator_norm
from siep.newton import g_eval, powersum_targets


class TestStepExtend:
    def test_two_by_two(self):
        m, rec = step_extend([[2.0]], 5.0, [0], 0.5)
        eps = m[0, 1]
        assert eps != 0.0
        d0 = (7 - math.sqrt(9 - 4 * eps**2)) / 2
        assert math.isclose(m[0, 0], d0, rel_tol=1e-12)
        assert math.isclose(np.trace(m), 7.0, rel_tol=1e-15)
        assert rec.achieved_norm_delta < 0.5
        assert rec.wsp.holds
        assert rec.new_edges == [(0, 1)]

    def test_no_edges_is_direct_sum(self):
        m, rec = step_extend(EXAMPLE_A, 10.0, [], 0.25)
        assert np.array_equal(m[:3, :3], EXAMPLE_A)
        assert m[3, 3] == 10.0
        assert rec.achieved_norm_delta == 0.0

    def test_old_entries_and_zeros_kept(self):
        m, _ = step_extend(EXAMPLE_A, 6.0, [1], 0.25, prev_lambdas=[3 - 2**0.5, 3, 3 + 2**0.5])
        assert m[0, 2] == 1.0 and m[0, 1] == 0.0 and m[0, 3] == 0.0 and m[2, 3] == 0.0
        assert m[1, 3] != 0.0
        target = powersum_targets([3 - 2**0.5, 3, 3 + 2**0.5, 6.0])
        c, r = target.center_scale()
        assert np.max(np.abs(g_eval((m - c * np.eye(4)) / r) - target.normalized(c, r))) <= 1e-12

    def test_budget_infeasible(self):
        with pytest.raises(BudgetInfeasible):
            step_extend([[2.0]], 5.0, [0], 1e-12)

    def test_collision(self):
        with pytest.raises(EigenvalueCollision):
            step_extend(np.diag([1.0, 2.0]), 2.0 + 1e-9, [0], 0.1)

    def test_requires_wsp(self):
        with pytest.raises(SiepError):
            step_extend(np.eye(2), 3.0, [0], 0.1)

    def test_bad_neighbor(self):
        with pytest.raises(ValueError):
            step_extend([[1.0]], 2.0, [1], 0.1)


class TestSolveFinite:
    def test_empty_graph(self):
        sol = solve_finite(FiniteGraph(4, frozenset()), [1, 2, 3, 4])
        assert np.array_equal(sol.matrix, np.diag([1.0, 2.0, 3.0, 4.0]))

    def test_path(self):
        g = FiniteGraph(3, frozenset({(0, 1), (1, 2)}))
        sol = solve_finite(g, [0, 1, 2])
        assert sol.matrix[0, 1] != 0 and sol.matrix[1, 2] != 0 and sol.matrix[0, 2] == 0
        assert np.allclose(eigenvalues(sol.matrix), [0, 1, 2], atol=1e-8)

    def test_example_pattern(self):
        r = math.sqrt(2)
        g = FiniteGraph(3, frozenset({(0, 2)}))
        sol = solve_finite(g, [3 - r, 3, 3 + r])
        assert FiniteGraph.from_matrix(sol.matrix) == FiniteGraph.from_matrix(EXAMPLE_A)
        assert np.allclose(eigenvalues(sol.matrix), eigenvalues(EXAMPLE_A), atol=1e-12)

    def test_complete_graph(self):
        g = FiniteGraph(7, frozenset((j, k) for k in range(7) for j in range(k)))
        sol = solve_finite(g, np.arange(7.0))
        assert validate_pattern(sol.matrix, g, 1e-10).ok
        assert sol.spectrum_error() <= 1e-8 * 6

    def test_budgets_and_immutability(self):
        rng = np.random.default_rng(8)
        g = random_connected_graph(rng, 9, extra=0.5)
        sol = solve_finite(g, random_spectrum(rng, 9, 30.0))
        for rec, prev, cur in zip(sol.per_step, sol.levels, sol.levels[1:]):
            k = rec.step_index
            assert rec.budget == 2.0**-k
            assert rec.achieved_norm_delta < rec.budget
            off = ~np.eye(k, dtype=bool)
            assert np.array_equal(prev[off], cur[:k, :k][off])
            assert all(abs(v) >= 1e-10 for v in rec.edge_values)

    def test_epsilon_caps_budgets(self):
        g = FiniteGraph(3, frozenset({(0, 1), (1, 2)}))
        sol = solve_finite(g, [0, 1, 2], SolveOptions(epsilon=0.01))
        assert all(r.budget == 0.01 for r in sol.per_step)
        assert operator_norm(sol.matrix - np.diag([0.0, 1.0, 2.0])) < 0.02

    def test_custom_schedule(self):
        g = FiniteGraph(3, frozenset({(0, 1), (1, 2)}))
        sol = solve_finite(g, [0, 1, 2], SolveOptions(budget_schedule=lambda k: 0.1 / k))
        assert [r.budget for r in sol.per_step] == [0.1, 0.05]

    def test_powersum_method(self):
        g = FiniteGraph(4, frozenset({(0, 1), (1, 2), (2, 3)}))
        sol = solve_finite(g, [0, 1, 2, 3], SolveOptions(method="powersum"))
        assert sol.spectrum_error() <= 1e-8 * 3

    def test_errors(self):
        g = FiniteGraph(3, frozenset({(0, 1)}))
        with pytest.raises(DuplicateEigenvalues):
            solve_finite(g, [1, 1, 2])
        with pytest.raises(ValueError):
            solve_finite(g, [1, 2])

    def test_failing_step_is_named(self):
        g = FiniteGraph(3, frozenset({(0, 1), (1, 2)}))
        with pytest.raises(BudgetInfeasible, match="step 1"):
            solve_finite(g, [0, 1, 2], SolveOptions(epsilon=1e-12))

    def test_record_json(self):
        g = FiniteGraph(2, frozenset({(0, 1)}))
        d = solve_finite(g, [0, 1]).to_json()
        assert d["steps"][0]["wsp"]["holds"] is True
        assert d["steps"][0]["new_edges"] == [[0, 1]]
