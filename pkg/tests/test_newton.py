import math

import numpy as np
import pytest

from _util import EXAMPLE_A, random_sym
from siep.errors import BudgetInfeasible, DuplicateEigenvalues, NoConvergence
from siep.linalg import eigenvalues, operator_norm
from siep.newton import (
    METHODS,
    NewtonOptions,
    g_eval,
    jac_x,
    powersum_targets,
    residual_report,
    solve_diagonal_correction,
)


class TestTargets:
    def test_examples(self):
        assert list(powersum_targets([1, 2]).values) == [3.0, 2.5]
        assert list(powersum_targets([0]).values) == [0.0]
        assert list(powersum_targets([1, 2, 3]).values) == [6.0, 7.0, 12.0]

    def test_duplicates(self):
        with pytest.raises(DuplicateEigenvalues):
            powersum_targets([1.0, 2.0, 1.0])

    def test_normalized_targets(self):
        t = powersum_targets([10.0, 12.0, 14.0])
        c, r = t.center_scale()
        assert (c, r) == (12.0, 2.0)
        assert np.allclose(t.normalized(c, r), powersum_targets([-1.0, 0.0, 1.0]).values)


class TestGeval:
    def test_examples(self):
        assert list(g_eval(np.diag([1.0, 2.0]))) == [3.0, 2.5]
        assert list(g_eval([[0.0, 1.0], [1.0, 0.0]])) == [0.0, 1.0]
        assert list(g_eval(np.zeros((3, 3)))) == [0.0, 0.0, 0.0]

    def test_matches_traces(self):
        a = random_sym(np.random.default_rng(0), 6)
        want = [np.trace(np.linalg.matrix_power(a, k)) / k for k in range(1, 7)]
        assert np.allclose(g_eval(a), want, rtol=1e-13)

    def test_equals_targets_of_spectrum(self):
        a = random_sym(np.random.default_rng(1), 5)
        assert np.allclose(g_eval(a), powersum_targets(eigenvalues(a)).values, rtol=1e-12, atol=1e-13)


class TestJacobian:
    def test_vandermonde(self):
        assert jac_x(np.diag([2.0, 5.0])).tolist() == [[1.0, 1.0], [2.0, 5.0]]

    def test_scalar_is_singular(self):
        assert np.linalg.matrix_rank(jac_x(np.diag([3.0, 3.0]))) == 1

    def test_example_matrix(self):
        assert jac_x(EXAMPLE_A).tolist() == [[1, 1, 1], [4, 3, 2], [17, 9, 5]]

    def test_has_n_rows(self):
        assert jac_x(np.eye(4)).shape == (4, 4)

    def test_finite_differences(self):
        rng = np.random.default_rng(2)
        for n in range(2, 9):
            a = random_sym(rng, n)
            h = 1e-5 * max(1.0, operator_norm(a))
            for i in range(n):
                e = np.zeros((n, n))
                e[i, i] = h
                fd = (g_eval(a + e) - g_eval(a - e)) / (2 * h)
                assert np.allclose(fd, jac_x(a)[:, i], rtol=1e-6, atol=1e-6)


class TestDiagonalCorrection:
    @pytest.mark.parametrize("method", METHODS)
    def test_two_by_two_closed_form(self, method):
        # d0 + d1 = 3 and d0 * d1 = 2 + eps^2
        eps = 0.1
        m, rep = solve_diagonal_correction(
            np.diag([1.0, 2.0]), {(0, 1): eps}, powersum_targets([1, 2]), 1.0, options=NewtonOptions(method=method)
        )
        d0 = (3 - math.sqrt(9 - 4 * (2 + eps**2))) / 2
        assert math.isclose(m[0, 0], d0, rel_tol=1e-12)
        assert math.isclose(m[1, 1], 3 - d0, rel_tol=1e-12)
        assert m[0, 1] == eps
        assert rep.converged and rep.final_residual <= 1e-12
        assert rep.scale_reached == 1.0

    @pytest.mark.parametrize("method", METHODS)
    def test_unreachable_target(self, method):
        # discriminant 9 - 4(2 + eps^2) < 0 for eps = 0.6
        with pytest.raises((NoConvergence, BudgetInfeasible)):
            solve_diagonal_correction(
                np.diag([1.0, 2.0]), {(0, 1): 0.6}, powersum_targets([1, 2]), 10.0, options=NewtonOptions(method=method)
            )

    def test_append_step_example(self):
        # [2] ⊕ [5] with edge eps: d0 + d1 = 7, d0 d1 - eps^2 = 10
        eps = 0.125
        m, _ = solve_diagonal_correction(np.diag([2.0, 5.0]), {(0, 1): eps}, powersum_targets([2, 5]), 0.5)
        d0 = (7 - math.sqrt(9 - 4 * eps**2)) / 2
        assert math.isclose(m[0, 0], d0, rel_tol=1e-12)
        assert np.allclose(eigenvalues(m), [2, 5], atol=1e-13)

    def test_empty_perturbation_is_identity(self):
        a0 = np.diag([1.0, 2.0, 3.0])
        m, rep = solve_diagonal_correction(a0, {}, powersum_targets([1, 2, 3]), 1.0)
        assert np.array_equal(m, a0)
        assert rep.iterations == 0

    def test_budget_forces_smaller_entries(self):
        a0 = np.diag([0.0, 1.0, 2.0])
        m, rep = solve_diagonal_correction(a0, {(0, 2): 0.4, (1, 2): 0.4}, powersum_targets([0, 1, 2]), 0.3)
        assert rep.scale_reached < 1.0
        assert operator_norm(m - a0) < 0.3
        assert m[0, 2] == m[1, 2] == 0.4 * rep.scale_reached

    def test_floor_makes_budget_infeasible(self):
        with pytest.raises(BudgetInfeasible):
            solve_diagonal_correction(
                np.diag([0.0, 1.0]), {(0, 1): 0.4}, powersum_targets([0, 1]), 1e-3, edge_floor=0.1
            )

    def test_converged_means_spectrum(self):
        rng = np.random.default_rng(4)
        for n in range(2, 9):
            lam = np.sort(rng.uniform(-5, 5, n))
            entries = {(j, n - 1): 0.01 for j in range(n - 1)}
            m, rep = solve_diagonal_correction(np.diag(lam), entries, powersum_targets(lam), 0.1)
            assert rep.converged
            assert np.max(np.abs(eigenvalues(m) - lam)) <= 1e-8 * max(1.0, lam[-1] - lam[0])

    def test_rejects_occupied_position(self):
        with pytest.raises(ValueError):
            solve_diagonal_correction(EXAMPLE_A, {(0, 2): 0.1}, powersum_targets(eigenvalues(EXAMPLE_A)), 1.0)

    def test_residual_report(self):
        rep = residual_report(np.diag([1.0, 2.0]), powersum_targets([1, 2]))
        assert rep.converged and rep.final_residual == 0.0
        assert not residual_report(np.diag([1.0, 2.5]), powersum_targets([1, 2])).converged
