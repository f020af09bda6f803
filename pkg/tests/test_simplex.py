import numpy as np
import pytest

from disttest.errors import SolverError
from disttest.reference import vertex_enumeration_feasible
from disttest.simplex import extract_bounds, solve_feasibility


def check_against_oracle(A, b, box=1e4):
    A2, b2, lower, upper, consistent = extract_bounds(A, b)
    if consistent:
        res = solve_feasibility(A2, b2, lower=lower, upper=upper)
        got = res.feasible
    else:
        got = False
    want = vertex_enumeration_feasible(A, b, box=box)
    assert got == want, f"solver={got} oracle={want}\nA={A}\nb={b}"
    return got


class TestExtractBounds:
    def test_singleton_rows_become_bounds(self):
        A = np.array([[2.0, 0.0], [0.0, -1.0], [1.0, 1.0]])
        b = np.array([4.0, -3.0, 10.0])
        A2, b2, lower, upper, consistent = extract_bounds(A, b)
        assert consistent
        assert A2.shape == (1, 2)
        assert upper[0] == 2.0 and lower[1] == 3.0

    def test_contradictory_singletons(self):
        A = np.array([[1.0], [-1.0]])
        b = np.array([0.0, -1.0])  # z <= 0 and z >= 1
        *_, consistent = extract_bounds(A, b)
        assert not consistent

    def test_zero_row_negative_rhs(self):
        A = np.zeros((1, 2))
        b = np.array([-0.5])
        *_, consistent = extract_bounds(A, b)
        assert not consistent

    def test_pinched_bounds_within_tolerance(self):
        A = np.array([[1.0], [-1.0]])
        b = np.array([1.0, -1.0 - 1e-10])  # z <= 1 and z >= 1 + 1e-10
        *_, consistent = extract_bounds(A, b)
        assert consistent


class TestSolveFeasibility:
    def test_trivial_box(self):
        res = solve_feasibility(np.array([[1.0], [-1.0]]), np.array([1.0, 0.0]))
        assert res.feasible and res.violation <= 1e-9

    def test_trivial_infeasible(self):
        res = solve_feasibility(np.array([[1.0], [-1.0]]), np.array([0.0, -1.0]))
        assert not res.feasible
        assert res.violation == pytest.approx(1.0, abs=1e-9)

    def test_equality_pair(self):
        # x + y = 1, x >= 0.6, y >= 0.6 -> infeasible by 0.2
        A = np.array([[1.0, 1.0], [-1.0, -1.0], [-1.0, 0.0], [0.0, -1.0]])
        b = np.array([1.0, -1.0, -0.6, -0.6])
        res = solve_feasibility(A, b)
        assert not res.feasible
        assert res.violation == pytest.approx(0.2, abs=1e-8)

    def test_free_variables(self):
        # x - y <= -5 and y - x <= -5 is infeasible even for free vars.
        A = np.array([[1.0, -1.0], [-1.0, 1.0]])
        b = np.array([-5.0, -5.0])
        assert not solve_feasibility(A, b).feasible
        # One of the two alone is fine.
        assert solve_feasibility(A[:1], b[:1]).feasible

    def test_feasible_point_is_returned_and_valid(self):
        rng = np.random.default_rng(3)
        A = rng.uniform(-2, 2, size=(6, 4))
        x_star = rng.uniform(-1, 1, size=4)
        b = A @ x_star + rng.uniform(0.1, 1.0, size=6)
        res = solve_feasibility(A, b)
        assert res.feasible
        assert np.all(A @ res.x - b <= 1e-9)

    def test_random_systems_match_vertex_enumeration(self):
        rng = np.random.default_rng(42)
        for _ in range(120):
            n = int(rng.integers(1, 6))
            m = int(rng.integers(1, 9))
            A = rng.uniform(-2, 2, size=(m, n))
            b = rng.uniform(-2, 2, size=m)
            check_against_oracle(A, b)

    def test_random_systems_with_singletons(self):
        rng = np.random.default_rng(43)
        for _ in range(80):
            n = int(rng.integers(1, 5))
            m = int(rng.integers(2, 8))
            A = rng.uniform(-2, 2, size=(m, n))
            # Sparsify some rows down to singletons to exercise bound folding.
            for i in range(m):
                if rng.random() < 0.5:
                    keep = int(rng.integers(0, n))
                    row = np.zeros(n)
                    row[keep] = A[i, keep] if A[i, keep] != 0 else 1.0
                    A[i] = row
            b = rng.uniform(-2, 2, size=m)
            check_against_oracle(A, b)

    def test_degenerate_stack(self):
        # Many coincident constraints through the origin.
        A = np.array(
            [
                [1.0, 1.0],
                [2.0, 2.0],
                [1.0, -1.0],
                [-1.0, 1.0],
                [-1.0, -1.0],
                [-3.0, -3.0],
            ]
        )
        b = np.zeros(6)
        assert solve_feasibility(A, b).feasible

    def test_medium_scale_known_feasible(self):
        # b = A x* + nonnegative margin guarantees feasibility.
        rng = np.random.default_rng(99)
        for _ in range(15):
            m, n = int(rng.integers(20, 120)), int(rng.integers(10, 60))
            A = rng.uniform(-3, 3, size=(m, n))
            x_star = rng.uniform(-2, 2, size=n)
            b = A @ x_star + rng.uniform(0.0, 0.5, size=m)
            assert solve_feasibility(A, b).feasible

    def test_medium_scale_farkas_infeasible(self):
        # y >= 0 with y^T A = 0 and y^T b = -1 certifies infeasibility.
        rng = np.random.default_rng(100)
        for _ in range(15):
            m, n = int(rng.integers(20, 120)), int(rng.integers(10, 60))
            A = rng.uniform(-3, 3, size=(m - 1, n))
            y = rng.uniform(0.1, 1.0, size=m)
            last = -(y[:-1] @ A) / y[-1]
            b = rng.uniform(-1, 1, size=m)
            b[-1] = (-1.0 - y[:-1] @ b[:-1]) / y[-1]
            assert not solve_feasibility(np.vstack([A, last]), b).feasible

    def test_iteration_cap_raises(self):
        rng = np.random.default_rng(5)
        A = rng.uniform(-2, 2, size=(8, 4))
        b = -np.abs(rng.uniform(1, 2, size=8))
        with pytest.raises(SolverError):
            solve_feasibility(A, b, max_iter=1, digest="cap-test")

    def test_bounds_only_no_rows(self):
        res = solve_feasibility(
            np.zeros((0, 2)),
            np.zeros(0),
            lower=np.array([1.0, -np.inf]),
            upper=np.array([2.0, 0.0]),
        )
        assert res.feasible
        assert res.x[0] == 1.0
