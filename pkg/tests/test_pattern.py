import numpy as np
import pytest

from polyconsensus.core.errors import AssumptionViolation, IntervalError, PatternError
from polyconsensus.pattern import (
    PatternMatrix,
    check_assumption1,
    cycle_laplacian,
    eigendecompose,
    from_edge_list,
    jacobi_eigh,
    require_assumption1,
)


def random_connected_graph(rng, N):
    edges = [(i, i + 1, rng.uniform(0.5, 2.0)) for i in range(1, N)]
    for _ in range(N):
        i, j = rng.choice(np.arange(1, N + 1), size=2, replace=False)
        edges.append((int(i), int(j), rng.uniform(0.5, 2.0)))
    return from_edge_list(N, edges)


class TestConstruction:
    def test_cycle_four(self):
        P = cycle_laplacian(4)
        expected = np.array([
            [2, -1, 0, -1],
            [-1, 2, -1, 0],
            [0, -1, 2, -1],
            [-1, 0, -1, 2],
        ])
        np.testing.assert_array_equal(P.entries, expected)

    def test_cycle_needs_three_agents(self):
        with pytest.raises(PatternError):
            cycle_laplacian(2)

    def test_self_loop(self):
        with pytest.raises(PatternError):
            from_edge_list(3, [(2, 2, 1.0)])

    def test_out_of_range(self):
        with pytest.raises(PatternError):
            from_edge_list(3, [(1, 4, 1.0)])

    def test_entries_are_read_only(self):
        P = cycle_laplacian(3)
        with pytest.raises(ValueError):
            P.entries[0, 0] = 5.0

    def test_non_square(self):
        with pytest.raises(PatternError):
            PatternMatrix(np.zeros((2, 3)))


class TestJacobi:
    def test_matches_numpy(self, rng):
        A = rng.normal(size=(7, 7))
        A = A + A.T
        values, vectors = jacobi_eigh(A)
        np.testing.assert_allclose(np.sort(values), np.linalg.eigvalsh(A), atol=1e-10)
        np.testing.assert_allclose(vectors @ np.diag(values) @ vectors.T, A, atol=1e-10)

    def test_diagonal_input(self):
        values, vectors = jacobi_eigh(np.diag([3.0, -1.0]))
        np.testing.assert_array_equal(values, [3.0, -1.0])
        np.testing.assert_array_equal(vectors, np.eye(2))


class TestAssumption1:
    def test_cycle_holds(self):
        report = check_assumption1(cycle_laplacian(5))
        assert report.ok
        assert report.zero_count == 1

    def test_identity_fails_row_sums(self):
        report = check_assumption1(PatternMatrix(np.eye(3)))
        assert "row-sum" in report.kinds

    def test_asymmetric(self):
        P = PatternMatrix(np.array([[1.0, -1.0], [0.0, 0.0]]))
        assert check_assumption1(P).kinds == ["asymmetric"]

    def test_disconnected_graph(self):
        report = check_assumption1(from_edge_list(4, [(1, 2, 1.0), (3, 4, 1.0)]))
        assert report.kinds == ["zero-multiplicity"]
        assert report.zero_count == 2

    def test_require_raises_with_report(self):
        with pytest.raises(AssumptionViolation) as info:
            require_assumption1(from_edge_list(4, [(1, 2, 1.0), (3, 4, 1.0)]))
        assert info.value.detail.zero_count == 2
        assert "zero-multiplicity" in str(info.value)

    def test_signed_weights_are_allowed(self):
        P = from_edge_list(3, [(1, 2, 1.0), (2, 3, -1.0)])
        assert check_assumption1(P).ok


class TestEigendecompose:
    def test_cycle_four_spectrum(self):
        spectral = eigendecompose(cycle_laplacian(4))
        np.testing.assert_allclose(spectral.lambdas, [0.0, 2.0, 2.0, 4.0], atol=1e-10)
        assert spectral.distinct_nonzero() == pytest.approx([2.0, 4.0])
        assert spectral.lambda_min == pytest.approx(2.0)
        assert spectral.lambda_max == pytest.approx(4.0)

    def test_random_connected_graphs(self, rng):
        for _ in range(50):
            N = int(rng.integers(3, 21))
            P = random_connected_graph(rng, N)
            spectral = eigendecompose(P)
            S = spectral.S
            np.testing.assert_allclose(S.T @ S, np.eye(N), atol=1e-10)
            np.testing.assert_allclose(S @ np.diag(spectral.lambdas) @ S.T, P.entries, atol=1e-9)
            np.testing.assert_allclose(S[:, 0], np.ones(N) / np.sqrt(N), atol=1e-9)
            assert abs(spectral.lambdas[0]) < 1e-9
            assert np.all(np.diff(spectral.nonzero) >= 0)

    def test_distinct_merges_repeats(self):
        spectral = eigendecompose(cycle_laplacian(6))
        # 1, 1, 3, 3, 4
        assert spectral.distinct_nonzero() == pytest.approx([1.0, 3.0, 4.0])

    def test_single_agent_has_no_interval(self):
        spectral = eigendecompose(PatternMatrix(np.zeros((1, 1))))
        assert spectral.distinct_nonzero() == []
        with pytest.raises(IntervalError):
            spectral.lambda_min
        with pytest.raises(IntervalError):
            spectral.lambda_max
