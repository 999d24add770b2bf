import math

import numpy as np
import pytest

from polyconsensus.core.errors import InputError, SizeError
from polyconsensus.polybasis import (
    build_basis,
    build_slack_basis,
    count_iota,
    count_rho,
    eval_chi,
    gram_codomain,
    gram_map,
    selector_gamma,
    selector_pi,
)

SIZES = [(n, d) for n in range(1, 5) for d in range(1, 4)]


def symmetric_units(rho):
    for a in range(rho):
        for b in range(a, rho):
            E = np.zeros((rho, rho))
            E[a, b] = E[b, a] = 1.0
            yield E


def upper(Q):
    return Q[np.triu_indices(Q.shape[0])]


class TestBuildBasis:
    def test_two_variables_degree_two(self):
        basis = build_basis(2, 2)
        assert count_rho(2, 2) == 6
        assert basis.labels() == ["1", "x1", "x2", "x1^2", "x1*x2", "x2^2"]

    def test_constant_first_then_linear(self):
        basis = build_basis(3, 2)
        assert basis.exponents[0].degree == 0
        assert [e.powers for e in basis.exponents[1:4]] == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]

    def test_degrees_are_non_decreasing(self):
        degrees = [e.degree for e in build_basis(3, 3).exponents]
        assert degrees == sorted(degrees)

    @pytest.mark.parametrize("n, d", [(0, 1), (2, 0)])
    def test_rejects_empty_sizes(self, n, d):
        with pytest.raises(InputError):
            build_basis(n, d)

    def test_overflow_is_a_size_error(self):
        with pytest.raises(SizeError):
            count_rho(200, 20)

    def test_unknown_monomial_position(self):
        with pytest.raises(InputError):
            build_basis(2, 1).position([2, 0])


class TestEvalChi:
    def test_values(self):
        basis = build_basis(2, 2)
        np.testing.assert_allclose(eval_chi(basis, [2.0, 3.0]), [1, 2, 3, 4, 6, 9])

    def test_batched_trailing_axis(self, rng):
        basis = build_basis(3, 2)
        points = rng.normal(size=(4, 5, 3))
        chis = eval_chi(basis, points)
        assert chis.shape == (4, 5, basis.rho)
        np.testing.assert_allclose(chis[2, 3], eval_chi(basis, points[2, 3]))

    def test_wrong_length(self):
        with pytest.raises(InputError):
            eval_chi(build_basis(2, 1), [1.0, 2.0, 3.0])


class TestGramMap:
    @pytest.mark.parametrize("n, d", [(1, 2), (2, 2), (3, 1), (2, 3)])
    def test_matches_quadratic_form(self, rng, n, d):
        basis = build_basis(n, d)
        X = rng.normal(size=(basis.rho, basis.rho))
        coeffs = gram_map(basis, X)
        assert coeffs.shape == (len(gram_codomain(basis)),)
        for x in rng.normal(size=(10, n)):
            chi = eval_chi(basis, x)
            assert chi @ X @ chi == pytest.approx(coeffs @ eval_chi(basis.codomain, x), rel=1e-9, abs=1e-9)

    def test_codomain_has_all_monomials_up_to_2d(self):
        assert len(gram_codomain(build_basis(2, 2))) == 15

    @pytest.mark.parametrize("n, d", SIZES)
    def test_rank_is_number_of_monomials(self, n, d):
        basis = build_basis(n, d)
        image = np.array([gram_map(basis, E) for E in symmetric_units(basis.rho)])
        assert np.linalg.matrix_rank(image) == math.comb(n + 2 * d, 2 * d)

    def test_shape_check(self):
        with pytest.raises(InputError):
            gram_map(build_basis(2, 1), np.eye(4))


class TestSlackBasis:
    @pytest.mark.parametrize("n, d", SIZES)
    def test_cardinality(self, n, d):
        slack = build_slack_basis(build_basis(n, d))
        assert slack.iota == count_iota(n, d)

    def test_known_counts(self):
        assert count_iota(1, 1) == 0
        assert count_iota(2, 1) == 0
        assert count_iota(2, 2) == 6
        assert count_iota(3, 2) == 20

    @pytest.mark.parametrize("n, d", SIZES)
    def test_annihilation(self, rng, n, d):
        basis = build_basis(n, d)
        slack = build_slack_basis(basis)
        if slack.iota == 0:
            return
        stacked = slack.stacked(basis.rho)
        chis = eval_chi(basis, rng.uniform(-2, 2, size=(100, n)))
        values = np.einsum("pa,kab,pb->kp", chis, stacked, chis)
        bound = 1e-9 * (1.0 + np.sum(chis ** 2, axis=1))
        assert np.all(np.abs(values) <= bound)

    @pytest.mark.parametrize("n, d", SIZES)
    def test_linearly_independent(self, n, d):
        slack = build_slack_basis(build_basis(n, d))
        if slack.iota == 0:
            return
        assert np.linalg.matrix_rank(np.array([upper(Q) for Q in slack.Q], dtype=float)) == slack.iota

    def test_matrices_are_symmetric_integer(self):
        for Q in build_slack_basis(build_basis(2, 2)).Q:
            assert Q.dtype.kind == "i"
            np.testing.assert_array_equal(Q, Q.T)
            np.testing.assert_array_equal(gram_map(build_basis(2, 2), Q), 0.0)


class TestSelectors:
    def test_gamma_extracts_state(self, rng):
        basis = build_basis(3, 2)
        x = rng.normal(size=3)
        np.testing.assert_allclose(selector_gamma(basis) @ eval_chi(basis, x), x)

    def test_pi_drops_constant(self, rng):
        basis = build_basis(2, 3)
        chi = eval_chi(basis, rng.normal(size=2))
        np.testing.assert_allclose(selector_pi(basis) @ chi, chi[1:])
        assert selector_pi(basis).shape == (basis.rho - 1, basis.rho)
