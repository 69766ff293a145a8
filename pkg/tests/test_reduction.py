import math

import numpy as np
import pytest

from alglat.lattices import ComplexBasis, embed
from alglat.reduction import (
    NonEuclideanRingWarning,
    alll_reduce,
    decoding_radius,
    decoding_radius_bound,
    gauss_reduce,
    potential,
    quaternion_rotation,
    real_lll,
    reduction_epsilon,
)
from alglat.reduction import _qr_positive
from alglat.rings import quantize, ring_new
from alglat.svp import shortest_vector, successive_minima_2d

RING1 = ring_new(1)
RING3 = ring_new(3)
RING5 = ring_new(5)
EUCLIDEAN_D = (1, 2, 3, 7, 11)


def eisenstein_golden_basis():
    w = RING3.xi
    return np.array([4 + w, -1 + 5 * w]), np.array([1 + 4 * w, 1 + 2 * w])


def noneuclidean_golden_basis():
    xi = RING5.xi
    return np.array([2 + 3 * xi, 2 + xi]), np.array([8 + xi, 2 + 0 * xi])


def random_basis(ring, n, rng):
    m = math.sqrt(0.5) * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return ComplexBasis(m, ring)


def assert_transform_valid(basis, report):
    assert report.transform.is_unimodular()
    np.testing.assert_allclose(
        basis.matrix @ report.transform.to_complex(),
        report.reduced.matrix,
        rtol=1e-8,
        atol=1e-10,
    )


def assert_alll_conditions(report):
    """Re-factorize the output from scratch and check both defining conditions."""
    ring = report.reduced.ring
    _, R = _qr_positive(report.reduced.matrix)
    n = report.reduced.n
    for j in range(n):
        for k in range(j + 1, n):
            assert quantize(R[j, k] / R[j, j], ring).is_zero()
    for j in range(1, n):
        assert (
            report.delta * abs(R[j - 1, j - 1]) ** 2
            <= abs(R[j, j]) ** 2 + abs(R[j - 1, j]) ** 2 + 1e-9
        )
    # Siegel's rephrasing of the swap condition
    for j in range(1, n):
        mu2 = abs(R[j - 1, j] / R[j - 1, j - 1]) ** 2
        assert (report.delta - mu2) * abs(R[j - 1, j - 1]) ** 2 <= abs(R[j, j]) ** 2 + 1e-9


class TestGauss:
    def test_eisenstein_golden(self):
        b1, b2 = eisenstein_golden_basis()
        rep = gauss_reduce(b1, b2, RING3)
        assert rep.norms_squared_exact == [16, 28]
        assert rep.events == ["swap", "size_reduction", "swap"]
        assert rep.swaps == 2 and rep.size_reductions == 1
        assert not rep.warnings
        assert_transform_valid(ComplexBasis(np.column_stack([b1, b2]), RING3), rep)
        # the pair's Gram-Schmidt ratio quantizes to zero on exit
        c0, c1 = rep.reduced.matrix[:, 0], rep.reduced.matrix[:, 1]
        mu = np.vdot(c0, c1) / np.vdot(c0, c0)
        assert quantize(mu, RING3).is_zero()

    def test_noneuclidean_golden(self):
        b1, b2 = noneuclidean_golden_basis()
        with pytest.warns(NonEuclideanRingWarning):
            rep = gauss_reduce(b1, b2, RING5)
        assert rep.norms_squared_exact == [58, 61]
        assert rep.events == ["size_reduction"]
        assert rep.warnings
        # the oracle finds a strictly shorter vector: reduction is not optimal here
        B = ComplexBasis(np.column_stack([b1, b2]), RING5)
        assert shortest_vector(B).norm_squared == pytest.approx(20.0, abs=1e-6)

    def test_already_reduced_pair_unchanged(self):
        b1 = np.array([1.0 + 0j, 0.0 + 0j])
        b2 = np.array([0.0 + 0j, 2.0 + 0j])
        rep = gauss_reduce(b1, b2, RING1)
        assert rep.swaps == 0 and rep.size_reductions == 0
        np.testing.assert_allclose(rep.reduced.matrix, np.column_stack([b1, b2]))

    def test_dependent_inputs_rejected(self):
        v = np.array([1.0 + 1j, 2.0 - 1j])
        with pytest.raises(ValueError):
            gauss_reduce(v, 3 * v, RING1)

    @pytest.mark.parametrize("d", EUCLIDEAN_D)
    def test_matches_successive_minima(self, d):
        """Reduced norms equal the oracle's minima on Euclidean rings."""
        ring = ring_new(d)
        rng = np.random.default_rng(d)
        for _ in range(60):
            B = random_basis(ring, 2, rng)
            rep = gauss_reduce(B.matrix[:, 0], B.matrix[:, 1], ring)
            l1, l2, _ = successive_minima_2d(B)
            assert rep.norms[0] == pytest.approx(l1, abs=1e-7)
            assert rep.norms[1] == pytest.approx(l2, abs=1e-7)
            assert_transform_valid(B, rep)


class TestAlll:
    def test_identity_noop(self):
        B = ComplexBasis(np.eye(2, dtype=complex), RING1)
        rep = alll_reduce(B, 0.99)
        assert rep.swaps == 0
        assert rep.transform.entries == type(rep.transform).identity(2, RING1).entries
        np.testing.assert_allclose(rep.reduced.matrix, np.eye(2))

    def test_golden_first_vector_matches_gauss(self):
        b1, b2 = eisenstein_golden_basis()
        B = ComplexBasis(np.column_stack([b1, b2]), RING3)
        rep = alll_reduce(B, 0.99)
        assert rep.norms_squared_exact[0] == 16
        assert_alll_conditions(rep)

    @pytest.mark.parametrize("d", EUCLIDEAN_D)
    def test_agrees_with_gauss_in_rank2(self, d):
        ring = ring_new(d)
        rng = np.random.default_rng(100 + d)
        for _ in range(40):
            B = random_basis(ring, 2, rng)
            ra = alll_reduce(B, 0.99)
            rg = gauss_reduce(B.matrix[:, 0], B.matrix[:, 1], ring)
            assert ra.norms[0] == pytest.approx(rg.norms[0], rel=1e-7)

    @pytest.mark.parametrize("d", EUCLIDEAN_D)
    @pytest.mark.parametrize("n", (2, 4, 8))
    def test_postconditions_random(self, d, n):
        ring = ring_new(d)
        rng = np.random.default_rng(d * 10 + n)
        for _ in range(15):
            B = random_basis(ring, n, rng)
            rep = alll_reduce(B, 0.99)
            assert_transform_valid(B, rep)
            assert_alll_conditions(rep)
            assert all(r < 0.99 for r in rep.potential_ratios)
            for check in rep.bound_checks.values():
                assert check.passed or check.skipped

    def test_swap_count_bound(self):
        rng = np.random.default_rng(8)
        delta = 0.99
        for _ in range(30):
            B = random_basis(RING3, 6, rng)
            rep = alll_reduce(B, delta)
            if rep.potential_ratios:
                log_drop = -sum(math.log(r) for r in rep.potential_ratios)
                bound = 2 * log_drop / math.log(1 / delta) + B.n - 1
                assert rep.swaps <= bound + 1e-6

    def test_potential_strictly_decreasing(self):
        rng = np.random.default_rng(9)
        B = random_basis(RING1, 6, rng)
        rep = alll_reduce(B, 0.99)
        assert rep.swaps > 0
        assert all(r < 0.99 for r in rep.potential_ratios)

    def test_delta_validation(self):
        B = ComplexBasis(np.eye(2, dtype=complex), ring_new(2))
        with pytest.raises(ValueError):
            alll_reduce(B, 0.5)  # rho^2 = 3/4 for d=2
        with pytest.raises(ValueError):
            alll_reduce(B, 1.2)

    def test_noneuclidean_warns_but_runs(self):
        rng = np.random.default_rng(10)
        B = random_basis(RING5, 4, rng)
        with pytest.warns(NonEuclideanRingWarning):
            rep = alll_reduce(B, 0.99)
        assert rep.warnings
        assert all(c.skipped for c in rep.bound_checks.values())
        assert_transform_valid(B, rep)

    def test_quality_bounds_with_oracle(self):
        rng = np.random.default_rng(11)
        eps = reduction_epsilon(RING1, 0.99)
        for _ in range(10):
            B = random_basis(RING1, 4, rng)
            lam1 = shortest_vector(B).norm
            rep = alll_reduce(B, 0.99, lambda1=lam1)
            c = rep.bound_checks["first_vs_lambda1"]
            assert c.passed
            assert rep.norms[0] <= eps ** (-1.5) * lam1 * (1 + 1e-9)
            assert rep.bound_checks["decoding_radius"].passed

    def test_scrambled_basis_crosses_refactor_threshold(self):
        """A heavily scrambled basis forces >100 swaps, exercising the
        periodic QR refactorization; the transform must stay exact."""
        from alglat.lattices import random_unimodular

        rng = np.random.default_rng(1)
        n = 8
        base = np.eye(n, dtype=complex) + 0.1 * (
            rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        )
        U = random_unimodular(RING3, n, rng, ops=120)
        B = ComplexBasis(base @ U.to_complex(), RING3)
        rep = alll_reduce(B, 0.99)
        assert rep.swaps > 100
        assert_transform_valid(B, rep)
        assert_alll_conditions(rep)

    def test_large_entry_basis(self):
        # scale invariance sanity: reduction copes with badly scaled inputs
        rng = np.random.default_rng(12)
        m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        m[:, 0] *= 1e4
        m[:, 3] *= 1e-3
        rep = alll_reduce(ComplexBasis(m, RING1), 0.99)
        assert_transform_valid(ComplexBasis(m, RING1), rep)
        assert_alll_conditions(rep)


class TestQuaternionRotation:
    def test_identity_case(self):
        np.testing.assert_allclose(quaternion_rotation(1.0, 0.0), np.eye(2))

    def test_swap_case(self):
        M = quaternion_rotation(0.0, 1.0)
        np.testing.assert_allclose(M, [[0, 1], [-1, 0]])
        np.testing.assert_allclose(M @ [0, 1], [1, 0])

    def test_three_four_five(self):
        M = quaternion_rotation(3.0, 4.0)
        out = M @ np.array([3.0, 4.0])
        assert out[0] == pytest.approx(5.0)
        assert abs(out[1]) < 1e-12

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            quaternion_rotation(0.0, 0.0)

    def test_unitarity_random(self):
        rng = np.random.default_rng(13)
        for _ in range(2000):
            a = complex(rng.standard_normal(), rng.standard_normal())
            b = complex(rng.standard_normal(), rng.standard_normal())
            M = quaternion_rotation(a, b)
            np.testing.assert_allclose(M.conj().T @ M, np.eye(2), atol=1e-12)
            out = M @ np.array([a, b])
            assert abs(out[1]) < 1e-12
            assert out[0].real == pytest.approx(math.hypot(abs(a), abs(b)))


class TestRealLll:
    def test_eisenstein_golden_delta_one(self):
        b1, b2 = eisenstein_golden_basis()
        B = ComplexBasis(np.column_stack([b1, b2]), RING3)
        reduced, T, _ = real_lll(embed(B).matrix, delta=1.0)
        norms_sq = [float(np.dot(reduced[:, j], reduced[:, j])) for j in range(4)]
        assert norms_sq == pytest.approx([16, 16, 31, 28], abs=1e-6)
        assert round(abs(float(np.linalg.det(np.array(T, dtype=float))))) == 1

    def test_noneuclidean_golden(self):
        b1, b2 = noneuclidean_golden_basis()
        B = ComplexBasis(np.column_stack([b1, b2]), RING5)
        reduced, _, _ = real_lll(embed(B).matrix, delta=1.0)
        norms_sq = [float(np.dot(reduced[:, j], reduced[:, j])) for j in range(4)]
        assert norms_sq == pytest.approx([20, 30, 26, 39], abs=1e-6)

    def test_identity_unchanged(self):
        reduced, T, swaps = real_lll(np.eye(4), delta=0.99)
        np.testing.assert_allclose(reduced, np.eye(4))
        assert swaps == 0

    def test_transform_consistency(self):
        rng = np.random.default_rng(14)
        for _ in range(20):
            G = rng.standard_normal((6, 6))
            reduced, T, _ = real_lll(G, delta=0.99)
            np.testing.assert_allclose(G @ np.array(T, dtype=float), reduced, atol=1e-8)
            assert round(abs(float(np.linalg.det(np.array(T, dtype=float))))) == 1

    def test_delta_validation(self):
        with pytest.raises(ValueError):
            real_lll(np.eye(2), delta=0.2)


class TestPotentialAndRadius:
    def test_potential_identity(self):
        assert potential(np.eye(2)) == pytest.approx(1.0)

    def test_potential_diag(self):
        assert potential(np.diag([2.0, 1.0])) == pytest.approx(16.0)

    def test_decoding_radius_identity(self):
        assert decoding_radius(np.eye(2), 2) == pytest.approx(0.5)

    def test_decoding_radius_diag(self):
        assert decoding_radius(np.diag([3.0, 2.0]), 2) == pytest.approx(1.0)

    def test_decoding_radius_k_validation(self):
        with pytest.raises(ValueError):
            decoding_radius(np.eye(2), 3)

    def test_radius_bound_with_oracle(self):
        rng = np.random.default_rng(15)
        eps = reduction_epsilon(RING1, 0.99)
        for _ in range(10):
            B = random_basis(RING1, 4, rng)
            lam1 = shortest_vector(B).norm
            rep = alll_reduce(B, 0.99)
            _, R = _qr_positive(rep.reduced.matrix)
            for k in range(2, 5):
                assert decoding_radius(R, k) >= decoding_radius_bound(
                    RING1, 4, k, lam1, eps
                ) - 1e-9
