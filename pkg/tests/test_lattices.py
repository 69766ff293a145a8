import math

import numpy as np
import pytest

from alglat.lattices import (
    ComplexBasis,
    RingMatrix,
    basis_from_json,
    basis_to_json,
    coeff_to_complex,
    embed,
    embed_vector,
    hermite_factor,
    is_unimodular,
    minkowski_check,
    orthogonality_defect,
    random_unimodular,
    volume,
)
from alglat.rings import ring_new

RING1 = ring_new(1)
RING2 = ring_new(2)
RING3 = ring_new(3)


def random_basis(ring, n, rng):
    m = math.sqrt(0.5) * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return ComplexBasis(m, ring)


def random_elem_vector(ring, n, rng, lo=-5, hi=6):
    return tuple(ring.elem(*rng.integers(lo, hi, size=2)) for _ in range(n))


class TestEmbed:
    def test_scalar_one_d2(self):
        B = ComplexBasis(np.array([[1.0 + 0j]]), RING2)
        np.testing.assert_allclose(embed(B).matrix, [[1, 0], [0, math.sqrt(2)]], atol=1e-15)

    def test_scalar_one_d3(self):
        B = ComplexBasis(np.array([[1.0 + 0j]]), RING3)
        np.testing.assert_allclose(embed(B).matrix, [[1, 0.5], [0, math.sqrt(3) / 2]], atol=1e-15)

    def test_scalar_i_d1(self):
        B = ComplexBasis(np.array([[1j]]), RING1)
        np.testing.assert_allclose(embed(B).matrix, [[0, -1], [1, 0]], atol=1e-15)

    @pytest.mark.parametrize("d", (1, 2, 3, 5, 7, 11))
    def test_coefficient_identity(self, d):
        """stack(B x) equals the real generator applied to [x_a; x_b]."""
        ring = ring_new(d)
        rng = np.random.default_rng(d)
        for _ in range(50):
            n = int(rng.integers(1, 5))
            B = random_basis(ring, n, rng)
            x = random_elem_vector(ring, n, rng)
            lhs = embed_vector(B.matrix @ coeff_to_complex(x))
            coords = np.array([e.a for e in x] + [e.b for e in x], dtype=float)
            rhs = embed(B).matrix @ coords
            np.testing.assert_allclose(lhs, rhs, atol=1e-9)

    @pytest.mark.parametrize("d", (1, 3))
    def test_isometry(self, d):
        ring = ring_new(d)
        rng = np.random.default_rng(d + 40)
        for _ in range(1000):
            n = int(rng.integers(1, 4))
            B = random_basis(ring, n, rng)
            x = random_elem_vector(ring, n, rng)
            v = B.matrix @ coeff_to_complex(x)
            coords = np.array([e.a for e in x] + [e.b for e in x], dtype=float)
            assert np.linalg.norm(v) == pytest.approx(
                np.linalg.norm(embed(B).matrix @ coords), rel=1e-9, abs=1e-12
            )

    def test_real_volume_identity(self):
        rng = np.random.default_rng(5)
        for d in (1, 2, 3, 7):
            ring = ring_new(d)
            for _ in range(20):
                B = random_basis(ring, int(rng.integers(1, 5)), rng)
                det_embed = abs(np.linalg.det(embed(B).matrix))
                assert det_embed == pytest.approx(volume(B), rel=1e-9)


class TestVolumeAndDefect:
    def test_volume_identity_gaussian(self):
        B = ComplexBasis(np.eye(2, dtype=complex), RING1)
        assert volume(B) == pytest.approx(1.0)

    def test_volume_identity_eisenstein(self):
        B = ComplexBasis(np.eye(2, dtype=complex), RING3)
        assert volume(B) == pytest.approx(0.75)

    def test_volume_diag(self):
        B = ComplexBasis(np.diag([2.0, 1.0]).astype(complex), RING1)
        assert volume(B) == pytest.approx(4.0)

    def test_od_identity(self):
        assert orthogonality_defect(ComplexBasis(np.eye(2, dtype=complex), RING1)) == pytest.approx(1.0)

    def test_od_identity_eisenstein(self):
        assert orthogonality_defect(ComplexBasis(np.eye(2, dtype=complex), RING3)) == pytest.approx(4.0 / 3.0)

    @pytest.mark.parametrize("d", (1, 2, 3, 7, 11))
    def test_od_lower_bound(self, d):
        ring = ring_new(d)
        rng = np.random.default_rng(d + 9)
        floor = ring.det_phi ** -2
        for _ in range(500):
            B = random_basis(ring, 2, rng)
            assert orthogonality_defect(B) >= floor * (1 - 1e-9)

    def test_od_lower_bound_scales_with_det(self):
        # the bound must survive |det B| far from 1
        B = ComplexBasis(np.diag([5.0, 4.0]).astype(complex), RING1)
        assert orthogonality_defect(B) >= 1.0 - 1e-12


class TestHermiteFactor:
    def test_identity(self):
        B = ComplexBasis(np.eye(2, dtype=complex), RING1)
        assert hermite_factor(B, 1.0) == pytest.approx(1.0)

    def test_identity_eisenstein(self):
        B = ComplexBasis(np.eye(2, dtype=complex), RING3)
        assert hermite_factor(B, 1.0) == pytest.approx(0.75 ** -0.5)

    def test_gamma4_bound_random(self):
        from alglat.svp import shortest_vector

        rng = np.random.default_rng(17)
        for d in (1, 3):
            ring = ring_new(d)
            for _ in range(40):
                B = random_basis(ring, 2, rng)
                lam1 = shortest_vector(B).norm
                assert hermite_factor(B, lam1) <= math.sqrt(2) + 1e-9


class TestUnimodular:
    def test_paper_network_matrices(self):
        A1 = RingMatrix.from_int_rows([[(2, 2), (-1, 0)], [(3, 4), (-2, 0)]], RING1)
        A2 = RingMatrix.from_int_rows([[(-1, 1), (1, 0)], [(-5, 0), (3, 3)]], RING1)
        assert A1.det() == RING1.elem(-1)
        assert A2.det() == RING1.elem(-1)
        assert is_unimodular(A1, RING1)
        assert is_unimodular(A2, RING1)

    def test_diag_2_1_not_unimodular(self):
        D = RingMatrix.from_int_rows([[(2, 0), (0, 0)], [(0, 0), (1, 0)]], RING1)
        assert not is_unimodular(D, RING1)
        assert D.det().norm() == 4

    @pytest.mark.parametrize("d", (1, 2, 3, 7, 11))
    @pytest.mark.parametrize("n", (2, 3, 4, 5))
    def test_det_multiplicative(self, d, n):
        ring = ring_new(d)
        rng = np.random.default_rng(10 * d + n)
        for _ in range(10):
            U = random_unimodular(ring, n, rng)
            V = random_unimodular(ring, n, rng)
            assert (U @ V).det() == U.det() * V.det()
            assert U.is_unimodular() and V.is_unimodular()

    def test_bareiss_matches_cofactor(self):
        # compare the elimination path (n >= 4) against expansion by minors
        ring = ring_new(3)
        rng = np.random.default_rng(77)

        def cofactor_det(M):
            if M.n == 1:
                return M[0, 0]
            acc = ring.zero
            for j in range(M.n):
                term = M[0, j] * cofactor_det(M._minor(0, j))
                acc = acc + term if j % 2 == 0 else acc - term
            return acc

        for _ in range(20):
            M = RingMatrix.from_int_rows(
                [
                    [tuple(rng.integers(-4, 5, size=2)) for _ in range(4)]
                    for _ in range(4)
                ],
                ring,
            )
            assert M.det() == cofactor_det(M)

    def test_singular_det_zero(self):
        ring = ring_new(1)
        row = [(1, 2), (3, -1), (0, 4)]
        M = RingMatrix.from_int_rows([row, row, [(1, 0), (0, 0), (0, 1)]], ring)
        assert M.det().is_zero()

    def test_inverse_unimodular(self):
        rng = np.random.default_rng(3)
        for d in (1, 3):
            ring = ring_new(d)
            U = random_unimodular(ring, 3, rng)
            I = U @ U.inverse_unimodular()
            assert I.entries == RingMatrix.identity(3, ring).entries


class TestBasisEquivalence:
    @pytest.mark.parametrize("d", (1, 3, 5))
    def test_unimodular_transform_preserves_lattice(self, d):
        ring = ring_new(d)
        rng = np.random.default_rng(d + 21)
        for _ in range(30):
            n = int(rng.integers(1, 5))
            B = random_basis(ring, n, rng)
            U = random_unimodular(ring, n, rng)
            BU = ComplexBasis(B.matrix @ U.to_complex(), ring)
            assert volume(BU) == pytest.approx(volume(B), rel=1e-7)
            # mutual membership: columns of BU are B times exact ring vectors
            Uinv = U.inverse_unimodular()
            for j in range(n):
                x = U.column(j)
                np.testing.assert_allclose(
                    B.matrix @ coeff_to_complex(x), BU.matrix[:, j], atol=1e-8
                )
                y = Uinv.column(j)
                np.testing.assert_allclose(
                    BU.matrix @ coeff_to_complex(y), B.matrix[:, j], atol=1e-8
                )


class TestMinkowski:
    def test_identity_gaussian(self):
        B = ComplexBasis(np.eye(2, dtype=complex), RING1)
        rep = minkowski_check(B, [1.0, 1.0])
        assert rep["ok"] and not rep["skipped"]
        assert rep["first_bound"] == pytest.approx(math.sqrt(2))

    def test_rank_one(self):
        B = ComplexBasis(np.array([[1.0 + 0j]]), RING1)
        rep = minkowski_check(B, [1.0])
        assert rep["ok"]
        assert rep["gamma_2n"] == pytest.approx(2 / math.sqrt(3))

    def test_eisenstein_golden_lattice(self):
        w = RING3.xi
        B = ComplexBasis(np.array([[4 + w, 1 + 4 * w], [-1 + 5 * w, 1 + 2 * w]]), RING3)
        rep = minkowski_check(B, [4.0, math.sqrt(28)])
        assert rep["ok"]

    def test_large_rank_skipped(self):
        B = ComplexBasis(np.eye(5, dtype=complex), RING1)
        with pytest.warns(UserWarning):
            rep = minkowski_check(B, [1.0] * 5)
        assert rep["skipped"]


class TestValidationAndJson:
    def test_dependent_columns_rejected(self):
        m = np.array([[1.0, 2.0], [1.0, 2.0]], dtype=complex)
        with pytest.raises(ValueError):
            ComplexBasis(m, RING1)

    def test_nonfinite_rejected(self):
        m = np.array([[1.0, 0.0], [0.0, np.inf]], dtype=complex)
        with pytest.raises(ValueError):
            ComplexBasis(m, RING1)

    def test_json_round_trip(self):
        rng = np.random.default_rng(1)
        B = random_basis(RING3, 3, rng)
        B2 = basis_from_json(basis_to_json(B))
        assert B2.ring == B.ring
        np.testing.assert_allclose(B2.matrix, B.matrix)

    def test_malformed_rejected(self):
        with pytest.raises(ValueError):
            basis_from_json('{"ring": "d=3", "n": 2, "columns": [[[1,0]]]}')
        with pytest.raises(ValueError):
            basis_from_json('{"n": 2}')

    def test_exact_entries_detection(self):
        w = RING3.xi
        B = ComplexBasis(np.array([[4 + w, 1 + 4 * w], [-1 + 5 * w, 1 + 2 * w]]), RING3)
        E = B.exact_entries()
        assert E is not None
        assert (E[0, 0].a, E[0, 0].b) == (4, 1)
        B2 = ComplexBasis(B.matrix + 0.01, RING3)
        assert B2.exact_entries() is None
