import numpy as np
import pytest

from hbrclust.errors import StructuralError
from hbrclust.linalg import (operator_norm, procrustes_rotation,
                             project_orthogonal, sym_eig)

from conftest import block_graph


class TestSymEig:
    def test_identity_spectrum(self):
        res = sym_eig(np.eye(3))
        np.testing.assert_allclose(res.eigenvalues, [1.0, 1.0, 1.0])

    def test_two_by_two_hand_solved(self):
        # characteristic polynomial of [[2,1],[1,2]]: (2-l)^2 - 1 = 0
        res = sym_eig(np.array([[2.0, 1.0], [1.0, 2.0]]))
        np.testing.assert_allclose(res.eigenvalues, [1.0, 3.0], atol=1e-12)
        s = 1.0 / np.sqrt(2.0)
        np.testing.assert_allclose(res.eigenvectors[:, 0], [s, -s], atol=1e-12)
        np.testing.assert_allclose(res.eigenvectors[:, 1], [s, s], atol=1e-12)

    def test_three_component_laplacian_null_space(self):
        g, _ = block_graph((4, 5, 6), seed=1)
        lap = np.diag(g.degrees) - g.adjacency
        res = sym_eig(lap)
        assert np.all(np.abs(res.eigenvalues[:3]) <= 1e-10)
        assert res.eigenvalues[3] > 1e-6

    def test_orthonormality_and_residual(self):
        rng = np.random.default_rng(7)
        m = rng.standard_normal((40, 40))
        m = m + m.T
        res = sym_eig(m)
        q = res.eigenvectors
        assert np.abs(q.T @ q - np.eye(40)).max() <= 1e-10
        for i in range(40):
            resid = np.linalg.norm(m @ q[:, i] - res.eigenvalues[i] * q[:, i])
            assert resid <= 1e-8 * np.linalg.norm(m, 2)

    @pytest.mark.parametrize("n", [5, 50, 200])
    def test_reconstruction_and_trace(self, n):
        rng = np.random.default_rng(n)
        m = rng.standard_normal((n, n))
        m = m + m.T
        res = sym_eig(m)
        recon = res.eigenvectors @ np.diag(res.eigenvalues) @ res.eigenvectors.T
        scale = 1.0 + np.abs(m).max()
        assert np.abs(recon - m).max() <= 1e-8 * scale
        assert abs(res.eigenvalues.sum() - np.trace(m)) <= 1e-8 * (1 + abs(np.trace(m)))

    def test_sign_convention_deterministic(self):
        rng = np.random.default_rng(2)
        m = rng.standard_normal((12, 12))
        m = m + m.T
        res = sym_eig(m)
        for i in range(12):
            col = res.eigenvectors[:, i]
            assert col[np.argmax(np.abs(col))] >= 0
        res2 = sym_eig(m.copy())
        np.testing.assert_array_equal(res.eigenvectors, res2.eigenvectors)

    def test_rejects_non_square(self):
        with pytest.raises(StructuralError):
            sym_eig(np.ones((2, 3)))

    def test_rejects_asymmetric(self):
        with pytest.raises(StructuralError):
            sym_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))


class TestProcrustes:
    def test_identity_alignment(self):
        a = np.random.default_rng(0).standard_normal((10, 3))
        r = procrustes_rotation(a, a)
        np.testing.assert_allclose(r, np.eye(3), atol=1e-10)

    def test_recovers_known_rotation(self):
        rng = np.random.default_rng(5)
        angle = rng.uniform(0, 2 * np.pi)
        r0 = np.array([[np.cos(angle), -np.sin(angle)],
                       [np.sin(angle), np.cos(angle)]])
        a = rng.standard_normal((30, 2))
        r = procrustes_rotation(a, a @ r0)
        np.testing.assert_allclose(r, r0, atol=1e-8)

    def test_orthogonality_of_result(self):
        rng = np.random.default_rng(6)
        a = rng.standard_normal((20, 4))
        b = rng.standard_normal((20, 4))
        r = procrustes_rotation(a, b)
        assert np.abs(r.T @ r - np.eye(4)).max() <= 1e-10

    def test_aligns_rotated_null_space_bases(self):
        rng = np.random.default_rng(8)
        q, _ = np.linalg.qr(rng.standard_normal((12, 3)))
        rot, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        a = q
        b = q @ rot
        r = procrustes_rotation(a, b)
        assert np.linalg.norm(a @ r - b) <= 1e-8

    def test_shape_mismatch(self):
        with pytest.raises(StructuralError):
            procrustes_rotation(np.ones((3, 2)), np.ones((2, 3)))


class TestProjectOrthogonal:
    def test_empty_basis_returns_input(self):
        u = np.array([1.0, 2.0, 3.0])
        np.testing.assert_array_equal(project_orthogonal(u, []), u)

    def test_vector_in_span_maps_to_zero(self):
        b = np.array([1.0, 0.0, 0.0])
        out = project_orthogonal(3.0 * b, [b])
        np.testing.assert_allclose(out, 0.0, atol=1e-12)

    def test_coordinate_projection(self):
        u = np.array([0.3, -1.2, 2.5])
        out = project_orthogonal(u, [np.array([1.0, 0.0, 0.0])])
        np.testing.assert_allclose(out, [0.0, -1.2, 2.5], atol=1e-15)

    def test_orthogonality_after_projection(self):
        rng = np.random.default_rng(9)
        q, _ = np.linalg.qr(rng.standard_normal((8, 3)))
        basis = [q[:, i] for i in range(3)]
        u = rng.standard_normal(8)
        out = project_orthogonal(u, basis)
        for b in basis:
            assert abs(out @ b) <= 1e-10


class TestOperatorNorm:
    def test_matches_svd(self):
        rng = np.random.default_rng(11)
        h = rng.standard_normal((25, 25))
        h = h + h.T
        assert abs(operator_norm(h) - np.linalg.norm(h, 2)) <= 1e-8 * np.linalg.norm(h, 2)

    def test_zero_matrix(self):
        assert operator_norm(np.zeros((4, 4))) == 0.0
