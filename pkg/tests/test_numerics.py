"""Tests for the dense linear-algebra kernel against independent references.

The expected factorizations come from numpy's LAPACK-backed routines, which
share no code with the Jacobi kernel under test.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from macomss import frobenius_norm, invert_leading, spectral_norm, svd
from macomss.errors import DimensionMismatch, SingularSubmatrix
from macomss.numerics import _complete_orthonormal


def random_matrix(rng, max_dim=12):
    p = rng.integers(1, max_dim + 1)
    q = rng.integers(1, max_dim + 1)
    return rng.standard_normal((p, q))


class TestSvd:
    def test_reconstruction_and_factors(self):
        rng = np.random.default_rng(11)
        for _ in range(60):
            a = random_matrix(rng)
            res = svd(a)
            k = min(a.shape)
            recon = res.left_vectors @ np.diag(res.singular_values) @ res.right_vectors.T
            np.testing.assert_allclose(recon, a, atol=1e-10)
            np.testing.assert_allclose(res.left_vectors.T @ res.left_vectors,
                                       np.eye(k), atol=1e-10)
            np.testing.assert_allclose(res.right_vectors.T @ res.right_vectors,
                                       np.eye(k), atol=1e-10)

    def test_singular_values_match_reference(self):
        rng = np.random.default_rng(12)
        for _ in range(60):
            a = random_matrix(rng)
            np.testing.assert_allclose(svd(a).singular_values,
                                       np.linalg.svd(a, compute_uv=False), atol=1e-10)

    def test_singular_values_sorted_nonnegative(self):
        rng = np.random.default_rng(13)
        a = rng.standard_normal((8, 5))
        s = svd(a).singular_values
        assert (s >= 0).all()
        assert (np.diff(s) <= 1e-15).all()

    def test_input_not_mutated(self):
        rng = np.random.default_rng(14)
        a = rng.standard_normal((6, 4))
        before = a.copy()
        svd(a)
        np.testing.assert_array_equal(a, before)
        # views into a larger array must also survive
        big = rng.standard_normal((8, 8))
        before = big.copy()
        svd(big[:4, :3])
        np.testing.assert_array_equal(big, before)

    def test_rank_deficient(self):
        rng = np.random.default_rng(15)
        u = rng.standard_normal((7, 2))
        v = rng.standard_normal((5, 2))
        a = u @ v.T
        res = svd(a)
        assert (np.abs(res.singular_values[2:]) < 1e-10).all()
        recon = res.left_vectors @ np.diag(res.singular_values) @ res.right_vectors.T
        np.testing.assert_allclose(recon, a, atol=1e-10)
        # the factors stay orthonormal even past the rank
        np.testing.assert_allclose(res.left_vectors.T @ res.left_vectors,
                                   np.eye(5), atol=1e-10)

    def test_zero_matrix(self):
        res = svd(np.zeros((4, 3)))
        np.testing.assert_array_equal(res.singular_values, np.zeros(3))
        np.testing.assert_allclose(res.left_vectors.T @ res.left_vectors,
                                   np.eye(3), atol=1e-12)

    def test_sign_convention(self):
        rng = np.random.default_rng(16)
        a = rng.standard_normal((6, 6))
        res = svd(a)
        for j in range(6):
            col = res.left_vectors[:, j]
            nz = np.flatnonzero(np.abs(col) > 1e-12)
            assert col[nz[0]] >= 0

    def test_deterministic(self):
        rng = np.random.default_rng(17)
        a = rng.standard_normal((10, 7))
        r1, r2 = svd(a), svd(a.copy())
        np.testing.assert_array_equal(r1.left_vectors, r2.left_vectors)
        np.testing.assert_array_equal(r1.singular_values, r2.singular_values)
        np.testing.assert_array_equal(r1.right_vectors, r2.right_vectors)

    def test_wide_matches_tall_transpose(self):
        rng = np.random.default_rng(18)
        a = rng.standard_normal((4, 9))
        res = svd(a)
        np.testing.assert_allclose(res.singular_values,
                                   np.linalg.svd(a, compute_uv=False), atol=1e-10)
        recon = res.left_vectors @ np.diag(res.singular_values) @ res.right_vectors.T
        np.testing.assert_allclose(recon, a, atol=1e-10)

    def test_empty_and_bad_inputs(self):
        res = svd(np.zeros((0, 3)))
        assert res.singular_values.size == 0
        with pytest.raises(DimensionMismatch):
            svd(np.zeros(3))
        with pytest.raises(DimensionMismatch):
            svd(np.array([[1.0, np.nan]]))

    @settings(max_examples=60, deadline=None)
    @given(a=hnp.arrays(np.float64, hnp.array_shapes(min_dims=2, max_dims=2,
                                                     min_side=1, max_side=8),
                        elements=st.floats(-1e3, 1e3, allow_nan=False)))
    def test_property_reconstruction(self, a):
        res = svd(a)
        recon = res.left_vectors @ np.diag(res.singular_values) @ res.right_vectors.T
        scale = max(1.0, np.abs(a).max())
        np.testing.assert_allclose(recon, a, atol=1e-8 * scale)


class TestNorms:
    def test_frobenius(self):
        a = np.array([[3.0, 0.0], [0.0, 4.0]])
        assert frobenius_norm(a) == 5.0

    def test_spectral_small_matches_reference(self):
        rng = np.random.default_rng(21)
        for _ in range(30):
            a = random_matrix(rng)
            np.testing.assert_allclose(spectral_norm(a), np.linalg.norm(a, 2),
                                       rtol=1e-9, atol=1e-12)

    def test_spectral_large_matches_reference(self):
        rng = np.random.default_rng(22)
        for _ in range(10):
            a = rng.standard_normal((60, 40))
            np.testing.assert_allclose(spectral_norm(a), np.linalg.norm(a, 2), rtol=1e-8)

    def test_spectral_degenerate(self):
        assert spectral_norm(np.zeros((30, 30))) == 0.0
        assert spectral_norm(np.zeros((0, 5))) == 0.0

    def test_spectral_repeated_top_value(self):
        # power iteration must not stall when the top singular value is repeated
        a = np.diag(np.concatenate([np.full(5, 2.0), np.full(25, 1.0)]))
        np.testing.assert_allclose(spectral_norm(a), 2.0, rtol=1e-9)


class TestInvertLeading:
    def test_matches_reference_inverse(self):
        rng = np.random.default_rng(31)
        for _ in range(40):
            s = rng.integers(1, 9)
            b = rng.standard_normal((s + 2, s + 2))
            inv = invert_leading(b, s)
            np.testing.assert_allclose(inv, np.linalg.inv(b[:s, :s]), atol=1e-8)

    def test_singular_block(self):
        b = np.ones((3, 3))
        with pytest.raises(SingularSubmatrix):
            invert_leading(b, 2)

    def test_s_zero_and_oversized(self):
        assert invert_leading(np.eye(3), 0).shape == (0, 0)
        with pytest.raises(DimensionMismatch):
            invert_leading(np.eye(3), 4)

    def test_pivoting_handles_zero_leading_entry(self):
        b = np.array([[0.0, 1.0], [1.0, 0.0]])
        np.testing.assert_allclose(invert_leading(b, 2), b, atol=1e-14)


class TestCompleteOrthonormal:
    def test_completion_is_orthonormal(self):
        rng = np.random.default_rng(41)
        q, _ = np.linalg.qr(rng.standard_normal((9, 4)))
        u = np.zeros((9, 9))
        u[:, :4] = q
        _complete_orthonormal(u, np.arange(9) >= 4)
        np.testing.assert_allclose(u.T @ u, np.eye(9), atol=1e-10)

    def test_completion_many_columns(self):
        # wide gap between given and requested dimensions (regression case)
        rng = np.random.default_rng(42)
        q, _ = np.linalg.qr(rng.standard_normal((150, 70)))
        u = np.zeros((150, 150))
        u[:, :70] = q
        _complete_orthonormal(u, np.arange(150) >= 70)
        np.testing.assert_allclose(u.T @ u, np.eye(150), atol=1e-9)

    def test_completion_from_empty(self):
        u = np.zeros((5, 5))
        _complete_orthonormal(u, np.ones(5, dtype=bool))
        np.testing.assert_allclose(u.T @ u, np.eye(5), atol=1e-12)
