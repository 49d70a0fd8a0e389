import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import crandn, rel_err
from tmnn.sampling import fft2_per_frame
from tmnn.tensor import (TSvdFactors, bcirc, bdiag_spectral, casorati_nn, dft3, frontal_slice,
                         idft3, identity_tensor, mode3_fold, mode3_unfold, t_product, t_svd,
                         t_transpose, tnn)


def dense_tnn(x):
    """Oracle: (1/n3) * nuclear norm of the explicit block circulant matrix."""
    return np.linalg.svd(bcirc(x), compute_uv=False).sum() / x.shape[2]


def gram_nn(m):
    """Oracle: nuclear norm from eigenvalues of the Gram matrix."""
    m = np.asarray(m)
    g = m.conj().T @ m if m.shape[0] >= m.shape[1] else m @ m.conj().T
    return np.sqrt(np.clip(np.linalg.eigvalsh(g), 0, None)).sum()


def mode1_stack(b):
    return np.concatenate([b[:, :, i] for i in range(b.shape[2])], axis=0)


def unstack(m, n1, n3):
    return np.stack([m[i * n1:(i + 1) * n1] for i in range(n3)], axis=2)


shapes = st.tuples(st.integers(1, 6), st.integers(1, 6), st.integers(1, 6))


class TestFrontalSlices:
    def test_reassembly_bit_exact(self, rng):
        x = crandn(rng, 3, 4, 5)
        again = np.stack([frontal_slice(x, i) for i in range(5)], axis=2)
        assert np.array_equal(again, x)

    def test_out_of_range(self, rng):
        with pytest.raises(IndexError):
            frontal_slice(crandn(rng, 2, 2, 2), 2)


class TestDft3:
    def test_constant_tube(self):
        x = np.full((1, 1, 4), 2.0 + 1j)
        expected = np.zeros(4, complex)
        expected[0] = (2 + 1j) * 2.0
        np.testing.assert_allclose(dft3(x)[0, 0], expected, atol=1e-14)

    def test_inverse(self, rng):
        x = crandn(rng, 4, 3, 5)
        assert rel_err(idft3(dft3(x)), x) < 1e-12

    def test_parseval(self, rng):
        x = crandn(rng, 8, 8, 7)
        assert abs(np.linalg.norm(dft3(x)) - np.linalg.norm(x)) / np.linalg.norm(x) < 1e-12

    def test_rejects_non_3way(self):
        with pytest.raises(ValueError):
            dft3(np.zeros((2, 2)))


class TestUnfold:
    def test_small_example(self):
        x = np.stack([[[1, 2], [3, 4]], [[5, 6], [7, 8]]], axis=2).astype(complex)
        # column-major vectorization of each frame
        np.testing.assert_array_equal(mode3_unfold(x), [[1, 5], [3, 7], [2, 6], [4, 8]])

    def test_fold_inverse(self, rng):
        x = crandn(rng, 3, 4, 5)
        assert np.array_equal(mode3_fold(mode3_unfold(x), x.shape), x)

    def test_identical_frames_rank_one(self, rng):
        frame = crandn(rng, 4, 3)
        x = np.repeat(frame[:, :, None], 6, axis=2)
        assert np.linalg.matrix_rank(mode3_unfold(x)) == 1

    def test_fold_shape_mismatch(self, rng):
        with pytest.raises(ValueError):
            mode3_fold(crandn(rng, 12, 5), (3, 5, 5))

    def test_fold_is_adjoint(self, rng):
        x = crandn(rng, 3, 4, 5)
        m = crandn(rng, 12, 5)
        lhs = np.vdot(mode3_unfold(x), m)
        rhs = np.vdot(x, mode3_fold(m, x.shape))
        assert abs(lhs - rhs) < 1e-12 * abs(lhs)


class TestBcirc:
    def test_single_slice(self, rng):
        x = crandn(rng, 3, 2, 1)
        np.testing.assert_array_equal(bcirc(x), x[:, :, 0])

    def test_scalar_pattern(self):
        a, b, c = 1.0, 2.0, 3.0
        x = np.array([a, b, c], dtype=complex).reshape(1, 1, 3)
        np.testing.assert_array_equal(bcirc(x), [[a, c, b], [b, a, c], [c, b, a]])

    def test_frobenius(self, rng):
        x = crandn(rng, 2, 3, 4)
        assert np.isclose(np.linalg.norm(bcirc(x)) ** 2, 4 * np.linalg.norm(x) ** 2)


class TestBdiag:
    def test_constant_frames(self, rng):
        m = crandn(rng, 3, 2)
        x = np.repeat(m[:, :, None], 5, axis=2)
        blocks = bdiag_spectral(x)
        np.testing.assert_allclose(blocks[0], np.sqrt(5) * m, atol=1e-12)
        for blk in blocks[1:]:
            np.testing.assert_allclose(blk, 0, atol=1e-12)

    def test_parseval(self, rng):
        x = crandn(rng, 3, 4, 6)
        total = sum(np.linalg.norm(b) ** 2 for b in bdiag_spectral(x))
        assert np.isclose(total, np.linalg.norm(x) ** 2)

    def test_single_slice(self, rng):
        x = crandn(rng, 3, 4, 1)
        np.testing.assert_allclose(bdiag_spectral(x)[0], x[:, :, 0])

    def test_block_diagonalizes_bcirc(self, rng):
        # unitary temporal DFT blocks carry bcirc's singular values / sqrt(n3)
        x = crandn(rng, 3, 2, 4)
        sv_blocks = np.sort(np.concatenate(
            [np.linalg.svd(b, compute_uv=False) for b in bdiag_spectral(x)]))
        sv_bcirc = np.sort(np.linalg.svd(bcirc(x), compute_uv=False))
        np.testing.assert_allclose(sv_blocks * 2.0, sv_bcirc, rtol=1e-10)


class TestTProduct:
    def test_identity(self, rng):
        a = crandn(rng, 3, 4, 5)
        assert rel_err(t_product(a, identity_tensor(4, 5)), a) < 1e-12
        assert rel_err(t_product(identity_tensor(3, 5), a), a) < 1e-12

    def test_n3_one_is_matrix_product(self, rng):
        a, b = crandn(rng, 3, 4, 1), crandn(rng, 4, 2, 1)
        np.testing.assert_allclose(t_product(a, b)[:, :, 0], a[:, :, 0] @ b[:, :, 0], atol=1e-12)

    @pytest.mark.parametrize("shape", [(2, 2, 3), (3, 2, 4), (2, 5, 1)])
    def test_against_bcirc(self, rng, shape):
        n1, k, n3 = shape
        a, b = crandn(rng, n1, k, n3), crandn(rng, k, 3, n3)
        expected = unstack(bcirc(a) @ mode1_stack(b), n1, n3)
        assert rel_err(t_product(a, b), expected) < 1e-10

    def test_dimension_errors(self, rng):
        with pytest.raises(ValueError, match="inner"):
            t_product(crandn(rng, 2, 3, 4), crandn(rng, 2, 3, 4))
        with pytest.raises(ValueError, match="n3"):
            t_product(crandn(rng, 2, 3, 4), crandn(rng, 3, 3, 5))

    def test_transpose_is_adjoint_under_bcirc(self, rng):
        x = crandn(rng, 3, 2, 4)
        np.testing.assert_allclose(bcirc(t_transpose(x)), bcirc(x).conj().T)


class TestTSvd:
    def _check(self, x):
        f = t_svd(x)
        assert isinstance(f, TSvdFactors)
        recon = t_product(f.u, t_product(f.s, t_transpose(f.v)))
        return f, recon

    def test_reconstruction(self, rng):
        x = crandn(rng, 5, 4, 6)
        f, recon = self._check(x)
        assert rel_err(recon, x) < 1e-10
        assert f.u.shape == (5, 4, 6) and f.s.shape == (4, 4, 6) and f.v.shape == (4, 4, 6)

    def test_f_diagonal_and_ordered(self, rng):
        x = crandn(rng, 4, 6, 5)
        f = t_svd(x)
        off = f.s.copy()
        k = f.s.shape[0]
        off[np.arange(k), np.arange(k), :] = 0
        assert np.abs(off).max() < 1e-14
        spectral = dft3(f.s)
        diag = np.stack([np.diag(spectral[:, :, i]) for i in range(5)])
        np.testing.assert_allclose(diag.imag, 0, atol=1e-12)
        np.testing.assert_allclose(diag.real, f.sigma, atol=1e-12)
        assert np.all(f.sigma >= 0)
        assert np.all(np.diff(f.sigma, axis=1) <= 0)

    def test_orthogonal_factors(self, rng):
        f = t_svd(crandn(rng, 5, 3, 4))
        eye = identity_tensor(3, 4)
        assert rel_err(t_product(t_transpose(f.u), f.u), eye) < 1e-10
        assert rel_err(t_product(t_transpose(f.v), f.v), eye) < 1e-10

    def test_zero_tensor(self):
        f = t_svd(np.zeros((3, 3, 4)))
        assert np.all(f.s == 0) and np.all(f.sigma == 0)

    def test_n3_one_is_matrix_svd(self, rng):
        x = crandn(rng, 4, 3, 1)
        f, recon = self._check(x)
        np.testing.assert_allclose(f.sigma[0], np.linalg.svd(x[:, :, 0], compute_uv=False))
        assert rel_err(recon, x) < 1e-12


class TestNorms:
    def test_tnn_zero(self):
        assert tnn(np.zeros((3, 4, 5))) == 0

    def test_tnn_n3_one(self, rng):
        x = crandn(rng, 4, 3, 1)
        assert np.isclose(tnn(x), gram_nn(x[:, :, 0]), rtol=1e-12)

    def test_tnn_vs_bcirc_oracle(self, rng):
        x = crandn(rng, 4, 3, 5)
        assert abs(tnn(x) - dense_tnn(x)) / dense_tnn(x) < 1e-8

    def test_casorati_rank_one(self, rng):
        frame = crandn(rng, 5, 4)
        frame /= np.linalg.norm(frame)
        x = np.repeat(frame[:, :, None], 7, axis=2)
        assert np.isclose(casorati_nn(x), np.sqrt(7), rtol=1e-12)

    def test_casorati_zero(self):
        assert casorati_nn(np.zeros((2, 3, 4))) == 0

    def test_casorati_vs_gram_oracle(self, rng):
        x = crandn(rng, 6, 5, 4)
        oracle = gram_nn(mode3_unfold(x))
        assert abs(casorati_nn(x) - oracle) / oracle < 1e-10


@settings(max_examples=40, deadline=None)
@given(shape=shapes, seed=st.integers(0, 2**32 - 1))
def test_property_tnn_bcirc_equivalence(shape, seed):
    x = crandn(np.random.default_rng(seed), *shape)
    oracle = dense_tnn(x)
    assert abs(tnn(x) - oracle) <= 1e-8 * oracle


@settings(max_examples=40, deadline=None)
@given(shape=shapes, seed=st.integers(0, 2**32 - 1))
def test_property_fourier_invariance(shape, seed):
    x = crandn(np.random.default_rng(seed), *shape)
    k = fft2_per_frame(x)
    assert abs(tnn(k) - tnn(x)) <= 1e-8 * tnn(x)
    assert abs(casorati_nn(k) - casorati_nn(x)) <= 1e-8 * casorati_nn(x)
    assert abs(np.linalg.norm(dft3(x)) - np.linalg.norm(x)) <= 1e-12 * np.linalg.norm(x)


@settings(max_examples=30, deadline=None)
@given(shape=shapes, seed=st.integers(0, 2**32 - 1))
def test_property_tsvd(shape, seed):
    x = crandn(np.random.default_rng(seed), *shape)
    f = t_svd(x)
    recon = t_product(f.u, t_product(f.s, t_transpose(f.v)))
    assert rel_err(recon, x) < 1e-10
    assert np.all(np.diff(f.sigma, axis=1) <= 1e-12)
