import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from betavol.betalinalg import (
    FMatrix, HermPSD, NotPSDError, RankDeficiencyError, abs_det_beta, adjoint, det_beta_psd,
    difference_matrix, gram, gram_schmidt_qr, log_abs_det_beta, matmul, polar_decompose,
    psd_sqrt, simplex_volume, singular_values_beta, symplectic_structure, trace_gram,
)
from conftest import random_fmatrix

BETAS = (1, 2, 4)


def quat(z, w=0):
    return FMatrix(4, np.array([[[z, w]]], dtype=complex))


def close(a: FMatrix, b: FMatrix, tol=1e-12):
    return np.max(np.abs(a.complexify() - b.complexify())) <= tol


# -- adjoint / gram / trace ---------------------------------------------------

def test_adjoint_examples():
    m = FMatrix(1, np.arange(6.0).reshape(2, 3))
    np.testing.assert_array_equal(adjoint(m).data, m.data.T)
    q = quat(1 + 2j, 3 - 1j)
    assert adjoint(q).data[0, 0].tolist() == [1 - 2j, -3 + 1j]


@pytest.mark.parametrize("beta", BETAS)
def test_adjoint_involution_bit_exact(nprng, beta):
    m = random_fmatrix(nprng, beta, 4, 3)
    np.testing.assert_array_equal(adjoint(adjoint(m)).data, m.data)


@pytest.mark.parametrize("beta", BETAS)
def test_gram_examples(nprng, beta):
    frame = gram_schmidt_qr(random_fmatrix(nprng, beta, 5, 3)).q_factor
    assert close(gram(frame).matrix, FMatrix.identity(beta, 3))
    v = random_fmatrix(nprng, beta, 4, 1)
    w = gram(v).matrix.complexify()
    assert w[0, 0].real == pytest.approx(trace_gram(v))


def test_gram_quaternion_pairs(nprng):
    m = random_fmatrix(nprng, 4, 3, 2)
    ev = np.sort(np.linalg.eigvalsh(gram(m).matrix.complexify()))
    assert np.allclose(ev[0::2], ev[1::2], rtol=1e-10)
    assert not np.isclose(ev[0], ev[2])


def test_trace_gram_examples():
    assert trace_gram(FMatrix(1, np.array([[0.6], [0.8]]))) == pytest.approx(1.0)
    assert trace_gram(FMatrix.identity(1, 4)) == 4
    q = quat(1, 1)
    assert trace_gram(q) == 2
    assert np.trace(gram(q).matrix.complexify()).real == pytest.approx(4.0)


# -- determinants and singular values -----------------------------------------

def test_singular_value_examples():
    np.testing.assert_allclose(singular_values_beta(FMatrix.identity(2, 3)), np.ones(3))
    np.testing.assert_allclose(singular_values_beta(FMatrix(1, np.diag([3.0, 4.0]))), [4, 3])
    s = singular_values_beta(quat(1 + 1j, 2))
    assert s.shape == (1,) and s[0] == pytest.approx(math.sqrt(6))


def test_det_examples():
    assert abs_det_beta(FMatrix(1, np.array([[1.0, 1.0], [0.0, 1.0]]))) == pytest.approx(1)
    assert abs_det_beta(FMatrix(2, np.array([[1 + 1j]]))) == pytest.approx(math.sqrt(2))
    assert abs_det_beta(quat(0.6, 0.8j)) == pytest.approx(1)


@pytest.mark.parametrize("beta", BETAS)
def test_det_consistency_and_multiplicativity(nprng, beta):
    for _ in range(50):
        N = int(nprng.integers(1, 5))
        a, b = random_fmatrix(nprng, beta, N, N), random_fmatrix(nprng, beta, N, N)
        assert abs_det_beta(a) ** 2 == pytest.approx(det_beta_psd(gram(a)), rel=1e-10)
        assert abs_det_beta(a @ b) == pytest.approx(abs_det_beta(a) * abs_det_beta(b), rel=1e-9)


@pytest.mark.parametrize("beta", BETAS)
def test_batched_det_matches_loop(nprng, beta):
    m = random_fmatrix(nprng, beta, 3, 3, size=(7,))
    batch = log_abs_det_beta(m)
    single = [log_abs_det_beta(FMatrix(beta, m.data[i])) for i in range(7)]
    np.testing.assert_allclose(batch, single, rtol=1e-13)


def test_symplectic_conjugation_of_gram(nprng):
    for N in (1, 2, 3):
        w = gram(random_fmatrix(nprng, 4, N + 2, N)).matrix.complexify()
        z = symplectic_structure(N)
        assert np.max(np.abs(w - z @ np.conj(w) @ np.linalg.inv(z))) <= 1e-10 * np.max(np.abs(w))


# -- QR and polar --------------------------------------------------------------

@pytest.mark.parametrize("beta", BETAS)
def test_qr_examples(nprng, beta):
    frame = gram_schmidt_qr(random_fmatrix(nprng, beta, 4, 2)).q_factor
    assert close(gram_schmidt_qr(frame).t_factor, FMatrix.identity(beta, 2))
    qr = gram_schmidt_qr(FMatrix(1, np.array([[2.0]])))
    assert qr.q_factor.data.tolist() == [[1.0]] and qr.t_factor.data.tolist() == [[2.0]]


@pytest.mark.parametrize("beta", BETAS)
def test_qr_rank_deficiency_names_column(nprng, beta):
    v = random_fmatrix(nprng, beta, 3, 1)
    axis = -2 if beta == 4 else -1
    twin = FMatrix(beta, np.concatenate([v.data, v.data], axis=axis))
    with pytest.raises(RankDeficiencyError) as err:
        gram_schmidt_qr(twin)
    assert err.value.column == 2


def test_polar_examples(nprng):
    frame = gram_schmidt_qr(random_fmatrix(nprng, 2, 4, 2)).q_factor
    assert close(polar_decompose(frame).psd_part.matrix, FMatrix.identity(2, 2))
    two = FMatrix(1, 2 * np.eye(3))
    p = polar_decompose(two)
    assert close(p.stiefel, FMatrix.identity(1, 3)) and close(p.psd_part.matrix, two)
    v = FMatrix(1, np.array([[3.0], [4.0]]))
    p = polar_decompose(v)
    np.testing.assert_allclose(p.stiefel.data, [[0.6], [0.8]])
    assert p.psd_part.matrix.data[0, 0] == pytest.approx(5)


@pytest.mark.parametrize("beta", BETAS)
def test_reconstruction_thousand_cases(beta):
    g = np.random.default_rng(100 + beta)
    worst_qr = worst_polar = worst_orth = 0.0
    for _ in range(1000):
        n = int(g.integers(1, 6))
        N = int(g.integers(1, n + 1))
        m = random_fmatrix(g, beta, n, N)
        norm = np.linalg.norm(m.complexify())
        qr, pol = gram_schmidt_qr(m), polar_decompose(m)
        worst_qr = max(worst_qr, np.linalg.norm((qr.q_factor @ qr.t_factor - m).complexify()) / norm)
        worst_polar = max(worst_polar, np.linalg.norm((pol.stiefel @ pol.psd_part.matrix - m).complexify()) / norm)
        eye = np.eye(N * (2 if beta == 4 else 1))
        for f in (qr.q_factor, pol.stiefel):
            worst_orth = max(worst_orth, np.max(np.abs(gram(f).matrix.complexify() - eye)))
    assert worst_qr <= 1e-10 and worst_polar <= 1e-10 and worst_orth <= 1e-12


def test_qr_keeps_quaternion_structure(nprng):
    qr = gram_schmidt_qr(random_fmatrix(nprng, 4, 4, 3))
    # the complexified factors must round-trip through the block check
    FMatrix.from_complex(4, qr.q_factor.complexify())
    diag = np.diagonal(qr.t_factor.data[..., 0])
    assert np.all(diag.real > 0) and np.all(diag.imag == 0)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(BETAS), st.integers(1, 4), st.integers(0, 3), st.integers(0, 2**32 - 1))
def test_qr_property(beta, N, extra, seed):
    m = random_fmatrix(np.random.default_rng(seed), beta, N + extra, N)
    qr = gram_schmidt_qr(m)
    assert np.linalg.norm((qr.q_factor @ qr.t_factor - m).complexify()) <= 1e-10 * np.linalg.norm(m.complexify())
    lower = np.tril(np.abs(qr.t_factor.complexify()), -2 if beta == 4 else -1)
    assert np.all(lower[::2] == 0) if beta == 4 else np.all(lower == 0)


# -- psd sqrt --------------------------------------------------------------------

def test_psd_sqrt_examples():
    eye = HermPSD(FMatrix.identity(2, 3))
    assert close(psd_sqrt(eye).matrix, eye.matrix)
    r = psd_sqrt(HermPSD(FMatrix(1, np.diag([4.0, 9.0]))))
    np.testing.assert_allclose(r.matrix.data, np.diag([2.0, 3.0]), atol=1e-14)
    v = np.array([[0.6], [0.8j]])
    proj = FMatrix(2, v @ v.conj().T)
    assert close(psd_sqrt(HermPSD(proj)).matrix, proj, 1e-12)


def test_psd_sqrt_clamps_and_rejects():
    almost = HermPSD(FMatrix(1, np.diag([1.0, -1e-13])))
    np.testing.assert_allclose(psd_sqrt(almost).matrix.data, np.diag([1.0, 0.0]))
    with pytest.raises(NotPSDError):
        psd_sqrt(HermPSD(FMatrix(1, np.diag([1.0, -0.1]))))
    with pytest.raises(NotPSDError):
        HermPSD(FMatrix(1, np.array([[1.0, 2.0], [0.0, 1.0]]))).check()


@pytest.mark.parametrize("beta", BETAS)
def test_psd_sqrt_squares_back(nprng, beta):
    w = gram(random_fmatrix(nprng, beta, 5, 3))
    r = psd_sqrt(w).matrix
    assert close(r @ r, w.matrix, 1e-10)


# -- affine helpers -----------------------------------------------------------

def test_difference_matrix_examples(nprng):
    pts = [np.array([0.0, 0.0]), np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    np.testing.assert_array_equal(difference_matrix(pts).data, np.eye(2))
    same = [np.array([1.0, 2.0])] * 3
    np.testing.assert_array_equal(difference_matrix(same).data, np.zeros((2, 2)))
    m = random_fmatrix(nprng, 2, 3, 4)
    shifted = FMatrix(2, m.data + (1 - 2j))
    np.testing.assert_allclose(difference_matrix(shifted).data, difference_matrix(m).data, atol=1e-14)
    with pytest.raises(ValueError):
        difference_matrix([np.zeros(2), np.zeros(3)])


def test_simplex_volume_examples():
    assert simplex_volume([[0, 0], [1, 0], [0, 1]]) == pytest.approx(0.5)
    assert simplex_volume([[0, 0], [1, 1], [2, 2]]) == pytest.approx(0.0, abs=1e-15)
    corner = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert simplex_volume(corner) == pytest.approx(1 / 6)
