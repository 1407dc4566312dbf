import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robggm.errors import DimensionMismatch, NonPositiveDiagonal, NotPositiveDefinite, NotSymmetric
from robggm.linalg import as_symmetric, cholesky, invert_pd, log_det_pd, to_correlation


def random_pd(rng, p, ridge=0.1):
    A = rng.normal(size=(p, p))
    return A @ A.T + ridge * np.eye(p)


@st.composite
def pd_matrices(draw, max_dim=6):
    p = draw(st.integers(1, max_dim))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    return random_pd(rng, p, ridge=0.5)


def test_cholesky_identity_and_diagonal():
    np.testing.assert_array_equal(cholesky(np.eye(3)), np.eye(3))
    np.testing.assert_allclose(cholesky([[4.0, 0.0], [0.0, 9.0]]), [[2.0, 0.0], [0.0, 3.0]])


def test_cholesky_reconstructs(rng):
    A = random_pd(rng, 5)
    L = cholesky(A)
    assert np.allclose(L, np.tril(L))
    assert np.all(np.diag(L) > 0)
    assert np.linalg.norm(L @ L.T - A) / np.linalg.norm(A) < 1e-12


@pytest.mark.parametrize(
    "A",
    [
        [[1.0, 2.0], [2.0, 1.0]],  # indefinite
        [[1.0, 1.0], [1.0, 1.0]],  # singular
        [[1.0, 0.0], [0.0, 1e-15]],  # pivot below the relative threshold
        [[-1.0, 0.0], [0.0, 1.0]],
    ],
)
def test_cholesky_rejects_non_pd(A):
    with pytest.raises(NotPositiveDefinite):
        cholesky(A)


def test_cholesky_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        cholesky([[2.0, 1.0], [0.0, 2.0]])


def test_as_symmetric_shapes():
    with pytest.raises(DimensionMismatch):
        as_symmetric(np.ones((2, 3)))
    S = as_symmetric([[1.0, 0.5 + 1e-14], [0.5, 1.0]])
    assert S[0, 1] == S[1, 0]


def test_log_det_examples(rng):
    assert log_det_pd(np.eye(4)) == 0.0
    assert log_det_pd(np.diag([math.e, math.e])) == pytest.approx(2.0, abs=1e-15)
    A = random_pd(rng, 4)
    # oracle: product of eigenvalues
    assert log_det_pd(A) == pytest.approx(np.sum(np.log(np.linalg.eigvalsh(A))), abs=1e-10)


def test_log_det_propagates():
    with pytest.raises(NotPositiveDefinite):
        log_det_pd([[0.0, 0.0], [0.0, 1.0]])


def test_invert_pd_examples(rng):
    np.testing.assert_array_equal(invert_pd(np.eye(3)), np.eye(3))
    np.testing.assert_allclose(invert_pd([[2.0, 0.0], [0.0, 4.0]]), [[0.5, 0.0], [0.0, 0.25]])
    A = random_pd(rng, 6)
    Ainv = invert_pd(A)
    assert np.array_equal(Ainv, Ainv.T)
    assert np.linalg.norm(A @ Ainv - np.eye(6)) < 1e-10


def test_to_correlation():
    np.testing.assert_array_equal(to_correlation(np.diag([2.0, 5.0, 7.0])), np.eye(3))
    np.testing.assert_allclose(to_correlation([[4.0, 2.0], [2.0, 4.0]]), [[1.0, 0.5], [0.5, 1.0]])
    with pytest.raises(NonPositiveDiagonal):
        to_correlation([[0.0, 0.0], [0.0, 1.0]])


@settings(max_examples=60, deadline=None)
@given(pd_matrices())
def test_inverse_log_det_relation(A):
    assert log_det_pd(invert_pd(A)) == pytest.approx(-log_det_pd(A), abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(pd_matrices())
def test_cholesky_roundtrip(A):
    L = cholesky(A)
    assert np.linalg.norm(L @ L.T - A) / np.linalg.norm(A) < 1e-12


@settings(max_examples=60, deadline=None)
@given(pd_matrices())
def test_to_correlation_idempotent_unit_diagonal(A):
    R = to_correlation(A)
    assert np.all(np.diag(R) == 1.0)
    np.testing.assert_allclose(to_correlation(R), R, atol=1e-15)
