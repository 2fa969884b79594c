import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from bures_geo import linalg
from bures_geo.errors import DimensionMismatch, NotHermitian, NotPSD, RankDeficient

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=1, max_value=5)


def random_psd(n, rng):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return g @ g.conj().T


@settings(max_examples=40, deadline=None)
@given(seeds, dims)
def test_sqrt_psd_squares_back_and_matches_scipy(seed, n):
    a = random_psd(n, np.random.default_rng(seed))
    root = linalg.sqrt_psd(a)
    assert np.allclose(root @ root, a, atol=1e-9 * np.linalg.norm(a))
    assert np.allclose(root, scipy.linalg.sqrtm(a), atol=1e-7 * np.linalg.norm(a))


@settings(max_examples=40, deadline=None)
@given(seeds, dims)
def test_polar_unitary_agrees_with_scipy(seed, n):
    rng = np.random.default_rng(seed)
    o = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    u, p = linalg.polar_unitary(o)
    u_ref, p_ref = scipy.linalg.polar(o)
    assert np.allclose(u, u_ref, atol=1e-8)
    assert np.allclose(p, p_ref, atol=1e-8)
    assert np.allclose(u.conj().T @ u, np.eye(n), atol=1e-10)


def test_polar_unitary_rejects_singular_input():
    with pytest.raises(RankDeficient):
        linalg.polar_unitary(np.diag([1.0, 0.0]))


def test_negative_power_of_singular_matrix_raises():
    with pytest.raises(RankDeficient):
        linalg.psd_power(np.diag([1.0, 0.0]), -0.5)


def test_psd_power_inverse_square_root(rng):
    a = random_psd(3, rng)
    inv_root = linalg.psd_power(a, -0.5)
    assert np.allclose(inv_root @ a @ inv_root, np.eye(3), atol=1e-9)


def test_check_hermitian_rejects_asymmetric():
    with pytest.raises(NotHermitian):
        linalg.check_hermitian(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_clamp_psd_zeros_tiny_negatives_and_rejects_large_ones():
    tiny = np.diag([1.0, -1e-13])
    assert np.linalg.eigvalsh(linalg.clamp_psd(tiny))[0] == 0.0
    with pytest.raises(NotPSD):
        linalg.clamp_psd(np.diag([1.0, -1e-6]))


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_partial_traces_match_explicit_sums(seed, n, n_a):
    rng = np.random.default_rng(seed)
    w = random_psd(n * n_a, rng)
    ref_sys = sum(
        w[np.ix_(np.arange(n) * n_a + a, np.arange(n) * n_a + a)] for a in range(n_a)
    )
    ref_anc = sum(w[i * n_a : (i + 1) * n_a, i * n_a : (i + 1) * n_a] for i in range(n))
    assert np.allclose(linalg.partial_trace_ancilla(w, n, n_a), ref_sys)
    assert np.allclose(linalg.partial_trace_system(w, n, n_a), ref_anc)


def test_product_operator_traces_to_factor(rng):
    a = random_psd(2, rng)
    b = random_psd(3, rng)
    b /= np.trace(b)
    assert np.allclose(linalg.partial_trace_ancilla(linalg.kron(a, b), 2, 3), a)


def test_reduced_from_vector_matches_partial_trace(rng):
    vec = rng.normal(size=6) + 1j * rng.normal(size=6)
    assert np.allclose(
        linalg.reduced_from_vector(vec, 2, 3),
        linalg.partial_trace_ancilla(np.outer(vec, vec.conj()), 2, 3),
    )


def test_partial_trace_shape_check():
    with pytest.raises(DimensionMismatch):
        linalg.partial_trace_ancilla(np.eye(5), 2, 3)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(2, 6), st.integers(1, 2))
def test_complete_unitary_keeps_given_columns(seed, dim, k):
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.normal(size=(dim, k)) + 1j * rng.normal(size=(dim, k)))
    u = linalg.complete_unitary(q, dim)
    assert u.shape == (dim, dim)
    assert np.allclose(u[:, :k], q)
    assert np.allclose(u.conj().T @ u, np.eye(dim), atol=1e-10)


def test_spectral_clusters_groups_close_values():
    vals = np.array([0.1, 0.1 + 1e-10, 0.5, 0.9, 0.9 + 5e-9])
    assert linalg.spectral_clusters(vals) == [[0, 1], [2], [3, 4]]


def test_random_unitary_is_unitary(rng):
    u = linalg.random_unitary(4, rng)
    assert np.allclose(u @ u.conj().T, np.eye(4), atol=1e-12)


def test_eig_hermitian_reconstructs(rng):
    h = linalg.random_hermitian(4, rng)
    eig = linalg.eig_hermitian(h)
    assert np.all(np.diff(eig.eigenvalues) >= 0)
    assert np.allclose(eig.reconstruct(), h)
