"""Dense Hermitian linear-algebra kernel shared by every other module."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, NotHermitian, NotPSD, NumericalError, RankDeficient

TOL_HERM = 1e-10
TOL_PSD = 1e-10
TOL_RANK = 1e-9
TOL_DEGEN = 1e-8


class HermitianEig(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        vecs = self.eigenvectors
        return (vecs * self.eigenvalues) @ vecs.conj().T


def as_square(a, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {arr.shape}")
    return arr


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def check_hermitian(a, tol: float = TOL_HERM) -> np.ndarray:
    """Validate Hermiticity (relative Frobenius test) and return the symmetrized matrix."""
    arr = as_square(a)
    scale = np.linalg.norm(arr)
    if np.linalg.norm(arr - arr.conj().T) > tol * max(scale, np.finfo(float).tiny):
        raise NotHermitian("matrix is not Hermitian within tolerance")
    return hermitian_part(arr)


def eig_hermitian(a) -> HermitianEig:
    """Eigendecomposition of a Hermitian matrix with ascending eigenvalues."""
    sym = check_hermitian(a)
    try:
        vals, vecs = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    return HermitianEig(vals, vecs)


def _clamped_eig(a) -> HermitianEig:
    eig = eig_hermitian(a)
    if eig.eigenvalues.size and eig.eigenvalues[0] < -TOL_PSD:
        raise NotPSD(f"minimum eigenvalue {eig.eigenvalues[0]:.3e} below -{TOL_PSD:g}")
    return HermitianEig(np.clip(eig.eigenvalues, 0.0, None), eig.eigenvectors)


def clamp_psd(a) -> np.ndarray:
    """Return ``a`` with tiny negative eigenvalues set to zero."""
    return _clamped_eig(a).reconstruct()


def psd_power(a, power: float) -> np.ndarray:
    """Matrix power of a PSD matrix; negative powers require invertibility."""
    vals, vecs = _clamped_eig(a)
    if power < 0:
        if vals[0] <= TOL_RANK:
            raise RankDeficient("negative power of a singular matrix")
    return (vecs * vals**power) @ vecs.conj().T


def sqrt_psd(a) -> np.ndarray:
    vals, vecs = _clamped_eig(a)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def polar_unitary(o) -> tuple[np.ndarray, np.ndarray]:
    """Polar decomposition ``o = U P`` with ``P = sqrt(o^dag o)``.

    Computed from the eigendecomposition of ``o^dag o``; ``o`` must be invertible.
    """
    arr = as_square(o)
    vals, vecs = _clamped_eig(arr.conj().T @ arr)
    sing = np.sqrt(vals)
    if sing[0] < TOL_RANK:
        raise RankDeficient(f"smallest singular value {sing[0]:.3e} below {TOL_RANK:g}")
    p = (vecs * sing) @ vecs.conj().T
    u = arr @ ((vecs / sing) @ vecs.conj().T)
    return u, p


def partial_trace_ancilla(w, n: int, n_a: int) -> np.ndarray:
    """Trace out the second tensor factor; composite index is ``i * n_a + a``."""
    arr = np.asarray(w, dtype=complex)
    if arr.shape != (n * n_a, n * n_a):
        raise DimensionMismatch(f"expected {(n * n_a, n * n_a)}, got {arr.shape}")
    return np.einsum("iaja->ij", arr.reshape(n, n_a, n, n_a))


def partial_trace_system(w, n: int, n_a: int) -> np.ndarray:
    arr = np.asarray(w, dtype=complex)
    if arr.shape != (n * n_a, n * n_a):
        raise DimensionMismatch(f"expected {(n * n_a, n * n_a)}, got {arr.shape}")
    return np.einsum("iaib->ab", arr.reshape(n, n_a, n, n_a))


def reduced_from_vector(psi, n: int, n_a: int) -> np.ndarray:
    """System reduced state of a pure composite vector, without forming the projector."""
    vec = np.asarray(psi, dtype=complex)
    if vec.shape != (n * n_a,):
        raise DimensionMismatch(f"expected vector of length {n * n_a}, got {vec.shape}")
    c = vec.reshape(n, n_a)
    return c @ c.conj().T


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def spectral_clusters(values: np.ndarray, tol: float = TOL_DEGEN) -> list[list[int]]:
    """Group indices of an ascending array whose consecutive gaps are below ``tol``."""
    if len(values) == 0:
        return []
    clusters = [[0]]
    for k in range(1, len(values)):
        if values[k] - values[k - 1] < tol:
            clusters[-1].append(k)
        else:
            clusters.append([k])
    return clusters


def complete_unitary(columns: np.ndarray, dim: int) -> np.ndarray:
    """Extend orthonormal columns to a full unitary by Gram-Schmidt in index order."""
    cols = [np.asarray(c, dtype=complex) for c in np.asarray(columns, dtype=complex).T]
    basis = list(cols)
    for k in range(dim):
        if len(basis) == dim:
            break
        cand = np.zeros(dim, dtype=complex)
        cand[k] = 1.0
        for _ in range(2):
            for b in basis:
                cand = cand - b * np.vdot(b, cand)
        norm = np.linalg.norm(cand)
        if norm > 1e-8:
            basis.append(cand / norm)
    return np.column_stack(basis)


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (g + g.conj().T)


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    g = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))
