"""Density matrices, purifications, fidelity and the Bures metric."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Union

import numpy as np

from . import linalg
from .errors import (
    AncillaTooSmall,
    ConvergenceFailure,
    DimensionMismatch,
    InputError,
    NotNormalized,
    RankDeficient,
    RankDeficientSchmidt,
    SingularState,
)
from .linalg import TOL_PSD, TOL_RANK

TRACE_TOL = 1e-10
NORM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated density matrix. The stored matrix is the symmetrized input."""

    matrix: np.ndarray
    _eig: linalg.HermitianEig = field(init=False, repr=False)

    def __post_init__(self):
        mat = linalg.check_hermitian(self.matrix)
        eig = linalg.eig_hermitian(mat)
        if eig.eigenvalues[0] < -TOL_PSD:
            raise linalg.NotPSD(f"density matrix has eigenvalue {eig.eigenvalues[0]:.3e}")
        tr = np.trace(mat).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise InputError(f"density matrix trace is {tr!r}, expected 1")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "_eig", eig)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return self._eig.eigenvalues

    @property
    def eigenvectors(self) -> np.ndarray:
        return self._eig.eigenvectors

    def rank(self) -> int:
        return int(np.sum(self.eigenvalues > TOL_RANK))

    def is_invertible(self) -> bool:
        return self.rank() == self.n

    @classmethod
    def from_pure(cls, psi) -> "DensityMatrix":
        vec = np.asarray(psi, dtype=complex)
        vec = vec / np.linalg.norm(vec)
        return cls(np.outer(vec, vec.conj()))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "re": self.matrix.real.tolist(),
            "im": self.matrix.imag.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DensityMatrix":
        try:
            n = int(data["n"])
            re = np.asarray(data["re"], dtype=float)
            im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed state object: {exc}") from exc
        if re.shape != (n, n) or im.shape != (n, n):
            raise DimensionMismatch(f"state arrays must be {n}x{n}")
        return cls(re + 1j * im)


StateLike = Union[DensityMatrix, np.ndarray, list]


def as_density(state: StateLike) -> DensityMatrix:
    return state if isinstance(state, DensityMatrix) else DensityMatrix(np.asarray(state))


@dataclass(frozen=True, eq=False)
class TangentOperator:
    """Hermitian traceless operator, a tangent vector to the state space."""

    matrix: np.ndarray
    trace_tol: float = 1e-10

    def __post_init__(self):
        mat = linalg.check_hermitian(self.matrix)
        tr = np.trace(mat)
        if abs(tr) > self.trace_tol:
            raise InputError(f"tangent operator has trace {tr!r}")
        object.__setattr__(self, "matrix", mat)


def _tangent_matrix(t) -> np.ndarray:
    if isinstance(t, TangentOperator):
        return t.matrix
    return linalg.check_hermitian(t)


def random_density_matrix(n: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Ginibre-distributed density matrix of the given rank (full rank by default)."""
    k = n if rank is None else rank
    g = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


def random_pure_state(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def _same_dims(rho: DensityMatrix, sigma: DensityMatrix) -> None:
    if rho.n != sigma.n:
        raise DimensionMismatch(f"dimensions differ: {rho.n} vs {sigma.n}")


def root_fidelity(rho: StateLike, sigma: StateLike) -> float:
    """tr sqrt(sqrt(rho) sigma sqrt(rho)), clipped into [0, 1]."""
    rho, sigma = as_density(rho), as_density(sigma)
    _same_dims(rho, sigma)
    sr = linalg.sqrt_psd(rho.matrix)
    inner = linalg.hermitian_part(sr @ sigma.matrix @ sr)
    vals = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    return float(min(1.0, np.sum(np.sqrt(vals))))


def fidelity(rho: StateLike, sigma: StateLike) -> float:
    return root_fidelity(rho, sigma) ** 2


def bures_angle(rho: StateLike, sigma: StateLike) -> float:
    return float(np.arccos(root_fidelity(rho, sigma)))


def bures_distance(rho: StateLike, sigma: StateLike) -> float:
    return float(np.sqrt(max(0.0, 2.0 - 2.0 * root_fidelity(rho, sigma))))


def bures_metric(rho: StateLike, rho_dot, sigma_dot) -> float:
    """Bures metric form evaluated in the eigenbasis of an invertible ``rho``."""
    rho = as_density(rho)
    if not rho.is_invertible():
        raise SingularState("Bures metric requires an invertible state")
    p, w = rho.eigenvalues, rho.eigenvectors
    a = w.conj().T @ _tangent_matrix(rho_dot) @ w
    b = w.conj().T @ _tangent_matrix(sigma_dot) @ w
    denom = p[:, None] + p[None, :]
    return float(0.5 * np.sum((a.conj() * b).real / denom))


def sld(rho: StateLike, rho_dot, restrict_to_support: bool = True) -> np.ndarray:
    """Symmetric logarithmic derivative, solving {L, rho}/2 = rho_dot.

    On a singular ``rho`` the solution is restricted to index pairs with
    ``p_k + p_l > TOL_RANK`` unless ``restrict_to_support`` is False, in which
    case a singular state is rejected.
    """
    rho = as_density(rho)
    if not restrict_to_support and not rho.is_invertible():
        raise SingularState("SLD of a singular state without support restriction")
    p, w = rho.eigenvalues, rho.eigenvectors
    a = w.conj().T @ _tangent_matrix(rho_dot) @ w
    denom = p[:, None] + p[None, :]
    mask = denom > TOL_RANK
    l_eig = np.zeros_like(a)
    l_eig[mask] = 2.0 * a[mask] / denom[mask]
    return linalg.hermitian_part(w @ l_eig @ w.conj().T)


# Purifications -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Purification:
    """Unit vector on system (x) ancilla, composite index ``i * n_a + a``.

    Schmidt data: ``vector = sum_k schmidt[k] * system_basis[:, k] (x) ancilla_basis[:, k]``
    with coefficients in descending order and both bases completed to unitaries.
    """

    vector: np.ndarray
    n: int
    n_a: int
    schmidt: np.ndarray = field(init=False, repr=False)
    system_basis: np.ndarray = field(init=False, repr=False)
    ancilla_basis: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        vec = np.asarray(self.vector, dtype=complex).ravel()
        if vec.shape != (self.n * self.n_a,):
            raise DimensionMismatch(f"vector length {vec.size} != {self.n}*{self.n_a}")
        norm = np.linalg.norm(vec)
        if abs(norm - 1.0) > NORM_TOL:
            raise NotNormalized(f"purification norm is {norm!r}")
        u, s, vh = np.linalg.svd(vec.reshape(self.n, self.n_a))
        object.__setattr__(self, "vector", vec)
        object.__setattr__(self, "schmidt", s)
        object.__setattr__(self, "system_basis", u)
        object.__setattr__(self, "ancilla_basis", vh.T)

    @property
    def coefficients(self) -> np.ndarray:
        return self.vector.reshape(self.n, self.n_a)

    def schmidt_rank(self) -> int:
        return int(np.sum(self.schmidt**2 > TOL_RANK))

    def reduced_state(self) -> np.ndarray:
        return linalg.reduced_from_vector(self.vector, self.n, self.n_a)

    def ancilla_state(self) -> np.ndarray:
        c = self.coefficients
        return c.T @ c.conj()


def purify(rho: StateLike, n_a: int | None = None, ancilla_basis=None) -> Purification:
    """Purification ``(sqrt(rho) (x) 1) sum_k |k>|alpha_k>``.

    When ``n_a < n`` (allowed down to ``rank(rho)``) the Schmidt form over the
    support of ``rho`` is used instead.
    """
    rho = as_density(rho)
    n = rho.n
    n_a = n if n_a is None else int(n_a)
    r = rho.rank()
    if n_a < r:
        raise AncillaTooSmall(f"ancilla dimension {n_a} < rank {r}")
    basis = np.eye(n_a, dtype=complex) if ancilla_basis is None else np.asarray(ancilla_basis, dtype=complex)
    if basis.shape != (n_a, n_a):
        raise DimensionMismatch(f"ancilla basis must be {n_a}x{n_a}")
    if n_a >= n:
        # eigenvalues below the rank tolerance count as exact zeros; their square
        # roots would otherwise leave a spurious Schmidt tail of order 1e-8
        vals = np.where(rho.eigenvalues > TOL_RANK, np.clip(rho.eigenvalues, 0.0, None), 0.0)
        root = (rho.eigenvectors * np.sqrt(vals)) @ rho.eigenvectors.conj().T
        coeffs = root @ basis[:, :n].T
    else:
        p = np.clip(rho.eigenvalues[::-1][:r], 0.0, None)
        w = rho.eigenvectors[:, ::-1][:, :r]
        coeffs = (w * np.sqrt(p)) @ basis[:, :r].T
    vec = coeffs.ravel()
    return Purification(vec / np.linalg.norm(vec), n, n_a)


def as_purification(psi, n: int | None = None, n_a: int | None = None) -> Purification:
    if isinstance(psi, Purification):
        return psi
    vec = np.asarray(psi, dtype=complex).ravel()
    if n is None or n_a is None:
        raise DimensionMismatch("raw vectors need explicit n and n_a")
    return Purification(vec, n, n_a)


@dataclass(frozen=True, eq=False)
class CompositeTangent:
    """Tangent vector at a purification: Re<Psi|Psi_dot> vanishes."""

    vector: np.ndarray
    base: Purification

    def __post_init__(self):
        vec = np.asarray(self.vector, dtype=complex).ravel()
        if vec.shape != self.base.vector.shape:
            raise DimensionMismatch("tangent and base vectors differ in length")
        radial = np.vdot(self.base.vector, vec).real
        if abs(radial) > 1e-10 * max(1.0, np.linalg.norm(vec)):
            raise InputError(f"not tangent: Re<Psi|Psi_dot> = {radial:.3e}")
        object.__setattr__(self, "vector", vec)


class TangentSplit(NamedTuple):
    horizontal: np.ndarray
    vertical: np.ndarray
    system_generator: np.ndarray
    ancilla_generator: np.ndarray
    schmidt_rank: int


def split_tangent(base: Purification, psi_dot) -> TangentSplit:
    """Orthogonal split of ``psi_dot`` into the vertical orbit direction and its complement.

    The vertical space is spanned by ``(1 (x) K)|Psi>`` with K skew-Hermitian.
    Works for any Schmidt rank; ``system_generator`` (the Hermitian H_S with
    ``horizontal = H_S (x) 1 |Psi>``) is only exact at full Schmidt rank.
    Returned ``ancilla_generator`` is the Hermitian B with
    ``vertical = -i (1 (x) B)|Psi>``.
    """
    d = np.asarray(psi_dot, dtype=complex).reshape(base.n, base.n_a)
    s = base.schmidt
    p = s**2
    r = base.schmidt_rank()
    u, alpha = base.system_basis, base.ancilla_basis
    c = u.conj().T @ d @ alpha.conj()

    h = np.zeros((base.n, base.n), dtype=complex)
    kmat = np.zeros((base.n_a, base.n_a), dtype=complex)

    # support block: 2x2 solve of c_kl = h_kl s_l + s_k K_lk together with its (l, k) partner
    sk = s[:r, None]
    sl = s[None, :r]
    cb = c[:r, :r]
    denom = p[:r, None] + p[None, :r]
    h[:r, :r] = (sl * cb + sk * cb.T.conj()) / denom
    kmat[:r, :r] = ((sk * cb - sl * cb.T.conj()) / denom).T
    # ancilla directions outside the support are purely vertical
    if base.n_a > r:
        k_out = c[:r, r:] / s[:r, None]
        kmat[r:, :r] = k_out.T
        kmat[:r, r:] = -k_out.conj()
    # system directions outside the support are purely horizontal
    if base.n > r:
        h_out = c[r:, :r] / s[None, :r]
        h[r:, :r] = h_out
        h[:r, r:] = h_out.conj().T

    h = linalg.hermitian_part(h)
    v_coeff = np.zeros_like(c)
    v_coeff[:r, :] = s[:r, None] * kmat[:, :r].T
    vertical = (u @ v_coeff @ alpha.T).ravel()
    h_system = u @ h @ u.conj().T
    b_ancilla = 1j * (alpha @ kmat @ alpha.conj().T)
    b_ancilla = linalg.hermitian_part(b_ancilla)

    if r == base.n:
        mean = np.vdot(base.vector, (h_system @ base.coefficients).ravel()).real
        h_system = h_system - mean * np.eye(base.n)
        horizontal = (h_system @ base.coefficients).ravel()
        vertical = d.ravel() - horizontal
    else:
        horizontal = d.ravel() - vertical
    return TangentSplit(horizontal, vertical, h_system, b_ancilla, r)


def decompose_tangent(base, psi_dot) -> tuple[CompositeTangent, CompositeTangent, np.ndarray]:
    """Horizontal/vertical decomposition at a full-Schmidt-rank purification.

    Returns ``(horizontal, vertical, B_h)`` where ``vertical = -i (1 (x) B_h)|Psi>``.
    """
    if isinstance(psi_dot, CompositeTangent):
        base, vec = psi_dot.base, psi_dot.vector
    else:
        vec = np.asarray(psi_dot, dtype=complex).ravel()
        CompositeTangent(vec, base)
    if base.schmidt_rank() < base.n:
        raise RankDeficientSchmidt(
            f"Schmidt rank {base.schmidt_rank()} below system dimension {base.n}"
        )
    split = split_tangent(base, vec)
    return (
        CompositeTangent(split.horizontal, base),
        CompositeTangent(split.vertical, base),
        split.ancilla_generator,
    )


def projection_differential(base: Purification, psi_dot) -> np.ndarray:
    """Differential of the partial-trace map: tr_A(|Psi><Psi_dot| + |Psi_dot><Psi|)."""
    c = base.coefficients
    d = np.asarray(psi_dot, dtype=complex).reshape(base.n, base.n_a)
    return linalg.hermitian_part(c @ d.conj().T + d @ c.conj().T)


def _best_local_unitary(overlap: np.ndarray) -> np.ndarray:
    """Unitary Q maximizing |tr(overlap @ Q)|."""
    try:
        w, _ = linalg.polar_unitary(overlap)
        return w.conj().T
    except RankDeficient:
        a, _, bh = np.linalg.svd(overlap)
        return (a @ bh).conj().T


def uhlmann_optimize(
    rho: StateLike,
    sigma: StateLike,
    restarts: int = 5,
    seed: int = 0,
    max_iter: int = 200,
    tol: float = 1e-12,
) -> tuple[Purification, float]:
    """Maximize |<Psi|(1 (x) U)Phi_0>| over ancilla unitaries by alternating polar updates.

    ``Psi`` and ``Phi_0`` are the default purifications of ``rho`` and ``sigma``.
    Restart 0 starts from ``U = 1``; the others from Haar-random unitaries.
    The returned purification has a real non-negative overlap with ``Psi``.
    """
    rho, sigma = as_density(rho), as_density(sigma)
    _same_dims(rho, sigma)
    for state in (rho, sigma):
        if not state.is_invertible():
            raise SingularState("Uhlmann optimization requires invertible states")
    psi = purify(rho)
    phi0 = purify(sigma)
    n, n_a = psi.n, psi.n_a
    rng = np.random.default_rng(seed)
    c_psi = psi.coefficients

    best_vec, best = None, -1.0
    for r in range(max(1, restarts)):
        start = np.eye(n_a) if r == 0 else linalg.random_unitary(n_a, rng)
        c_phi = phi0.coefficients @ start.T
        prev = abs(np.vdot(c_psi, c_phi))
        for _ in range(max_iter):
            q = _best_local_unitary(c_psi.conj().T @ c_phi)
            c_phi = c_phi @ q
            ov = abs(np.vdot(c_psi, c_phi))
            if abs(ov - prev) < tol:
                break
            prev = ov
        else:
            raise ConvergenceFailure(f"no convergence within {max_iter} iterations")
        if ov > best:
            best, best_vec = ov, c_phi.ravel()

    phase = np.vdot(psi.vector, best_vec)
    vec = best_vec * (np.conj(phase) / abs(phase)) if abs(phase) > 0 else best_vec
    return Purification(vec / np.linalg.norm(vec), n, n_a), float(best)
