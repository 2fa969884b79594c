"""Closed-form Bures geodesics between invertible density matrices.

Every geodesic from ``rho`` to ``sigma`` is ``gamma(tau) = X(tau) rho X(tau)`` with

    X(tau) = (sin(tau) M + sin(theta - tau) 1) / sin(theta),
    M = rho^(-1/2) Lambda V rho^(-1/2),  Lambda = |sqrt(sigma) sqrt(rho)|,

where ``V`` is a Hermitian unitary commuting with ``Lambda`` and
``cos(theta) = tr(Lambda V)``. Sign vectors index ``V`` in the ascending
eigenbasis of ``Lambda``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .errors import (
    AtBoundary,
    DegenerateLambda,
    DimensionMismatch,
    InputError,
    NonCommuting,
    NumericalError,
    OrthogonalTarget,
    SingularState,
    StatesEqual,
)
from .linalg import TOL_DEGEN, TOL_RANK
from .states import DensityMatrix, StateLike, as_density, purify

EQUAL_TOL = 1e-10


def parse_signs(signs, n: int) -> tuple[int, ...]:
    """Accept ``"+-+"``, ``[1, -1, 1]`` or similar; return a tuple of +-1."""
    if isinstance(signs, str):
        mapping = {"+": 1, "-": -1}
        try:
            values = [mapping[ch] for ch in signs.strip()]
        except KeyError as exc:
            raise InputError(f"sign string may only contain '+' and '-': {signs!r}") from exc
    else:
        values = [int(v) for v in signs]
    if len(values) != n:
        raise DimensionMismatch(f"expected {n} signs, got {len(values)}")
    if any(v not in (1, -1) for v in values):
        raise InputError(f"signs must be +1 or -1: {values}")
    return tuple(values)


def format_signs(signs: Sequence[int]) -> str:
    return "".join("+" if s > 0 else "-" for s in signs)


@dataclass(frozen=True)
class _LambdaData:
    sqrt_rho: np.ndarray
    inv_sqrt_rho: np.ndarray
    values: np.ndarray
    vectors: np.ndarray
    clusters: list


def _lambda_data(rho: DensityMatrix, sigma: DensityMatrix) -> _LambdaData:
    if rho.n != sigma.n:
        raise DimensionMismatch(f"dimensions differ: {rho.n} vs {sigma.n}")
    for name, state in (("rho", rho), ("sigma", sigma)):
        if not state.is_invertible():
            raise SingularState(f"{name} is not invertible")
    p, w = rho.eigenvalues, rho.eigenvectors
    sqrt_rho = (w * np.sqrt(p)) @ w.conj().T
    inv_sqrt_rho = (w / np.sqrt(p)) @ w.conj().T
    inner = linalg.hermitian_part(sqrt_rho @ sigma.matrix @ sqrt_rho)
    mu, phi = linalg.eig_hermitian(inner)
    lam = np.sqrt(np.clip(mu, 0.0, None))
    return _LambdaData(sqrt_rho, inv_sqrt_rho, lam, phi, linalg.spectral_clusters(lam, TOL_DEGEN))


@dataclass(frozen=True, eq=False)
class GeodesicSpec:
    rho: DensityMatrix
    sigma: DensityMatrix
    lam: np.ndarray
    lam_values: np.ndarray
    lam_vectors: np.ndarray
    u_polar: np.ndarray
    signs: tuple
    v: np.ndarray
    m: np.ndarray
    theta: float

    @property
    def n(self) -> int:
        return self.rho.n

    def x_operator(self, tau: float) -> np.ndarray:
        s = np.sin(self.theta)
        return (np.sin(tau) * self.m + np.sin(self.theta - tau) * np.eye(self.n)) / s

    def x_derivative(self, tau: float) -> np.ndarray:
        s = np.sin(self.theta)
        return (np.cos(tau) * self.m - np.cos(self.theta - tau) * np.eye(self.n)) / s

    def evaluate(self, tau: float) -> DensityMatrix:
        return evaluate(self, tau)

    def derivative(self, tau: float) -> np.ndarray:
        """Exact velocity of the curve at ``tau``."""
        x = self.x_operator(tau)
        xd = self.x_derivative(tau)
        r = self.rho.matrix
        return linalg.hermitian_part(xd @ r @ x + x @ r @ xd)

    def invariant_residuals(self) -> dict:
        n = self.n
        r = self.rho.matrix
        return {
            "v_squared": float(np.linalg.norm(self.v @ self.v - np.eye(n))),
            "v_hermitian": float(np.linalg.norm(self.v - self.v.conj().T)),
            "v_commutes_lambda": float(np.linalg.norm(self.v @ self.lam - self.lam @ self.v)),
            "m_rho_m": float(np.linalg.norm(self.m @ r @ self.m - self.sigma.matrix)),
            "trace_rho_m": float(abs(np.trace(r @ self.m) - np.cos(self.theta))),
            "trace_rho_m2": float(abs(np.trace(r @ self.m @ self.m) - 1.0)),
        }

    def horizontal_lift(self, n_a: int | None = None) -> tuple:
        """Purification of ``rho`` and the unit horizontal velocity pointing along this geodesic."""
        psi = purify(self.rho, n_a)
        phi = (self.m @ psi.coefficients).ravel()
        psi_dot = (phi - np.cos(self.theta) * psi.vector) / np.sin(self.theta)
        return psi, psi_dot

    def to_dict(self) -> dict:
        return {
            "rho": self.rho.to_dict(),
            "sigma": self.sigma.to_dict(),
            "signs": format_signs(self.signs),
            "theta_V": float(self.theta),
        }


def _assemble(rho, sigma, data: _LambdaData, signs: tuple) -> GeodesicSpec:
    phi = data.vectors
    lam = data.values
    v = np.asarray(signs, dtype=float)
    for cluster in data.clusters:
        if len({signs[k] for k in cluster}) > 1:
            raise DegenerateLambda(
                f"signs {format_signs(signs)} split a degenerate eigenvalue cluster of Lambda",
                [c for c in data.clusters if len(c) > 1],
            )
    cos_theta = float(np.clip(np.sum(lam * v), -1.0, 1.0))
    theta = float(np.arccos(cos_theta))
    if np.sin(theta) < 1e-12:
        raise StatesEqual("geodesic has zero length: rho and sigma coincide")
    lam_mat = (phi * lam) @ phi.conj().T
    v_mat = (phi * v) @ phi.conj().T
    m = linalg.hermitian_part(data.inv_sqrt_rho @ ((phi * (lam * v)) @ phi.conj().T) @ data.inv_sqrt_rho)
    sqrt_sigma = linalg.sqrt_psd(sigma.matrix)
    u_polar = sqrt_sigma @ data.sqrt_rho @ ((phi / lam) @ phi.conj().T)
    return GeodesicSpec(rho, sigma, lam_mat, lam, phi, u_polar, tuple(signs), v_mat, m, theta)


def _check_distinct(rho: DensityMatrix, sigma: DensityMatrix) -> None:
    if np.linalg.norm(rho.matrix - sigma.matrix) <= EQUAL_TOL:
        raise StatesEqual("rho and sigma are equal")


def build_geodesic(rho: StateLike, sigma: StateLike, signs) -> GeodesicSpec:
    rho, sigma = as_density(rho), as_density(sigma)
    data = _lambda_data(rho, sigma)
    _check_distinct(rho, sigma)
    return _assemble(rho, sigma, data, parse_signs(signs, rho.n))


def enumerate_geodesics(rho: StateLike, sigma: StateLike) -> list[GeodesicSpec]:
    """All 2^n geodesics, shortest first. Requires a non-degenerate Lambda."""
    rho, sigma = as_density(rho), as_density(sigma)
    data = _lambda_data(rho, sigma)
    _check_distinct(rho, sigma)
    degenerate = [c for c in data.clusters if len(c) > 1]
    if degenerate:
        raise DegenerateLambda(
            "Lambda has degenerate eigenvalues; the geodesic family is infinite", degenerate
        )
    specs = [_assemble(rho, sigma, data, s) for s in itertools.product((1, -1), repeat=rho.n)]
    return sorted(specs, key=lambda sp: sp.theta)


def evaluate(spec: GeodesicSpec, tau: float) -> DensityMatrix:
    x = spec.x_operator(tau)
    gamma = linalg.hermitian_part(x @ spec.rho.matrix @ x)
    return DensityMatrix(linalg.clamp_psd(gamma))


def _common_eigenbasis(rho: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    # a generic real combination separates the joint eigenspaces of commuting matrices
    _, vecs = np.linalg.eigh(rho + np.sqrt(2.0) * np.pi * sigma)
    return vecs


def evaluate_commuting(rho: StateLike, sigma: StateLike, signs, tau: float) -> DensityMatrix:
    """Geodesic between commuting states via scalar population curves."""
    rho, sigma = as_density(rho), as_density(sigma)
    if rho.n != sigma.n:
        raise DimensionMismatch(f"dimensions differ: {rho.n} vs {sigma.n}")
    if np.linalg.norm(rho.matrix @ sigma.matrix - sigma.matrix @ rho.matrix) > 1e-10:
        raise NonCommuting("rho and sigma do not commute")
    basis = _common_eigenbasis(rho.matrix, sigma.matrix)
    p = np.einsum("ik,ij,jk->k", basis.conj(), rho.matrix, basis).real
    q = np.einsum("ik,ij,jk->k", basis.conj(), sigma.matrix, basis).real
    if np.min(p) <= TOL_RANK or np.min(q) <= TOL_RANK:
        raise SingularState("commuting geodesic requires invertible states")
    _check_distinct(rho, sigma)
    lam = np.sqrt(p * q)
    order = np.argsort(lam, kind="stable")
    if np.any(np.diff(lam[order]) < TOL_DEGEN):
        raise DegenerateLambda("products p_k q_k are not pairwise distinct")
    v = np.empty(rho.n)
    v[order] = parse_signs(signs, rho.n)
    cos_theta = float(np.clip(np.sum(lam * v), -1.0, 1.0))
    theta = np.arccos(cos_theta)
    if np.sin(theta) < 1e-12:
        raise StatesEqual("geodesic has zero length")
    amp = (np.sin(theta - tau) * np.sqrt(p) + v * np.sin(tau) * np.sqrt(q)) / np.sin(theta)
    pops = amp**2
    return DensityMatrix((basis * pops) @ basis.conj().T)


def commuting_populations(p, q, signs, tau: float) -> np.ndarray:
    """Population curves for diagonal endpoints given in the same basis."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    lam = np.sqrt(p * q)
    order = np.argsort(lam, kind="stable")
    v = np.empty(len(p))
    v[order] = parse_signs(signs, len(p))
    theta = np.arccos(np.clip(np.sum(lam * v), -1.0, 1.0))
    amp = (np.sin(theta - tau) * np.sqrt(p) + v * np.sin(tau) * np.sqrt(q)) / np.sin(theta)
    return amp**2


# Geodesics ending on a pure state -----------------------------------------


@dataclass(frozen=True, eq=False)
class PureTargetGeodesic:
    """Geodesic from an invertible state to a pure state ``|phi><phi|``."""

    rho: DensityMatrix
    phi: np.ndarray
    theta: float

    @property
    def n(self) -> int:
        return self.rho.n

    @property
    def target(self) -> np.ndarray:
        return np.outer(self.phi, self.phi.conj())

    def x_operator(self, tau: float) -> np.ndarray:
        c, s = np.cos(self.theta), np.sin(self.theta)
        return (np.sin(self.theta - tau) * np.eye(self.n) + np.sin(tau) / c * self.target) / s

    def evaluate(self, tau: float) -> DensityMatrix:
        r = self.rho.matrix
        proj = self.target
        c, s = np.cos(self.theta), np.sin(self.theta)
        a = np.sin(self.theta - tau)
        b = np.sin(tau)
        gamma = (a**2 * r + b**2 * proj + a * b / c * (r @ proj + proj @ r)) / s**2
        return DensityMatrix(linalg.clamp_psd(linalg.hermitian_part(gamma)))

    @property
    def second_boundary_time(self) -> float:
        """Second boundary hit, a quarter period past the pure endpoint."""
        return self.theta + np.pi / 2

    def boundary_states(self) -> list[tuple[float, DensityMatrix]]:
        return [(t, self.evaluate(t)) for t in (self.theta, self.second_boundary_time)]


def geodesic_to_pure(rho: StateLike, phi) -> PureTargetGeodesic:
    rho = as_density(rho)
    if not rho.is_invertible():
        raise SingularState("rho must be invertible")
    vec = np.asarray(phi, dtype=complex).ravel()
    if vec.shape != (rho.n,):
        raise DimensionMismatch(f"target vector must have length {rho.n}")
    vec = vec / np.linalg.norm(vec)
    overlap = float(np.vdot(vec, rho.matrix @ vec).real)
    if overlap <= TOL_RANK:
        raise OrthogonalTarget("target is orthogonal to the support of rho")
    return PureTargetGeodesic(rho, vec, float(np.arccos(np.sqrt(min(1.0, overlap)))))


# Boundary intersections ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class BoundaryIntersection:
    tau: float
    mu: float
    multiplicity: int
    kernel_projector: np.ndarray
    kernel_basis: np.ndarray
    state: DensityMatrix

    def to_dict(self) -> dict:
        return {
            "tau": float(self.tau),
            "mu": float(self.mu),
            "multiplicity": int(self.multiplicity),
            "kernel_basis": {
                "re": self.kernel_basis.real.tolist(),
                "im": self.kernel_basis.imag.tolist(),
            },
        }


def det_x(spec: GeodesicSpec, tau: float) -> float:
    return float(np.linalg.det(spec.x_operator(tau)).real)


def _polish(spec: GeodesicSpec, tau: float, mult: int) -> float:
    # one modified Newton step for a root of multiplicity ``mult``; kept only if it helps
    h = 1e-7
    g0 = det_x(spec, tau)
    dg = (det_x(spec, tau + h) - det_x(spec, tau - h)) / (2 * h)
    if dg == 0.0 or not np.isfinite(dg):
        return tau
    cand = tau - mult * g0 / dg
    if 0.0 < cand < np.pi and abs(det_x(spec, cand)) < abs(g0):
        return float(cand)
    return tau


def m_eigenspaces(spec: GeodesicSpec) -> list[tuple[float, np.ndarray]]:
    """Distinct eigenvalues of M with orthonormal eigenvector blocks."""
    vals, vecs = linalg.eig_hermitian(spec.m)
    out = []
    for cluster in linalg.spectral_clusters(vals, TOL_DEGEN):
        out.append((float(np.mean(vals[cluster])), vecs[:, cluster]))
    return out


def boundary_intersections(spec: GeodesicSpec) -> list[BoundaryIntersection]:
    """Points where the closed curve on [0, pi] meets the boundary, sorted by time."""
    s, c = np.sin(spec.theta), np.cos(spec.theta)
    result = []
    for mu, basis in m_eigenspaces(spec):
        tau = float(np.arctan2(s, c - mu))
        tau = _polish(spec, tau, basis.shape[1])
        result.append(
            BoundaryIntersection(
                tau=tau,
                mu=mu,
                multiplicity=basis.shape[1],
                kernel_projector=basis @ basis.conj().T,
                kernel_basis=basis,
                state=evaluate(spec, tau),
            )
        )
    return sorted(result, key=lambda b: b.tau)


def det_x_batch(spec: GeodesicSpec, taus: np.ndarray) -> np.ndarray:
    taus = np.asarray(taus, dtype=float)
    s = np.sin(spec.theta)
    stack = (np.sin(taus)[:, None, None] * spec.m + np.sin(spec.theta - taus)[:, None, None] * np.eye(spec.n)) / s
    return np.linalg.det(stack).real


def scan_det_zeros(spec: GeodesicSpec, samples: int = 10_000, tol: float = 1e-13) -> list[float]:
    """Sign changes of det X on (0, pi], refined by bisection.

    Even-multiplicity zeros do not change sign and are not detected.
    """
    grid = np.concatenate(([1e-12], np.linspace(0.0, np.pi, samples + 1)[1:]))
    values = det_x_batch(spec, grid)
    roots = []
    for k in np.nonzero(values[:-1] * values[1:] <= 0)[0]:
        a, b = grid[k], grid[k + 1]
        fa, fb = values[k], values[k + 1]
        if fb == 0.0:
            roots.append(float(b))
            continue
        if fa == 0.0:
            continue
        while b - a > tol:
            mid = 0.5 * (a + b)
            fm = det_x(spec, mid)
            if fa * fm <= 0:
                b = mid
            else:
                a, fa = mid, fm
        roots.append(0.5 * (a + b))
    return roots


def time_shift(spec: GeodesicSpec, t: float) -> GeodesicSpec:
    """Re-base the geodesic at ``gamma(t)``, keeping ``sigma`` as the endpoint.

    The new sign operator is computed explicitly from the shifted M and checked
    to be a Hermitian unitary commuting with the new Lambda.
    """
    if t == 0:
        return spec
    if not 0.0 < t < spec.theta:
        raise InputError(f"shift time must lie in [0, theta) = [0, {spec.theta:.6g})")
    x = spec.x_operator(t)
    if abs(np.linalg.det(x)) < TOL_RANK:
        raise AtBoundary(f"gamma({t}) lies on the boundary")
    rho_t = evaluate(spec, t)
    data = _lambda_data(rho_t, spec.sigma)
    m_t = linalg.hermitian_part(spec.m @ np.linalg.inv(x))
    phi = data.vectors
    lam_inv = (phi / data.values) @ phi.conj().T
    lam_t = (phi * data.values) @ phi.conj().T
    v_t = lam_inv @ data.sqrt_rho @ m_t @ data.sqrt_rho
    n = spec.n
    tol = 1e-6
    if (
        np.linalg.norm(v_t - v_t.conj().T) > tol
        or np.linalg.norm(v_t @ v_t.conj().T - np.eye(n)) > tol
        or np.linalg.norm(v_t @ lam_t - lam_t @ v_t) > tol
    ):
        raise NumericalError("shifted sign operator is not a Hermitian unitary commuting with Lambda")
    v_t = linalg.hermitian_part(v_t)
    diag = np.einsum("ik,ij,jk->k", phi.conj(), v_t, phi).real
    signs = tuple(int(np.sign(d)) for d in diag)
    sqrt_sigma = linalg.sqrt_psd(spec.sigma.matrix)
    u_polar = sqrt_sigma @ data.sqrt_rho @ lam_inv
    return GeodesicSpec(
        rho_t, spec.sigma, lam_t, data.values, phi, u_polar, signs, v_t, m_t, spec.theta - t
    )


def reverse_signs(spec: GeodesicSpec) -> GeodesicSpec:
    """The geodesic with sign operator -V, tracing the same closed curve backwards."""
    return build_geodesic(spec.rho, spec.sigma, tuple(-s for s in spec.signs))


def sample_path(spec: GeodesicSpec, taus: Iterable[float]) -> list[DensityMatrix]:
    return [evaluate(spec, t) for t in taus]
