"""Geodesic Hamiltonians, their unitary flow and the induced channels."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import NotHorizontal, NotNormalized, NotOrthogonal, NotProductBase
from .states import DensityMatrix, Purification, as_purification, split_tangent

HORIZONTAL_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class GeodesicHamiltonian:
    """Rank-two generator ``-i(|psi><psi_dot| - |psi_dot><psi|)`` on system (x) ancilla.

    Its flow rotates ``psi`` toward ``psi_dot`` along a great circle:
    ``exp(-i tau H) psi = cos(tau) psi + sin(tau) psi_dot``.
    """

    psi: np.ndarray
    psi_dot: np.ndarray
    n: int
    n_a: int

    @property
    def matrix(self) -> np.ndarray:
        a = np.outer(self.psi, self.psi_dot.conj())
        return -1j * (a - a.conj().T)

    def apply_propagator(self, tau: float, vec: np.ndarray) -> np.ndarray:
        """``exp(-i tau H) @ vec`` via the rank-two closed form."""
        a = np.vdot(self.psi, vec)
        b = np.vdot(self.psi_dot, vec)
        c, s = np.cos(tau), np.sin(tau)
        return vec + (c - 1.0) * (a * self.psi + b * self.psi_dot) - s * (b * self.psi - a * self.psi_dot)

    def propagator(self, tau: float) -> np.ndarray:
        pp = np.outer(self.psi, self.psi.conj())
        dd = np.outer(self.psi_dot, self.psi_dot.conj())
        pd = np.outer(self.psi, self.psi_dot.conj())
        eye = np.eye(self.psi.size, dtype=complex)
        return eye + (np.cos(tau) - 1.0) * (pp + dd) - np.sin(tau) * (pd - pd.conj().T)

    def rebased(self, t: float) -> "GeodesicHamiltonian":
        """Same generator described from the point reached at time ``t``."""
        c, s = np.cos(t), np.sin(t)
        return GeodesicHamiltonian(
            c * self.psi + s * self.psi_dot, -s * self.psi + c * self.psi_dot, self.n, self.n_a
        )


def geodesic_hamiltonian(psi, psi_dot, n: int | None = None, n_a: int | None = None) -> GeodesicHamiltonian:
    """Validate ``(psi, psi_dot)`` as a unit horizontal pair and build the generator."""
    base = as_purification(psi, n, n_a)
    vec = np.asarray(psi_dot, dtype=complex).ravel()
    if abs(np.vdot(base.vector, vec)) > 1e-10:
        raise NotOrthogonal("psi_dot is not orthogonal to psi")
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > 1e-10:
        raise NotNormalized(f"psi_dot has norm {norm!r}")
    vertical = np.linalg.norm(split_tangent(base, vec).vertical)
    if vertical > HORIZONTAL_TOL * norm:
        raise NotHorizontal(f"vertical component {vertical:.3e}")
    return GeodesicHamiltonian(base.vector, vec, base.n, base.n_a)


def hamiltonian_from_geodesic(spec, n_a: int | None = None) -> GeodesicHamiltonian:
    psi, psi_dot = spec.horizontal_lift(n_a)
    return geodesic_hamiltonian(psi, psi_dot)


def evolve_pure(h: GeodesicHamiltonian, tau: float, state=None) -> np.ndarray:
    vec = h.psi if state is None else np.asarray(state, dtype=complex).ravel()
    return h.apply_propagator(tau, vec)


def project_evolution(h: GeodesicHamiltonian, tau: float) -> DensityMatrix:
    reduced = linalg.reduced_from_vector(evolve_pure(h, tau), h.n, h.n_a)
    return DensityMatrix(linalg.clamp_psd(linalg.hermitian_part(reduced)))


@dataclass(frozen=True, eq=False)
class ChannelFamily:
    """Channels ``nu -> tr_A exp(-i tau H)(nu (x) |alpha><alpha|)exp(i tau H)``."""

    hamiltonian: GeodesicHamiltonian
    ancilla: np.ndarray

    @classmethod
    def from_hamiltonian(cls, h: GeodesicHamiltonian) -> "ChannelFamily":
        base = Purification(h.psi, h.n, h.n_a)
        if base.schmidt_rank() != 1:
            raise NotProductBase("the Hamiltonian's base purification is entangled")
        return cls(h, base.ancilla_basis[:, 0])

    def apply(self, tau: float, nu) -> np.ndarray:
        """Channel action on any n x n matrix (linear, not only on states)."""
        n, n_a = self.hamiltonian.n, self.hamiltonian.n_a
        u = self.hamiltonian.propagator(tau)
        anc = np.outer(self.ancilla, self.ancilla.conj())
        w = u @ np.kron(np.asarray(nu, dtype=complex), anc) @ u.conj().T
        return linalg.partial_trace_ancilla(w, n, n_a)

    def choi(self, tau: float) -> np.ndarray:
        n = self.hamiltonian.n
        out = np.zeros((n * n, n * n), dtype=complex)
        for i in range(n):
            for j in range(n):
                e = np.zeros((n, n), dtype=complex)
                e[i, j] = 1.0
                out += np.kron(e, self.apply(tau, e))
        return out

    def cp_tp_residuals(self, tau: float) -> tuple[float, float]:
        """(minimum Choi eigenvalue, trace-preservation defect)."""
        n = self.hamiltonian.n
        choi = self.choi(tau)
        min_eig = float(np.linalg.eigvalsh(linalg.hermitian_part(choi))[0])
        reduced = np.einsum("iaja->ij", choi.reshape(n, n, n, n))
        return min_eig, float(np.linalg.norm(reduced - np.eye(n)))


def cptp_map(h: GeodesicHamiltonian, tau: float, nu) -> DensityMatrix:
    nu_mat = nu.matrix if isinstance(nu, DensityMatrix) else np.asarray(nu, dtype=complex)
    out = ChannelFamily.from_hamiltonian(h).apply(tau, nu_mat)
    return DensityMatrix(linalg.clamp_psd(linalg.hermitian_part(out)))
