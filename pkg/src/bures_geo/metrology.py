"""Single-parameter estimation: Fisher informations, optimal measurements and
Monte-Carlo / Heisenberg-scaling harnesses."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import linalg
from .errors import (
    DegenerateExtremes,
    DegenerateLikelihood,
    DimensionMismatch,
    InputError,
    TooManyQubits,
)
from .evolution import GeodesicHamiltonian
from .geodesics import GeodesicSpec, m_eigenspaces
from .linalg import TOL_DEGEN, TOL_PSD, TOL_RANK
from .states import (
    DensityMatrix,
    Purification,
    as_purification,
    bures_angle,
    bures_metric,
    sld,
    split_tangent,
)

P_FLOOR = 1e-12
FD_STEP = 1e-5
MAX_PROBES = 5


def max_workers() -> int:
    """Thread cap from BURES_GEO_THREADS (default 1)."""
    try:
        return max(1, int(os.environ.get("BURES_GEO_THREADS", "1")))
    except ValueError:
        return 1


# Measurements and families ------------------------------------------------


@dataclass(frozen=True, eq=False)
class POVM:
    elements: tuple

    def __post_init__(self):
        mats = []
        for e in self.elements:
            mat = linalg.check_hermitian(e)
            if np.linalg.eigvalsh(mat)[0] < -TOL_PSD:
                raise InputError("POVM element is not positive semidefinite")
            mats.append(mat)
        if not mats:
            raise InputError("POVM needs at least one element")
        n = mats[0].shape[0]
        if any(m.shape != (n, n) for m in mats):
            raise DimensionMismatch("POVM elements differ in shape")
        if np.linalg.norm(sum(mats) - np.eye(n)) > 1e-9:
            raise InputError("POVM elements do not sum to the identity")
        object.__setattr__(self, "elements", tuple(mats))

    @property
    def n(self) -> int:
        return self.elements[0].shape[0]

    def probabilities(self, rho) -> np.ndarray:
        mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
        return np.array([np.trace(e @ mat).real for e in self.elements])

    @classmethod
    def computational(cls, n: int) -> "POVM":
        return cls(tuple(np.diag(np.eye(n)[k]).astype(complex) for k in range(n)))

    def to_dict(self) -> list:
        return [{"re": e.real.tolist(), "im": e.imag.tolist()} for e in self.elements]

    @classmethod
    def from_dict(cls, data: list) -> "POVM":
        try:
            return cls(tuple(np.asarray(e["re"]) + 1j * np.asarray(e.get("im", 0.0)) for e in data))
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed POVM: {exc}") from exc


def random_povm(n: int, outcomes: int, rng: np.random.Generator) -> POVM:
    """Random POVM from normalized Wishart-like elements."""
    raw = []
    for _ in range(outcomes):
        g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        raw.append(g @ g.conj().T)
    inv_sqrt = linalg.psd_power(sum(raw), -0.5)
    return POVM(tuple(linalg.hermitian_part(inv_sqrt @ a @ inv_sqrt) for a in raw))


@dataclass(frozen=True, eq=False)
class ParametrizedFamily:
    """A one-parameter family of states with an optional exact derivative.

    Without ``derivative_fn`` the derivative is a central finite difference with
    step ``step`` (default ``1e-5 * max(1, |x|)``).
    """

    evaluator: Callable[[float], object]
    derivative_fn: Callable[[float], np.ndarray] | None = None
    step: float | None = None

    def state(self, x: float) -> DensityMatrix:
        out = self.evaluator(x)
        return out if isinstance(out, DensityMatrix) else DensityMatrix(np.asarray(out))

    def derivative(self, x: float) -> np.ndarray:
        if self.derivative_fn is not None:
            return linalg.hermitian_part(np.asarray(self.derivative_fn(x), dtype=complex))
        h = self.step if self.step is not None else FD_STEP * max(1.0, abs(x))
        diff = self.state(x + h).matrix - self.state(x - h).matrix
        return linalg.hermitian_part(diff / (2.0 * h))

    @classmethod
    def from_geodesic(cls, spec: GeodesicSpec, delta: float = 1.0) -> "ParametrizedFamily":
        """``x -> gamma(x * delta)`` with the exact velocity."""
        return cls(lambda x: spec.evaluate(x * delta), lambda x: delta * spec.derivative(x * delta))

    @classmethod
    def from_unitary(cls, hamiltonian, psi_in, n: int, n_a: int) -> "ParametrizedFamily":
        """Reduced states of ``exp(-i x H) psi_in``."""
        orbit = UnitaryOrbit(hamiltonian, psi_in)

        def state(x):
            return DensityMatrix(linalg.clamp_psd(linalg.reduced_from_vector(orbit.vector(x), n, n_a)))

        def deriv(x):
            psi = orbit.vector(x)
            dpsi = orbit.velocity(x)
            c = psi.reshape(n, n_a)
            d = dpsi.reshape(n, n_a)
            return c @ d.conj().T + d @ c.conj().T

        return cls(state, deriv)


class UnitaryOrbit:
    """``x -> exp(-i x H) psi_in`` evaluated through one eigendecomposition of H."""

    def __init__(self, hamiltonian, psi_in):
        self.hamiltonian = linalg.check_hermitian(hamiltonian)
        self.energies, self.basis = linalg.eig_hermitian(self.hamiltonian)
        self.psi_in = np.asarray(psi_in, dtype=complex).ravel()
        if self.psi_in.shape != (self.hamiltonian.shape[0],):
            raise DimensionMismatch("input vector does not match the Hamiltonian")
        self._coeffs = self.basis.conj().T @ self.psi_in

    def vector(self, x: float) -> np.ndarray:
        return self.basis @ (np.exp(-1j * x * self.energies) * self._coeffs)

    def velocity(self, x: float) -> np.ndarray:
        return -1j * (self.hamiltonian @ self.vector(x))


# Fisher informations -------------------------------------------------------


def cfi(family: ParametrizedFamily, povm: POVM, x: float) -> float:
    """Classical Fisher information, summing over outcomes with p > P_FLOOR."""
    rho = family.state(x)
    drho = family.derivative(x)
    p = povm.probabilities(rho)
    dp = np.array([np.trace(e @ drho).real for e in povm.elements])
    keep = p > P_FLOOR
    return float(np.sum(dp[keep] ** 2 / p[keep]))


def qfi(family: ParametrizedFamily, x: float, strict: bool = False) -> float:
    """``tr(rho L^2)`` with the SLD; support-restricted unless ``strict``."""
    rho = family.state(x)
    drho = family.derivative(x)
    ell = sld(rho, drho, restrict_to_support=not strict)
    return float(np.trace(rho.matrix @ ell @ ell).real)


def qfi_bures(family: ParametrizedFamily, x: float) -> float:
    """Four times the Bures metric of the velocity (invertible states only)."""
    drho = family.derivative(x)
    return 4.0 * bures_metric(family.state(x), drho, drho)


def qfi_pure(psi_family: Callable[[float], np.ndarray], x: float, derivative=None, step: float | None = None) -> float:
    """``4(|psi'|^2 - |<psi|psi'>|^2)`` for a family of unit vectors."""
    psi = np.asarray(psi_family(x), dtype=complex)
    if derivative is not None:
        dpsi = np.asarray(derivative(x), dtype=complex)
    else:
        h = step if step is not None else FD_STEP * max(1.0, abs(x))
        dpsi = (np.asarray(psi_family(x + h)) - np.asarray(psi_family(x - h))) / (2.0 * h)
    return float(4.0 * (np.vdot(dpsi, dpsi).real - abs(np.vdot(psi, dpsi)) ** 2))


def qfi_variance(hamiltonian, psi) -> float:
    """``4 <(H - <H>)^2>`` for a pure state."""
    h = np.asarray(hamiltonian, dtype=complex)
    v = np.asarray(psi, dtype=complex).ravel()
    hv = h @ v
    mean = np.vdot(v, hv).real
    return float(4.0 * (np.vdot(hv, hv).real - mean**2))


def qfi_pythagoras(base, psi_dot, n: int | None = None, n_a: int | None = None) -> tuple[float, float]:
    """Split ``4|psi_dot|^2`` into the probe QFI (horizontal) and the leaked part (vertical)."""
    from .errors import RankDeficientSchmidt

    base = as_purification(base, n, n_a)
    if base.schmidt_rank() < base.n:
        raise RankDeficientSchmidt("the probe state must be invertible")
    split = split_tangent(base, psi_dot)
    return (
        float(4.0 * np.vdot(split.horizontal, split.horizontal).real),
        float(4.0 * np.vdot(split.vertical, split.vertical).real),
    )


def _hermitian_basis(dim: int) -> list[np.ndarray]:
    basis = []
    for k in range(dim):
        e = np.zeros((dim, dim), dtype=complex)
        e[k, k] = 1.0
        basis.append(e)
    for k in range(dim):
        for l in range(k + 1, dim):
            e = np.zeros((dim, dim), dtype=complex)
            e[k, l] = e[l, k] = 1.0 / np.sqrt(2)
            basis.append(e)
            f = np.zeros((dim, dim), dtype=complex)
            f[k, l] = -1j / np.sqrt(2)
            f[l, k] = 1j / np.sqrt(2)
            basis.append(f)
    return basis


def _centered_generator_action(base: Purification, hamiltonian, x: float) -> tuple[np.ndarray, np.ndarray]:
    orbit = UnitaryOrbit(hamiltonian, base.vector)
    psi = orbit.vector(x)
    hpsi = orbit.hamiltonian @ psi
    return psi, hpsi - np.vdot(psi, hpsi).real * psi


def variational_objective(base, hamiltonian, b, x: float = 0.0, n: int | None = None, n_a: int | None = None) -> float:
    """``4 <(dH - 1 (x) B)^2>`` at ``exp(-i x H)|psi>``."""
    base = as_purification(base, n, n_a)
    psi, dh_psi = _centered_generator_action(base, hamiltonian, x)
    b_psi = (psi.reshape(base.n, base.n_a) @ np.asarray(b, dtype=complex).T).ravel()
    r = dh_psi - b_psi
    return float(4.0 * np.vdot(r, r).real)


def qfi_variational(base, hamiltonian, x: float = 0.0, n: int | None = None, n_a: int | None = None) -> tuple[float, np.ndarray]:
    """Minimize the variational objective over Hermitian ancilla operators B.

    The objective is quadratic in the ``n_a**2`` real coordinates of B, so the
    minimum is a linear least-squares solve. Returns ``(value, minimizer)``;
    the minimizer is the minimum-norm one.
    """
    base = as_purification(base, n, n_a)
    psi, dh_psi = _centered_generator_action(base, hamiltonian, x)
    coeffs = psi.reshape(base.n, base.n_a)
    basis = _hermitian_basis(base.n_a)
    cols = [(coeffs @ e.T).ravel() for e in basis]
    design = np.vstack([np.column_stack(cols).real, np.column_stack(cols).imag])
    target = np.concatenate([dh_psi.real, dh_psi.imag])
    sol, *_ = np.linalg.lstsq(design, target, rcond=None)
    b = sum(c * e for c, e in zip(sol, basis))
    resid = target - design @ sol
    return float(4.0 * resid @ resid), b


def qfi_discontinuity(family: ParametrizedFamily, x0: float, t: float = 1e-3) -> dict:
    """Compare the support-restricted SLD QFI with the Bures-metric value at ``x0``.

    ``eigenvalue_curvature`` is ``2 * sum_j p_j''(x0)`` over the eigenvalues that
    vanish at ``x0``; at a rank-changing point it predicts ``metric - sld``.
    """
    rho0 = family.state(x0)
    q_sld = qfi(family, x0)
    # one-sided distances: at a boundary point the reduced curve folds back, so
    # the states at x0 - t and x0 + t nearly coincide
    back = bures_angle(rho0, family.state(x0 - t))
    ahead = bures_angle(rho0, family.state(x0 + t))
    q_metric = 2.0 * (back**2 + ahead**2) / t**2
    zero = int(np.sum(rho0.eigenvalues <= TOL_RANK))
    lo = family.state(x0 - t).eigenvalues[:zero]
    hi = family.state(x0 + t).eigenvalues[:zero]
    mid = rho0.eigenvalues[:zero]
    curvature = float(2.0 * np.sum((hi - 2.0 * mid + lo) / t**2))
    return {
        "qfi_sld": q_sld,
        "qfi_metric": q_metric,
        "jump": q_metric - q_sld,
        "eigenvalue_curvature": curvature,
        "vanishing_eigenvalues": zero,
    }


# Optimal measurements and optimality conditions -----------------------------


def optimal_povm(spec: GeodesicSpec) -> POVM:
    """Projectors onto the eigenspaces of M; optimal at every point of the geodesic family."""
    return POVM(tuple(b @ b.conj().T for _, b in m_eigenspaces(spec)))


@dataclass
class GeneratorReport:
    horizontal: bool
    vertical_norm: float
    superposition: bool
    extreme_weights: tuple
    hamiltonian_match: bool
    hamiltonian_residual: float
    family_match: bool
    family_residual: float
    delta: float

    @property
    def passed(self) -> bool:
        return self.horizontal and self.superposition and self.hamiltonian_match and self.family_match


def check_geodesic_generator(psi_in, hamiltonian, n: int, n_a: int, x_samples: Sequence[float] | None = None) -> GeneratorReport:
    """Test whether ``exp(-i x H)psi_in`` projects onto a geodesic traversed at speed Delta.

    Checks that the generated tangent is horizontal, that ``psi_in`` is an even
    superposition of the extreme eigenvectors, that the compressed generator
    ``Pi (H - <H>) Pi / Delta`` equals the geodesic Hamiltonian of the initial
    pair, and that the reduced family matches the projected geodesic flow.
    """
    orbit = UnitaryOrbit(hamiltonian, psi_in)
    energies, basis = orbit.energies, orbit.basis
    if energies[-1] - energies[-2] < TOL_DEGEN or energies[1] - energies[0] < TOL_DEGEN:
        raise DegenerateExtremes("extreme eigenvalues of H are degenerate")
    delta = 0.5 * (energies[-1] - energies[0])
    psi = orbit.psi_in
    base = Purification(psi, n, n_a)
    hpsi = orbit.hamiltonian @ psi
    mean = np.vdot(psi, hpsi).real
    dh = orbit.hamiltonian - mean * np.eye(psi.size)
    tangent = -1j * (dh @ psi)
    t_norm = np.linalg.norm(tangent)
    vertical = float(np.linalg.norm(split_tangent(base, tangent).vertical))
    horizontal = vertical <= 1e-8 * max(t_norm, 1e-300)

    e_max, e_min = basis[:, -1], basis[:, 0]
    weights = (abs(np.vdot(e_max, psi)) ** 2, abs(np.vdot(e_min, psi)) ** 2)
    superposition = all(abs(w - 0.5) <= 1e-8 for w in weights)

    if t_norm < 1e-12:
        return GeneratorReport(horizontal, vertical, superposition, weights, False, np.inf, False, np.inf, delta)

    h_g = GeodesicHamiltonian(psi, tangent / t_norm, n, n_a)
    proj = np.outer(e_max, e_max.conj()) + np.outer(e_min, e_min.conj())
    h_res = float(np.linalg.norm(proj @ dh @ proj / delta - h_g.matrix))

    if x_samples is None:
        x_samples = np.linspace(0.0, np.pi / delta, 9)
    f_res = 0.0
    for x in x_samples:
        rho_x = linalg.reduced_from_vector(orbit.vector(x), n, n_a)
        gamma = linalg.reduced_from_vector(h_g.apply_propagator(x * delta, psi), n, n_a)
        f_res = max(f_res, float(np.linalg.norm(rho_x - gamma)))
    return GeneratorReport(
        horizontal, vertical, superposition, weights, h_res <= 1e-8, h_res, f_res <= 1e-8, f_res, delta
    )


def related_by_local_unitary(eps1, eps2, n: int, n_a: int, tol: float = 1e-8) -> tuple[bool, np.ndarray | None]:
    """Decide whether ``eps2 = (U (x) 1) eps1`` for a system unitary U; return U if so."""
    v1 = np.asarray(eps1, dtype=complex).ravel()
    v2 = np.asarray(eps2, dtype=complex).ravel()
    if v1.shape != (n * n_a,) or v2.shape != (n * n_a,):
        raise DimensionMismatch("vectors do not match n * n_a")
    c1 = v1.reshape(n, n_a)
    c2 = v2.reshape(n, n_a)
    anc1 = c1.T @ c1.conj()
    anc2 = c2.T @ c2.conj()
    if np.linalg.norm(anc1 - anc2) > tol:
        return False, None
    a, _, bh = np.linalg.svd(c2 @ c1.conj().T)
    u = a @ bh
    if np.linalg.norm(c2 - u @ c1) > max(tol, 1e-6):
        return False, None
    return True, u


# Monte-Carlo estimation ------------------------------------------------------


@dataclass
class EstimationExperiment:
    """Maximum-likelihood estimation of ``x_true`` from ``n_meas`` outcomes, repeated.

    The likelihood is scanned on ``grid_points`` points over ``interval``
    (default ``x_true +- 20`` Cramer-Rao widths) and refined by golden-section
    search to ``refine_width``.
    """

    family: ParametrizedFamily
    povm: POVM
    x_true: float
    n_meas: int
    replicates: int = 200
    seed: int = 0
    interval: tuple | None = None
    grid_points: int = 2048
    refine_width: float = 1e-9


@dataclass
class ExperimentResult:
    x_est: np.ndarray
    delta_x: float
    crb: float
    qfi: float
    cfi: float
    mean: float
    interval: tuple = field(default=(0.0, 0.0))

    def to_dict(self) -> dict:
        return {
            "x_est": [float(v) for v in self.x_est],
            "delta_x": self.delta_x,
            "crb": self.crb,
            "qfi": self.qfi,
            "cfi": self.cfi,
            "mean": self.mean,
            "interval": list(self.interval),
        }


def _golden_max(f: Callable[[float], float], a: float, b: float, width: float) -> float:
    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > width:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def run_experiment(exp: EstimationExperiment) -> ExperimentResult:
    if exp.n_meas < 100:
        raise InputError("n_meas must be at least 100")
    q_true = qfi(exp.family, exp.x_true)
    crb = 1.0 / np.sqrt(exp.n_meas * q_true) if q_true > 0 else np.inf
    if exp.interval is None:
        half = 20.0 * crb if np.isfinite(crb) else 1.0
        lo, hi = exp.x_true - half, exp.x_true + half
    else:
        lo, hi = (float(v) for v in exp.interval)
    if not lo < exp.x_true < hi:
        raise InputError("x_true must lie inside the search interval")

    def probs(x):
        p = exp.povm.probabilities(exp.family.state(x))
        return np.clip(p, 0.0, None)

    p_true = probs(exp.x_true)
    if abs(p_true.sum() - 1.0) > 1e-10:
        raise InputError("outcome probabilities do not sum to one")
    grid = np.linspace(lo, hi, exp.grid_points)
    log_table = np.log(np.maximum(np.array([probs(x) for x in grid]), P_FLOOR))

    streams = np.random.SeedSequence(exp.seed).spawn(exp.replicates)

    def one(r: int) -> float:
        rng = np.random.default_rng(streams[r])
        counts = rng.multinomial(exp.n_meas, p_true)
        if np.count_nonzero(counts) <= 1:
            raise DegenerateLikelihood("all outcomes identical; the likelihood is flat")
        k = int(np.argmax(log_table @ counts))
        a = grid[max(k - 1, 0)]
        b = grid[min(k + 1, len(grid) - 1)]
        return _golden_max(
            lambda x: float(counts @ np.log(np.maximum(probs(x), P_FLOOR))), a, b, exp.refine_width
        )

    workers = min(max_workers(), exp.replicates)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            estimates = np.array(list(pool.map(one, range(exp.replicates))))
    else:
        estimates = np.array([one(r) for r in range(exp.replicates)])
    delta_x = float(np.sqrt(np.mean((estimates - exp.x_true) ** 2)))
    return ExperimentResult(
        estimates,
        delta_x,
        float(crb),
        q_true,
        cfi(exp.family, exp.povm, exp.x_true),
        float(np.mean(estimates)),
        (lo, hi),
    )


# Entangled probes and Heisenberg scaling ------------------------------------


@dataclass(frozen=True, eq=False)
class ProbePair:
    """One probe qubit with its ancilla qubit and a two-level geodesic generator.

    The pair's purification is ``sum_k sqrt(p_k)|w_k>|k>`` and its unit
    horizontal tangent ``sum_k sqrt(p_k)|w_{1-k}>|k>``; the Hamiltonian is
    ``e_plus |e+><e+| + e_minus |e-><e-|`` with ``e+- = (psi +- i psi_dot)/sqrt(2)``.
    """

    populations: np.ndarray
    basis: np.ndarray
    e_plus: float = 0.5
    e_minus: float = -0.5

    def __post_init__(self):
        if not self.e_plus > TOL_DEGEN > -TOL_DEGEN > self.e_minus:
            raise DegenerateExtremes("pair energies must satisfy e_minus < 0 < e_plus")

    @property
    def half_gap(self) -> float:
        return 0.5 * (self.e_plus - self.e_minus)

    def plane(self) -> tuple[np.ndarray, np.ndarray]:
        amp = np.sqrt(np.asarray(self.populations, dtype=float))
        w = np.asarray(self.basis, dtype=complex)
        psi = np.kron(w[:, 0], [1, 0]) * amp[0] + np.kron(w[:, 1], [0, 1]) * amp[1]
        psi_dot = np.kron(w[:, 1], [1, 0]) * amp[0] + np.kron(w[:, 0], [0, 1]) * amp[1]
        return psi, psi_dot

    def eigenvectors(self) -> tuple[np.ndarray, np.ndarray]:
        psi, psi_dot = self.plane()
        return (psi + 1j * psi_dot) / np.sqrt(2), (psi - 1j * psi_dot) / np.sqrt(2)

    def hamiltonian(self) -> np.ndarray:
        up, down = self.eigenvectors()
        return self.e_plus * np.outer(up, up.conj()) + self.e_minus * np.outer(down, down.conj())

    def local_unitary(self) -> np.ndarray:
        """System unitary U with ``e- = (U (x) 1) e+``."""
        w = np.asarray(self.basis, dtype=complex)
        flip = np.array([[0, 1], [1, 0]], dtype=complex)
        return -1j * (w @ flip @ w.conj().T)


def _register_permutation(count: int) -> np.ndarray:
    """Index map from pair-interleaved order (s1 a1 s2 a2 ...) to (s1 .. sN a1 .. aN)."""
    idx = np.arange(4**count).reshape([2] * (2 * count))
    axes = list(range(0, 2 * count, 2)) + list(range(1, 2 * count, 2))
    return idx.transpose(axes).ravel()


@dataclass(frozen=True, eq=False)
class ProbeEnsembleSpec:
    """N probe/ancilla pairs with ``H = sum_nu H_nu`` and a GHZ-type input.

    Composite ordering is the probe register followed by the ancilla register.
    """

    pairs: tuple
    phase: float = 0.0

    @classmethod
    def uniform(cls, count: int, gap: float = 1.0, populations=(0.7, 0.3), angle: float = 0.3, phase: float = 0.0):
        c, s = np.cos(angle), np.sin(angle)
        pair = ProbePair(np.asarray(populations, dtype=float), np.array([[c, -s], [s, c]], dtype=complex), gap / 2, -gap / 2)
        return cls((pair,) * count, phase)

    @property
    def count(self) -> int:
        return len(self.pairs)

    def resized(self, count: int) -> "ProbeEnsembleSpec":
        return ProbeEnsembleSpec(tuple(self.pairs[k % len(self.pairs)] for k in range(count)), self.phase)

    @property
    def delta(self) -> float:
        return float(sum(p.half_gap for p in self.pairs))

    def _to_registers(self, vec: np.ndarray) -> np.ndarray:
        return vec[_register_permutation(self.count)]

    def hamiltonian(self) -> np.ndarray:
        dim = 4**self.count
        total = np.zeros((dim, dim), dtype=complex)
        for nu, pair in enumerate(self.pairs):
            left = np.eye(4**nu)
            right = np.eye(4 ** (self.count - nu - 1))
            total += np.kron(np.kron(left, pair.hamiltonian()), right)
        perm = _register_permutation(self.count)
        return total[np.ix_(perm, perm)]

    def input_state(self) -> np.ndarray:
        up = np.ones(1, dtype=complex)
        down = np.ones(1, dtype=complex)
        for pair in self.pairs:
            e_up, e_down = pair.eigenvectors()
            up = np.kron(up, e_up)
            down = np.kron(down, e_down)
        vec = (up + np.exp(1j * self.phase) * down) / np.sqrt(2)
        return self._to_registers(vec)

    def dims(self) -> tuple[int, int]:
        return 2**self.count, 2**self.count


class HeisenbergRow(NamedTuple):
    n_probes: int
    qfi: float
    qfi_spread: float
    expected: float
    delta_x_best: float
    leaked: float


def heisenberg_scan(
    spec: ProbeEnsembleSpec,
    counts: Sequence[int] = (1, 2, 3, 4),
    x_samples: Sequence[float] = (0.1, 0.35, 0.6),
    n_meas: int = 1,
) -> list[HeisenbergRow]:
    """Probe QFI and leaked information for growing numbers of entangled probes."""
    rows = []
    for count in counts:
        if count > MAX_PROBES:
            raise TooManyQubits(f"{count} probes exceeds the scan limit of {MAX_PROBES}")
        ens = spec.resized(count)
        h = ens.hamiltonian()
        n, n_a = ens.dims()
        orbit = UnitaryOrbit(h, ens.input_state())
        family = ParametrizedFamily.from_unitary(h, ens.input_state(), n, n_a)
        values, leaked = [], []
        for x in x_samples:
            values.append(qfi(family, x))
            psi = orbit.vector(x)
            hpsi = orbit.hamiltonian @ psi
            tangent = -1j * (hpsi - np.vdot(psi, hpsi).real * psi)
            leaked.append(qfi_pythagoras(Purification(psi / np.linalg.norm(psi), n, n_a), tangent)[1])
        mean = float(np.mean(values))
        rows.append(
            HeisenbergRow(
                count,
                mean,
                float(np.max(values) - np.min(values)),
                float((2.0 * ens.delta) ** 2),
                float(1.0 / np.sqrt(n_meas * mean)),
                float(np.max(leaked)),
            )
        )
    return rows
