"""Acceptance checks shared by the test suite and ``bures-geo selfcheck``.

Each check returns a :class:`CriterionResult`; none of them raise on failure.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import subspace_angles

from . import circuits, evolution, geodesics, linalg, metrology, states

FIXTURE_RHO = np.diag([0.7, 0.3])
FIXTURE_SIGMA = np.diag([0.4, 0.6])
# arccos(+-sqrt(.28) +- sqrt(.18)) at 30 digits (mpmath), ascending
FIXTURE_THETAS = (
    0.306437383428909405,
    1.465716864156318005,
    1.675875789433475233,
    2.835155270160883833,
)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number:2d} [{status}] {self.title}: {self.detail} ({self.seconds:.2f} s)"


def _random_pairs(rng, count: int, n: int) -> list:
    return [(states.random_density_matrix(n, rng), states.random_density_matrix(n, rng)) for _ in range(count)]


def _interior_taus(spec, count: int, margin: float = 0.02) -> np.ndarray:
    hits = np.array([b.tau for b in geodesics.boundary_intersections(spec)])
    cand = np.linspace(0.0, spec.theta, 40 * count + 2)[1:-1]
    if hits.size:
        cand = cand[np.min(np.abs(cand[:, None] - hits[None, :]), axis=1) > margin]
    idx = np.linspace(0, len(cand) - 1, count).round().astype(int)
    return cand[idx]


def _speed_defect(spec, tau: float, h: float = 1e-5) -> float:
    drho = (spec.evaluate(tau + h).matrix - spec.evaluate(tau - h).matrix) / (2 * h)
    drho = linalg.hermitian_part(drho)
    return abs(4.0 * states.bures_metric(spec.evaluate(tau), drho, drho) - 4.0)


def criterion_1() -> tuple[bool, str]:
    rng = np.random.default_rng(101)
    pairs = _random_pairs(rng, 25, 2) + _random_pairs(rng, 10, 3)
    end_err, speed_err, count = 0.0, 0.0, 0
    for rho, sigma in pairs:
        for spec in geodesics.enumerate_geodesics(rho, sigma):
            count += 1
            end_err = max(
                end_err,
                np.linalg.norm(spec.evaluate(0.0).matrix - rho.matrix),
                np.linalg.norm(spec.evaluate(spec.theta).matrix - sigma.matrix),
            )
            for tau in _interior_taus(spec, 20):
                speed_err = max(speed_err, _speed_defect(spec, tau))
    ok = end_err <= 1e-9 and speed_err <= 1e-4
    return ok, f"{count} geodesics, endpoint error {end_err:.2e}, speed defect {speed_err:.2e}"


def criterion_2() -> tuple[bool, str]:
    specs = geodesics.enumerate_geodesics(FIXTURE_RHO, FIXTURE_SIGMA)
    thetas = np.array([s.theta for s in specs])
    dev = float(np.max(np.abs(thetas - FIXTURE_THETAS))) if len(specs) == 4 else np.inf
    lam_min = specs[0].lam_values[0]
    rule = abs(np.cos(specs[1].theta) - (np.cos(specs[0].theta) - 2 * lam_min))
    ok = len(specs) == 4 and dev <= 1e-5 and rule <= 1e-10
    return ok, f"{len(specs)} geodesics, max theta deviation {dev:.2e}, second-shortest rule {rule:.2e}"


def criterion_3() -> tuple[bool, str]:
    rng = np.random.default_rng(303)
    pairs = [(FIXTURE_RHO, FIXTURE_SIGMA)] + _random_pairs(rng, 5, 2) + _random_pairs(rng, 5, 3)
    problems, worst_angle, count = [], 0.0, 0
    for rho, sigma in pairs:
        for spec in geodesics.enumerate_geodesics(rho, sigma):
            count += 1
            hits = geodesics.boundary_intersections(spec)
            distinct = len(geodesics.m_eigenspaces(spec))
            zeros = geodesics.scan_det_zeros(spec, 10_000)
            if len(zeros) != distinct or len(hits) != distinct:
                problems.append(f"{spec.signs}: {len(zeros)} zeros vs {distinct} eigenvalues")
            for b in hits:
                vals, vecs = np.linalg.eigh(b.state.matrix)
                if b.state.rank() != spec.n - b.multiplicity:
                    problems.append(f"rank {b.state.rank()} at tau={b.tau:.4f}")
                    continue
                kernel = vecs[:, vals <= linalg.TOL_RANK]
                worst_angle = max(worst_angle, float(np.max(subspace_angles(kernel, b.kernel_basis))))
            early = sum(1 for b in hits if b.tau < spec.theta)
            if early != sum(1 for s in spec.signs if s < 0):
                problems.append(f"{spec.signs}: {early} intersections before theta")
    ok = not problems and worst_angle <= 1e-7
    detail = f"{count} geodesics, max kernel angle {worst_angle:.2e}"
    return ok, detail + (f", problems: {problems[:3]}" if problems else "")


def criterion_4() -> tuple[bool, str]:
    rng = np.random.default_rng(404)
    pairs = [(FIXTURE_RHO, FIXTURE_SIGMA)] + _random_pairs(rng, 5, 2) + _random_pairs(rng, 3, 3)
    eq_err, per_err, choi_min, tp_err, chan_per = 0.0, 0.0, np.inf, 0.0, 0.0
    for rho, sigma in pairs:
        for spec in geodesics.enumerate_geodesics(rho, sigma):
            h = evolution.hamiltonian_from_geodesic(spec)
            for tau in np.linspace(0.0, np.pi, 20):
                eq_err = max(eq_err, np.linalg.norm(evolution.project_evolution(h, tau).matrix - spec.evaluate(tau).matrix))
                per_err = max(per_err, np.linalg.norm(evolution.evolve_pure(h, tau + 2 * np.pi) - evolution.evolve_pure(h, tau)))
            if spec.n == 2:
                hit = geodesics.boundary_intersections(spec)[0]
                channel = evolution.ChannelFamily.from_hamiltonian(h.rebased(hit.tau))
                probe = states.random_density_matrix(2, rng).matrix
                for tau in np.linspace(0.1, 2 * np.pi - 0.1, 10):
                    lo, tp = channel.cp_tp_residuals(tau)
                    choi_min, tp_err = min(choi_min, lo), max(tp_err, tp)
                    chan_per = max(chan_per, np.linalg.norm(channel.apply(tau + 2 * np.pi, probe) - channel.apply(tau, probe)))
    ok = eq_err <= 1e-8 and per_err <= 1e-12 and choi_min >= -1e-10 and tp_err <= 1e-10 and chan_per <= 1e-10
    return ok, (
        f"projection error {eq_err:.2e}, periodicity {per_err:.2e}, "
        f"min Choi eigenvalue {choi_min:.2e}, trace defect {tp_err:.2e}"
    )


def _recipe_plane(rho, recipe: str):
    p, w = circuits.spectral_data(rho)
    n = len(p)
    amp = np.sqrt(p)
    psi = np.zeros(n * n, dtype=complex)
    psi_dot = np.zeros(n * n, dtype=complex)
    alpha = circuits.default_alpha(p)
    for k in range(n):
        anc = np.eye(n)[k]
        psi += amp[k] * np.kron(w[:, k], anc)
        if recipe == "c":
            psi_dot += amp[k] * np.kron(w[:, k ^ 1], anc)
        else:
            psi_dot += alpha[k] * np.kron(w[:, k], anc)
    return psi, psi_dot


def circuit_closed_form_error(rho, recipe: str, theta_end: float = 0.5, samples: int = 10) -> float:
    """Max deviation between circuit outputs and the closed-form geodesic they should trace."""
    rho = states.as_density(rho)
    n = rho.n
    psi, psi_dot = _recipe_plane(rho, recipe)
    end = np.cos(theta_end) * psi + np.sin(theta_end) * psi_dot
    sigma = states.DensityMatrix(linalg.reduced_from_vector(end, n, n))
    specs = geodesics.enumerate_geodesics(rho, sigma)
    spec = min(specs, key=lambda s: abs(s.theta - theta_end))
    if abs(spec.theta - theta_end) > 1e-8:
        return np.inf
    err = 0.0
    for tau in np.linspace(0.0, np.pi, samples):
        circ = circuits.build_circuit_geodesic(rho, tau, recipe)
        out = circuits.output_state(circ, n, n)
        err = max(err, float(np.linalg.norm(out - spec.evaluate(tau).matrix)))
    return err


def criterion_5() -> tuple[bool, str]:
    rng = np.random.default_rng(505)
    errs = {}
    for d in (1, 2):
        rho = states.random_density_matrix(2**d, rng)
        for recipe in ("b", "c"):
            errs[f"d={d}/{recipe}"] = circuit_closed_form_error(rho, recipe)
    worst = max(errs.values())
    return worst <= 1e-8, ", ".join(f"{k} {v:.1e}" for k, v in errs.items())


def criterion_6() -> tuple[bool, str]:
    rng = np.random.default_rng(606)
    sld_err = 0.0
    for k in range(50):
        n = 2 + k % 2
        rho = states.random_density_matrix(n, rng)
        drho = linalg.random_hermitian(n, rng)
        drho -= np.trace(drho) / n * np.eye(n)
        ell = states.sld(rho, drho)
        q = np.trace(rho.matrix @ ell @ ell).real
        sld_err = max(sld_err, abs(q - 4 * states.bures_metric(rho, drho, drho)) / (1 + q))
    pyth_err, var_err, proj_err = 0.0, 0.0, 0.0
    for k in range(20):
        n, n_a = 2, 2 + k % 2
        base = states.Purification(states.random_pure_state(n * n_a, rng), n, n_a)
        ham = linalg.random_hermitian(n * n_a, rng)
        hpsi = ham @ base.vector
        tangent = -1j * (hpsi - np.vdot(base.vector, hpsi).real * base.vector)
        probe, leaked = metrology.qfi_pythagoras(base, tangent)
        pure = metrology.qfi_variance(ham, base.vector)
        pyth_err = max(pyth_err, abs(probe + leaked - pure))
        var_val, _ = metrology.qfi_variational(base, ham, 0.0)
        var_err = max(var_err, abs(var_val - probe))
        family = metrology.ParametrizedFamily.from_unitary(ham, base.vector, n, n_a)
        proj_err = max(proj_err, abs(metrology.qfi(family, 0.0) - probe))
    ok = sld_err <= 1e-8 and pyth_err <= 1e-10 and var_err <= 1e-6 and proj_err <= 1e-7
    return ok, (
        f"SLD vs metric {sld_err:.2e}, Pythagoras {pyth_err:.2e}, "
        f"variational {var_err:.2e}, probe vs reduced QFI {proj_err:.2e}"
    )


def criterion_7() -> tuple[bool, str]:
    rng = np.random.default_rng(707)
    rho3, sigma3 = _random_pairs(rng, 1, 3)[0]
    specs = geodesics.enumerate_geodesics(FIXTURE_RHO, FIXTURE_SIGMA) + geodesics.enumerate_geodesics(rho3, sigma3)
    qfi_dev, ratio_min, excess = 0.0, np.inf, -np.inf
    for spec in specs:
        for delta in (1.0, 0.5):
            family = metrology.ParametrizedFamily.from_geodesic(spec, delta)
            povm = metrology.optimal_povm(spec)
            randoms = [metrology.random_povm(spec.n, 2 + j % 3, rng) for j in range(100)]
            taus = _interior_taus(spec, 10)
            taus = taus[(taus >= 0.05 * spec.theta) & (taus <= 0.95 * spec.theta)]
            for tau in taus:
                x = tau / delta
                q = metrology.qfi(family, x)
                qfi_dev = max(qfi_dev, abs(q / (4 * delta**2) - 1))
                ratio_min = min(ratio_min, metrology.cfi(family, povm, x) / q)
            x_mid = 0.5 * spec.theta / delta
            q_mid = metrology.qfi(family, x_mid)
            for rp in randoms:
                excess = max(excess, metrology.cfi(family, rp, x_mid) - q_mid)
    ok = qfi_dev <= 1e-6 and ratio_min >= 1 - 1e-6 and excess <= 1e-8
    return ok, f"QFI relative deviation {qfi_dev:.2e}, min CFI/QFI {ratio_min:.10f}, max CFI-QFI {excess:.2e}"


def criterion_8() -> tuple[bool, str]:
    spec = geodesics.build_geodesic(FIXTURE_RHO, FIXTURE_SIGMA, "++")
    family = metrology.ParametrizedFamily.from_geodesic(spec)
    exp = metrology.EstimationExperiment(family, metrology.optimal_povm(spec), 0.15, 10_000, 200, seed=0)
    res = metrology.run_experiment(exp)
    ratio = res.delta_x / res.crb
    return abs(ratio - 1) <= 0.1, f"delta_x {res.delta_x:.5f}, bound {res.crb:.5f}, ratio {ratio:.4f}"


def criterion_9() -> tuple[bool, str]:
    rows = metrology.heisenberg_scan(metrology.ProbeEnsembleSpec.uniform(1), (1, 2, 3, 4))
    qfi_err = max(abs(r.qfi - r.n_probes**2) + r.qfi_spread for r in rows)
    leaked = max(r.leaked for r in rows)
    return qfi_err <= 1e-6 and leaked <= 1e-8, (
        f"QFI {[round(r.qfi, 9) for r in rows]}, max error {qfi_err:.2e}, max leaked {leaked:.2e}"
    )


def criterion_10() -> tuple[bool, str]:
    rng = np.random.default_rng(1010)
    pairs = _random_pairs(rng, 10, 2) + _random_pairs(rng, 10, 3)
    err = 0.0
    for k, (rho, sigma) in enumerate(pairs):
        _, overlap = states.uhlmann_optimize(rho, sigma, restarts=5, seed=k)
        err = max(err, abs(overlap - states.root_fidelity(rho, sigma)))
    return err <= 1e-7, f"20 pairs, max |overlap - sqrt(F)| {err:.2e}"


CRITERIA: dict[int, tuple[str, Callable[[], tuple[bool, str]], float | None]] = {
    1: ("endpoints and unit speed", criterion_1, 30.0),
    2: ("geodesic count and lengths", criterion_2, None),
    3: ("boundary census", criterion_3, None),
    4: ("Hamiltonian lift and channels", criterion_4, None),
    5: ("circuit agreement", criterion_5, None),
    6: ("QFI identities", criterion_6, None),
    7: ("metrology optimality", criterion_7, None),
    8: ("Cramer-Rao saturation", criterion_8, 60.0),
    9: ("Heisenberg scaling", criterion_9, None),
    10: ("Uhlmann oracle", criterion_10, None),
}


def run_criterion(number: int) -> CriterionResult:
    title, fn, limit = CRITERIA[number]
    start = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is reported as a failure, not propagated
        ok, detail = False, f"raised {type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - start
    if limit is not None and elapsed > limit:
        ok = False
        detail += f"; exceeded time limit {limit:.0f} s"
    return CriterionResult(number, title, bool(ok), detail, elapsed)


def run_all(numbers=None) -> list[CriterionResult]:
    return [run_criterion(k) for k in (numbers or sorted(CRITERIA))]
