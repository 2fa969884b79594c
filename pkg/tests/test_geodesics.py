import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bures_geo import geodesics, linalg, states
from bures_geo.errors import (
    AtBoundary,
    DegenerateLambda,
    InputError,
    NonCommuting,
    SingularState,
    StatesEqual,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)

# arccos(+-sqrt(.28) +- sqrt(.18)) evaluated at 30 digits with mpmath, ascending
FIXTURE_THETAS = [0.306437383428909, 1.465716864156318, 1.675875789433475, 2.835155270160884]
# intersection times atan2(sin theta, cos theta - mu) for the "++" geodesic, same oracle
FIXTURE_PP_INTERSECTIONS = [0.991156586431192, 2.561952913226089]


def random_pair(seed, n):
    rng = np.random.default_rng(seed)
    return states.random_density_matrix(n, rng), states.random_density_matrix(n, rng)


def test_fixture_lengths_and_sign_labels(qubit_pair):
    specs = geodesics.enumerate_geodesics(*qubit_pair)
    assert [s.theta for s in specs] == pytest.approx(FIXTURE_THETAS, abs=1e-13)
    # signs follow the ascending eigenbasis of Lambda (eigenvalues sqrt(.18) then sqrt(.28))
    assert [geodesics.format_signs(s.signs) for s in specs] == ["++", "-+", "+-", "--"]


def test_fixture_intersection_times(qubit_pair):
    spec = geodesics.build_geodesic(*qubit_pair, "++")
    taus = [b.tau for b in geodesics.boundary_intersections(spec)]
    assert taus == pytest.approx(FIXTURE_PP_INTERSECTIONS, abs=1e-12)


def test_shortest_geodesic_length_is_bures_angle(qubit_pair):
    shortest = geodesics.enumerate_geodesics(*qubit_pair)[0]
    assert shortest.theta == pytest.approx(states.bures_angle(*qubit_pair), abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(2, 4))
def test_invariants_and_endpoints(seed, n):
    rho, sigma = random_pair(seed, n)
    specs = geodesics.enumerate_geodesics(rho, sigma)
    assert len(specs) == 2**n
    assert all(a.theta <= b.theta for a, b in zip(specs, specs[1:]))
    for spec in specs:
        assert max(spec.invariant_residuals().values()) < 1e-9
        assert np.allclose(spec.evaluate(0.0).matrix, rho.matrix, atol=1e-10)
        assert np.allclose(spec.evaluate(spec.theta).matrix, sigma.matrix, atol=1e-9)


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(2, 3))
def test_distance_additivity_along_shortest_geodesic(seed, n):
    rho, sigma = random_pair(seed, n)
    spec = geodesics.enumerate_geodesics(rho, sigma)[0]
    for frac in (0.2, 0.5, 0.9):
        tau = frac * spec.theta
        mid = spec.evaluate(tau)
        assert states.bures_angle(rho, mid) == pytest.approx(tau, abs=1e-7)
        assert states.bures_angle(mid, sigma) == pytest.approx(spec.theta - tau, abs=1e-7)


def test_longer_geodesics_are_locally_minimizing(qubit_pair):
    for spec in geodesics.enumerate_geodesics(*qubit_pair)[1:]:
        for start in (0.1, 0.4):
            a, b = spec.evaluate(start), spec.evaluate(start + 0.05)
            assert states.bures_angle(a, b) == pytest.approx(0.05, abs=1e-7)


def test_exact_derivative_matches_finite_difference(rng):
    rho, sigma = states.random_density_matrix(3, rng), states.random_density_matrix(3, rng)
    spec = geodesics.build_geodesic(rho, sigma, "+-+")
    h = 1e-6
    fd = (spec.evaluate(0.3 + h).matrix - spec.evaluate(0.3 - h).matrix) / (2 * h)
    assert np.allclose(spec.derivative(0.3), fd, atol=1e-7)


def test_commuting_closed_form_agrees(rng):
    p = rng.dirichlet(np.ones(3))
    q = rng.dirichlet(np.ones(3))
    for signs in ("+++", "+-+", "--+"):
        spec = geodesics.build_geodesic(np.diag(p), np.diag(q), signs)
        for tau in (0.2, 0.7 * spec.theta, 2.0):
            closed = geodesics.evaluate_commuting(np.diag(p), np.diag(q), signs, tau)
            assert np.allclose(closed.matrix, spec.evaluate(tau).matrix, atol=1e-12)
            pops = geodesics.commuting_populations(p, q, signs, tau)
            assert np.allclose(np.diag(closed.matrix).real, pops, atol=1e-12)


def test_reversed_signs_trace_the_curve_backwards(qubit_pair):
    for spec in geodesics.enumerate_geodesics(*qubit_pair):
        rev = geodesics.reverse_signs(spec)
        assert rev.theta == pytest.approx(np.pi - spec.theta, abs=1e-12)
        for tau in (0.3, 1.1, 2.4):
            assert np.allclose(rev.evaluate(tau).matrix, spec.evaluate(-tau).matrix, atol=1e-12)
            assert np.allclose(rev.evaluate(tau).matrix, spec.evaluate(np.pi - tau).matrix, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(seeds, st.integers(2, 3))
def test_boundary_census(seed, n):
    rho, sigma = random_pair(seed, n)
    for spec in geodesics.enumerate_geodesics(rho, sigma):
        hits = geodesics.boundary_intersections(spec)
        assert len(hits) == len(geodesics.m_eigenspaces(spec))
        zeros = geodesics.scan_det_zeros(spec, 4000)
        assert zeros == pytest.approx([b.tau for b in hits], abs=1e-7)
        for b in hits:
            assert b.state.rank() == n - b.multiplicity
            assert np.allclose(b.state.matrix @ b.kernel_basis, 0.0, atol=1e-8)
        before = sum(1 for b in hits if b.tau < spec.theta)
        assert before == sum(1 for s in spec.signs if s < 0)


def test_time_shift_rebases_the_same_curve(rng):
    rho, sigma = states.random_density_matrix(3, rng), states.random_density_matrix(3, rng)
    spec = geodesics.enumerate_geodesics(rho, sigma)[0]
    shifted = geodesics.time_shift(spec, 0.3 * spec.theta)
    assert shifted.theta == pytest.approx(0.7 * spec.theta, abs=1e-12)
    assert shifted.signs == spec.signs
    for tau in (0.0, 0.1, shifted.theta):
        assert np.allclose(shifted.evaluate(tau).matrix, spec.evaluate(tau + 0.3 * spec.theta).matrix, atol=1e-9)


def test_time_shift_past_an_intersection_flips_a_sign(qubit_pair):
    spec = geodesics.build_geodesic(*qubit_pair, "-+")
    first = geodesics.boundary_intersections(spec)[0].tau
    shifted = geodesics.time_shift(spec, first + 0.1)
    assert sum(s < 0 for s in shifted.signs) == 0
    assert np.allclose(shifted.evaluate(0.2).matrix, spec.evaluate(first + 0.3).matrix, atol=1e-9)


def test_time_shift_rejects_boundary_and_range(qubit_pair):
    spec = geodesics.build_geodesic(*qubit_pair, "-+")
    with pytest.raises(AtBoundary):
        geodesics.time_shift(spec, geodesics.boundary_intersections(spec)[0].tau)
    with pytest.raises(InputError):
        geodesics.time_shift(spec, spec.theta + 0.1)


def test_pure_target_geodesic(rng):
    rho = states.random_density_matrix(3, rng)
    phi = states.random_pure_state(3, rng)
    geo = geodesics.geodesic_to_pure(rho, phi)
    assert geo.theta == pytest.approx(np.arccos(np.sqrt(np.vdot(phi, rho.matrix @ phi).real)), abs=1e-12)
    assert np.allclose(geo.evaluate(0.0).matrix, rho.matrix, atol=1e-12)
    assert np.allclose(geo.evaluate(geo.theta).matrix, np.outer(phi, phi.conj()), atol=1e-10)
    x = geo.x_operator(0.4)
    assert np.allclose(x @ rho.matrix @ x, geo.evaluate(0.4).matrix, atol=1e-12)
    late = geo.evaluate(geo.second_boundary_time)
    assert late.rank() < 3
    assert states.bures_angle(rho, geo.evaluate(0.5 * geo.theta)) == pytest.approx(0.5 * geo.theta, abs=1e-7)


def test_pure_target_errors(rng):
    # an orthogonal target needs a singular rho, which is rejected first
    with pytest.raises(SingularState):
        geodesics.geodesic_to_pure(np.diag([0.6, 0.4, 0.0]), np.array([0, 0, 1.0]))
    with pytest.raises(SingularState):
        geodesics.geodesic_to_pure(np.diag([1.0, 0.0]), np.array([1.0, 0.0]))


def test_degenerate_lambda_is_reported_with_clusters():
    rho, sigma = np.diag([0.6, 0.4]), np.diag([0.4, 0.6])
    with pytest.raises(DegenerateLambda) as info:
        geodesics.enumerate_geodesics(rho, sigma)
    assert [list(c) for c in info.value.clusters] == [[0, 1]]
    with pytest.raises(DegenerateLambda):
        geodesics.build_geodesic(rho, sigma, "+-")
    assert geodesics.build_geodesic(rho, sigma, "--").theta > 0


def test_equal_states_and_bad_signs(qubit_pair):
    rho, _ = qubit_pair
    with pytest.raises(StatesEqual):
        geodesics.enumerate_geodesics(rho, rho)
    with pytest.raises(InputError):
        geodesics.build_geodesic(*qubit_pair, "+")
    with pytest.raises(InputError):
        geodesics.build_geodesic(*qubit_pair, "+x")
    with pytest.raises(SingularState):
        geodesics.enumerate_geodesics(np.diag([1.0, 0.0]), np.eye(2) / 2)


def test_horizontal_lift_projects_to_velocity(rng):
    rho, sigma = states.random_density_matrix(3, rng), states.random_density_matrix(3, rng)
    spec = geodesics.enumerate_geodesics(rho, sigma)[2]
    psi, psi_dot = spec.horizontal_lift()
    assert np.linalg.norm(psi_dot) == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.norm(states.split_tangent(psi, psi_dot).vertical) < 1e-10
    assert np.allclose(states.projection_differential(psi, psi_dot), spec.derivative(0.0), atol=1e-10)


def test_fixture_m_operator(qubit_pair):
    spec = geodesics.build_geodesic(*qubit_pair, "++")
    assert np.allclose(spec.m, np.diag([np.sqrt(4 / 7), np.sqrt(2)]), atol=1e-14)


@settings(max_examples=15, deadline=None)
@given(seeds, st.integers(2, 3))
def test_unit_speed_by_finite_differences(seed, n):
    rho, sigma = random_pair(seed, n)
    for spec in geodesics.enumerate_geodesics(rho, sigma):
        hits = [b.tau for b in geodesics.boundary_intersections(spec)]
        for tau in np.linspace(0.05, spec.theta - 0.05, 5):
            if min(abs(tau - t) for t in hits) < 0.05:
                continue
            h = 1e-5
            drho = (spec.evaluate(tau + h).matrix - spec.evaluate(tau - h).matrix) / (2 * h)
            speed = 4 * states.bures_metric(spec.evaluate(tau), drho, drho)
            assert speed == pytest.approx(4.0, abs=1e-5)


@settings(max_examples=15, deadline=None)
@given(seeds, st.integers(2, 3))
def test_additivity_between_interior_points(seed, n):
    rho, sigma = random_pair(seed, n)
    spec = geodesics.enumerate_geodesics(rho, sigma)[0]
    t1, t2 = 0.15 * spec.theta, 0.8 * spec.theta
    assert states.bures_angle(spec.evaluate(t1), spec.evaluate(t2)) == pytest.approx(t2 - t1, abs=1e-8)


def _polygon_length(path):
    return sum(states.bures_angle(a, b) for a, b in zip(path, path[1:]))


def test_shortest_geodesic_beats_perturbed_paths(rng):
    rho, sigma = states.random_density_matrix(3, rng), states.random_density_matrix(3, rng)
    spec = geodesics.enumerate_geodesics(rho, sigma)[0]
    t1, t2 = 0.2 * spec.theta, 0.8 * spec.theta
    taus = np.linspace(t1, t2, 41)
    base = [spec.evaluate(t).matrix for t in taus]
    reference = _polygon_length([states.DensityMatrix(m) for m in base])
    assert reference == pytest.approx(t2 - t1, abs=1e-6)
    bump = np.sin(np.pi * (taus - t1) / (t2 - t1))
    for _ in range(50):
        direction = linalg.random_hermitian(3, rng)
        direction -= np.trace(direction) / 3 * np.eye(3)
        direction *= 0.02 / np.linalg.norm(direction)
        path = [states.DensityMatrix(m + b * direction) for m, b in zip(base, bump)]
        assert _polygon_length(path) >= reference - 1e-9


def test_time_shift_keeps_m_eigenprojectors(qubit_pair):
    spec = geodesics.build_geodesic(*qubit_pair, "+-")
    shifted = geodesics.time_shift(spec, 0.15)
    before = [b @ b.conj().T for _, b in geodesics.m_eigenspaces(spec)]
    after = sorted((b @ b.conj().T for _, b in geodesics.m_eigenspaces(shifted)), key=lambda p: -p[0, 0].real)
    before = sorted(before, key=lambda p: -p[0, 0].real)
    for p, q in zip(before, after):
        assert np.allclose(p, q, atol=1e-10)
    assert np.allclose(shifted.evaluate(shifted.theta).matrix, qubit_pair[1].matrix, atol=1e-9)


def test_commuting_route_rejects_noncommuting_input(rng):
    with pytest.raises(NonCommuting):
        geodesics.evaluate_commuting(states.random_density_matrix(2, rng), np.diag([0.4, 0.6]), "++", 0.1)


def test_commuting_fixture_population_formula(qubit_pair):
    spec = geodesics.build_geodesic(*qubit_pair, "++")
    tau, theta = 0.15, spec.theta
    p1 = ((np.sin(theta - tau) * np.sqrt(0.7) + np.sin(tau) * np.sqrt(0.4)) / np.sin(theta)) ** 2
    assert spec.evaluate(tau).matrix[0, 0].real == pytest.approx(p1, abs=1e-14)


def test_pure_target_from_maximally_mixed_qubit():
    geo = geodesics.geodesic_to_pure(np.eye(2) / 2, np.array([1.0, 0.0]))
    assert geo.theta == pytest.approx(np.pi / 4, abs=1e-14)


def test_pure_target_eigenvector_gives_straight_segment(rng):
    rho = states.random_density_matrix(3, rng)
    p, w = rho.eigenvalues[-1], rho.eigenvectors[:, -1]
    geo = geodesics.geodesic_to_pure(rho, w)
    proj = np.outer(w, w.conj())
    rest = (rho.matrix - p * proj) / (1 - p)
    for tau in (0.1, 0.5 * geo.theta, geo.theta):
        expected = np.sin(geo.theta - tau) ** 2 * rest + np.cos(geo.theta - tau) ** 2 * proj
        assert np.allclose(geo.evaluate(tau).matrix, expected, atol=1e-12)


def test_frozen_fixture_values_reproduce_in_high_precision():
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 30
    a, b = mp.sqrt(mp.mpf("0.28")), mp.sqrt(mp.mpf("0.18"))
    thetas = sorted(mp.acos(s1 * a + s2 * b) for s1 in (1, -1) for s2 in (1, -1))
    assert [float(t) for t in thetas] == pytest.approx(FIXTURE_THETAS, abs=1e-15)
    theta = mp.acos(a + b)
    for mu, tau in zip((mp.sqrt(mp.mpf(4) / 7), mp.sqrt(2)), FIXTURE_PP_INTERSECTIONS):
        assert float(mp.atan2(mp.sin(theta), mp.cos(theta) - mu)) == pytest.approx(tau, abs=1e-15)
