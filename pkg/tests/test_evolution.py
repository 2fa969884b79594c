import numpy as np
import pytest
import scipy.linalg

from bures_geo import evolution, geodesics, linalg, states
from bures_geo.errors import NotHorizontal, NotNormalized, NotOrthogonal, NotProductBase


@pytest.fixture
def qutrit_spec(rng):
    rho, sigma = states.random_density_matrix(3, rng), states.random_density_matrix(3, rng)
    return geodesics.enumerate_geodesics(rho, sigma)[3]


def test_closed_form_propagator_matches_expm(qutrit_spec):
    ham = evolution.hamiltonian_from_geodesic(qutrit_spec)
    for tau in (0.0, 0.4, 2.9):
        exact = scipy.linalg.expm(-1j * tau * ham.matrix)
        assert np.allclose(ham.propagator(tau), exact, atol=1e-12)
        assert np.allclose(evolution.evolve_pure(ham, tau), exact @ ham.psi, atol=1e-12)


def test_projected_evolution_follows_the_geodesic(qutrit_spec):
    ham = evolution.hamiltonian_from_geodesic(qutrit_spec)
    for tau in np.linspace(0.0, np.pi, 11):
        assert np.allclose(
            evolution.project_evolution(ham, tau).matrix, qutrit_spec.evaluate(tau).matrix, atol=1e-10
        )


def test_generator_spectrum_is_plus_minus_one(qutrit_spec):
    vals = np.linalg.eigvalsh(evolution.hamiltonian_from_geodesic(qutrit_spec).matrix)
    assert vals[0] == pytest.approx(-1.0)
    assert vals[-1] == pytest.approx(1.0)
    assert np.allclose(vals[1:-1], 0.0, atol=1e-12)


def test_rebased_generator_is_unchanged(qutrit_spec):
    ham = evolution.hamiltonian_from_geodesic(qutrit_spec)
    moved = ham.rebased(0.8)
    assert np.allclose(moved.matrix, ham.matrix, atol=1e-12)
    assert np.allclose(evolution.evolve_pure(moved, 0.3), evolution.evolve_pure(ham, 1.1), atol=1e-12)


def test_input_validation(qutrit_spec):
    psi, psi_dot = qutrit_spec.horizontal_lift()
    with pytest.raises(NotNormalized):
        evolution.geodesic_hamiltonian(psi, 2 * psi_dot)
    with pytest.raises(NotOrthogonal):
        evolution.geodesic_hamiltonian(psi, psi.vector)
    b = linalg.random_hermitian(3, np.random.default_rng(0))
    vertical = -1j * (psi.coefficients @ b.T).ravel()
    vertical -= np.vdot(psi.vector, vertical) * psi.vector
    vertical /= np.linalg.norm(vertical)
    with pytest.raises(NotHorizontal):
        evolution.geodesic_hamiltonian(psi, vertical)


def _qubit_channel(qubit_pair):
    spec = geodesics.build_geodesic(*qubit_pair, "++")
    ham = evolution.hamiltonian_from_geodesic(spec)
    hit = geodesics.boundary_intersections(spec)[0]
    return spec, ham.rebased(hit.tau), hit


def test_channel_needs_product_base(qubit_pair):
    spec = geodesics.build_geodesic(*qubit_pair, "++")
    with pytest.raises(NotProductBase):
        evolution.ChannelFamily.from_hamiltonian(evolution.hamiltonian_from_geodesic(spec))


def test_channel_reproduces_geodesic_from_pure_point(qubit_pair):
    spec, rebased, hit = _qubit_channel(qubit_pair)
    for tau in (0.2, 1.0, 2.5):
        out = evolution.cptp_map(rebased, tau, hit.state)
        assert np.allclose(out.matrix, spec.evaluate(hit.tau + tau).matrix, atol=1e-10)


def test_channel_is_completely_positive_and_trace_preserving(qubit_pair, rng):
    _, rebased, _ = _qubit_channel(qubit_pair)
    channel = evolution.ChannelFamily.from_hamiltonian(rebased)
    for tau in np.linspace(0.0, 2 * np.pi, 9):
        min_eig, tp = channel.cp_tp_residuals(tau)
        assert min_eig > -1e-12
        assert tp < 1e-12
    nu = states.random_density_matrix(2, rng)
    assert np.allclose(channel.apply(0.0, nu.matrix), nu.matrix, atol=1e-12)
