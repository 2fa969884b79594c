"""Gate-level circuits for geodesic evolutions and a dense statevector simulator.

Wire 0 is the most significant qubit. Geodesic circuits put the system
register on wires ``0..d-1`` and the ancilla register on ``d..2d-1``, so the
basis index is ``system * 2**d + ancilla`` as everywhere else in the package.

``ry(angle)`` is ``exp(-i angle sigma_y)``, a full-angle rotation:
``ry(tau)|0> = cos(tau)|0> + sin(tau)|1>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import DimensionMismatch, DimensionNotPowerOfTwo, InputError, TooManyQubits
from .states import StateLike, as_density

MAX_QUBITS = 12
GATE_KINDS = ("ry", "cnot", "u1q", "block")


@dataclass(frozen=True)
class Gate:
    kind: str
    wires: tuple
    params: object = None

    def matrix(self) -> np.ndarray:
        if self.kind == "ry":
            c, s = np.cos(self.params), np.sin(self.params)
            return np.array([[c, -s], [s, c]], dtype=complex)
        if self.kind == "cnot":
            return np.array(
                [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
            )
        return np.asarray(self.params, dtype=complex)

    def to_dict(self) -> dict:
        if self.kind == "ry":
            params = [float(self.params)]
        elif self.kind == "cnot":
            params = []
        else:
            mat = np.asarray(self.params, dtype=complex)
            params = {"re": mat.real.tolist(), "im": mat.imag.tolist()}
        return {"kind": self.kind, "wires": list(self.wires), "params": params}

    @classmethod
    def from_dict(cls, data: dict) -> "Gate":
        kind = data.get("kind")
        if kind not in GATE_KINDS:
            raise InputError(f"unknown gate kind {kind!r}")
        wires = tuple(int(w) for w in data.get("wires", []))
        raw = data.get("params")
        if kind == "ry":
            return cls(kind, wires, float(raw[0]))
        if kind == "cnot":
            return cls(kind, wires)
        mat = np.asarray(raw["re"], dtype=float) + 1j * np.asarray(raw["im"], dtype=float)
        return cls(kind, wires, mat)


@dataclass
class Circuit:
    qubits: int
    gates: list = field(default_factory=list)

    def __post_init__(self):
        for g in self.gates:
            self._check(g)

    def _check(self, gate: Gate) -> None:
        if any(w < 0 or w >= self.qubits for w in gate.wires):
            raise InputError(f"gate {gate.kind} uses wires {gate.wires} outside 0..{self.qubits - 1}")
        if len(set(gate.wires)) != len(gate.wires):
            raise InputError(f"gate {gate.kind} repeats a wire")
        expected = {"ry": 1, "cnot": 2, "u1q": 1}.get(gate.kind)
        if expected is not None and len(gate.wires) != expected:
            raise InputError(f"gate {gate.kind} needs {expected} wires")
        mat = gate.matrix()
        k = len(gate.wires)
        if mat.shape != (2**k, 2**k):
            raise DimensionMismatch(f"gate {gate.kind} matrix has shape {mat.shape} for {k} wires")
        if gate.kind == "ry" and not np.isreal(gate.params):
            raise InputError("ry angle must be real")

    def add(self, kind: str, wires, params=None) -> "Circuit":
        gate = Gate(kind, tuple(int(w) for w in wires), params)
        self._check(gate)
        self.gates.append(gate)
        return self

    def to_dict(self) -> dict:
        return {"qubits": self.qubits, "gates": [g.to_dict() for g in self.gates]}

    @classmethod
    def from_dict(cls, data: dict) -> "Circuit":
        try:
            return cls(int(data["qubits"]), [Gate.from_dict(g) for g in data["gates"]])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed circuit: {exc}") from exc


def _apply(state: np.ndarray, mat: np.ndarray, wires: tuple, qubits: int) -> np.ndarray:
    k = len(wires)
    tensor = state.reshape([2] * qubits)
    op = mat.reshape([2] * (2 * k))
    moved = np.tensordot(op, tensor, axes=(list(range(k, 2 * k)), list(wires)))
    return np.moveaxis(moved, list(range(k)), list(wires)).reshape(-1)


def simulate_statevector(circuit: Circuit, initial=0) -> np.ndarray:
    """Apply the gates in order to a basis state (index or bit string) or a vector."""
    q = circuit.qubits
    if q > MAX_QUBITS:
        raise TooManyQubits(f"{q} qubits exceeds the simulator limit of {MAX_QUBITS}")
    dim = 2**q
    if isinstance(initial, str):
        if len(initial) != q or set(initial) - {"0", "1"}:
            raise InputError(f"basis label must be {q} binary digits")
        initial = int(initial, 2)
    if isinstance(initial, (int, np.integer)):
        state = np.zeros(dim, dtype=complex)
        state[int(initial)] = 1.0
    else:
        state = np.asarray(initial, dtype=complex).ravel().copy()
        if state.shape != (dim,):
            raise DimensionMismatch(f"input vector must have length {dim}")
    for gate in circuit.gates:
        state = _apply(state, gate.matrix(), gate.wires, q)
    return state


def _qubit_count(dim: int) -> int:
    d = int(round(np.log2(dim))) if dim > 0 else -1
    if d < 1 or 2**d != dim:
        raise DimensionNotPowerOfTwo(f"dimension {dim} is not a power of two")
    return d


def _unitary_gate(circuit: Circuit, mat: np.ndarray, wires: list) -> None:
    circuit.add("u1q" if len(wires) == 1 else "block", wires, mat)


def spectral_data(rho) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and the matching eigenvector unitary W."""
    rho = as_density(rho)
    p = np.clip(rho.eigenvalues[::-1], 0.0, None)
    return p, rho.eigenvectors[:, ::-1]


def default_alpha(p: np.ndarray) -> np.ndarray:
    """Real unit vector orthogonal to sqrt(p), from Gram-Schmidt completion."""
    a = np.sqrt(p)
    return linalg.complete_unitary(a[:, None], len(p))[:, 1].real


def build_circuit_geodesic(rho: StateLike, tau: float = 0.0, recipe: str = "c", alpha=None) -> Circuit:
    """Circuit whose output, traced over the ancilla, is a geodesic through ``rho`` at time ``tau``.

    The input |0...0> is rotated by ``ry(tau)`` on the last system wire and
    then mapped by ``U_SA``, which sends |0>|0> to the purification
    ``sum_k sqrt(p_k)|w_k>|k>`` and |1>|0> to a unit horizontal tangent.

    Recipes:
        "c": U_A on the ancilla, C-NOTs ancilla -> system, W on the system.
            Tangent ``sum_k sqrt(p_k)|w_{k xor 1}>|k>``.
        "b": U_S on the system (columns sqrt(p), alpha), C-NOTs system -> ancilla, W.
            Tangent ``sum_k alpha_k|w_k>|k>``; stays in the eigenbasis of rho,
            so the geodesic joins commuting states.

    Args:
        rho: state on ``d`` qubits.
        tau: rotation angle, i.e. the arc length along the geodesic.
        recipe: "b" or "c".
        alpha: real coefficients orthogonal to sqrt(p) (recipe "b" only);
            defaults to ``default_alpha(p)``.
    """
    rho = as_density(rho)
    d = _qubit_count(rho.n)
    n = rho.n
    p, w = spectral_data(rho)
    amp = np.sqrt(p)
    system = list(range(d))
    ancilla = list(range(d, 2 * d))
    circuit = Circuit(2 * d)
    circuit.add("ry", [d - 1], float(tau))
    if recipe == "c":
        u_a = linalg.complete_unitary(amp[:, None], n)
        _unitary_gate(circuit, u_a, ancilla)
        for j in range(d):
            circuit.add("cnot", [d + j, j])
    elif recipe == "b":
        coeffs = default_alpha(p) if alpha is None else np.asarray(alpha, dtype=float).ravel()
        if coeffs.shape != (n,):
            raise DimensionMismatch(f"alpha must have length {n}")
        if abs(coeffs @ amp) > 1e-10:
            raise InputError("alpha must be orthogonal to sqrt(p)")
        coeffs = coeffs / np.linalg.norm(coeffs)
        u_s = linalg.complete_unitary(np.column_stack([amp, coeffs]), n)
        _unitary_gate(circuit, u_s, system)
        for j in range(d):
            circuit.add("cnot", [j, d + j])
    else:
        raise InputError(f"unknown recipe {recipe!r}")
    _unitary_gate(circuit, w, system)
    return circuit


def build_circuit_from_lift(psi, psi_dot, n: int, n_a: int, tau: float = 0.0) -> Circuit:
    """Generic template: ``ry(tau)`` on the last system wire, then a dense ``U_SA`` block.

    ``U_SA`` has ``psi`` as column |0>|0> and ``psi_dot`` as column |1>|0>; the
    remaining columns are a Gram-Schmidt completion.
    """
    d = _qubit_count(n)
    d_a = _qubit_count(n_a)
    dim = n * n_a
    cols = linalg.complete_unitary(
        np.column_stack([np.asarray(psi, dtype=complex), np.asarray(psi_dot, dtype=complex)]), dim
    )
    order = [0] + list(range(2, n_a + 1)) + [1] + list(range(n_a + 1, dim))
    u_sa = cols[:, order]
    circuit = Circuit(d + d_a)
    circuit.add("ry", [d - 1], float(tau))
    circuit.add("block", list(range(d + d_a)), u_sa)
    return circuit


def output_state(circuit: Circuit, n: int, n_a: int) -> np.ndarray:
    """Reduced system state of the circuit applied to |0...0>."""
    return linalg.reduced_from_vector(simulate_statevector(circuit), n, n_a)


def build_probe_circuit(pairs: list, x: float, phase: float = 0.0) -> Circuit:
    """Entangled-probe circuit for parallel geodesic phase estimation.

    Probe qubits sit on wires ``0..N-1`` and their ancillas on ``N..2N-1``.
    A y-basis GHZ state ``(|+i...+i> + e^{i phase}|-i...-i>)/sqrt(2)`` is
    prepared on the probes, each probe is rotated by ``ry(x * half_gap)``, and
    each probe-ancilla pair is mapped by its recipe-"c" unitary ``U_SA``.

    Args:
        pairs: per-pair objects with ``populations``, ``basis`` and ``half_gap``.
        x: the estimated parameter.
        phase: relative phase of the GHZ superposition.
    """
    count = len(pairs)
    circuit = Circuit(2 * count)
    prep = np.array([[1.0, -np.exp(-1j * phase)], [np.exp(1j * phase), 1.0]]) / np.sqrt(2)
    circuit.add("u1q", [0], prep)
    for j in range(1, count):
        circuit.add("cnot", [0, j])
    to_y = np.array([[1.0, 1.0], [1j, -1j]]) / np.sqrt(2)
    for j, pair in enumerate(pairs):
        circuit.add("u1q", [j], to_y)
        circuit.add("ry", [j], float(x * pair.half_gap))
    for j, pair in enumerate(pairs):
        amp = np.sqrt(pair.populations)
        circuit.add("u1q", [count + j], linalg.complete_unitary(amp[:, None], 2))
        circuit.add("cnot", [count + j, j])
        circuit.add("u1q", [j], pair.basis)
    return circuit
