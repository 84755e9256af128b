"""Dense statevector simulator for cluster-state construction and
measurement-based single-qubit rotations.

Conventions, fixed here and used everywhere downstream:

* Qubit 0 is the leftmost (most significant) bit of the amplitude index,
  so |q0 q1 q2> sits at index q0*4 + q1*2 + q2 for three qubits.
* Measurement basis B(phi): |phi+-> = (|0> +- e^{-i phi} |1>)/sqrt(2),
  outcome m = 0 for the plus state and m = 1 for the minus state.
* Rotations: R_z(phi) = diag(1, e^{i phi}) and R_x(phi) = H R_z(phi) H.
  These are the definitions under which the measurement output law below
  holds exactly; the equivalence test is the arbiter of the convention.
* Measured qubits are removed from the register, not left collapsed.

Output law: measuring qubits 1 and 2 of the three-qubit line cluster
(build_cluster on edges (0,1), (1,2)) in B(phi1) and then, with the
feed-forward adaptation, B((-1)^{m1} phi2), leaves the last qubit in

    sigma_x^{m2} sigma_z^{m1} R_x(phi2) R_z(phi1) |+>

up to global phase. The sign flip of the second analyzer angle is the
feed-forward use of m1; without it the law only holds on the m1 = 0
branches. Applying the correction sigma_z^{m1} sigma_x^{m2} afterwards
gives the branch-independent rotation R_x(phi2) R_z(phi1) |+>.

All comparisons against these states should be global-phase insensitive
(use overlap(), not amplitude equality); byproducts are only defined up
to phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

MAX_QUBITS = 16

H_GATE = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
X_GATE = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
Z_GATE = np.diag([1.0, -1.0]).astype(complex)


@dataclass
class QubitState:
    amps: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amps, dtype=complex).reshape(-1)
        n = int(round(math.log2(a.size)))
        if 2**n != a.size:
            raise ValueError(f"amplitude vector length {a.size} is not a power of two")
        if n > MAX_QUBITS:
            raise ValueError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit cap")
        self.amps = a

    @property
    def n(self) -> int:
        return int(round(math.log2(self.amps.size)))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


@dataclass(frozen=True)
class GraphSpec:
    n_nodes: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "edges", tuple(tuple(int(v) for v in e) for e in self.edges)
        )
        seen = set()
        for i, j in self.edges:
            if i == j:
                raise DomainError(f"self-loop on node {i}")
            if not (0 <= i < self.n_nodes and 0 <= j < self.n_nodes):
                raise DomainError(f"edge ({i},{j}) outside 0..{self.n_nodes - 1}")
            key = frozenset((i, j))
            if key in seen:
                raise DomainError(f"duplicate edge ({i},{j})")
            seen.add(key)


def line_graph(n: int) -> GraphSpec:
    return GraphSpec(n, tuple((i, i + 1) for i in range(n - 1)))


@dataclass(frozen=True)
class MeasurementRecord:
    qubit: int
    angle: float
    outcome: int
    probability: float


def plus_state(n: int) -> QubitState:
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"qubit count {n} outside 1..{MAX_QUBITS}")
    return QubitState(np.full(2**n, 2.0 ** (-n / 2.0), dtype=complex))


def build_cluster(graph: GraphSpec) -> QubitState:
    """All qubits |+>, one CZ per edge; edge order cannot matter."""
    state = plus_state(graph.n_nodes)
    for i, j in graph.edges:
        state = apply_cz(state, i, j)
    return state


def apply_cz(state: QubitState, i: int, j: int) -> QubitState:
    n = state.n
    if not (0 <= i < n and 0 <= j < n) or i == j:
        raise ValueError(f"bad CZ qubits ({i},{j}) for {n} qubits")
    amps = state.amps.copy()
    idx = np.arange(amps.size)
    bit_i = (idx >> (n - 1 - i)) & 1
    bit_j = (idx >> (n - 1 - j)) & 1
    amps[(bit_i & bit_j) == 1] *= -1.0
    return QubitState(amps)


def apply_1q(state: QubitState, j: int, u: np.ndarray) -> QubitState:
    n = state.n
    if not 0 <= j < n:
        raise ValueError(f"qubit {j} out of range for {n} qubits")
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ValueError("single-qubit gate must be 2x2")
    if np.max(np.abs(u.conj().T @ u - np.eye(2))) > 1e-12:
        raise ValueError("single-qubit gate is not unitary")
    tensor = state.amps.reshape((2,) * n)
    moved = np.moveaxis(tensor, j, 0)
    out = np.tensordot(u, moved, axes=([1], [0]))
    return QubitState(np.moveaxis(out, 0, j).reshape(-1))


def b_basis_ket(phi: float, m: int) -> np.ndarray:
    """|phi+> for m = 0, |phi-> for m = 1."""
    sign = 1.0 if m == 0 else -1.0
    return np.array([1.0, sign * np.exp(-1j * phi)]) / math.sqrt(2.0)


def measure_B(
    state: QubitState,
    qubit: int,
    phi: float,
    forced_outcome: int | None = None,
    rng=None,
):
    """Project qubit onto B(phi), remove it, renormalize.

    Unforced outcomes are drawn with Born probabilities from rng (seeded
    generator or int seed). Forcing an outcome whose probability is below
    1e-12 is an error.
    """
    n = state.n
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} out of range for {n} qubits")
    tensor = state.amps.reshape((2,) * n)
    collapsed = []
    probs = []
    for m in (0, 1):
        ket = b_basis_ket(phi, m)
        reduced = np.tensordot(tensor, ket.conj(), axes=([qubit], [0]))
        collapsed.append(reduced.reshape(-1))
        probs.append(float(np.sum(np.abs(reduced) ** 2)))
    if forced_outcome is None:
        if isinstance(rng, (int, np.integer)) or rng is None:
            rng = np.random.default_rng(rng)
        outcome = 0 if rng.random() < probs[0] else 1
    else:
        outcome = int(forced_outcome)
        if outcome not in (0, 1):
            raise DomainError(f"outcome must be 0 or 1, got {forced_outcome}")
        if probs[outcome] <= 1e-12:
            raise DomainError(
                f"forced outcome m={outcome} has probability {probs[outcome]:.3e}"
            )
    residual = QubitState(collapsed[outcome] / math.sqrt(probs[outcome]))
    record = MeasurementRecord(qubit, float(phi), outcome, probs[outcome])
    return record, residual


def rz(phi: float) -> np.ndarray:
    return np.diag([1.0, np.exp(1j * phi)])


def rx(phi: float) -> np.ndarray:
    return H_GATE @ rz(phi) @ H_GATE


def mbqc_output_oracle(phi1: float, phi2: float, m1: int, m2: int) -> QubitState:
    """Closed form sigma_x^{m2} sigma_z^{m1} R_x(phi2) R_z(phi1) |+>."""
    if m1 not in (0, 1) or m2 not in (0, 1):
        raise ValueError("outcomes must be 0 or 1")
    plus = np.array([1.0, 1.0]) / math.sqrt(2.0)
    out = rx(phi2) @ rz(phi1) @ plus
    if m1:
        out = Z_GATE @ out
    if m2:
        out = X_GATE @ out
    return QubitState(out)


def feed_forward_select(m1: int) -> int:
    """Basis sign for the qubit-2 projection: +1 (plus branch) for m1 = 0,
    -1 (minus branch) for m1 = 1.

    Operationally the same information is used as the analyzer-angle flip
    phi2 -> (-1)^{m1} phi2 in run_rotation_protocol; this helper exposes
    the sign selection in the form the measurement record uses.
    """
    if m1 not in (0, 1):
        raise ValueError(f"m1 must be 0 or 1, got {m1}")
    return 1 if m1 == 0 else -1


def byproduct_correction(state: QubitState, m1: int, m2: int) -> QubitState:
    """Apply sigma_z^{m1} sigma_x^{m2} (X first, then Z) to a single qubit."""
    if state.n != 1:
        raise ValueError("byproduct correction acts on a single qubit")
    out = state
    if m2:
        out = apply_1q(out, 0, X_GATE)
    if m1:
        out = apply_1q(out, 0, Z_GATE)
    return out


def overlap(a: QubitState, b: QubitState) -> float:
    """Global-phase insensitive |<a|b>| for normalized states."""
    if a.amps.size != b.amps.size:
        raise ValueError("states have different qubit counts")
    return float(abs(np.vdot(a.amps, b.amps)))


def bloch_vector(state: QubitState) -> np.ndarray:
    if state.n != 1:
        raise ValueError("Bloch vector of a single qubit only")
    a = state.amps
    rho = np.outer(a, a.conj())
    return np.real(
        np.array(
            [
                rho[0, 1] + rho[1, 0],
                1j * (rho[0, 1] - rho[1, 0]),
                rho[0, 0] - rho[1, 1],
            ]
        )
    )


def run_rotation_protocol(
    phi1: float,
    phi2: float,
    branch: tuple[int, int] | None = None,
    rng=None,
    feed_forward: bool = True,
):
    """Measure qubits 1 and 2 of the three-qubit line cluster.

    branch forces the (m1, m2) outcomes; otherwise they are sampled. With
    feed_forward the second analyzer angle is (-1)^{m1} phi2, which is
    what makes the closed-form output law hold on every branch. Returns a
    report dict with the records, residual, oracle, and corrected states.
    """
    if isinstance(rng, (int, np.integer)) or rng is None:
        rng = np.random.default_rng(rng)
    state = build_cluster(line_graph(3))
    f1 = None if branch is None else branch[0]
    rec1, state = measure_B(state, 0, phi1, forced_outcome=f1, rng=rng)
    angle2 = phi2 * (1.0 if not feed_forward else feed_forward_select(rec1.outcome))
    f2 = None if branch is None else branch[1]
    rec2, residual = measure_B(state, 0, angle2, forced_outcome=f2, rng=rng)
    oracle = mbqc_output_oracle(phi1, phi2, rec1.outcome, rec2.outcome)
    corrected = byproduct_correction(residual, rec1.outcome, rec2.outcome)
    target = QubitState(rx(phi2) @ rz(phi1) @ np.array([1.0, 1.0]) / math.sqrt(2.0))
    return {
        "m1": rec1.outcome,
        "m2": rec2.outcome,
        "records": (rec1, rec2),
        "residual": residual,
        "oracle": oracle,
        "overlap": overlap(residual, oracle),
        "corrected": corrected,
        "rotation_target": target,
        "corrected_overlap": overlap(corrected, target),
        "residual_bloch": bloch_vector(residual),
        "oracle_bloch": bloch_vector(oracle),
    }
