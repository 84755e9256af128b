"""Translation between photonic (polarization + path) states and logical
qubits, and expansion of a polarization cluster by a path qubit.

The relabeling maps H to logical 1 and V to logical 0. Note the
inversion: the common convention is H -> 0, but the construction modeled
here needs the polarization control to read 1 exactly when the PBS
transmits, so H carries the 1. Easy to mis-implement; flagged here and in
the tests.

Path bits: the transmitted (clockwise, H-polarized) loop arm C carries
path bit 1 and the counterclockwise arm D carries 0. This pairing is
forced by the CNOT reading of the PBS: a control of 1 (H) must flip the
target, and flipping the "photon not yet split" target 0 lands it on the
transmitted arm.

Per-mode phase factors eta absorb the i reflection phases of the BS and
PBS conventions (see elements.py) so that the fixture states in
pipeline.py come out with real printed-sign amplitudes instead of
convention-dependent ones. The two standard maps are:

* two_photon_polarization_map: photon 1 in arm "1" -> qubit 0, photon 2
  in arm "2" -> qubit 1, with eta(2, H) = -1.
* cluster_with_path_map: photon 2 now lives on arms C/D and additionally
  carries path qubit 2, with eta(D, V) = -1.

EncodingMap is explicit data rather than something inferred from mode
names, so an occupation that falls outside the encoding produces a
precise unencodable-term error instead of a silent guess.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, UnencodableTermError
from .fock import PhotonicState
from .mbqc import GraphSpec, H_GATE, QubitState, Z_GATE, apply_1q, apply_cz

POL_BIT = {"H": 1, "V": 0}


@dataclass
class PhotonSlot:
    """One photon: which arms it may occupy and which logical qubits it carries."""

    name: str
    paths: tuple[str, ...]
    pol_qubit: int
    path_qubit: int | None = None
    path_bits: dict[str, int] | None = None
    phases: dict[tuple[str, str], complex] = field(default_factory=dict)

    def __post_init__(self):
        self.paths = tuple(self.paths)
        if self.path_qubit is None:
            if len(self.paths) != 1:
                raise ValueError(
                    f"slot {self.name!r}: several paths need a path qubit"
                )
        else:
            if self.path_bits is None or set(self.path_bits) != set(self.paths):
                raise ValueError(
                    f"slot {self.name!r}: path bits must cover exactly {self.paths}"
                )
            if sorted(self.path_bits.values()) != [0, 1]:
                raise ValueError(
                    f"slot {self.name!r}: path bits must cover both branches"
                )
        for key, eta in self.phases.items():
            if abs(abs(eta) - 1.0) > 1e-12:
                raise ValueError(f"slot {self.name!r}: phase for {key} is not unimodular")

    def eta(self, path: str, pol: str) -> complex:
        return complex(self.phases.get((path, pol), 1.0))

    def qubits(self) -> tuple[int, ...]:
        return (self.pol_qubit,) if self.path_qubit is None else (self.pol_qubit, self.path_qubit)


@dataclass
class EncodingMap:
    slots: tuple[PhotonSlot, ...]

    def __post_init__(self):
        self.slots = tuple(self.slots)
        used = [q for s in self.slots for q in s.qubits()]
        if sorted(used) != list(range(len(used))):
            raise ValueError(
                f"qubit indices must be exactly 0..{len(used) - 1} once each, got {sorted(used)}"
            )

    @property
    def n_qubits(self) -> int:
        return sum(len(s.qubits()) for s in self.slots)

    def slot(self, name: str) -> PhotonSlot:
        for s in self.slots:
            if s.name == name:
                return s
        raise ValueError(f"no photon slot named {name!r}")

    def to_json_dict(self) -> dict:
        return {
            "slots": [
                {
                    "name": s.name,
                    "paths": list(s.paths),
                    "pol_qubit": s.pol_qubit,
                    "path_qubit": s.path_qubit,
                    "path_bits": dict(s.path_bits) if s.path_bits else None,
                    "phases": [
                        {"path": p, "pol": q, "re": float(np.real(v)), "im": float(np.imag(v))}
                        for (p, q), v in sorted(s.phases.items())
                    ],
                }
                for s in self.slots
            ]
        }


def two_photon_polarization_map() -> EncodingMap:
    """Photon 1 (arm 1) -> qubit 0, photon 2 (arm 2) -> qubit 1; H encodes 1."""
    return EncodingMap(
        (
            PhotonSlot("photon1", ("1",), pol_qubit=0),
            PhotonSlot("photon2", ("2",), pol_qubit=1, phases={("2", "H"): -1.0}),
        )
    )


def cluster_with_path_map() -> EncodingMap:
    """Photon 2 expanded over the loop arms: pol -> qubit 1, path -> qubit 2."""
    return EncodingMap(
        (
            PhotonSlot("photon1", ("1",), pol_qubit=0),
            PhotonSlot(
                "photon2",
                ("C", "D"),
                pol_qubit=1,
                path_qubit=2,
                path_bits={"C": 1, "D": 0},
                phases={("D", "V"): -1.0},
            ),
        )
    )


def to_logical(state: PhotonicState, emap: EncodingMap) -> QubitState:
    """Relabel a photonic state as logical qubits; norm preserving.

    Every term must place exactly one photon in each slot's modes and no
    photon anywhere else, or an UnencodableTermError identifies the
    occupation that broke the encoding.
    """
    reg = state.registry
    n = emap.n_qubits
    slot_modes = []
    covered = set()
    for s in emap.slots:
        modes = {}
        for path in s.paths:
            for pol in ("H", "V"):
                m = reg.index(path, pol)
                modes[m] = (path, pol)
                covered.add(m)
        slot_modes.append(modes)
    amps = np.zeros(2**n, dtype=complex)
    for occ, amp in state.terms.items():
        for m, count in enumerate(occ):
            if count > 0 and m not in covered:
                raise UnencodableTermError(
                    f"photon in unmapped mode {reg.label(m)}: occupation {occ}", occ
                )
        index = 0
        phase = 1.0 + 0.0j
        for s, modes in zip(emap.slots, slot_modes):
            hits = [(m, modes[m]) for m in modes if occ[m] > 0]
            total = sum(occ[m] for m in modes)
            if total != 1:
                reason = "bunched photons" if any(occ[m] > 1 for m in modes) else (
                    "no photon" if total == 0 else "two photons"
                )
                raise UnencodableTermError(
                    f"slot {s.name!r} has {reason} (needs exactly one): occupation {occ}",
                    occ,
                )
            path, pol = hits[0][1]
            bits = {s.pol_qubit: POL_BIT[pol]}
            if s.path_qubit is not None:
                bits[s.path_qubit] = s.path_bits[path]
            for q, b in bits.items():
                index |= b << (n - 1 - q)
            phase *= s.eta(path, pol)
        amps[index] += phase * amp
    return QubitState(amps)


def add_path_qubit(
    state: QubitState,
    graph: GraphSpec,
    emap: EncodingMap,
    slot_name: str,
    loop_paths: tuple[str, str] = ("C", "D"),
    new_qubit: int | None = None,
    trailing_rotation: bool = False,
):
    """Expand one photon slot by a path qubit, logical-level model.

    Appends a |+> qubit and applies CZ between it and the slot's
    polarization qubit, extending the graph with that one edge; on a
    cluster-state input the default output equals build_cluster on the
    extended graph. With trailing_rotation the local rotation Z H is
    applied to the new qubit afterwards, which is the state the optical
    construction actually leaves on the expanded register (the CNOT-style
    target rotation that the graph picture absorbs into later bases).

    new_qubit chooses the insertion index (existing indices at or above
    it shift up by one); default is to append at the end. Returns the new
    state, graph, and encoding map (slot moved onto loop_paths with path
    bits C -> 1, D -> 0 and the standard absorbed phase on (D, V)).
    """
    slot = emap.slot(slot_name)
    if slot.path_qubit is not None:
        raise DomainError(f"slot {slot_name!r} already carries a path qubit")
    n = state.n
    if n != graph.n_nodes or n != emap.n_qubits:
        raise ValueError("state, graph, and encoding map disagree on qubit count")
    if new_qubit is None:
        new_qubit = n
    if not 0 <= new_qubit <= n:
        raise ValueError(f"insertion index {new_qubit} outside 0..{n}")

    def shift(q: int) -> int:
        return q + 1 if q >= new_qubit else q

    plus = np.array([1.0, 1.0]) / math.sqrt(2.0)
    tensor = state.amps.reshape((2,) * n)
    grown = np.moveaxis(np.multiply.outer(tensor, plus), n, new_qubit)
    new_state = QubitState(grown.reshape(-1))
    pol_q = shift(slot.pol_qubit)
    new_state = apply_cz(new_state, pol_q, new_qubit)
    if trailing_rotation:
        new_state = apply_1q(new_state, new_qubit, Z_GATE @ H_GATE)

    new_edges = tuple((shift(i), shift(j)) for i, j in graph.edges) + ((pol_q, new_qubit),)
    new_graph = GraphSpec(graph.n_nodes + 1, new_edges)

    new_slots = []
    for s in emap.slots:
        moved = PhotonSlot(
            s.name,
            s.paths,
            shift(s.pol_qubit),
            path_qubit=None if s.path_qubit is None else shift(s.path_qubit),
            path_bits=None if s.path_bits is None else dict(s.path_bits),
            phases=dict(s.phases),
        )
        if s.name == slot_name:
            moved = PhotonSlot(
                s.name,
                loop_paths,
                shift(s.pol_qubit),
                path_qubit=new_qubit,
                path_bits={loop_paths[0]: 1, loop_paths[1]: 0},
                phases={(loop_paths[1], "V"): -1.0},
            )
        new_slots.append(moved)
    return new_state, new_graph, EncodingMap(tuple(new_slots))


def pbs_is_cnot_check() -> dict:
    """Verify the PBS relabels to a polarization-control, path-target CNOT.

    Runs all four (control, target) basis inputs through the PBS element
    photonically and reads the outputs back as logical bits. Bit
    conventions: control is the polarization with H = 1; the target bit
    is 0 for input port a and 1 for input port b, and on the output side
    1 for the transmitted direction of port a and 0 for the transmitted
    direction of port b (the same pairing the Sagnac loop arms use, where
    C is the transmission of the input arm). The truth table matches CNOT
    exactly up to the reflection phase i on the two V rows, which the
    encoding map phases absorb.
    """
    from . import elements, fock

    reg = fock.make_registry(["a", "b"])
    element = elements.pbs(reg, "a", "b")
    in_bit = {"a": 0, "b": 1}
    out_bit = {"a": 1, "b": 0}
    rows = []
    phases = {}
    ok = True
    for pol in ("H", "V"):
        for port in ("a", "b"):
            out = elements.apply(element, fock.single_photon(reg, port, pol))
            (occ, amp), = out.terms.items()
            mode = occ.index(1)
            out_path, out_pol = reg.label(mode)
            control = POL_BIT[pol]
            t_in = in_bit[port]
            t_out = out_bit[out_path]
            expected = t_in ^ control
            ok = ok and (t_out == expected) and (out_pol == pol)
            rows.append(
                {
                    "control": control,
                    "target_in": t_in,
                    "target_out": t_out,
                    "expected_target": expected,
                    "phase": complex(amp),
                }
            )
            if abs(amp - 1.0) > 1e-12:
                phases[f"{pol} via {port}"] = complex(amp)
    return {
        "matches_cnot": ok,
        "rows": rows,
        "absorbed_phases": phases,
        "bit_conventions": {
            "control": "polarization, H = 1",
            "target_in": "port a = 0, port b = 1",
            "target_out": "transmitted direction of a = 1, of b = 0",
        },
    }
