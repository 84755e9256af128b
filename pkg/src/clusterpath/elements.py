"""Unitary models of the optical components and their second-quantized action.

Phase conventions (fixed here once, everything downstream depends on them):

* Beam splitter of reflectivity R: transmission amplitude t = sqrt(1-R)
  real, reflection amplitude r = i*sqrt(R) on both ports (symmetric i
  convention).
* PBS: H transmits with amplitude 1, V reflects into the other path with
  phase i.
* HWP(theta): [[cos 2t, sin 2t], [sin 2t, -cos 2t]] on (H, V).
* QWP(theta): fast axis along theta passes unchanged, slow axis is
  retarded by i. At theta = 0 the Jones matrix is diag(1, i).
* phase_shift(path, phi): diag(e^{i phi}) on both polarizations of one
  path.

The Sagnac loop is modeled as split-without-recombine. Its aggregate
action, with input arm "in" and loop arms (C, D):

    |1H>_in -> e^{i 4 alpha} |1H>_C        |1V>_in -> -|1V>_D

The e^{i 4 alpha} sits on the C branch (the transmitted, H-polarized
direction) because the intra-loop waveplates advance the branch that maps
to logical |1> of the path qubit. The -1 on D is the product of the two i
reflection phases the V component picks up entering and exiting the PBS.
Only the aggregate phase law is exposed; the per-plate decomposition
inside the loop is not constrained by any observable here.

Elements act on PhotonicStates by creation-operator substitution
a^dag_j -> sum_k U_kj a^dag_k, exact on two-photon states including
bunched intermediates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .fock import ModeRegistry, PhotonicState, prune

UNITARITY_TOL = 1e-12


@dataclass(frozen=True)
class ModeUnitary:
    """k x k unitary acting on the listed registry mode indices."""

    matrix: np.ndarray
    target_modes: tuple[int, ...]

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        k = len(self.target_modes)
        if m.shape != (k, k):
            raise ValueError(f"matrix shape {m.shape} does not match {k} target modes")
        if len(set(self.target_modes)) != k:
            raise ValueError(f"duplicate target modes in {self.target_modes}")
        dev = np.max(np.abs(m.conj().T @ m - np.eye(k)))
        if dev > UNITARITY_TOL:
            raise ValueError(f"matrix is not unitary (deviation {dev:.3e})")

    def embedded(self, n_modes: int) -> np.ndarray:
        """Expand to the full registry dimension, identity elsewhere."""
        if max(self.target_modes) >= n_modes:
            raise ValueError("target mode index outside registry")
        full = np.eye(n_modes, dtype=complex)
        idx = np.array(self.target_modes)
        full[np.ix_(idx, idx)] = self.matrix
        return full


@dataclass(frozen=True)
class ElementChain:
    """Elements applied left to right: chain[0] acts first."""

    elements: tuple

    def __iter__(self):
        return iter(self.elements)


@dataclass(frozen=True)
class WaveplateSetting:
    kind: str  # "half" or "quarter"
    angle: float  # fast-axis angle from horizontal, radians

    def __post_init__(self):
        if self.kind not in ("half", "quarter"):
            raise ValueError(f"waveplate kind must be half or quarter, got {self.kind!r}")
        object.__setattr__(self, "angle", float(self.angle) % math.pi)


def beam_splitter(R: float, mode_a: int, mode_b: int) -> ModeUnitary:
    """Two-mode BS with |r|^2 = R; t real, r = i sqrt(R)."""
    if not 0.0 < R < 1.0:
        raise DomainError(f"reflectivity must be in (0,1), got {R}")
    if mode_a == mode_b:
        raise ValueError("beam splitter needs two distinct modes")
    t = math.sqrt(1.0 - R)
    r = 1j * math.sqrt(R)
    return ModeUnitary(np.array([[t, r], [r, t]]), (mode_a, mode_b))


def beam_splitter_on_paths(registry: ModeRegistry, R: float, path_a: str, path_b: str) -> ModeUnitary:
    """A physical BS acts identically on both polarizations of two paths."""
    if not 0.0 < R < 1.0:
        raise DomainError(f"reflectivity must be in (0,1), got {R}")
    if path_a == path_b:
        raise ValueError("beam splitter needs two distinct paths")
    t = math.sqrt(1.0 - R)
    r = 1j * math.sqrt(R)
    ah, av = registry.path_modes(path_a)
    bh, bv = registry.path_modes(path_b)
    modes = (ah, av, bh, bv)
    u = np.eye(4, dtype=complex)
    for i, j in ((0, 2), (1, 3)):  # H with H, V with V
        u[i, i] = t
        u[j, j] = t
        u[i, j] = r
        u[j, i] = r
    return ModeUnitary(u, modes)


def pbs(registry: ModeRegistry, path_a: str, path_b: str) -> ModeUnitary:
    """H transmits (amplitude 1), V swaps paths with reflection phase i."""
    if path_a == path_b:
        raise ValueError("PBS needs two distinct paths")
    ah, av = registry.path_modes(path_a)
    bh, bv = registry.path_modes(path_b)
    modes = (ah, av, bh, bv)
    u = np.zeros((4, 4), dtype=complex)
    u[0, 0] = 1.0  # aH -> aH
    u[2, 2] = 1.0  # bH -> bH
    u[3, 1] = 1j  # aV -> bV
    u[1, 3] = 1j  # bV -> aV
    return ModeUnitary(u, modes)


def _jones(setting: WaveplateSetting) -> np.ndarray:
    c = math.cos(2 * setting.angle)
    s = math.sin(2 * setting.angle)
    if setting.kind == "half":
        return np.array([[c, s], [s, -c]], dtype=complex)
    # quarter wave: fast-axis component unchanged, slow axis retarded by i
    ct = math.cos(setting.angle)
    st = math.sin(setting.angle)
    return np.array(
        [
            [ct * ct + 1j * st * st, (1 - 1j) * st * ct],
            [(1 - 1j) * st * ct, st * st + 1j * ct * ct],
        ]
    )


def waveplate(registry: ModeRegistry, setting: WaveplateSetting, path: str) -> ModeUnitary:
    return ModeUnitary(_jones(setting), registry.path_modes(path))


def hwp(registry: ModeRegistry, angle: float, path: str) -> ModeUnitary:
    return waveplate(registry, WaveplateSetting("half", angle), path)


def qwp(registry: ModeRegistry, angle: float, path: str) -> ModeUnitary:
    return waveplate(registry, WaveplateSetting("quarter", angle), path)


def phase_shift(registry: ModeRegistry, path: str, phi: float) -> ModeUnitary:
    p = np.exp(1j * float(phi))
    return ModeUnitary(np.diag([p, p]), registry.path_modes(path))


def _pbs_split(registry: ModeRegistry, in_path: str, loop_paths: tuple[str, str]) -> ModeUnitary:
    """Entry PBS of the Sagnac: in-H -> C-H, in-V -> i D-V.

    The reverse entries (C, D back into the input arm) only exist to make
    the matrix unitary; the loop arms are required to be empty upstream,
    so they are never exercised.
    """
    c_path, d_path = loop_paths
    ih, iv = registry.path_modes(in_path)
    ch, cv = registry.path_modes(c_path)
    dh, dv = registry.path_modes(d_path)
    modes = (ih, iv, ch, cv, dh, dv)
    u = np.zeros((6, 6), dtype=complex)
    u[2, 0] = 1.0  # in H -> C H
    u[5, 1] = 1j  # in V -> D V (reflection)
    u[0, 2] = 1.0  # unitarity fill
    u[1, 5] = 1j
    u[3, 3] = 1.0  # C V, D H pass through (never populated)
    u[4, 4] = 1.0
    return ModeUnitary(u, modes)


def _exit_reflection(registry: ModeRegistry, d_path: str) -> ModeUnitary:
    """Second PBS reflection the counterclockwise (V) component picks up."""
    dh, dv = registry.path_modes(d_path)
    return ModeUnitary(np.diag([1.0, 1j]).astype(complex), (dh, dv))


def sagnac(
    registry: ModeRegistry,
    alpha: float,
    in_path: str = "2",
    loop_paths: tuple[str, str] = ("C", "D"),
) -> ElementChain:
    """Split-without-recombine Sagnac: C and D are the output arms.

    Composite of the entry PBS split, the intra-loop plates (aggregated
    into phase e^{i 4 alpha} on the C branch), and the exit reflection on
    D. Net action on the occupied modes:

        |1H>_in -> e^{i 4 alpha} |1H>_C      |1V>_in -> -|1V>_D
    """
    if in_path in loop_paths:
        raise ValueError("input arm collides with a loop arm")
    c_path, d_path = loop_paths
    return ElementChain(
        (
            _pbs_split(registry, in_path, loop_paths),
            phase_shift(registry, c_path, 4.0 * alpha),
            _exit_reflection(registry, d_path),
        )
    )


def path_merge_bs(
    registry: ModeRegistry,
    phi: float,
    loop_paths: tuple[str, str] = ("C", "D"),
) -> ElementChain:
    """Phase shift on D followed by a 50/50 BS merging C and D.

    This is the optional analyzer for measuring the path qubit in an
    arbitrary basis. With phi = merge_phase_for_path_basis(phi3) and a
    polarization analyzer behind each output port, a click in port C is
    the m3 = 0 outcome of the path basis B(phi3) and a click in port D is
    m3 = 1; the port probabilities equal the logical Born probabilities
    exactly (see tests for the machine-precision check).
    """
    c_path, d_path = loop_paths
    return ElementChain(
        (
            phase_shift(registry, d_path, phi),
            beam_splitter_on_paths(registry, 0.5, c_path, d_path),
        )
    )


def merge_phase_for_path_basis(phi3: float) -> float:
    """Merge-BS phase that realizes the path basis B(phi3)."""
    return math.pi / 2.0 - phi3


def compose(n_modes: int, *elements) -> ModeUnitary:
    """Single ModeUnitary equal to applying the elements left to right."""
    full = np.eye(n_modes, dtype=complex)
    for el in elements:
        for u in _as_unitaries(el):
            full = u.embedded(n_modes) @ full
    return ModeUnitary(full, tuple(range(n_modes)))


def _as_unitaries(element):
    if isinstance(element, ModeUnitary):
        return (element,)
    if isinstance(element, ElementChain):
        out = []
        for el in element:
            out.extend(_as_unitaries(el))
        return tuple(out)
    raise TypeError(f"not an optical element: {element!r}")


def apply(element, state: PhotonicState) -> PhotonicState:
    """Act on a state by creation-operator substitution.

    Each photon in mode j is rewritten as sum_k U_kj a^dag_k. Occupation
    factorials are handled exactly: a term with occupations n carries
    1/sqrt(prod n_j!) from the source monomial and each output occupation
    m contributes sqrt(prod m_k!).
    """
    n_modes = state.registry.n_modes
    for u in _as_unitaries(element):
        out_terms: dict[tuple[int, ...], complex] = {}
        full = u.embedded(n_modes)
        cols = [np.flatnonzero(np.abs(full[:, j]) > 1e-18) for j in range(n_modes)]
        for occ, amp in state.terms.items():
            pref = amp
            for j, n in enumerate(occ):
                if n > 1:
                    pref /= math.sqrt(math.factorial(n))
            partial = [((0,) * n_modes, pref)]
            for j, n in enumerate(occ):
                for _ in range(n):
                    grown = []
                    for vec, coeff in partial:
                        for k in cols[j]:
                            nv = list(vec)
                            nv[k] += 1
                            grown.append((tuple(nv), coeff * full[k, j]))
                    partial = grown
            for vec, coeff in partial:
                post = 1.0
                for m in vec:
                    if m > 1:
                        post *= math.sqrt(math.factorial(m))
                out_terms[vec] = out_terms.get(vec, 0.0 + 0.0j) + coeff * post
        state = prune(PhotonicState(state.registry, out_terms))
    return state


def element_from_spec(registry: ModeRegistry, spec: dict):
    """Build an element from its JSON description (angles in radians)."""
    if not isinstance(spec, dict) or "type" not in spec:
        raise DomainError(f"element spec needs a 'type' key: {spec!r}")
    kind = spec["type"]
    known = {
        "beam_splitter": {"type", "reflectivity", "paths"},
        "pbs": {"type", "paths"},
        "waveplate": {"type", "kind", "angle", "path"},
        "phase_shift": {"type", "path", "phi"},
        "sagnac": {"type", "alpha", "in_path", "loop_paths"},
        "path_merge_bs": {"type", "phi", "loop_paths"},
    }
    optional = {
        "sagnac": {"in_path", "loop_paths"},
        "path_merge_bs": {"loop_paths"},
    }
    if kind not in known:
        raise DomainError(f"unknown element type {kind!r}")
    extra = set(spec) - known[kind]
    if extra:
        raise DomainError(f"unknown keys {sorted(extra)} for element {kind!r}")
    missing = known[kind] - set(spec) - optional.get(kind, set())
    if missing:
        raise DomainError(f"element {kind!r} needs keys {sorted(missing)}")
    if kind == "beam_splitter":
        a, b = spec["paths"]
        return beam_splitter_on_paths(registry, float(spec["reflectivity"]), a, b)
    if kind == "pbs":
        a, b = spec["paths"]
        return pbs(registry, a, b)
    if kind == "waveplate":
        return waveplate(
            registry, WaveplateSetting(spec["kind"], float(spec["angle"])), spec["path"]
        )
    if kind == "phase_shift":
        return phase_shift(registry, spec["path"], float(spec["phi"]))
    if kind == "sagnac":
        return sagnac(
            registry,
            float(spec["alpha"]),
            in_path=spec.get("in_path", "2"),
            loop_paths=tuple(spec.get("loop_paths", ("C", "D"))),
        )
    return path_merge_bs(
        registry, float(spec["phi"]), loop_paths=tuple(spec.get("loop_paths", ("C", "D")))
    )
