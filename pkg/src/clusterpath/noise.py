"""Partial distinguishability, post-selection, and Poisson count sampling.

The imperfection budget has exactly two knobs:

* indistinguishability p: overlap of the two photons' internal
  wavefunctions. The pair behaves quantum mechanically with weight p and
  as classical distinguishable particles with weight 1 - p. This is a
  binary interfering-versus-orthogonal split, not a spectral model; one
  parameter is all the observables here resolve.
* sagnac_visibility v_s: residual interferometer contrast, applied as
  coherence scaling between the C and D loop arms.

Mixed states are carried as ensembles, plain lists of (weight, state)
pairs with weights summing to the preparation probability. Pure evolution
keeps a single component, so the ideal path never pays for the mixture
machinery.

sample_counts is the only operation touching randomness and takes an
explicit seeded generator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import elements, fock
from .errors import DomainError
from .fock import ModeRegistry, PhotonicState

Ensemble = list[tuple[float, PhotonicState]]


@dataclass(frozen=True)
class NoiseModel:
    indistinguishability: float = 1.0
    sagnac_visibility: float = 1.0

    def __post_init__(self):
        for name in ("indistinguishability", "sagnac_visibility"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must be in [0,1], got {v}")

    @property
    def is_ideal(self) -> bool:
        return self.indistinguishability == 1.0 and self.sagnac_visibility == 1.0


# Values measured for the apparatus being modeled: photon overlap 0.97,
# Sagnac contrast 99.5 percent. The neutral constructor default is the
# ideal model so that noise is always an explicit opt-in.
REFERENCE_NOISE = NoiseModel(indistinguishability=0.97, sagnac_visibility=0.995)


@dataclass(frozen=True)
class DetectionPattern:
    """Required photon count per mode group; groups must not overlap."""

    groups: tuple[tuple[tuple[int, ...], int], ...]

    def __post_init__(self):
        seen = set()
        for modes, count in self.groups:
            if count < 0:
                raise DomainError("required count cannot be negative")
            for m in modes:
                if m in seen:
                    raise DomainError(f"mode {m} appears in two pattern groups")
                seen.add(m)

    def matches(self, occ: tuple[int, ...]) -> bool:
        return all(sum(occ[m] for m in modes) == count for modes, count in self.groups)


def one_photon_per_arm(registry: ModeRegistry, arm_a: str = "1", arm_b: str = "2") -> DetectionPattern:
    return DetectionPattern(
        (
            (registry.path_modes(arm_a), 1),
            (registry.path_modes(arm_b), 1),
        )
    )


def arm_split_patterns(registry: ModeRegistry, arm_a: str, arm_b: str) -> list[DetectionPattern]:
    """Mutually exclusive, exhaustive patterns for two photons over two arms."""
    a = registry.path_modes(arm_a)
    b = registry.path_modes(arm_b)
    return [
        DetectionPattern(((a, 2), (b, 0))),
        DetectionPattern(((a, 1), (b, 1))),
        DetectionPattern(((a, 0), (b, 2))),
    ]


def post_select(state: PhotonicState, pattern: DetectionPattern):
    """Conditional state and success probability; empty state at probability 0."""
    kept = {occ: amp for occ, amp in state.terms.items() if pattern.matches(occ)}
    prob = sum(abs(v) ** 2 for v in kept.values())
    conditional = PhotonicState(state.registry, kept)
    if prob > 1e-24:
        conditional = fock.scale(conditional, 1.0 / np.sqrt(prob))
    return conditional, float(prob)


def post_select_ensemble(ensemble: Ensemble, pattern: DetectionPattern):
    """Post-select every component; returns renormalized ensemble and probability."""
    out: Ensemble = []
    total = 0.0
    for w, s in ensemble:
        cond, p = post_select(s, pattern)
        if w * p > 1e-24:
            out.append((w * p, cond))
            total += w * p
    if total > 0.0:
        out = [(w / total, s) for w, s in out]
    return out, float(total)


def apply_to_ensemble(element, ensemble: Ensemble) -> Ensemble:
    return [(w, elements.apply(element, s)) for w, s in ensemble]


def _classical_pair_mixture(
    registry: ModeRegistry, element, mode_a: int, mode_b: int
) -> Ensemble:
    """Two distinguishable photons routed independently through an element.

    Each photon evolves as a single-particle amplitude; the joint outcome
    distribution is the product of the two single-photon distributions
    (no exchange interference). The result is a mixture of occupation
    basis states.
    """
    singles = []
    for mode in (mode_a, mode_b):
        occ = [0] * registry.n_modes
        occ[mode] = 1
        evolved = elements.apply(element, fock.basis_state(registry, occ))
        dist = {}
        for o, amp in evolved.terms.items():
            k = o.index(1)
            dist[k] = dist.get(k, 0.0) + abs(amp) ** 2
        singles.append(dist)
    mixture: dict[tuple[int, ...], float] = {}
    for k1, p1 in singles[0].items():
        for k2, p2 in singles[1].items():
            occ = [0] * registry.n_modes
            occ[k1] += 1
            occ[k2] += 1
            key = tuple(occ)
            mixture[key] = mixture.get(key, 0.0) + p1 * p2
    return [
        (p, fock.basis_state(registry, occ)) for occ, p in sorted(mixture.items())
    ]


def pair_through_element(
    registry: ModeRegistry,
    element,
    input_modes: tuple[int, int],
    indistinguishability: float = 1.0,
) -> Ensemble:
    """Photon pair through an element with partial distinguishability.

    Weight p evolves the two-photon amplitude exactly; weight 1 - p routes
    the photons as classical particles. Input modes must be distinct (one
    photon each).
    """
    p = float(indistinguishability)
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"indistinguishability must be in [0,1], got {p}")
    ma, mb = input_modes
    if ma == mb:
        raise ValueError("pair input needs two distinct modes")
    out: Ensemble = []
    if p > 0.0:
        occ = [0] * registry.n_modes
        occ[ma] += 1
        occ[mb] += 1
        quantum = elements.apply(element, fock.basis_state(registry, occ))
        out.append((p, quantum))
    if p < 1.0:
        out.extend(
            (w * (1.0 - p), s)
            for w, s in _classical_pair_mixture(registry, element, ma, mb)
        )
    return out


def dephase_by_distinguishability(state: PhotonicState, p: float) -> np.ndarray:
    """Polarization density matrix of a post-selected pair, coherence-scaled.

    The state must have exactly one photon in arm "1" and one in arm "2".
    Returns a 4x4 matrix in the (HH, HV, VH, VV) basis where the first
    letter is arm 1. Distinguishability only damps the exchange coherence,
    the |HV><VH| pair, by the factor p; same-photon coherences survive.
    For the beam-splitter pair source the p = 0 diagonal equals the
    classical routing probabilities, so this closed form agrees with the
    ensemble construction in pair_through_element.
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"indistinguishability must be in [0,1], got {p}")
    psi = polarization_vector(state)
    rho = np.outer(psi, psi.conj())
    rho[1, 2] *= p
    rho[2, 1] *= p
    return rho


def polarization_vector(state: PhotonicState, arm_a: str = "1", arm_b: str = "2") -> np.ndarray:
    """Amplitudes on (HH, HV, VH, VV) for a one-photon-per-arm state."""
    reg = state.registry
    ah, av = reg.path_modes(arm_a)
    bh, bv = reg.path_modes(arm_b)
    vec = np.zeros(4, dtype=complex)
    basis = [(ah, bh), (ah, bv), (av, bh), (av, bv)]
    for occ, amp in state.terms.items():
        where = tuple(m for m, n in enumerate(occ) for _ in range(n))
        placed = False
        for i, (x, y) in enumerate(basis):
            if sorted(where) == sorted((x, y)):
                vec[i] = amp
                placed = True
                break
        if not placed:
            raise DomainError(
                f"state is not one photon per arm ({arm_a!r}, {arm_b!r}): occupation {occ}"
            )
    return vec


def polarization_density_matrix(ensemble: Ensemble, arm_a: str = "1", arm_b: str = "2") -> np.ndarray:
    """Weighted 4x4 polarization density matrix of an ensemble."""
    rho = np.zeros((4, 4), dtype=complex)
    total = 0.0
    for w, s in ensemble:
        v = polarization_vector(s, arm_a, arm_b)
        rho += w * np.outer(v, v.conj())
        total += w
    if total <= 0.0:
        raise DomainError("ensemble has zero total weight")
    return rho / total


def sagnac_dephase(
    ensemble: Ensemble, sagnac_visibility: float, registry: ModeRegistry,
    loop_paths: tuple[str, str] = ("C", "D"),
) -> Ensemble:
    """Scale C-D coherence of every component by v_s.

    Each pure component splits into an interfering part (weight v_s) and
    the two which-arm projections (combined weight 1 - v_s), which leaves
    every diagonal occupation probability unchanged and multiplies C-D
    cross terms of the density matrix by v_s.
    """
    v = float(sagnac_visibility)
    if not 0.0 <= v <= 1.0:
        raise DomainError(f"sagnac_visibility must be in [0,1], got {v}")
    if v == 1.0:
        return list(ensemble)
    c_modes = set(registry.path_modes(loop_paths[0]))
    d_modes = set(registry.path_modes(loop_paths[1]))
    out: Ensemble = []
    for w, s in ensemble:
        if v > 0.0:
            out.append((w * v, s))
        for arm_modes in (c_modes, d_modes):
            kept = {
                occ: amp
                for occ, amp in s.terms.items()
                if any(occ[m] for m in arm_modes)
            }
            pw = sum(abs(a) ** 2 for a in kept.values())
            if pw > 1e-24:
                comp = fock.scale(PhotonicState(registry, kept), 1.0 / np.sqrt(pw))
                out.append((w * (1.0 - v) * pw, comp))
    return out


def hom_visibility(R: float, indistinguishability: float = 1.0) -> float:
    """Simulated Hong-Ou-Mandel visibility of a same-polarization pair.

    Coincidence probability (one photon per output arm) is computed for
    the actual pair and for fully distinguishable photons; visibility is
    (P_classical - P_pair) / P_classical.
    """
    reg = fock.make_registry(["1", "2"])
    bs = elements.beam_splitter_on_paths(reg, R, "1", "2")
    pat = one_photon_per_arm(reg)
    ma = reg.index("1", "H")
    mb = reg.index("2", "H")
    _, p_pair = post_select_ensemble(
        pair_through_element(reg, bs, (ma, mb), indistinguishability), pat
    )
    _, p_classical = post_select_ensemble(
        pair_through_element(reg, bs, (ma, mb), 0.0), pat
    )
    return float((p_classical - p_pair) / p_classical)


def sample_counts(probability: float, rate: float, integration: float, rng) -> int:
    """Poisson draw with mean probability * rate * integration."""
    if not 0.0 <= probability <= 1.0:
        raise DomainError(f"probability must be in [0,1], got {probability}")
    if rate < 0.0 or integration < 0.0:
        raise DomainError("rate and integration must be non-negative")
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    mean = probability * rate * integration
    return int(rng.poisson(mean))
