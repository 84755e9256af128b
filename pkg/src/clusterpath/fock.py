"""Sparse Fock representation of few-photon states over labeled optical modes.

A mode is a (path, polarization) pair. The registry fixes the dense index
order once: paths in the order given, H before V within each path. All
fixtures and serialized states depend on that ordering, so it must not
change.

States are sparse maps from occupation vectors to complex amplitudes.
Occupation basis kets are orthonormal and creation operators satisfy
a^dag |n> = sqrt(n+1) |n+1>, so intermediate bunched terms (two photons
in one mode after a beam splitter) pick up exact sqrt(2) factors.

All operations are pure: they return new states and never mutate their
inputs, so values can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

POLARIZATIONS = ("H", "V")

# Amplitudes below this magnitude are dropped after every operation. The
# threshold sits far below every physical tolerance in the test suite and
# only exists to stop rounding dust from growing the term maps.
PRUNE_TOLERANCE = 1e-15


@dataclass(frozen=True)
class ModeRegistry:
    """Assigns every (path, polarization) pair a stable dense index."""

    paths: tuple[str, ...]

    def __post_init__(self):
        if len(self.paths) == 0:
            raise ValueError("registry needs at least one path")
        if len(set(self.paths)) != len(self.paths):
            raise ValueError(f"duplicate path identifier in {self.paths}")

    @property
    def n_modes(self) -> int:
        return 2 * len(self.paths)

    def index(self, path: str, pol: str) -> int:
        try:
            p = self.paths.index(path)
        except ValueError:
            raise KeyError(f"unknown path {path!r}, registry has {self.paths}")
        if pol not in POLARIZATIONS:
            raise KeyError(f"polarization must be H or V, got {pol!r}")
        return 2 * p + (0 if pol == "H" else 1)

    def label(self, mode: int) -> tuple[str, str]:
        if not 0 <= mode < self.n_modes:
            raise DomainError(f"mode index {mode} out of range 0..{self.n_modes - 1}")
        return self.paths[mode // 2], POLARIZATIONS[mode % 2]

    def path_modes(self, path: str) -> tuple[int, int]:
        """(H index, V index) for one path."""
        return self.index(path, "H"), self.index(path, "V")


@dataclass
class PhotonicState:
    """Sparse map occupation vector -> complex amplitude."""

    registry: ModeRegistry
    terms: dict[tuple[int, ...], complex] = field(default_factory=dict)

    def copy(self) -> "PhotonicState":
        return PhotonicState(self.registry, dict(self.terms))


def make_registry(paths) -> ModeRegistry:
    return ModeRegistry(tuple(paths))


def basis_state(registry: ModeRegistry, occupations) -> PhotonicState:
    occ = tuple(int(n) for n in occupations)
    if len(occ) != registry.n_modes:
        raise DomainError(
            f"occupation length {len(occ)} does not match {registry.n_modes} modes"
        )
    if any(n < 0 for n in occ):
        raise DomainError(f"negative occupation in {occ}")
    return PhotonicState(registry, {occ: 1.0 + 0.0j})


def single_photon(registry: ModeRegistry, path: str, pol: str) -> PhotonicState:
    occ = [0] * registry.n_modes
    occ[registry.index(path, pol)] = 1
    return basis_state(registry, occ)


def two_photon(registry: ModeRegistry, mode_a: tuple[str, str], mode_b: tuple[str, str]) -> PhotonicState:
    """a^dag_a a^dag_b |vac>; same-mode input gives the sqrt(2) bunching amp."""
    occ = [0] * registry.n_modes
    occ[registry.index(*mode_a)] += 1
    occ[registry.index(*mode_b)] += 1
    amp = math.sqrt(2.0) if mode_a == mode_b else 1.0
    state = basis_state(registry, occ)
    return scale(state, amp)


def _check_same_registry(a: PhotonicState, b: PhotonicState):
    if a.registry != b.registry:
        raise DomainError("states live on different mode registries")


def inner_product(a: PhotonicState, b: PhotonicState) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    _check_same_registry(a, b)
    small, big = (a.terms, b.terms) if len(a.terms) <= len(b.terms) else (b.terms, a.terms)
    acc = 0.0 + 0.0j
    if small is a.terms:
        for occ, amp in a.terms.items():
            other = b.terms.get(occ)
            if other is not None:
                acc += np.conj(amp) * other
    else:
        for occ, amp in b.terms.items():
            other = a.terms.get(occ)
            if other is not None:
                acc += np.conj(other) * amp
    return complex(acc)


def norm(s: PhotonicState) -> float:
    return math.sqrt(sum(abs(v) ** 2 for v in s.terms.values()))


def prune(s: PhotonicState, tolerance: float = PRUNE_TOLERANCE) -> PhotonicState:
    return PhotonicState(
        s.registry, {k: v for k, v in s.terms.items() if abs(v) >= tolerance}
    )


def scale(s: PhotonicState, c) -> PhotonicState:
    c = complex(c)
    return prune(PhotonicState(s.registry, {k: v * c for k, v in s.terms.items()}))


def add(a: PhotonicState, b: PhotonicState) -> PhotonicState:
    _check_same_registry(a, b)
    out = dict(a.terms)
    for occ, amp in b.terms.items():
        out[occ] = out.get(occ, 0.0 + 0.0j) + amp
    return prune(PhotonicState(a.registry, out))


def normalize(s: PhotonicState) -> PhotonicState:
    n = norm(s)
    if n <= 1e-12:
        raise DomainError("cannot normalize a (near-)zero state")
    return scale(s, 1.0 / n)


def total_photons(s: PhotonicState) -> int:
    """Photon number of the support; error if the state mixes sectors."""
    counts = {sum(occ) for occ in s.terms}
    if len(counts) > 1:
        raise DomainError(f"state spans several photon-number sectors: {sorted(counts)}")
    return counts.pop() if counts else 0


def fidelity(a: PhotonicState, b: PhotonicState) -> float:
    """|<a|b>|^2 for normalized inputs."""
    return abs(inner_product(a, b)) ** 2


def to_json_dict(s: PhotonicState) -> dict:
    """Stable JSON form: modes listed in registry order, terms sorted."""
    modes = [list(s.registry.label(m)) for m in range(s.registry.n_modes)]
    terms = [
        {"occ": list(occ), "re": float(np.real(amp)), "im": float(np.imag(amp))}
        for occ, amp in sorted(s.terms.items())
    ]
    return {"modes": modes, "terms": terms}


def from_json_dict(d: dict) -> PhotonicState:
    paths = []
    for path, pol in d["modes"]:
        if pol == "H":
            paths.append(path)
    reg = make_registry(paths)
    expected = [list(reg.label(m)) for m in range(reg.n_modes)]
    if expected != [list(m) for m in d["modes"]]:
        raise ValueError("mode list is not in registry order (paths, H before V)")
    terms = {}
    for t in d["terms"]:
        occ = tuple(int(n) for n in t["occ"])
        if len(occ) != reg.n_modes:
            raise ValueError(f"occupation length {len(occ)} does not match modes")
        terms[occ] = complex(t["re"], t["im"])
    return prune(PhotonicState(reg, terms))
