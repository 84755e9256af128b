"""Declarative assembly of the full experiment, alpha sweeps, and the
closed-form fringe oracle.

The modeled chain is

    pair source |1H>_1 |1V>_2
      -> BS(R), post-selected on one photon per arm
      -> phase-correction waveplates ("cluster" applies HWP(45) on arm 2,
         "singlet" leaves the raw BS output)
      -> HWP(22.5) on arm 2
      -> Sagnac(alpha) splitting arm 2 over loop arms C and D
      -> projectors B1(phi1) x B2(phi2) x B3(phi3) on the logical view.

Noise enters as the pair indistinguishability p (at the BS) and the loop
contrast v_s (after the Sagnac); both leave the post-selection
probability untouched. Every intermediate state is kept as a checkpoint
ensemble so tests and the CLI can anchor to the narrative states (Bell
pair, two-qubit cluster, the four-term expanded state).

Coincidence probabilities come from the logical projector, which is
equivalent to the photonic projection because the relabeling is an
isometry on the encoded subspace; the optional path_merge_bs element in
elements.py realizes the same projector physically.

Fringe oracle: Y(alpha) = Y0 (1 + (1 - 2 a^2) cos(4 alpha + phi2)
+ 2 a sqrt(1 - a^2) sin(4 alpha + phi2) sin(phi1)) with a = a_from_R(R).
The noise-extended form scales the cosine (single-photon interference in
the loop) by v_s and the sine (two-photon term) by p * v_s. The absolute
per-pair coincidence probability uses Y0 = post_selection_probability/8.

Sweeps may run in parallel; per-point Poisson seeds are spawned from the
root seed by grid index, so serial and parallel execution give identical
bytes.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import elements, encoding, fock, noise
from .errors import AnalysisError, ConfigError, DomainError
from .mbqc import QubitState, b_basis_ket

SPEC_VERSION = 1
STANDARD_PATHS = ("1", "2", "C", "D")


def make_standard_registry() -> fock.ModeRegistry:
    return fock.make_registry(STANDARD_PATHS)


# ---------------------------------------------------------------------------
# configuration


@dataclass
class ProjectorSpec:
    phi1: float = 0.0
    phi2: float = 0.0
    phi3: float = 0.0
    m1: int = 0
    m2: int = 0
    m3: int = 1
    feed_forward: bool = False

    def __post_init__(self):
        for name in ("m1", "m2", "m3"):
            if getattr(self, name) not in (0, 1):
                raise ConfigError(f"projector.{name} must be 0 or 1")

    def effective_phi2(self) -> float:
        if self.feed_forward and self.m1 == 1:
            return -self.phi2
        return self.phi2


@dataclass
class CountingSpec:
    mode: str = "infinite"  # "infinite" or "sampled"
    pairs_per_second: float = 1.0e5
    integration_seconds: float = 1.0

    def __post_init__(self):
        if self.mode not in ("infinite", "sampled"):
            raise ConfigError(f"counting.mode must be infinite or sampled, got {self.mode!r}")
        if self.pairs_per_second <= 0 or self.integration_seconds <= 0:
            raise ConfigError("counting rate and integration must be positive")


@dataclass
class TomographySpec:
    shots: int | None = 10000
    estimator: str = "both"  # "linear", "mle", "both"

    def __post_init__(self):
        if self.shots is not None and self.shots <= 0:
            raise ConfigError("tomography.shots must be positive or null")
        if self.estimator not in ("linear", "mle", "both"):
            raise ConfigError(f"unknown estimator {self.estimator!r}")


@dataclass
class SweepSpec:
    parallel: bool = False


@dataclass
class ExperimentConfig:
    spec_version: int = SPEC_VERSION
    bs_reflectivity: float = 0.5
    phase_config: str = "cluster"  # or "singlet"
    alpha: float = 0.0
    alpha_grid: list | None = None
    basis_grid: list | None = None
    projector: ProjectorSpec = field(default_factory=ProjectorSpec)
    noise: noise.NoiseModel = field(default_factory=noise.NoiseModel)
    counting: CountingSpec = field(default_factory=CountingSpec)
    tomography: TomographySpec = field(default_factory=TomographySpec)
    sweep: SweepSpec = field(default_factory=SweepSpec)
    seed: int = 12345

    def __post_init__(self):
        if self.spec_version != SPEC_VERSION:
            raise ConfigError(f"unsupported spec_version {self.spec_version}")
        if not 0.0 < self.bs_reflectivity < 1.0:
            raise ConfigError(f"bs_reflectivity must be in (0,1), got {self.bs_reflectivity}")
        if self.phase_config not in ("cluster", "singlet"):
            raise ConfigError(f"phase_config must be cluster or singlet, got {self.phase_config!r}")
        if not np.isfinite(self.alpha):
            raise ConfigError("alpha must be finite")
        if self.alpha_grid is not None:
            grid = [float(a) for a in self.alpha_grid]
            if not all(np.isfinite(grid)):
                raise ConfigError("alpha_grid entries must be finite")
            if grid != sorted(grid):
                raise ConfigError("alpha_grid must be sorted ascending")
            self.alpha_grid = grid
        if self.basis_grid is not None:
            out = []
            for pair in self.basis_grid:
                if len(pair) != 2:
                    raise ConfigError("basis_grid entries must be [phi1, phi2] pairs")
                out.append((float(pair[0]), float(pair[1])))
            self.basis_grid = out


_SECTION_KEYS = {
    "projector": {"phi1", "phi2", "phi3", "m1", "m2", "m3", "feed_forward"},
    "noise": {"indistinguishability", "sagnac_visibility"},
    "counting": {"mode", "pairs_per_second", "integration_seconds"},
    "tomography": {"shots", "estimator"},
    "sweep": {"parallel"},
}
_TOP_KEYS = {
    "spec_version",
    "bs_reflectivity",
    "phase_config",
    "alpha",
    "alpha_grid",
    "basis_grid",
    "seed",
} | set(_SECTION_KEYS)


def config_from_dict(d: dict) -> ExperimentConfig:
    if not isinstance(d, dict):
        raise ConfigError(f"config must be a JSON object, got {type(d).__name__}")
    unknown = set(d) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kwargs = {}
    for key, value in d.items():
        if key in _SECTION_KEYS:
            if not isinstance(value, dict):
                raise ConfigError(f"config section {key!r} must be an object")
            bad = set(value) - _SECTION_KEYS[key]
            if bad:
                raise ConfigError(f"unknown keys in {key!r}: {sorted(bad)}")
            cls = {
                "projector": ProjectorSpec,
                "noise": noise.NoiseModel,
                "counting": CountingSpec,
                "tomography": TomographySpec,
                "sweep": SweepSpec,
            }[key]
            try:
                kwargs[key] = cls(**value)
            except (DomainError, TypeError) as exc:
                raise ConfigError(f"invalid {key} section: {exc}") from exc
        elif key == "alpha_grid" and isinstance(value, dict):
            bad = set(value) - {"start", "stop", "num"}
            if bad:
                raise ConfigError(f"unknown alpha_grid keys: {sorted(bad)}")
            try:
                num = int(value["num"])
                grid = np.linspace(float(value["start"]), float(value["stop"]), num)
            except (KeyError, ValueError) as exc:
                raise ConfigError(f"bad alpha_grid range: {exc}") from exc
            kwargs[key] = [float(a) for a in grid]
        else:
            kwargs[key] = value
    try:
        return ExperimentConfig(**kwargs)
    except (TypeError, DomainError) as exc:
        raise ConfigError(str(exc)) from exc


def config_to_dict(config: ExperimentConfig) -> dict:
    return {
        "spec_version": config.spec_version,
        "bs_reflectivity": config.bs_reflectivity,
        "phase_config": config.phase_config,
        "alpha": config.alpha,
        "alpha_grid": config.alpha_grid,
        "basis_grid": [list(p) for p in config.basis_grid] if config.basis_grid else None,
        "projector": {
            "phi1": config.projector.phi1,
            "phi2": config.projector.phi2,
            "phi3": config.projector.phi3,
            "m1": config.projector.m1,
            "m2": config.projector.m2,
            "m3": config.projector.m3,
            "feed_forward": config.projector.feed_forward,
        },
        "noise": {
            "indistinguishability": config.noise.indistinguishability,
            "sagnac_visibility": config.noise.sagnac_visibility,
        },
        "counting": {
            "mode": config.counting.mode,
            "pairs_per_second": config.counting.pairs_per_second,
            "integration_seconds": config.counting.integration_seconds,
        },
        "tomography": {
            "shots": config.tomography.shots,
            "estimator": config.tomography.estimator,
        },
        "sweep": {"parallel": config.sweep.parallel},
        "seed": config.seed,
    }


def load_config(path: str | None, overrides=()) -> ExperimentConfig:
    """Config file plus key=value overrides (dotted paths, JSON values)."""
    if path is None:
        data: dict = {}
    else:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if "spec_version" not in data:
            raise ConfigError("config file must declare spec_version")
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not KEY=VALUE")
        key, raw = item.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = data
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {key!r} descends into a non-object")
        node[parts[-1]] = value
    return config_from_dict(data)


# ---------------------------------------------------------------------------
# closed forms


def a_from_R(R: float) -> float:
    """Positive root of a^2 = (1-R)^2 / ((1-R)^2 + R^2).

    Direct evaluation gives a(0.59) = 0.570657; the value 0.567 sometimes
    quoted alongside this relation does not satisfy it (third-decimal
    inconsistency) and is recorded by the tests as a known divergence.
    """
    if not 0.0 < R < 1.0:
        raise DomainError(f"reflectivity must be in (0,1), got {R}")
    return (1.0 - R) / math.sqrt((1.0 - R) ** 2 + R**2)


def post_selection_probability(R: float) -> float:
    if not 0.0 < R < 1.0:
        raise DomainError(f"reflectivity must be in (0,1), got {R}")
    return (1.0 - R) ** 2 + R**2


def fringe_oracle(alpha, phi1: float, phi2: float, a: float, Y0: float):
    """Y(alpha) exactly as the closed form states it."""
    if not 0.0 < a < 1.0:
        raise DomainError(f"a must be in (0,1), got {a}")
    if Y0 <= 0.0:
        raise DomainError(f"Y0 must be positive, got {Y0}")
    alpha = np.asarray(alpha, dtype=float)
    b2 = 1.0 - a * a
    out = Y0 * (
        1.0
        + (1.0 - 2.0 * a * a) * np.cos(4.0 * alpha + phi2)
        + 2.0 * a * math.sqrt(b2) * np.sin(4.0 * alpha + phi2) * math.sin(phi1)
    )
    return float(out) if out.ndim == 0 else out


def fringe_oracle_noisy(
    alpha, phi1: float, phi2: float, a: float, Y0: float,
    indistinguishability: float = 1.0, sagnac_visibility: float = 1.0,
):
    """Noise-extended fringe: v_s scales the cosine term (one-photon loop
    interference), p * v_s scales the sine term (two-photon coherence)."""
    if not 0.0 < a < 1.0:
        raise DomainError(f"a must be in (0,1), got {a}")
    if Y0 <= 0.0:
        raise DomainError(f"Y0 must be positive, got {Y0}")
    p = indistinguishability
    vs = sagnac_visibility
    alpha = np.asarray(alpha, dtype=float)
    b2 = 1.0 - a * a
    out = Y0 * (
        1.0
        + vs * (1.0 - 2.0 * a * a) * np.cos(4.0 * alpha + phi2)
        + p * vs * 2.0 * a * math.sqrt(b2) * np.sin(4.0 * alpha + phi2) * math.sin(phi1)
    )
    return float(out) if out.ndim == 0 else out


def projector_effective_angles(proj: ProjectorSpec) -> tuple[float, float]:
    """Reduce an arbitrary projector branch to the canonical (+,+,minus)
    form of the fringe formula via B(phi) minus = B(phi + pi) plus."""
    phi1 = proj.phi1 + math.pi * proj.m1
    phi2 = (
        proj.effective_phi2()
        + math.pi * proj.m2
        + proj.phi3
        + math.pi * (1 - proj.m3)
    )
    return phi1, phi2


def expected_coincidence_probability(config: ExperimentConfig, alpha: float) -> float:
    """Closed-form absolute per-pair coincidence probability."""
    if config.phase_config != "cluster":
        raise ConfigError("the fringe closed form holds for the cluster phase configuration")
    a = a_from_R(config.bs_reflectivity)
    y0 = post_selection_probability(config.bs_reflectivity) / 8.0
    phi1, phi2 = projector_effective_angles(config.projector)
    return float(
        fringe_oracle_noisy(
            alpha, phi1, phi2, a, y0,
            config.noise.indistinguishability, config.noise.sagnac_visibility,
        )
    )


# ---------------------------------------------------------------------------
# fixture states


def eq2_state(registry: fock.ModeRegistry) -> fock.PhotonicState:
    """The ideal four-term expanded state at R = 1/2, alpha = 0:
    (|1H>_1|1H>_C - |1H>_1|1V>_D - |1V>_1|1H>_C - |1V>_1|1V>_D)/2."""
    terms = [
        ((("1", "H"), ("C", "H")), 0.5),
        ((("1", "H"), ("D", "V")), -0.5),
        ((("1", "V"), ("C", "H")), -0.5),
        ((("1", "V"), ("D", "V")), -0.5),
    ]
    state = fock.PhotonicState(registry, {})
    for (m1, m2), amp in terms:
        occ = [0] * registry.n_modes
        occ[registry.index(*m1)] += 1
        occ[registry.index(*m2)] += 1
        state.terms[tuple(occ)] = complex(amp)
    return state


def eq1_state() -> QubitState:
    """Logical image of eq2_state: (|000> + |100> - |011> + |111>)/2."""
    amps = np.zeros(8, dtype=complex)
    amps[0b000] = 0.5
    amps[0b100] = 0.5
    amps[0b011] = -0.5
    amps[0b111] = 0.5
    return QubitState(amps)


def two_qubit_cluster_state() -> QubitState:
    """(|0+> + |1->)/sqrt(2)."""
    return QubitState(np.array([0.5, 0.5, 0.5, -0.5], dtype=complex))


def phi_plus_state() -> np.ndarray:
    return np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / math.sqrt(2.0)


def singlet_state() -> np.ndarray:
    return np.array([0.0, 1.0, -1.0, 0.0], dtype=complex) / math.sqrt(2.0)


def ideal_pair_state(R: float, phase_config: str = "singlet") -> np.ndarray:
    """Noise-free pair state after the phase-correction plates, in the
    (HH, HV, VH, VV) basis. "singlet" is the raw BS output a|HV> - b|VH>;
    "cluster" is the corrected a|HH> - b|VV>."""
    a = a_from_R(R)
    b = math.sqrt(1.0 - a * a)
    if phase_config == "singlet":
        return np.array([0.0, a, -b, 0.0], dtype=complex)
    if phase_config == "cluster":
        return np.array([a, 0.0, 0.0, -b], dtype=complex)
    raise DomainError(f"unknown phase_config {phase_config!r}")


def psi_prime_state(R: float = 0.59) -> np.ndarray:
    """Post-selected pair state of the unbalanced BS in the (HH, HV, VH, VV)
    basis: a |HV> - b |VH>. The coefficients usually quoted for this state
    (0.57, 0.82) are the magnitudes; the relative sign is physical and
    fixed by the element conventions."""
    a = a_from_R(R)
    b = math.sqrt(1.0 - a * a)
    return np.array([0.0, a, -b, 0.0], dtype=complex)


def ideal_logical_state(alpha: float, R: float) -> QubitState:
    """Noise-free logical pipeline output at arbitrary alpha and R:
    (a e^{i4a}|111> + a|100> - b e^{i4a}|011> + b|000>)/sqrt(2)."""
    a = a_from_R(R)
    b = math.sqrt(1.0 - a * a)
    phase = np.exp(1j * 4.0 * alpha)
    amps = np.zeros(8, dtype=complex)
    amps[0b111] = a * phase
    amps[0b100] = a
    amps[0b011] = -b * phase
    amps[0b000] = b
    return QubitState(amps / math.sqrt(2.0))


# ---------------------------------------------------------------------------
# execution


@dataclass
class PipelineResult:
    alpha: float
    registry: fock.ModeRegistry
    checkpoints: dict
    post_selection_probability: float
    logical: list
    projector_probability: float
    coincidence_probability: float

    def logical_pure(self) -> QubitState:
        if len(self.logical) != 1:
            raise ValueError("logical state is a mixture, not a pure state")
        return self.logical[0][1]


def logical_projector_ket(proj: ProjectorSpec) -> np.ndarray:
    k1 = b_basis_ket(proj.phi1, proj.m1)
    k2 = b_basis_ket(proj.effective_phi2(), proj.m2)
    k3 = b_basis_ket(proj.phi3, proj.m3)
    return np.kron(np.kron(k1, k2), k3)


def run_pipeline(config: ExperimentConfig, alpha: float | None = None) -> PipelineResult:
    """Execute the chain, keeping every checkpoint ensemble.

    Checkpoints: source, post_selected_pair, bell_pair (after the phase
    correction plates), cluster_2q (after HWP 22.5), sagnac_out, final
    (after loop-contrast dephasing).
    """
    if alpha is None:
        alpha = config.alpha
    reg = make_standard_registry()
    R = config.bs_reflectivity
    p = config.noise.indistinguishability
    vs = config.noise.sagnac_visibility

    checkpoints: dict[str, noise.Ensemble] = {}
    source = fock.two_photon(reg, ("1", "H"), ("2", "V"))
    checkpoints["source"] = [(1.0, source)]

    bs = elements.beam_splitter_on_paths(reg, R, "1", "2")
    ens = noise.pair_through_element(
        reg, bs, (reg.index("1", "H"), reg.index("2", "V")), p
    )
    ens, post_prob = noise.post_select_ensemble(ens, noise.one_photon_per_arm(reg))
    checkpoints["post_selected_pair"] = ens

    if config.phase_config == "cluster":
        ens = noise.apply_to_ensemble(elements.hwp(reg, math.pi / 4.0, "2"), ens)
    checkpoints["bell_pair"] = ens

    ens = noise.apply_to_ensemble(elements.hwp(reg, math.pi / 8.0, "2"), ens)
    checkpoints["cluster_2q"] = ens

    ens = noise.apply_to_ensemble(elements.sagnac(reg, alpha, "2", ("C", "D")), ens)
    checkpoints["sagnac_out"] = ens

    ens = noise.sagnac_dephase(ens, vs, reg, ("C", "D"))
    checkpoints["final"] = ens

    emap = encoding.cluster_with_path_map()
    logical = [(w, encoding.to_logical(s, emap)) for w, s in ens]
    pket = logical_projector_ket(config.projector)
    proj_prob = float(
        sum(w * abs(np.vdot(pket, q.amps)) ** 2 for w, q in logical)
    )
    return PipelineResult(
        alpha=float(alpha),
        registry=reg,
        checkpoints=checkpoints,
        post_selection_probability=float(post_prob),
        logical=logical,
        projector_probability=proj_prob,
        coincidence_probability=float(post_prob * proj_prob),
    )


@dataclass
class FringeFit:
    constant: float
    cos_amp: float
    sin_amp: float

    @property
    def amplitude(self) -> float:
        return math.hypot(self.cos_amp, self.sin_amp)

    @property
    def phase(self) -> float:
        """psi with fit = constant + amplitude * sin(4 alpha + psi)."""
        return math.atan2(self.cos_amp, self.sin_amp)


@dataclass
class FringeResult:
    alphas: np.ndarray
    expected: np.ndarray
    oracle: np.ndarray
    counts: np.ndarray | None
    fit: FringeFit
    phase_reference: float
    phase_offset: float

    def to_csv(self) -> str:
        lines = []
        if self.counts is None:
            lines.append("alpha_rad,expected_prob,oracle_prob")
            for a, e, o in zip(self.alphas, self.expected, self.oracle):
                lines.append(f"{a:.12e},{e:.12e},{o:.12e}")
        else:
            lines.append("alpha_rad,expected_prob,oracle_prob,counts")
            for a, e, o, c in zip(self.alphas, self.expected, self.oracle, self.counts):
                lines.append(f"{a:.12e},{e:.12e},{o:.12e},{int(c)}")
        return "\n".join(lines) + "\n"


def wrap_angle(x: float) -> float:
    """Wrap to (-pi, pi]."""
    out = math.fmod(x + math.pi, 2.0 * math.pi)
    if out <= 0.0:
        out += 2.0 * math.pi
    return out - math.pi


def fit_fringe(alphas, values) -> FringeFit:
    """Least-squares fit of constant + A cos(4a) + B sin(4a).

    The frequency is fixed at 4 alpha by the loop phase law; fitting it
    would only mask bugs.
    """
    alphas = np.asarray(alphas, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(np.unique(alphas)) < 3:
        raise AnalysisError("fringe fit needs at least 3 distinct alpha points")
    design = np.column_stack(
        [np.ones_like(alphas), np.cos(4.0 * alphas), np.sin(4.0 * alphas)]
    )
    if np.linalg.matrix_rank(design) < 3:
        raise AnalysisError("alpha grid aliases the 4-alpha fringe; fit underdetermined")
    coeff, *_ = np.linalg.lstsq(design, values, rcond=None)
    return FringeFit(constant=float(coeff[0]), cos_amp=float(coeff[1]), sin_amp=float(coeff[2]))


def phase_offset_closed_form(R: float, phi1: float) -> float:
    """Fringe phase offset relative to sin(4 alpha + phi2):
    atan2(1 - 2 a^2, 2 a sqrt(1 - a^2) sin(phi1))."""
    a = a_from_R(R)
    return math.atan2(1.0 - 2.0 * a * a, 2.0 * a * math.sqrt(1.0 - a * a) * math.sin(phi1))


def sweep_alpha(config: ExperimentConfig) -> FringeResult:
    """Run the pipeline over the alpha grid and fit the fringe.

    Sampled counts use per-point generators spawned from the seed by grid
    index, so parallel and serial execution are byte-identical.
    """
    if config.alpha_grid is None:
        raise ConfigError("sweep needs an alpha_grid")
    if config.phase_config != "cluster":
        raise ConfigError("the fringe closed form holds for the cluster phase configuration")
    grid = np.asarray(config.alpha_grid, dtype=float)
    sampled = config.counting.mode == "sampled"
    children = np.random.SeedSequence(config.seed).spawn(len(grid)) if sampled else None

    def point(i: int):
        result = run_pipeline(config, alpha=grid[i])
        expected = result.coincidence_probability
        oracle = expected_coincidence_probability(config, grid[i])
        count = None
        if sampled:
            count = noise.sample_counts(
                expected,
                config.counting.pairs_per_second,
                config.counting.integration_seconds,
                np.random.default_rng(children[i]),
            )
        return expected, oracle, count

    if config.sweep.parallel and len(grid) > 1:
        with ThreadPoolExecutor(max_workers=min(8, len(grid))) as pool:
            rows = list(pool.map(point, range(len(grid))))
    else:
        rows = [point(i) for i in range(len(grid))]

    expected = np.array([r[0] for r in rows])
    oracle = np.array([r[1] for r in rows])
    counts = np.array([r[2] for r in rows], dtype=int) if sampled else None
    fit = fit_fringe(grid, counts if sampled else expected)
    _, phi2_eff = projector_effective_angles(config.projector)
    offset = wrap_angle(fit.phase - phi2_eff)
    return FringeResult(
        alphas=grid,
        expected=expected,
        oracle=oracle,
        counts=counts,
        fit=fit,
        phase_reference=phi2_eff,
        phase_offset=offset,
    )


# ---------------------------------------------------------------------------
# headline-number consistency demo


def fidelity_consistency_demo(R: float = 0.59, target_fidelity: float = 0.929) -> dict:
    """Synthetic mixture that reproduces the quoted fidelity pair.

    rho = q |psi'><psi'| + (1 - q) diag(a^2, b^2) on the {HV, VH} block,
    with q chosen so the fidelity against |psi'> equals target_fidelity
    exactly. The fidelity against the singlet then follows with no free
    parameters. This is an arithmetic consistency demonstration on a
    constructed state, not a reconstruction of unpublished data, and no
    extra noise channels are invented to force it.
    """
    from . import tomography

    a = a_from_R(R)
    b = math.sqrt(1.0 - a * a)
    psi = psi_prime_state(R)
    diag_mix = np.diag([0.0, a * a, b * b, 0.0]).astype(complex)
    d = a**4 + b**4  # fidelity of the diagonal mixture with |psi'>
    q = (target_fidelity - d) / (1.0 - d)
    rho = q * np.outer(psi, psi.conj()) + (1.0 - q) * diag_mix
    return {
        "a": a,
        "b": b,
        "q": q,
        "diag_overlap": d,
        "rho": rho,
        "fidelity_psi_prime": tomography.fidelity_pure(rho, psi),
        "fidelity_singlet": tomography.fidelity_pure(rho, singlet_state()),
        "singlet_overlap_pure": abs(np.vdot(singlet_state(), psi)) ** 2,
    }
