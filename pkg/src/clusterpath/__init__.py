"""Simulation of a polarization-entangled photon pair expanded into a
three-qubit cluster state by adding a path qubit in a Sagnac loop.

Layers: fock (sparse few-photon states), elements (optical unitaries),
noise (distinguishability and loop contrast), mbqc (qubit graph states
and adaptive measurements), encoding (photonic-to-logical relabeling),
tomography (pair state reconstruction), pipeline (the assembled
experiment), cli (command line front end).
"""

from .elements import (
    ElementChain,
    ModeUnitary,
    apply,
    beam_splitter,
    beam_splitter_on_paths,
    compose,
    hwp,
    merge_phase_for_path_basis,
    path_merge_bs,
    pbs,
    phase_shift,
    qwp,
    sagnac,
    waveplate,
)
from .encoding import (
    EncodingMap,
    add_path_qubit,
    cluster_with_path_map,
    pbs_is_cnot_check,
    to_logical,
    two_photon_polarization_map,
)
from .errors import AnalysisError, ConfigError, DomainError, UnencodableTermError
from .fock import (
    ModeRegistry,
    PhotonicState,
    basis_state,
    inner_product,
    make_registry,
    normalize,
    single_photon,
    two_photon,
)
from .mbqc import (
    GraphSpec,
    QubitState,
    apply_cz,
    build_cluster,
    feed_forward_select,
    line_graph,
    mbqc_output_oracle,
    measure_B,
    run_rotation_protocol,
)
from .noise import (
    REFERENCE_NOISE,
    NoiseModel,
    dephase_by_distinguishability,
    hom_visibility,
    pair_through_element,
    post_select,
    post_select_ensemble,
    sample_counts,
)
from .pipeline import (
    ExperimentConfig,
    a_from_R,
    config_from_dict,
    fringe_oracle,
    fringe_oracle_noisy,
    load_config,
    run_pipeline,
    sweep_alpha,
)
from .tomography import (
    fidelity_pure,
    linear_inversion,
    mle_reconstruct,
    purity,
    simulate_tomography,
    trace_distance,
)

__version__ = "1.0.0"

__all__ = [
    "AnalysisError",
    "ConfigError",
    "DomainError",
    "ElementChain",
    "EncodingMap",
    "ExperimentConfig",
    "GraphSpec",
    "ModeRegistry",
    "ModeUnitary",
    "NoiseModel",
    "PhotonicState",
    "QubitState",
    "REFERENCE_NOISE",
    "UnencodableTermError",
    "a_from_R",
    "add_path_qubit",
    "apply",
    "apply_cz",
    "basis_state",
    "beam_splitter",
    "beam_splitter_on_paths",
    "build_cluster",
    "cluster_with_path_map",
    "compose",
    "config_from_dict",
    "dephase_by_distinguishability",
    "feed_forward_select",
    "fidelity_pure",
    "fringe_oracle",
    "fringe_oracle_noisy",
    "hom_visibility",
    "hwp",
    "inner_product",
    "line_graph",
    "linear_inversion",
    "load_config",
    "make_registry",
    "mbqc_output_oracle",
    "measure_B",
    "merge_phase_for_path_basis",
    "mle_reconstruct",
    "normalize",
    "pair_through_element",
    "path_merge_bs",
    "pbs",
    "pbs_is_cnot_check",
    "phase_shift",
    "post_select",
    "post_select_ensemble",
    "purity",
    "qwp",
    "run_pipeline",
    "run_rotation_protocol",
    "sagnac",
    "sample_counts",
    "simulate_tomography",
    "single_photon",
    "sweep_alpha",
    "to_logical",
    "trace_distance",
    "two_photon",
    "two_photon_polarization_map",
    "waveplate",
]
