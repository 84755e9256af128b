import math

import numpy as np
import pytest

from clusterpath import pipeline, tomography
from clusterpath.errors import AnalysisError, DomainError


def random_density_matrix(rng, rank=4):
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def test_settings_grid_is_36():
    settings = tomography.all_settings()
    assert len(settings) == 36
    assert ("H", "H") in settings and ("L", "A") in settings


def test_check_density_matrix_invariants():
    with pytest.raises(DomainError):
        tomography.check_density_matrix(np.eye(3))
    bad_trace = np.eye(4) / 3.0
    with pytest.raises(DomainError):
        tomography.check_density_matrix(bad_trace)
    herm = np.eye(4) / 4.0
    herm_bad = herm.copy()
    herm_bad[0, 1] = 0.3
    with pytest.raises(DomainError):
        tomography.check_density_matrix(herm_bad)
    neg = np.diag([0.6, 0.5, -0.05, -0.05]).astype(complex)
    with pytest.raises(DomainError):
        tomography.check_density_matrix(neg)


def test_linear_inversion_recovers_random_states():
    rng = np.random.default_rng(21)
    settings = tomography.all_settings()
    for _ in range(8):
        rho = random_density_matrix(rng)
        counts = tomography.simulate_tomography(rho, settings, shots=None)
        rec = tomography.linear_inversion(counts, settings)
        assert tomography.trace_distance(rec, rho) < 1e-10


def test_linear_inversion_scale_invariance():
    # absolute count rate must not matter, only relative frequencies
    rng = np.random.default_rng(4)
    settings = tomography.all_settings()
    rho = random_density_matrix(rng)
    counts = tomography.simulate_tomography(rho, settings, shots=None)
    rec = tomography.linear_inversion(1234.5 * counts, settings)
    assert tomography.trace_distance(rec, rho) < 1e-10


def test_linear_inversion_incomplete_settings():
    settings = [(a, b) for a, b in tomography.all_settings() if a == "H"]
    counts = np.ones(len(settings))
    with pytest.raises(AnalysisError):
        tomography.linear_inversion(counts, settings)


def test_linear_inversion_zero_counts():
    settings = tomography.all_settings()
    with pytest.raises(AnalysisError):
        tomography.linear_inversion(np.zeros(36), settings)


def test_project_to_physical():
    rho = np.diag([0.7, 0.5, -0.1, -0.1]).astype(complex)
    phys = tomography.project_to_physical(rho)
    w = np.linalg.eigvalsh(phys)
    assert w.min() >= -1e-12
    assert abs(np.trace(phys).real - 1.0) < 1e-12


def test_simulate_tomography_poisson_deterministic():
    rng_state = np.random.default_rng(9)
    rho = random_density_matrix(rng_state)
    settings = tomography.all_settings()
    a = tomography.simulate_tomography(rho, settings, shots=5000, rng=np.random.default_rng(3))
    b = tomography.simulate_tomography(rho, settings, shots=5000, rng=np.random.default_rng(3))
    assert np.array_equal(a, b)
    assert a.dtype.kind in "iu" or np.allclose(a, np.round(a))


def test_mle_output_always_physical():
    rng = np.random.default_rng(31)
    settings = tomography.all_settings()
    for trial in range(4):
        rho = random_density_matrix(rng, rank=2 if trial % 2 else 4)
        counts = tomography.simulate_tomography(
            rho, settings, shots=300, rng=np.random.default_rng(trial)
        )
        res = tomography.mle_reconstruct(counts, settings)
        assert res.converged
        w = np.linalg.eigvalsh(res.rho)
        assert w.min() >= -1e-10
        assert abs(np.trace(res.rho).real - 1.0) < 1e-10
        assert np.max(np.abs(res.rho - res.rho.conj().T)) < 1e-12


def test_mle_likelihood_not_worse_than_linear_inversion():
    rng = np.random.default_rng(17)
    settings = tomography.all_settings()
    rho = random_density_matrix(rng)
    counts = tomography.simulate_tomography(rho, settings, shots=2000, rng=np.random.default_rng(8))
    li = tomography.project_to_physical(tomography.linear_inversion(counts, settings))
    res = tomography.mle_reconstruct(counts, settings)
    assert res.log_likelihood >= tomography.log_likelihood(li, counts, settings) - 1e-6


def test_estimator_error_shrinks_with_shots():
    rng = np.random.default_rng(2)
    settings = tomography.all_settings()
    rho = random_density_matrix(rng, rank=2)
    medians = []
    for shots in (100, 1000, 10000, 100000):
        dists = []
        for seed in range(10):
            counts = tomography.simulate_tomography(
                rho, settings, shots=shots, rng=np.random.default_rng(seed)
            )
            rec = tomography.project_to_physical(tomography.linear_inversion(counts, settings))
            dists.append(tomography.trace_distance(rec, rho))
        medians.append(float(np.median(dists)))
    assert medians[-1] < medians[0]
    assert medians == sorted(medians, reverse=True)


def test_fidelity_and_purity_oracles():
    psi = pipeline.psi_prime_state(0.59)
    rho = np.outer(psi, psi.conj())
    assert abs(tomography.fidelity_pure(rho, psi) - 1.0) < 1e-12
    assert abs(tomography.purity(rho) - 1.0) < 1e-12
    mixed = np.eye(4) / 4.0
    assert abs(tomography.purity(mixed) - 0.25) < 1e-12
    assert abs(tomography.fidelity_pure(mixed, psi) - 0.25) < 1e-12


def test_singlet_overlap_eigen_oracle():
    # |<psi-|psi'>|^2 = (a+b)^2/2 at R = 0.59 and the pure-state trace
    # distance follows from it
    psi = pipeline.psi_prime_state(0.59)
    singlet = pipeline.singlet_state()
    ov = abs(np.vdot(singlet, psi)) ** 2
    assert abs(ov - 0.9686168151879118) < 1e-12
    td = tomography.trace_distance(np.outer(psi, psi.conj()), np.outer(singlet, singlet.conj()))
    assert abs(td - math.sqrt(1.0 - ov)) < 1e-10


def test_fidelity_consistency_demo():
    demo = pipeline.fidelity_consistency_demo(R=0.59, target_fidelity=0.929)
    assert abs(demo["fidelity_psi_prime"] - 0.929) < 1e-12
    assert 0.0 <= demo["q"] <= 1.0
    # the induced singlet fidelity has no free parameter left
    expect = demo["q"] * demo["singlet_overlap_pure"] + (1 - demo["q"]) * 0.5
    assert abs(demo["fidelity_singlet"] - expect) < 1e-12
    assert abs(demo["fidelity_singlet"] - 0.892862) < 1e-5
    tomography.check_density_matrix(demo["rho"])


def test_counts_csv_round_trip():
    settings = tomography.all_settings()
    rng = np.random.default_rng(12)
    counts = rng.integers(0, 500, size=36).astype(float)
    text = tomography.counts_to_csv(counts, settings)
    counts2, settings2 = tomography.counts_from_csv(text)
    assert settings2 == settings
    assert np.allclose(counts, counts2)


def test_rho_json_round_trip():
    rng = np.random.default_rng(13)
    rho = random_density_matrix(rng)
    d = tomography.rho_to_json_dict(rho)
    back = tomography.rho_from_json_dict(d)
    assert np.max(np.abs(back - rho)) < 1e-12
