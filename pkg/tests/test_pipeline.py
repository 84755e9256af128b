import dataclasses
import json
import math

import numpy as np
import pytest

from clusterpath import encoding, fock, noise, pipeline
from clusterpath.errors import AnalysisError, ConfigError, DomainError


def cfg_dict(**kw):
    d = {"spec_version": 1}
    d.update(kw)
    return d


# ---------------------------------------------------------------------------
# configuration handling


def test_config_defaults():
    cfg = pipeline.config_from_dict({"spec_version": 1})
    assert cfg.bs_reflectivity == 0.5
    assert cfg.phase_config == "cluster"
    assert cfg.projector.m3 == 1
    assert cfg.noise.is_ideal
    assert cfg.counting.mode == "infinite"


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        pipeline.config_from_dict(cfg_dict(reflectivity=0.5))
    with pytest.raises(ConfigError):
        pipeline.config_from_dict(cfg_dict(noise={"indistinguishability": 0.9, "x": 1}))
    with pytest.raises(ConfigError):
        pipeline.config_from_dict(cfg_dict(projector={"phi4": 0.0}))


def test_config_rejects_bad_values():
    with pytest.raises(ConfigError):
        pipeline.config_from_dict(cfg_dict(spec_version=2))
    with pytest.raises(ConfigError):
        pipeline.config_from_dict(cfg_dict(bs_reflectivity=0.0))
    with pytest.raises(ConfigError):
        pipeline.config_from_dict(cfg_dict(phase_config="bell"))
    with pytest.raises(ConfigError):
        pipeline.config_from_dict(cfg_dict(noise={"indistinguishability": 1.5}))
    with pytest.raises(ConfigError):
        pipeline.config_from_dict(cfg_dict(counting={"mode": "exact"}))
    with pytest.raises(ConfigError):
        pipeline.config_from_dict(cfg_dict(projector={"m1": 2}))
    with pytest.raises(ConfigError):
        pipeline.config_from_dict(cfg_dict(tomography={"estimator": "bayes"}))


def test_alpha_grid_forms():
    cfg = pipeline.config_from_dict(cfg_dict(alpha_grid=[0.0, 0.1, 0.2]))
    assert cfg.alpha_grid == [0.0, 0.1, 0.2]
    cfg = pipeline.config_from_dict(cfg_dict(alpha_grid={"start": 0.0, "stop": 1.0, "num": 5}))
    assert len(cfg.alpha_grid) == 5
    assert cfg.alpha_grid == sorted(cfg.alpha_grid)
    with pytest.raises(ConfigError):
        pipeline.config_from_dict(cfg_dict(alpha_grid=[0.2, 0.1]))
    with pytest.raises(ConfigError):
        pipeline.config_from_dict(cfg_dict(alpha_grid={"start": 0.0, "stop": 1.0}))


def test_load_config_with_overrides(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"spec_version": 1, "bs_reflectivity": 0.4}))
    cfg = pipeline.load_config(
        str(path),
        ["bs_reflectivity=0.59", "noise.indistinguishability=0.9", "phase_config=singlet"],
    )
    assert cfg.bs_reflectivity == 0.59
    assert cfg.noise.indistinguishability == 0.9
    assert cfg.phase_config == "singlet"
    with pytest.raises(ConfigError):
        pipeline.load_config(str(path), ["no_equals_sign"])
    with pytest.raises(ConfigError):
        pipeline.load_config(str(tmp_path / "missing.json"))


def test_load_config_requires_spec_version(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"bs_reflectivity": 0.4}))
    with pytest.raises(ConfigError):
        pipeline.load_config(str(path))


def test_config_round_trip():
    cfg = pipeline.config_from_dict(
        cfg_dict(
            bs_reflectivity=0.59,
            alpha_grid=[0.0, 0.5],
            basis_grid=[[0.0, 0.0], [math.pi / 2, 0.0]],
            projector={"phi1": 0.1, "m3": 0},
            counting={"mode": "sampled"},
        )
    )
    again = pipeline.config_from_dict(pipeline.config_to_dict(cfg))
    assert again == cfg


# ---------------------------------------------------------------------------
# closed forms and fixtures


def test_a_from_R_values():
    assert abs(pipeline.a_from_R(0.5) - 1 / math.sqrt(2)) < 1e-12
    assert abs(pipeline.a_from_R(0.59) - 0.57065) < 1e-5
    a = pipeline.a_from_R(0.37)
    R = 0.37
    assert abs(a * a - (1 - R) ** 2 / ((1 - R) ** 2 + R * R)) < 1e-12
    with pytest.raises(DomainError):
        pipeline.a_from_R(0.0)
    with pytest.raises(DomainError):
        pipeline.a_from_R(1.0)


def test_post_selection_probability_value():
    assert abs(pipeline.post_selection_probability(0.59) - 0.5162) < 1e-12


def test_fringe_oracle_validation_and_shape():
    with pytest.raises(DomainError):
        pipeline.fringe_oracle(0.0, 0.0, 0.0, a=1.2, Y0=1.0)
    with pytest.raises(DomainError):
        pipeline.fringe_oracle(0.0, 0.0, 0.0, a=0.5, Y0=0.0)
    grid = np.linspace(0, 1, 7)
    y = pipeline.fringe_oracle(grid, 0.3, 0.2, a=0.6, Y0=0.125)
    assert y.shape == grid.shape
    assert isinstance(pipeline.fringe_oracle(0.1, 0.3, 0.2, a=0.6, Y0=0.125), float)


def test_fringe_oracle_noisy_reduces_to_ideal():
    y0 = pipeline.fringe_oracle(0.3, 0.5, 0.2, a=0.57, Y0=0.125)
    y1 = pipeline.fringe_oracle_noisy(0.3, 0.5, 0.2, a=0.57, Y0=0.125, indistinguishability=1.0, sagnac_visibility=1.0)
    assert abs(y0 - y1) < 1e-15


def test_ideal_pair_state_forms():
    s = pipeline.ideal_pair_state(0.59, "singlet")
    assert np.allclose(s, pipeline.psi_prime_state(0.59))
    c = pipeline.ideal_pair_state(0.5, "cluster")
    assert np.allclose(c, [1 / math.sqrt(2), 0, 0, -1 / math.sqrt(2)])


# ---------------------------------------------------------------------------
# pipeline checkpoints


def test_checkpoint_post_selected_pair_R059():
    cfg = pipeline.config_from_dict(cfg_dict(bs_reflectivity=0.59, phase_config="singlet"))
    res = pipeline.run_pipeline(cfg)
    assert abs(res.post_selection_probability - 0.5162) < 1e-12
    ((w, s),) = res.checkpoints["post_selected_pair"]
    v = noise.polarization_vector(s)
    assert abs(v[1] - 0.5706566158962638) < 1e-10
    assert abs(v[2] - (-0.8211887887287699)) < 1e-10
    assert abs(v[0]) < 1e-14 and abs(v[3]) < 1e-14


def test_checkpoint_bell_pair_cluster_config():
    cfg = pipeline.config_from_dict(cfg_dict(bs_reflectivity=0.5))
    res = pipeline.run_pipeline(cfg)
    ((_, s),) = res.checkpoints["bell_pair"]
    v = noise.polarization_vector(s)
    target = pipeline.ideal_pair_state(0.5, "cluster")
    assert abs(abs(np.vdot(target, v)) - 1.0) < 1e-12


def test_checkpoint_cluster_2q_logical():
    cfg = pipeline.config_from_dict(cfg_dict(bs_reflectivity=0.5))
    res = pipeline.run_pipeline(cfg)
    ((_, s),) = res.checkpoints["cluster_2q"]
    q = encoding.to_logical(s, encoding.two_photon_polarization_map())
    target = pipeline.two_qubit_cluster_state()
    assert abs(abs(np.vdot(target.amps, q.amps)) - 1.0) < 1e-12


def test_checkpoint_sagnac_out_is_four_term_state():
    cfg = pipeline.config_from_dict(cfg_dict(bs_reflectivity=0.5, alpha=0.0))
    res = pipeline.run_pipeline(cfg)
    ((_, s),) = res.checkpoints["sagnac_out"]
    target = pipeline.eq2_state(res.registry)
    ip = fock.inner_product(target, s)
    # equal including the global phase
    assert abs(ip - 1.0) < 1e-12


def test_logical_state_closed_form_random_params():
    rng = np.random.default_rng(14)
    for _ in range(6):
        R = float(rng.uniform(0.2, 0.8))
        alpha = float(rng.uniform(-3, 3))
        cfg = pipeline.config_from_dict(cfg_dict(bs_reflectivity=R, alpha=alpha))
        res = pipeline.run_pipeline(cfg)
        psi = res.logical_pure()
        target = pipeline.ideal_logical_state(alpha, R)
        assert abs(abs(np.vdot(target.amps, psi.amps)) - 1.0) < 1e-12


def test_post_selection_probability_noise_independent():
    for p, vs in ((1.0, 1.0), (0.6, 0.9), (0.0, 0.5)):
        cfg = pipeline.config_from_dict(
            cfg_dict(
                bs_reflectivity=0.59,
                noise={"indistinguishability": p, "sagnac_visibility": vs},
            )
        )
        res = pipeline.run_pipeline(cfg)
        assert abs(res.post_selection_probability - 0.5162) < 1e-12


def test_singlet_config_skips_phase_correction():
    cfg = pipeline.config_from_dict(cfg_dict(bs_reflectivity=0.59, phase_config="singlet"))
    res = pipeline.run_pipeline(cfg)
    ((_, a),) = res.checkpoints["post_selected_pair"]
    ((_, b),) = res.checkpoints["bell_pair"]
    assert abs(fock.inner_product(a, b) - 1.0) < 1e-14


# ---------------------------------------------------------------------------
# oracle equivalence and sweeps


def test_simulation_matches_oracle_random_configs():
    rng = np.random.default_rng(7)
    for _ in range(15):
        cfg = pipeline.config_from_dict(
            cfg_dict(
                bs_reflectivity=float(rng.uniform(0.15, 0.85)),
                alpha=float(rng.uniform(-2, 2)),
                projector={
                    "phi1": float(rng.uniform(-np.pi, np.pi)),
                    "phi2": float(rng.uniform(-np.pi, np.pi)),
                    "phi3": float(rng.uniform(-np.pi, np.pi)),
                    "m1": int(rng.integers(0, 2)),
                    "m2": int(rng.integers(0, 2)),
                    "m3": int(rng.integers(0, 2)),
                    "feed_forward": bool(rng.integers(0, 2)),
                },
                noise={
                    "indistinguishability": float(rng.uniform(0.5, 1.0)),
                    "sagnac_visibility": float(rng.uniform(0.5, 1.0)),
                },
            )
        )
        res = pipeline.run_pipeline(cfg)
        oracle = pipeline.expected_coincidence_probability(cfg, cfg.alpha)
        assert abs(res.coincidence_probability - oracle) < 1e-12


def test_noisy_fringe_term_scaling():
    # cosine term scales with v_s alone, sine term with p * v_s
    a = pipeline.a_from_R(0.59)
    y = pipeline.fringe_oracle_noisy(
        0.2, math.pi / 2, 0.4, a, 0.125, indistinguishability=0.8, sagnac_visibility=0.9
    )
    b2 = 1 - a * a
    manual = 0.125 * (
        1
        + 0.9 * (1 - 2 * a * a) * math.cos(4 * 0.2 + 0.4)
        + 0.8 * 0.9 * 2 * a * math.sqrt(b2) * math.sin(4 * 0.2 + 0.4)
    )
    assert abs(y - manual) < 1e-15


def test_fit_fringe_recovers_coefficients():
    alphas = np.linspace(0, math.pi, 40)
    values = 0.2 + 0.07 * np.cos(4 * alphas) - 0.03 * np.sin(4 * alphas)
    fit = pipeline.fit_fringe(alphas, values)
    assert abs(fit.constant - 0.2) < 1e-12
    assert abs(fit.cos_amp - 0.07) < 1e-12
    assert abs(fit.sin_amp - (-0.03)) < 1e-12


def test_fit_fringe_needs_three_distinct_points():
    with pytest.raises(AnalysisError):
        pipeline.fit_fringe([0.0, 0.1], [1.0, 1.0])
    with pytest.raises(AnalysisError):
        pipeline.fit_fringe([0.0, 0.1, 0.1], [1.0, 1.0, 1.0])


def test_fit_fringe_rejects_aliased_grid():
    # distinct alphas that alias the 4-alpha harmonics
    alphas = [0.0, math.pi / 2, math.pi]
    with pytest.raises(AnalysisError):
        pipeline.fit_fringe(alphas, [1.0, 1.0, 1.0])


def test_sweep_phase_offset_matches_closed_form():
    cfg = pipeline.config_from_dict(
        cfg_dict(
            bs_reflectivity=0.59,
            alpha_grid={"start": 0.0, "stop": math.pi, "num": 32},
            projector={"phi1": math.pi / 2, "phi2": 0.7},
        )
    )
    res = pipeline.sweep_alpha(cfg)
    closed = pipeline.phase_offset_closed_form(0.59, math.pi / 2)
    assert abs(res.phase_offset - closed) < 1e-10
    assert res.counts is None
    assert abs(res.phase_reference - 0.7) < 1e-15


def test_sweep_serial_parallel_identical():
    base = pipeline.config_from_dict(
        cfg_dict(
            bs_reflectivity=0.59,
            alpha_grid={"start": 0.0, "stop": math.pi, "num": 20},
            counting={"mode": "sampled"},
            seed=77,
        )
    )
    par = dataclasses.replace(base, sweep=pipeline.SweepSpec(parallel=True))
    r1 = pipeline.sweep_alpha(base)
    r2 = pipeline.sweep_alpha(par)
    assert np.array_equal(r1.counts, r2.counts)
    assert r1.to_csv() == r2.to_csv()


def test_sweep_requires_grid_and_cluster_config():
    with pytest.raises(ConfigError):
        pipeline.sweep_alpha(pipeline.config_from_dict(cfg_dict()))
    with pytest.raises(ConfigError):
        pipeline.sweep_alpha(
            pipeline.config_from_dict(
                cfg_dict(phase_config="singlet", alpha_grid=[0.0, 0.1, 0.2])
            )
        )


def test_sweep_csv_format():
    cfg = pipeline.config_from_dict(
        cfg_dict(alpha_grid=[0.0, 0.3, 0.6, 0.9], counting={"mode": "sampled"}, seed=5)
    )
    res = pipeline.sweep_alpha(cfg)
    lines = res.to_csv().strip().split("\n")
    assert lines[0] == "alpha_rad,expected_prob,oracle_prob,counts"
    assert len(lines) == 5
    fields = lines[1].split(",")
    assert len(fields) == 4
    float(fields[0]); float(fields[1]); float(fields[2]); int(fields[3])


def test_wrap_angle():
    assert abs(pipeline.wrap_angle(0.0)) < 1e-15
    assert abs(pipeline.wrap_angle(2 * math.pi + 0.3) - 0.3) < 1e-12
    assert abs(pipeline.wrap_angle(-math.pi) - math.pi) < 1e-12
    assert pipeline.wrap_angle(3.5 * math.pi) <= math.pi
