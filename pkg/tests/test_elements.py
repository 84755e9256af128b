import itertools
import math

import numpy as np
import pytest

from clusterpath import elements, fock
from clusterpath.errors import DomainError


def reg4():
    return fock.make_registry(["1", "2", "C", "D"])


def random_state(reg, rng, n_photons=2, n_terms=5):
    s = fock.PhotonicState(reg, {})
    for _ in range(n_terms):
        occ = [0] * reg.n_modes
        for _ in range(n_photons):
            occ[rng.integers(0, reg.n_modes)] += 1
        amp = complex(rng.normal(), rng.normal())
        t = fock.scale(fock.basis_state(reg, occ), amp * math.sqrt(math.prod(math.factorial(n) for n in occ)))
        s = fock.add(s, t)
    return fock.normalize(s)


def test_beam_splitter_convention():
    bs = elements.beam_splitter(0.59, 0, 1)
    t = math.sqrt(0.41)
    r = 1j * math.sqrt(0.59)
    assert np.allclose(bs.matrix, [[t, r], [r, t]], atol=1e-15)


def test_beam_splitter_rejects_bad_reflectivity():
    with pytest.raises(DomainError):
        elements.beam_splitter(0.0, 0, 1)
    with pytest.raises(DomainError):
        elements.beam_splitter(1.2, 0, 1)


def test_unitarity_enforced_at_construction():
    with pytest.raises(ValueError):
        elements.ModeUnitary(np.array([[1.0, 0.0], [1.0, 1.0]]), (0, 1))


def test_all_elements_unitary():
    reg = reg4()
    els = [
        elements.beam_splitter_on_paths(reg, 0.3, "1", "2"),
        elements.pbs(reg, "2", "C"),
        elements.hwp(reg, 0.4, "1"),
        elements.qwp(reg, 1.1, "2"),
        elements.phase_shift(reg, "C", 0.7),
    ]
    for el in els:
        u = el.matrix
        assert np.max(np.abs(u @ u.conj().T - np.eye(len(u)))) < 1e-12


def test_apply_preserves_norm():
    reg = reg4()
    rng = np.random.default_rng(42)
    for _ in range(10):
        s = random_state(reg, rng)
        chain = elements.ElementChain(
            (
                elements.beam_splitter_on_paths(reg, float(rng.uniform(0.1, 0.9)), "1", "2"),
                elements.hwp(reg, float(rng.uniform(0, math.pi)), "2"),
                elements.phase_shift(reg, "1", float(rng.uniform(-3, 3))),
            )
        )
        out = elements.apply(chain, s)
        assert abs(fock.norm(out) - 1.0) < 1e-12


def test_hom_bunching_at_balanced_bs():
    # |1,1> -> i/sqrt(2) (|2,0> + |0,2>) including the sqrt(2) factors
    reg = reg4()
    s = fock.two_photon(reg, ("1", "H"), ("2", "H"))
    out = elements.apply(elements.beam_splitter_on_paths(reg, 0.5, "1", "2"), s)
    amps = {occ: amp for occ, amp in out.terms.items()}
    assert len(amps) == 2
    a20 = amps[(2, 0, 0, 0, 0, 0, 0, 0)]
    a02 = amps[(0, 0, 2, 0, 0, 0, 0, 0)]
    assert abs(a20 - 1j / math.sqrt(2)) < 1e-12
    assert abs(a02 - 1j / math.sqrt(2)) < 1e-12
    assert abs(fock.norm(out) - 1.0) < 1e-12


def test_bunched_input_through_bs_keeps_norm():
    reg = reg4()
    s = fock.normalize(fock.two_photon(reg, ("1", "H"), ("1", "H")))
    out = elements.apply(elements.beam_splitter_on_paths(reg, 0.37, "1", "2"), s)
    assert abs(fock.norm(out) - 1.0) < 1e-12


def test_pbs_transmits_h_reflects_v_with_phase_i():
    reg = reg4()
    el = elements.pbs(reg, "2", "C")
    h = elements.apply(el, fock.single_photon(reg, "2", "H"))
    assert h.terms == {(0, 0, 1, 0, 0, 0, 0, 0): pytest.approx(1.0 + 0.0j)}
    v = elements.apply(el, fock.single_photon(reg, "2", "V"))
    occ = (0, 0, 0, 0, 0, 1, 0, 0)
    assert list(v.terms) == [occ]
    assert abs(v.terms[occ] - 1j) < 1e-15


def test_hwp_jones_values():
    reg = reg4()
    # 22.5 deg: H -> (H+V)/sqrt(2); 45 deg: swap H and V
    u = elements.hwp(reg, math.pi / 8, "1").matrix
    assert np.allclose(u, np.array([[1, 1], [1, -1]]) / math.sqrt(2), atol=1e-15)
    u45 = elements.hwp(reg, math.pi / 4, "1").matrix
    assert np.allclose(u45, [[0, 1], [1, 0]], atol=1e-15)


def test_qwp_at_zero_is_diag_1_i():
    reg = reg4()
    u = elements.qwp(reg, 0.0, "1").matrix
    assert np.allclose(u, np.diag([1.0, 1j]), atol=1e-15)


def test_waveplate_angle_mod_pi():
    a = elements.WaveplateSetting("half", 0.3)
    b = elements.WaveplateSetting("half", 0.3 + math.pi)
    assert abs(a.angle - b.angle) < 1e-12


def test_phase_shift_acts_on_both_polarizations():
    reg = reg4()
    el = elements.phase_shift(reg, "C", 0.8)
    for pol in ("H", "V"):
        out = elements.apply(el, fock.single_photon(reg, "C", pol))
        amp = next(iter(out.terms.values()))
        assert abs(amp - np.exp(0.8j)) < 1e-14


def test_post_selected_bs_pair_amplitudes_at_R059():
    # a |HV> - b |VH| with a = 0.570657, b = 0.821189 after renormalizing
    reg = reg4()
    s = fock.two_photon(reg, ("1", "H"), ("2", "V"))
    out = elements.apply(elements.beam_splitter_on_paths(reg, 0.59, "1", "2"), s)
    hv = out.terms[(1, 0, 0, 1, 0, 0, 0, 0)]
    vh = out.terms[(0, 1, 1, 0, 0, 0, 0, 0)]
    n = math.sqrt(abs(hv) ** 2 + abs(vh) ** 2)
    assert abs(n * n - 0.5162) < 1e-12
    assert abs(hv / n - 0.5706566158962638) < 1e-12
    assert abs(vh / n - (-0.8211887887287699)) < 1e-12


def test_sagnac_aggregate_action():
    # |1H>_2 -> e^{i 4 alpha} |1H>_C and |1V>_2 -> -|1V>_D
    reg = reg4()
    alpha = 0.37
    chain = elements.sagnac(reg, alpha, "2", ("C", "D"))
    h_out = elements.apply(chain, fock.single_photon(reg, "2", "H"))
    occ_c = (0, 0, 0, 0, 1, 0, 0, 0)
    assert list(h_out.terms) == [occ_c]
    assert abs(h_out.terms[occ_c] - np.exp(4j * alpha)) < 1e-12
    v_out = elements.apply(chain, fock.single_photon(reg, "2", "V"))
    occ_d = (0, 0, 0, 0, 0, 0, 0, 1)
    assert list(v_out.terms) == [occ_d]
    assert abs(v_out.terms[occ_d] - (-1.0)) < 1e-12


def test_sagnac_periodicity_in_alpha():
    reg = reg4()
    s = fock.normalize(
        fock.add(fock.single_photon(reg, "2", "H"), fock.single_photon(reg, "2", "V"))
    )
    a = elements.apply(elements.sagnac(reg, 0.21), s)
    b = elements.apply(elements.sagnac(reg, 0.21 + math.pi / 2), s)
    assert abs(abs(fock.inner_product(a, b)) - 1.0) < 1e-12


def test_compose_matches_sequential_apply():
    reg = reg4()
    rng = np.random.default_rng(3)
    chain = elements.ElementChain(
        (
            elements.hwp(reg, 0.3, "2"),
            elements.sagnac(reg, 0.5),
            elements.phase_shift(reg, "1", 1.2),
        )
    )
    s = random_state(reg, rng)
    seq = elements.apply(chain, s)
    flat = elements.apply(elements.compose(reg.n_modes, chain), s)
    assert abs(fock.inner_product(seq, flat) - 1.0) < 1e-11


def test_element_from_spec_round_trip_and_validation():
    reg = reg4()
    el = elements.element_from_spec(
        reg, {"type": "beam_splitter", "reflectivity": 0.4, "paths": ["1", "2"]}
    )
    assert isinstance(el, elements.ModeUnitary)
    chain = elements.element_from_spec(reg, {"type": "sagnac", "alpha": 0.1})
    assert isinstance(chain, elements.ElementChain)
    with pytest.raises(DomainError):
        elements.element_from_spec(reg, {"type": "beam_splitter", "reflectivity": 0.4})
    with pytest.raises(DomainError):
        elements.element_from_spec(
            reg, {"type": "beam_splitter", "reflectivity": 0.4, "paths": ["1", "2"], "x": 1}
        )
    with pytest.raises(DomainError):
        elements.element_from_spec(reg, {"type": "teleporter"})


def test_path_merge_bs_realizes_path_basis():
    """Port probabilities after the merge BS equal the logical Born
    probabilities of measuring the path qubit in B(phi3): port C is
    outcome 0, port D is outcome 1."""
    from clusterpath import pipeline
    from clusterpath.mbqc import b_basis_ket

    reg = pipeline.make_standard_registry()

    def analyzer_prob(psi, phi1, m1, phi2, m2, port):
        k1 = b_basis_ket(phi1, m1)
        k2 = b_basis_ket(phi2, m2)
        proj = fock.PhotonicState(reg, {})
        for pol1, c1 in (("V", k1[0]), ("H", k1[1])):
            for pol2, c2 in (("V", k2[0]), ("H", k2[1])):
                occ = [0] * reg.n_modes
                occ[reg.index("1", pol1)] += 1
                occ[reg.index(port, pol2)] += 1
                proj = fock.add(proj, fock.scale(fock.basis_state(reg, occ), c1 * c2))
        return abs(fock.inner_product(proj, psi)) ** 2

    rng = np.random.default_rng(11)
    for _ in range(4):
        R = float(rng.uniform(0.2, 0.8))
        alpha = float(rng.uniform(-2, 2))
        phi1, phi2, phi3 = (float(x) for x in rng.uniform(-np.pi, np.pi, 3))
        cfg = pipeline.config_from_dict({"spec_version": 1, "bs_reflectivity": R, "alpha": alpha})
        res = pipeline.run_pipeline(cfg)
        ((_, psi_ph),) = res.checkpoints["sagnac_out"]
        psi_log = res.logical_pure()
        merge = elements.path_merge_bs(
            reg, elements.merge_phase_for_path_basis(phi3), ("C", "D")
        )
        merged = elements.apply(merge, psi_ph)
        total = 0.0
        for m1, m2, m3 in itertools.product((0, 1), repeat=3):
            port = "C" if m3 == 0 else "D"
            p_ph = analyzer_prob(merged, phi1, m1, phi2, m2, port)
            ket = np.kron(
                np.kron(b_basis_ket(phi1, m1), b_basis_ket(phi2, m2)),
                b_basis_ket(phi3, m3),
            )
            p_log = abs(np.vdot(ket, psi_log.amps)) ** 2
            assert abs(p_ph - p_log) < 1e-12
            total += p_ph
        assert abs(total - 1.0) < 1e-12
