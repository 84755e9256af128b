"""Command line front end.

Subcommands: pipeline (single run with checkpoint summary), sweep (alpha
fringe scan with CSV, fit, and plot), tomography (simulated pair
tomography with both estimators), mbqc (rotation protocol on the line
cluster).

Exit codes: 0 success, 2 configuration problems, 3 domain violations,
4 analysis failures. Configuration is validated before any output file
is created.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import mbqc, noise, pipeline, tomography
from .errors import AnalysisError, ConfigError, DomainError


def _write_json(path: Path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _print_kv(pairs) -> None:
    width = max(len(k) for k, _ in pairs)
    for key, value in pairs:
        if isinstance(value, float):
            value = f"{value:.6f}"
        print(f"{key.ljust(width)} : {value}")


def _config_from_args(args) -> pipeline.ExperimentConfig:
    overrides = list(args.set or [])
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    if getattr(args, "infinite_statistics", False):
        overrides.append("counting.mode=infinite")
    return pipeline.load_config(args.config, overrides)


def _ensemble_json(ens) -> list:
    from . import fock

    return [{"weight": w, "state": fock.to_json_dict(s)} for w, s in ens]


def _echo_config(config) -> dict:
    # Execution strategy (serial vs parallel sweep) does not affect the
    # numbers, so it is not part of the provenance echo; keeping it out
    # preserves byte-identical outputs across execution modes.
    d = pipeline.config_to_dict(config)
    d.pop("sweep", None)
    return d


def cmd_pipeline(args) -> int:
    config = _config_from_args(args)
    result = pipeline.run_pipeline(config)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    rho_pair = noise.polarization_density_matrix(result.checkpoints["bell_pair"])
    pair_target = pipeline.ideal_pair_state(config.bs_reflectivity, config.phase_config)
    pair_fidelity = tomography.fidelity_pure(rho_pair, pair_target)
    ideal = pipeline.ideal_logical_state(result.alpha, config.bs_reflectivity)
    logical_fidelity = float(
        sum(w * abs(np.vdot(ideal.amps, q.amps)) ** 2 for w, q in result.logical)
    )

    summary = {
        "alpha": result.alpha,
        "post_selection_probability": result.post_selection_probability,
        "projector_probability": result.projector_probability,
        "coincidence_probability": result.coincidence_probability,
        "pair_fidelity_vs_ideal": pair_fidelity,
        "logical_fidelity_vs_ideal": logical_fidelity,
        "config": _echo_config(config),
    }
    _write_json(outdir / "pipeline_summary.json", summary)
    _write_json(outdir / "final_state.json", {"ensemble": _ensemble_json(result.checkpoints["final"])})
    _write_json(
        outdir / "logical_state.json",
        {
            "n_qubits": 3,
            "ensemble": [
                {
                    "weight": w,
                    "re": [float(x) for x in q.amps.real],
                    "im": [float(x) for x in q.amps.imag],
                }
                for w, q in result.logical
            ],
        },
    )
    _print_kv(
        [
            ("alpha", result.alpha),
            ("post-selection probability", result.post_selection_probability),
            ("projector probability", result.projector_probability),
            ("coincidence probability", result.coincidence_probability),
            ("pair fidelity vs ideal", pair_fidelity),
            ("logical fidelity vs ideal", logical_fidelity),
            ("output directory", str(outdir)),
        ]
    )
    return 0


def cmd_sweep(args) -> int:
    config = _config_from_args(args)
    if config.alpha_grid is None:
        raise ConfigError("sweep needs an alpha_grid (set alpha_grid in the config)")
    if config.phase_config != "cluster":
        raise ConfigError("the fringe closed form holds for the cluster phase configuration")
    pairs = config.basis_grid or [(config.projector.phi1, config.projector.phi2)]
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    fits = []
    for idx, (phi1, phi2) in enumerate(pairs):
        # Distinct per-pair seeds keep sampled counts independent across
        # basis settings while staying reproducible.
        cfg_i = dataclasses.replace(
            config,
            projector=dataclasses.replace(config.projector, phi1=phi1, phi2=phi2),
            seed=config.seed + 7919 * idx,
        )
        result = pipeline.sweep_alpha(cfg_i)
        stem = "fringe" if len(pairs) == 1 else f"fringe_{idx:02d}"
        with open(outdir / f"{stem}.csv", "w") as fh:
            fh.write(result.to_csv())
        if not args.no_plot:
            from . import report

            report.save_fringe_plot(
                str(outdir / f"{stem}.png"),
                result,
                title=f"phi1={phi1:.4f}, phi2={phi2:.4f}",
            )
        closed = pipeline.phase_offset_closed_form(config.bs_reflectivity, phi1)
        fits.append(
            {
                "phi1": phi1,
                "phi2": phi2,
                "file": f"{stem}.csv",
                "constant": result.fit.constant,
                "cos_amp": result.fit.cos_amp,
                "sin_amp": result.fit.sin_amp,
                "amplitude": result.fit.amplitude,
                "phase": result.fit.phase,
                "phase_reference": result.phase_reference,
                "phase_offset": result.phase_offset,
                "closed_form_offset": closed,
            }
        )
        _print_kv(
            [
                (f"[{stem}] phi1", phi1),
                (f"[{stem}] phi2", phi2),
                (f"[{stem}] fit amplitude", result.fit.amplitude),
                (f"[{stem}] fit offset", result.phase_offset),
                (f"[{stem}] closed-form offset", closed),
            ]
        )
    _write_json(outdir / "fringe_fits.json", {"fits": fits, "config": _echo_config(config)})
    print(f"wrote {len(pairs)} fringe file(s) to {outdir}")
    return 0


def cmd_tomography(args) -> int:
    config = _config_from_args(args)
    result = pipeline.run_pipeline(config)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    rho_true = noise.polarization_density_matrix(result.checkpoints["bell_pair"])
    settings = tomography.all_settings()
    shots = None if getattr(args, "infinite_statistics", False) else config.tomography.shots
    counts = tomography.simulate_tomography(
        rho_true, settings, shots, rng=np.random.default_rng(config.seed)
    )
    with open(outdir / "tomography_counts.csv", "w") as fh:
        fh.write(tomography.counts_to_csv(counts, settings))

    target = pipeline.ideal_pair_state(config.bs_reflectivity, config.phase_config)
    singlet = pipeline.singlet_state()
    report_obj: dict = {
        "shots": shots,
        "estimator": config.tomography.estimator,
        "true_state": {
            "fidelity_vs_ideal_pair": tomography.fidelity_pure(rho_true, target),
            "purity": tomography.purity(rho_true),
        },
        "config": _echo_config(config),
    }
    lines = [
        ("shots", "infinite" if shots is None else shots),
        ("true-state purity", tomography.purity(rho_true)),
    ]

    rho_for_plot = None
    rho_linear = None
    if config.tomography.estimator in ("linear", "both"):
        rho_linear = tomography.linear_inversion(counts, settings)
        rho_phys = tomography.project_to_physical(rho_linear)
        _write_json(outdir / "rho_linear.json", tomography.rho_to_json_dict(rho_linear))
        report_obj["linear"] = {
            "fidelity_vs_ideal_pair": tomography.fidelity_pure(rho_phys, target),
            "fidelity_vs_singlet": tomography.fidelity_pure(rho_phys, singlet),
            "purity": tomography.purity(rho_phys),
        }
        lines.append(("linear fidelity vs ideal", report_obj["linear"]["fidelity_vs_ideal_pair"]))
        rho_for_plot = rho_phys
    if config.tomography.estimator in ("mle", "both"):
        mle = tomography.mle_reconstruct(counts, settings)
        _write_json(outdir / "rho_mle.json", tomography.rho_to_json_dict(mle.rho))
        report_obj["mle"] = {
            "fidelity_vs_ideal_pair": tomography.fidelity_pure(mle.rho, target),
            "fidelity_vs_singlet": tomography.fidelity_pure(mle.rho, singlet),
            "purity": tomography.purity(mle.rho),
            "converged": mle.converged,
            "iterations": mle.iterations,
            "log_likelihood": mle.log_likelihood,
        }
        if rho_linear is not None:
            report_obj["mle"]["trace_distance_to_linear"] = tomography.trace_distance(
                mle.rho, tomography.project_to_physical(rho_linear)
            )
        lines.append(("mle fidelity vs ideal", report_obj["mle"]["fidelity_vs_ideal_pair"]))
        lines.append(("mle converged", report_obj["mle"]["converged"]))
        rho_for_plot = mle.rho

    _write_json(outdir / "tomography_report.json", report_obj)
    if not args.no_plot and rho_for_plot is not None:
        from . import report

        report.save_density_matrix_plot(
            str(outdir / "rho.png"), rho_for_plot, title="reconstructed pair state"
        )
    lines.append(("output directory", str(outdir)))
    _print_kv(lines)
    return 0


def cmd_mbqc(args) -> int:
    config = _config_from_args(args)
    if args.samples < 1:
        raise ConfigError("mbqc --samples must be at least 1")
    if not (math.isfinite(args.phi1) and math.isfinite(args.phi2)):
        raise ConfigError("analyzer angles must be finite")
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    branch = None if args.branch is None else (int(args.branch[0]), int(args.branch[1]))
    rng = np.random.default_rng(config.seed)
    runs = []
    branch_counts = {"00": 0, "01": 0, "10": 0, "11": 0}
    for _ in range(args.samples):
        out = mbqc.run_rotation_protocol(
            args.phi1, args.phi2, branch=branch, rng=rng, feed_forward=args.feed_forward
        )
        branch_counts[f"{out['m1']}{out['m2']}"] += 1
        runs.append(
            {
                "m1": out["m1"],
                "m2": out["m2"],
                "p_m1": out["records"][0].probability,
                "p_m2": out["records"][1].probability,
                "oracle_overlap": out["overlap"],
                "corrected_overlap": out["corrected_overlap"],
                "residual_bloch": [float(x) for x in out["residual_bloch"]],
                "oracle_bloch": [float(x) for x in out["oracle_bloch"]],
            }
        )
    mean_oracle = float(np.mean([r["oracle_overlap"] for r in runs]))
    mean_corrected = float(np.mean([r["corrected_overlap"] for r in runs]))
    _write_json(
        outdir / "mbqc_report.json",
        {
            "phi1": args.phi1,
            "phi2": args.phi2,
            "feed_forward": args.feed_forward,
            "samples": args.samples,
            "branch_counts": branch_counts,
            "mean_oracle_overlap": mean_oracle,
            "mean_corrected_overlap": mean_corrected,
            "runs": runs,
        },
    )
    last = runs[-1]
    _print_kv(
        [
            ("phi1", args.phi1),
            ("phi2", args.phi2),
            ("samples", args.samples),
            ("branch counts", json.dumps(branch_counts, sort_keys=True)),
            ("mean oracle overlap", mean_oracle),
            ("mean corrected overlap", mean_corrected),
            ("last residual bloch", "(" + ", ".join(f"{x:.6f}" for x in last["residual_bloch"]) + ")"),
            ("output directory", str(outdir)),
        ]
    )
    return 0


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", default=None, help="JSON config file (defaults apply if omitted)")
    sub.add_argument("--out", default="out", help="output directory (default: ./out)")
    sub.add_argument("--seed", type=int, default=None, help="override the config seed")
    sub.add_argument(
        "--set",
        action="append",
        metavar="KEY=VALUE",
        help="override a config entry by dotted path, e.g. noise.indistinguishability=0.97",
    )
    sub.add_argument(
        "--infinite-statistics",
        action="store_true",
        help="use exact probabilities instead of sampled counts",
    )
    sub.add_argument("--no-plot", action="store_true", help="skip PNG rendering")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clusterpath",
        description="Simulate expanding a polarization-entangled photon pair "
        "into a three-qubit cluster state with a Sagnac loop path qubit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_pipe = sub.add_parser("pipeline", help="single run with checkpoint summary")
    _add_common(p_pipe)
    p_pipe.set_defaults(func=cmd_pipeline)

    p_sweep = sub.add_parser("sweep", help="alpha fringe scan with fit and plot")
    _add_common(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_tomo = sub.add_parser("tomography", help="simulated pair tomography")
    _add_common(p_tomo)
    p_tomo.set_defaults(func=cmd_tomography)

    p_mbqc = sub.add_parser("mbqc", help="rotation protocol on the line cluster")
    _add_common(p_mbqc)
    p_mbqc.add_argument("--phi1", type=float, default=0.0, help="first analyzer angle (rad)")
    p_mbqc.add_argument("--phi2", type=float, default=0.0, help="second analyzer angle (rad)")
    p_mbqc.add_argument(
        "--branch",
        choices=["00", "01", "10", "11"],
        default=None,
        help="force the (m1, m2) outcome branch instead of sampling",
    )
    p_mbqc.add_argument("--samples", type=int, default=1, help="number of protocol runs")
    p_mbqc.add_argument(
        "--feed-forward",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="adapt the second angle to (-1)^m1 phi2",
    )
    p_mbqc.set_defaults(func=cmd_mbqc)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except AnalysisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
