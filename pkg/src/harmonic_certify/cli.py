"""Command-line surface.

    harmonic-certify [--seed S] [--trials T] [--threads K] <command> ...

Commands
    phi eval          evaluate the localizing function or its transform (CSV)
    bounds check      check one scenario JSON (report JSON + CSV line)
    bounds suite      randomized verification suite
    vandermonde verify  singular value vs. bound for one config (CSV)
    vandermonde sweep   tau sweep of the pairs bound (CSV)
    estimate          ESPRIT + least squares on a samples JSON
    apost             a posteriori certificate for an estimate
    figure1           the noisy-estimation study
    sharpness         energy of the near-collision probe vs. the weakened bound

The exit code is 0 iff no checked inequality was violated beyond tolerance.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bounds, experiments, vandermonde
from .estimation import estimate
from .localizing import DilatedLocalizer, phi, phi_hat
from .noise import apost_certificate
from .torus import ExponentialSum, SampleGrid


def _load_json(path):
    with open(path) as handle:
        return json.load(handle)


def _dump(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_samples(path) -> tuple:
    """Samples file: {"grid": {"start", "end"}, "samples": [[re, im], ...]}."""
    obj = _load_json(path)
    grid = SampleGrid(obj["grid"]["start"], obj["grid"]["end"])
    samples = np.array([complex(re, im) for re, im in obj["samples"]])
    return samples, grid


def _parse_grid(text: str) -> np.ndarray:
    try:
        a, b, n = text.split(":")
        return np.linspace(float(a), float(b), int(n))
    except ValueError as exc:
        raise SystemExit(f"bad --grid {text!r}; expected a:b:n") from exc


def cmd_phi(args) -> int:
    xs = _parse_grid(args.grid)
    if args.fourier:
        loc = DilatedLocalizer(args.dilate) if args.dilate else None
        values = loc.phi_hat(xs) if loc else phi_hat(xs)
        header = ["w", "value_re", "value_im"]
    else:
        loc = DilatedLocalizer(args.dilate) if args.dilate else None
        values = loc.phi(xs) if loc else phi(xs)
        values = values.astype(complex)
        header = ["x", "value_re", "value_im"]
    rows = [[x, v.real, v.imag] for x, v in zip(xs, np.atleast_1d(values))]
    out = Path(args.out) if args.out else None
    if out:
        experiments.write_csv(out, header, rows)
    else:
        sys.stdout.write(",".join(header) + "\n")
        for row in rows:
            sys.stdout.write(",".join(experiments._fmt(v) for v in row) + "\n")
    return 0


def cmd_bounds_check(args) -> int:
    report = experiments.check_scenario(_load_json(args.config))
    _dump(report, args.out)
    line = ",".join(experiments._fmt(report[k]) for k in ("lhs", "rhs", "slack", "holds"))
    sys.stdout.write(line + "\n")
    return 0 if report["holds"] else 1


def cmd_bounds_suite(args) -> int:
    config = experiments.ExperimentConfig(
        experiment="bound_suite", seed=args.seed,
        suite_configs=args.configs, perturb_rhs=args.perturb)
    summary = experiments.run_bound_suite(
        config, Path(args.out) if args.out else None)
    sys.stdout.write(json.dumps(summary, sort_keys=True) + "\n")
    return 0 if summary["failed"] == 0 else 1


def cmd_vandermonde_verify(args) -> int:
    cfg = _load_json(args.config)
    if args.mode == "separated":
        spec = vandermonde.VandermondeSpec(tuple(cfg["frequencies"]), cfg["rows"])
        report = vandermonde.verify_separated(spec, cfg["q"])
        m = len(spec.frequencies)
    else:
        spec_y = vandermonde.VandermondeSpec(tuple(cfg["first"]), cfg["rows"])
        spec_yp = vandermonde.VandermondeSpec(tuple(cfg["second"]), cfg["rows"])
        report = vandermonde.verify_pairs(spec_y, spec_yp, cfg["q"])
        m = len(spec_y.frequencies) + len(spec_yp.frequencies)
    row = [cfg["rows"], m, cfg["q"], report.tau, report.sigma_min_squared,
           report.bound, report.ratio, report.holds]
    experiments.write_csv(Path(args.out),
                          ["N", "M", "q", "tau", "sigma_min_sq", "bound",
                           "ratio", "holds"], [row])
    return 0 if report.holds else 1


def cmd_vandermonde_sweep(args) -> int:
    config = experiments.ExperimentConfig(experiment="vandermonde_sweep",
                                          seed=args.seed)
    rows = experiments.run_vandermonde_sweep(config, Path(args.out))
    return 0 if all(r[7] for r in rows) else 1


def cmd_estimate(args) -> int:
    samples, grid = _load_samples(args.infile)
    result = estimate(samples, grid, args.order, args.window)
    payload = result.to_exponential_sum().to_json()
    payload["residual_norm"] = result.residual_norm
    _dump(payload, args.out)
    return 0


def cmd_apost(args) -> int:
    samples, grid = _load_samples(args.samples)
    if grid.start != -grid.end:
        raise SystemExit("apost needs samples on a symmetric grid [-N, N]")
    g = ExponentialSum.from_json(_load_json(args.estimate))
    n = grid.end
    q = args.q if args.q is not None else g.separation / 2.0
    cert = apost_certificate(samples, g, n, args.sigma, args.delta, q)
    _dump(cert.to_json(), args.out)
    return 0


def cmd_figure1(args) -> int:
    config = experiments.ExperimentConfig(experiment="figure1", seed=args.seed,
                                          trials=args.trials, threads=args.threads)
    if args.config:
        loaded = experiments.ExperimentConfig.from_json(_load_json(args.config))
        overrides = {}
        if args.seed != 0:
            overrides["seed"] = args.seed
        if args.trials != 50:
            overrides["trials"] = args.trials
        if args.threads != 1:
            overrides["threads"] = args.threads
        config = (loaded if not overrides
                  else experiments.ExperimentConfig.from_json(
                      {**loaded.to_json(), **overrides}))
    rows = experiments.run_figure1(config, Path(args.out))
    violated = any(
        row["certified_fraction"] == 1.0 and row["max_error"] is not None
        and row["max_estimator"] is not None
        and row["max_error"] > row["max_estimator"] ** 2
        for row in rows)
    return 1 if violated else 0


def cmd_sharpness(args) -> int:
    config = experiments.ExperimentConfig(experiment="sharpness", seed=args.seed)
    if args.config:
        config = experiments.ExperimentConfig.from_json(_load_json(args.config))
    rows = experiments.run_sharpness(config, Path(args.out))
    return 0 if all(row["ratio"] >= 1.0 - bounds.REL_TOL for row in rows) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="harmonic-certify",
        description="Stability certificates for sparse frequency estimation.")
    parser.add_argument("--seed", type=int, default=0, help="experiment seed")
    parser.add_argument("--trials", type=int, default=50,
                        help="trials per noise level")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for trial sweeps")
    sub = parser.add_subparsers(dest="command", required=True)

    p_phi = sub.add_parser("phi", help="localizing function evaluation")
    phi_sub = p_phi.add_subparsers(dest="phi_command", required=True)
    p_eval = phi_sub.add_parser("eval")
    p_eval.add_argument("--grid", required=True, metavar="a:b:n")
    p_eval.add_argument("--dilate", type=int, default=0, metavar="N")
    p_eval.add_argument("--fourier", action="store_true")
    p_eval.add_argument("--out")
    p_eval.set_defaults(func=cmd_phi)

    p_bounds = sub.add_parser("bounds", help="energy inequality checks")
    bounds_sub = p_bounds.add_subparsers(dest="bounds_command", required=True)
    p_check = bounds_sub.add_parser("check")
    p_check.add_argument("--config", required=True)
    p_check.add_argument("--out")
    p_check.set_defaults(func=cmd_bounds_check)
    p_suite = bounds_sub.add_parser("suite")
    p_suite.add_argument("--configs", type=int, default=1000)
    p_suite.add_argument("--perturb", type=float, default=1.0)
    p_suite.add_argument("--out", default=None)
    p_suite.set_defaults(func=cmd_bounds_suite)

    p_vdm = sub.add_parser("vandermonde", help="singular value bounds")
    vdm_sub = p_vdm.add_subparsers(dest="vdm_command", required=True)
    p_verify = vdm_sub.add_parser("verify")
    p_verify.add_argument("--mode", choices=["separated", "pairs"], required=True)
    p_verify.add_argument("--config", required=True)
    p_verify.add_argument("--out", required=True)
    p_verify.set_defaults(func=cmd_vandermonde_verify)
    p_vsweep = vdm_sub.add_parser("sweep")
    p_vsweep.add_argument("--out", required=True)
    p_vsweep.set_defaults(func=cmd_vandermonde_sweep)

    p_est = sub.add_parser("estimate", help="ESPRIT + least squares")
    p_est.add_argument("--in", dest="infile", required=True)
    p_est.add_argument("--order", type=int, required=True)
    p_est.add_argument("--window", type=int, default=None)
    p_est.add_argument("--out")
    p_est.set_defaults(func=cmd_estimate)

    p_apost = sub.add_parser("apost", help="a posteriori certificate")
    p_apost.add_argument("--samples", required=True)
    p_apost.add_argument("--estimate", required=True)
    p_apost.add_argument("--sigma", type=float, required=True)
    p_apost.add_argument("--delta", type=float, required=True)
    p_apost.add_argument("--q", type=float, default=None)
    p_apost.add_argument("--out")
    p_apost.set_defaults(func=cmd_apost)

    p_fig = sub.add_parser("figure1", help="noisy-estimation study")
    p_fig.add_argument("--config", default=None)
    p_fig.add_argument("--out", required=True)
    p_fig.set_defaults(func=cmd_figure1)

    p_sharp = sub.add_parser("sharpness", help="near-collision sharpness sweep")
    p_sharp.add_argument("--config", default=None)
    p_sharp.add_argument("--out", required=True)
    p_sharp.set_defaults(func=cmd_sharpness)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
