"""Experiment runner: noisy-estimation study, sharpness sweeps, randomized
inequality suites, and their CSV/JSON artifacts.

All experiments are deterministic given their config: every trial derives
its own counter-based noise stream from (seed, sigma index, trial index),
aggregation is order independent, and floats are serialized with shortest
round-trip repr, so reruns produce byte-identical artifacts.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import bounds, vandermonde
from .estimation import default_window, estimate
from .exceptions import (AmbiguousMatch, ModelViolation, RankDeficient,
                         UnmatchedFrequencies)
from .noise import apost_certificate, gauss_norm_estimator, noise_stream
from .torus import (ExponentialSum, MatchPartition, SampleGrid, sample,
                    separation, wrap_frequency)

#: The four-term reference signal of the noisy-estimation study.
REFERENCE_MODEL = ExponentialSum((0.1, 0.3, 0.6, 0.9), (1.1, -1.1, 2.0, 2.0))

#: Noise levels bracketing the certificate breakdown at sigma = 1.
DEFAULT_SIGMA_GRID = (1e-3, 3e-3, 1e-2, 3e-2, 1e-1, 3e-1, 1.0)

DEFAULT_TAU_GRID = (1e-3, 1e-4, 1e-5)
DEFAULT_N_LIST = (10, 20, 50)


def _fmt(value) -> str:
    """Deterministic CSV field: shortest round-trip for floats."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_csv(path: Path, header: list, rows: list) -> None:
    with open(path, "w", newline="") as handle:
        handle.write(",".join(header) + "\n")
        for row in rows:
            handle.write(",".join(_fmt(v) for v in row) + "\n")


def write_json(path: Path, obj) -> None:
    with open(path, "w") as handle:
        json.dump(obj, handle, indent=2, sort_keys=True)
        handle.write("\n")


@dataclass(frozen=True)
class ExperimentConfig:
    """Settings shared by the experiment runners."""

    experiment: str = "figure1"
    seed: int = 0
    trials: int = 50
    sigma_grid: tuple = DEFAULT_SIGMA_GRID
    n: int = 20
    delta: float = 0.9
    model: ExponentialSum = REFERENCE_MODEL
    order: int = 4
    window: Optional[int] = None
    threads: int = 1
    tau_grid: tuple = DEFAULT_TAU_GRID
    n_list: tuple = DEFAULT_N_LIST
    suite_configs: int = 1000
    perturb_rhs: float = 1.0

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.experiment == "figure1" and not self.sigma_grid:
            raise ValueError("sigma_grid must be nonempty")
        if any(t == 0 for t in self.tau_grid):
            raise ValueError("tau = 0 is not representable (the two terms collide)")

    def to_json(self) -> dict:
        return {
            "experiment": self.experiment, "seed": self.seed,
            "trials": self.trials, "sigma_grid": list(self.sigma_grid),
            "n": self.n, "delta": self.delta, "model": self.model.to_json(),
            "order": self.order,
            "window": self.window if self.window is not None
            else default_window(2 * self.n + 1),
            "threads": self.threads, "tau_grid": list(self.tau_grid),
            "n_list": list(self.n_list), "suite_configs": self.suite_configs,
            "perturb_rhs": self.perturb_rhs,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentConfig":
        kwargs = dict(obj)
        if "model" in kwargs:
            kwargs["model"] = ExponentialSum.from_json(kwargs["model"])
        for key in ("sigma_grid", "tau_grid", "n_list"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of a single noisy estimation trial."""

    sigma: float
    seed_index: int
    sampling_distance: float
    error: Optional[float]
    estimator: float
    premise_ok: bool
    lemma_event_ok: bool


def run_trial(config: ExperimentConfig, sigma: float, sigma_index: int,
              trial: int) -> TrialRecord:
    """Noise, estimate, certify; failures are recorded, never raised."""
    f = config.model
    n = config.n
    grid = SampleGrid(-n, n)
    clean = sample(f, grid)
    rng = noise_stream(config.seed, key=(sigma_index, trial))
    eta = (rng.normal(scale=sigma, size=grid.size)
           + 1j * rng.normal(scale=sigma, size=grid.size))
    noisy = clean + eta
    # The weakest admissible separation parameter: the certificate then only
    # needs both sums to be 3/(n+1)-separated.
    q = 3.0 / (2 * n + 2)
    try:
        g = estimate(noisy, grid, config.order, config.window).to_exponential_sum()
    except (RankDeficient, ValueError):
        return TrialRecord(sigma, trial, float("nan"), None, float("nan"),
                           False, False)
    distance = float(np.sum(np.abs(clean - sample(g, grid)) ** 2))
    try:
        cert = apost_certificate(noisy, g, n, sigma, config.delta, q, truth=f)
        error = cert.weighted_error
        premise_ok = cert.verdict.value == "Certified"
        estimator = cert.estimator
    except (ModelViolation, AmbiguousMatch):
        # The estimate fell outside the separated model class; the
        # certificate does not apply but the estimator value is still
        # well defined for the record.
        residual_sq = float(np.sum(np.abs(noisy - sample(g, grid)) ** 2))
        estimator = gauss_norm_estimator(residual_sq, grid.size, sigma, config.delta)
        error, premise_ok = None, False
    except UnmatchedFrequencies:
        # Certified premise but no total matching: a tail event, recorded
        # as a failed lemma event with no error value.
        return TrialRecord(sigma, trial, distance, None, float("nan"), True, False)
    lemma_ok = bool(np.sqrt(distance) <= estimator)
    return TrialRecord(sigma, trial, distance, error, estimator, premise_ok, lemma_ok)


TRIAL_COLUMNS = ["sigma", "seed_index", "sampling_distance", "error",
                 "estimator", "premise_ok", "lemma_event_ok"]
FIGURE_COLUMNS = ["sigma", "max_error", "max_estimator", "max_sampling_distance",
                  "certified_fraction", "median_error", "median_estimator"]


def run_figure1(config: ExperimentConfig, out_dir: Optional[Path] = None) -> list:
    """The noisy-estimation study: per sigma, run trials and keep maxima.

    Returns one aggregate row per sigma as dicts (FIGURE_COLUMNS); when
    out_dir is given also writes figure1.csv, trials.csv and config.json.
    """
    records = []
    for sigma_index, sigma in enumerate(config.sigma_grid):
        tasks = [(sigma, sigma_index, t) for t in range(config.trials)]
        if config.threads > 1:
            with ThreadPoolExecutor(max_workers=config.threads) as pool:
                batch = list(pool.map(lambda a: run_trial(config, *a), tasks))
        else:
            batch = [run_trial(config, *task) for task in tasks]
        records.extend(batch)
    rows = []
    for sigma in config.sigma_grid:
        batch = [r for r in records if r.sigma == sigma]
        errors = [r.error for r in batch if r.error is not None]
        estimators = [r.estimator for r in batch if np.isfinite(r.estimator)]
        distances = [r.sampling_distance for r in batch if np.isfinite(r.sampling_distance)]
        rows.append({
            "sigma": sigma,
            "max_error": max(errors) if errors else None,
            "max_estimator": max(estimators) if estimators else None,
            "max_sampling_distance": max(distances) if distances else None,
            "certified_fraction": sum(r.premise_ok for r in batch) / len(batch),
            "median_error": float(np.median(errors)) if errors else None,
            "median_estimator": float(np.median(estimators)) if estimators else None,
        })
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        write_csv(out_dir / "figure1.csv", FIGURE_COLUMNS,
                  [[row[c] for c in FIGURE_COLUMNS] for row in rows])
        write_csv(out_dir / "trials.csv", TRIAL_COLUMNS,
                  [[r.sigma, r.seed_index,
                    r.sampling_distance if np.isfinite(r.sampling_distance) else None,
                    r.error,
                    r.estimator if np.isfinite(r.estimator) else None,
                    r.premise_ok, r.lemma_event_ok] for r in records])
        write_json(out_dir / "config.json", config.to_json())
    return rows


def two_term_difference(tau: float) -> ExponentialSum:
    """The sharpness probe 1 - e^{2 pi i tau x}; tau = 0 is rejected."""
    return ExponentialSum((0.0, tau), (1.0, -1.0))


SHARPNESS_COLUMNS = ["tau", "n", "lhs_energy", "rhs_weakened", "ratio"]


def run_sharpness(config: ExperimentConfig, out_dir: Optional[Path] = None) -> list:
    """Energy of the near-collision probe vs. the weakened bound."""
    rows = []
    for n in config.n_list:
        threshold = 3.0 / (n + 1)
        for tau in config.tau_grid:
            if not 0 < tau < threshold:
                raise ValueError(f"tau = {tau} is outside (0, 3/(n+1)) for n = {n}")
            f = two_term_difference(tau)
            partition = MatchPartition(((0.0, wrap_frequency(tau)),), (), threshold)
            report = bounds.check_main_bound(
                f, partition, SampleGrid(1, n), bounds.Variant.WEAKENED)
            rows.append({"tau": tau, "n": n, "lhs_energy": report.lhs,
                         "rhs_weakened": report.rhs,
                         "ratio": report.lhs / report.rhs})
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        write_csv(out_dir / "sharpness.csv", SHARPNESS_COLUMNS,
                  [[row[c] for c in SHARPNESS_COLUMNS] for row in rows])
        write_json(out_dir / "config.json", config.to_json())
    return rows


# ----------------------------------------------------------------------
# Randomized admissible scenario generators (shared with the test suite).

def _place_on_circle(rng, widths, clearance) -> list:
    """Left endpoints of blocks with given widths, consecutive clearance.

    Every block is followed by at least `clearance` of empty arc, so any
    two points of different blocks are at least `clearance` apart in wrap
    distance.  Requires sum(widths) + len(widths)*clearance <= 1.
    """
    k = len(widths)
    slack = 1.0 - sum(widths) - k * clearance
    if slack < 0:
        raise ValueError("blocks do not fit on the circle")
    extra = rng.dirichlet(np.ones(k)) * slack if k else []
    start = rng.uniform(0.0, 1.0)
    positions = []
    pos = start
    for width, pad in zip(widths, extra):
        positions.append(pos % 1.0)
        pos += width + clearance + pad
    return positions


def critical_dft_sum(grid: SampleGrid) -> tuple:
    """A sum at the critical separation q = 1/(B-A+2) vanishing on the grid.

    Uses the m = B-A+2 uniform frequencies j/m with coefficients
    e^{-2 pi i j k0 / m}, k0 the one residue missing from the window, so
    f(k) = m * [k == k0 mod m] = 0 on the grid.  Returns (f, q).
    """
    m = grid.size + 1
    j = np.arange(m)
    k0 = (grid.end + 1) % m
    coeffs = np.exp(-2j * np.pi * j * k0 / m)
    return ExponentialSum(j / m, coeffs), 1.0 / m


def random_wellsep_scenario(rng) -> tuple:
    """(f, grid, q) with separation(f) >= q; |Y| <= 8, q in [0.05, 0.4]."""
    q = float(rng.uniform(0.05, 0.4))
    m = int(rng.integers(1, min(8, int(0.9 / q)) + 1))
    freqs = _place_on_circle(rng, [0.0] * m, q)
    coeffs = rng.normal(size=m) + 1j * rng.normal(size=m)
    start = int(rng.integers(-25, 26))
    size = int(rng.integers(2, 102))
    return (ExponentialSum(freqs, coeffs), SampleGrid(start, start + size - 1), q)


def random_main_scenario(rng, n: int) -> tuple:
    """(f, partition) satisfying the decomposition hypotheses at 3/(n+1).

    Pair gaps are uniform in (0, 3/(n+1)); all other distances are at least
    3/(n+1); coefficients are standard complex Gaussians.
    """
    t = 3.0 / (n + 1)
    max_clusters = max(1, min(4, int(0.95 / t)))
    k = int(rng.integers(1, max_clusters + 1))
    kinds = rng.integers(0, 2, size=k)  # 1 = pair, 0 = singleton
    gaps = [float(rng.uniform(0.0, t)) if kind else 0.0 for kind in kinds]
    while sum(gaps) + k * t > 0.98:
        k -= 1
        kinds, gaps = kinds[:k], gaps[:k]
    anchors = _place_on_circle(rng, gaps, t)
    freqs, coeffs, pairs, unmatched = [], [], [], []
    for anchor, kind, gap in zip(anchors, kinds, gaps):
        c1 = complex(rng.normal(), rng.normal())
        freqs.append(anchor)
        coeffs.append(c1)
        if kind:
            partner = wrap_frequency(anchor + gap)
            freqs.append(partner)
            coeffs.append(complex(rng.normal(), rng.normal()))
            pairs.append((anchor, partner))
        else:
            unmatched.append((anchor, "first"))
    f = ExponentialSum(freqs, coeffs)
    partition = MatchPartition(tuple(pairs), tuple(unmatched), t)
    return f, partition


def random_separated_vspec(rng) -> tuple:
    """(spec, q) for the separated-columns singular value bound."""
    q = float(rng.uniform(0.05, 0.3))
    m = int(rng.integers(1, min(8, int(0.9 / q)) + 1))
    freqs = _place_on_circle(rng, [0.0] * m, q)
    rows = int(rng.integers(max(m, 4), 257))
    return vandermonde.VandermondeSpec(tuple(freqs), rows), q


def random_pairs_vspec(rng) -> tuple:
    """(spec_y, spec_yp, q) for the colliding-pairs singular value bound."""
    rows = int(rng.integers(16, 257))
    q = max(3.0 / (rows + 1), float(rng.uniform(0.05, 0.2)))
    tau = float(rng.uniform(0.0, q))
    if rng.uniform() < 0.5:
        tau *= 0.1  # spend half the budget deep in the tau^2 branch
    m = int(rng.integers(1, min(4, int(0.9 / (q + tau))) + 1))
    centers = _place_on_circle(rng, [0.0] * m, q + tau)
    partners = tuple(wrap_frequency(y + tau) for y in centers)
    return (vandermonde.VandermondeSpec(tuple(centers), rows),
            vandermonde.VandermondeSpec(partners, rows), q)


# ----------------------------------------------------------------------
# Randomized verification suite.

SUITE_COLUMNS = ["suite", "index", "lhs", "rhs", "slack", "holds"]


def check_scenario(scenario: dict) -> dict:
    """Evaluate one scenario JSON; returns {lhs, rhs, slack, holds, constants}.

    Scenario kinds:
      wellsep              {"check": "wellsep", "sum", "grid", "q"}
      main                 {"check": "main", "variant", "sum", "pairs", "grid"}
      vandermonde_separated {"check": ..., "frequencies", "rows", "q"}
      vandermonde_pairs    {"check": ..., "first", "second", "rows", "q"}

    Every kind is reduced to the orientation lhs >= rhs; for the two-sided
    separated bound the slack is the tighter of the two margins.
    """
    kind = scenario["check"]
    if kind == "wellsep":
        f = ExponentialSum.from_json(scenario["sum"])
        grid = SampleGrid(scenario["grid"]["start"], scenario["grid"]["end"])
        report = bounds.check_wellsep(f, grid, scenario["q"])
        return report.to_json()
    if kind == "main":
        f = ExponentialSum.from_json(scenario["sum"])
        grid = SampleGrid(scenario["grid"]["start"], scenario["grid"]["end"])
        pairs = tuple((a, b) for a, b in scenario["pairs"])
        in_pairs = {v for p in pairs for v in p}
        unmatched = tuple((y, "first") for y in f.frequencies if y not in in_pairs)
        partition = MatchPartition(pairs, unmatched, 3.0 / (grid.size + 1))
        report = bounds.check_main_bound(
            f, partition, grid, bounds.Variant(scenario["variant"]))
        return report.to_json()
    if kind == "vandermonde_separated":
        spec = vandermonde.VandermondeSpec(tuple(scenario["frequencies"]),
                                           scenario["rows"])
        report = vandermonde.verify_separated(spec, scenario["q"])
    elif kind == "vandermonde_pairs":
        report = vandermonde.verify_pairs(
            vandermonde.VandermondeSpec(tuple(scenario["first"]), scenario["rows"]),
            vandermonde.VandermondeSpec(tuple(scenario["second"]), scenario["rows"]),
            scenario["q"])
    else:
        raise ValueError(f"unknown scenario kind {kind!r}")
    lhs, rhs = report.sigma_min_squared, report.bound
    return {"lhs": lhs, "rhs": rhs, "slack": lhs - rhs, "holds": report.holds,
            "constants": {"sigma_min": report.sigma_min, "ratio": report.ratio}}


def run_bound_suite(config: ExperimentConfig, out_dir: Optional[Path] = None) -> dict:
    """Randomized verification of the energy and singular-value bounds.

    Runs `suite_configs` scenarios of the two-sided separated bound (both
    inequalities recorded, plus one deliberately near-tight upper case), of
    the decomposition bound (all three variants, n from config.n_list), and
    of both singular-value bounds.  `perturb_rhs` scales every right-hand
    side: the self-test value 1.01 must produce detected failures.  Any
    failed inequality emits a replayable scenario JSON.
    """
    total = passed = 0
    rows = []
    reproducers = []
    scale = config.perturb_rhs

    def record(suite, index, lhs, rhs, scenario) -> None:
        nonlocal total, passed
        rhs_eff = rhs * scale
        slack = lhs - rhs_eff
        ok = slack >= -bounds.REL_TOL * max(1.0, lhs)
        total += 1
        passed += ok
        rows.append([suite, index, lhs, rhs_eff, slack, ok])
        if not ok:
            reproducers.append({"suite": suite, "index": index,
                                "lhs": lhs, "rhs_unperturbed": rhs,
                                "scenario": scenario})

    n_configs = config.suite_configs
    rng = noise_stream(config.seed, key=(101,))
    for i in range(n_configs):
        f, grid, q = random_wellsep_scenario(rng)
        report = bounds.check_wellsep(f, grid, q)
        scenario = {"check": "wellsep", "sum": f.to_json(),
                    "grid": {"start": grid.start, "end": grid.end}, "q": q}
        record("wellsep_lower", i, report.lhs, report.rhs, scenario)
        record("wellsep_upper", i, report.constants["upper_rhs"], report.lhs,
               scenario)

    # Near-tight upper bound: a single exponential on a long grid has energy
    # size*|c|^2 against the bound (size+1)*|c|^2, ratio 1 + 1/size.
    tight = ExponentialSum((0.37,), (1.0,))
    tight_grid = SampleGrid(0, 100)
    report = bounds.check_wellsep(tight, tight_grid, 0.5)
    record("wellsep_upper", n_configs, report.constants["upper_rhs"], report.lhs,
           {"check": "wellsep", "sum": tight.to_json(),
            "grid": {"start": 0, "end": 100}, "q": 0.5})

    per_n = max(1, n_configs // len(config.n_list))
    for vi, variant in enumerate(bounds.Variant):
        rng = noise_stream(config.seed, key=(102, vi))
        for n in config.n_list:
            grid = (SampleGrid(-n, n) if variant is bounds.Variant.SYMMETRIC
                    else SampleGrid(1, n))
            for i in range(per_n):
                f, partition = random_main_scenario(rng, grid.size)
                report = bounds.check_main_bound(f, partition, grid, variant)
                scenario = {"check": "main", "variant": variant.value,
                            "sum": f.to_json(),
                            "pairs": [list(p) for p in partition.pairs],
                            "grid": {"start": grid.start, "end": grid.end}}
                record(f"main_{variant.value}_n{n}", i, report.lhs, report.rhs,
                       scenario)

    rng = noise_stream(config.seed, key=(103,))
    for i in range(n_configs):
        spec, q = random_separated_vspec(rng)
        report = vandermonde.verify_separated(spec, q)
        scenario = {"check": "vandermonde_separated", "q": q,
                    "frequencies": list(spec.frequencies), "rows": spec.rows}
        record("vandermonde_separated", i, report.sigma_min_squared,
               report.bound, scenario)

    rng = noise_stream(config.seed, key=(104,))
    for i in range(n_configs):
        spec_y, spec_yp, q = random_pairs_vspec(rng)
        report = vandermonde.verify_pairs(spec_y, spec_yp, q)
        scenario = {"check": "vandermonde_pairs", "q": q,
                    "first": list(spec_y.frequencies),
                    "second": list(spec_yp.frequencies), "rows": spec_y.rows}
        record("vandermonde_pairs", i, report.sigma_min_squared, report.bound,
               scenario)

    summary = {"total": total, "passed": passed, "failed": total - passed,
               "perturb_rhs": scale, "seed": config.seed}
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        write_csv(out_dir / "bound_suite.csv", SUITE_COLUMNS, rows)
        write_json(out_dir / "summary.json", summary)
        if reproducers:
            write_json(out_dir / "reproducers.json", reproducers)
    return summary


VSWEEP_COLUMNS = ["N", "M", "q", "tau", "sigma_min_sq", "bound", "ratio",
                  "holds", "pair_antisymmetry"]


def run_vandermonde_sweep(config: ExperimentConfig,
                          out_dir: Optional[Path] = None) -> list:
    """tau sweep of the pairs bound on a fixed two-set geometry.

    Frequencies {0.2, 0.7} shifted by tau; reports sigma_min^2, bound, ratio
    and the antisymmetry diagnostic of the smallest singular vector.
    """
    rows = []
    for n in config.n_list:
        base = (0.2, 0.7)
        q = 0.45
        for tau in config.tau_grid:
            spec_y = vandermonde.VandermondeSpec(base, n)
            spec_yp = vandermonde.VandermondeSpec(
                tuple(wrap_frequency(y + tau) for y in base), n)
            report = vandermonde.verify_pairs(spec_y, spec_yp, q)
            rows.append([n, 2 * len(base), q, report.tau,
                         report.sigma_min_squared, report.bound, report.ratio,
                         report.holds, report.pair_antisymmetry])
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        write_csv(out_dir / "vandermonde_sweep.csv", VSWEEP_COLUMNS, rows)
        write_json(out_dir / "config.json", config.to_json())
    return rows
