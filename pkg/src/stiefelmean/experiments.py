"""Seeded, self-describing experiment drivers.

Four experiment kinds are built in:

* ``discrepancy_stats``: per-sample discrepancy to the center versus the
  mixed-composition mismatch at the center, with medians and a Spearman
  rank correlation;
* ``convergence``: one shared sample cloud and initial guess, averaged under
  all three map pairs, tracing the per-iteration discrepancy to the center;
* ``runtime_vs_n`` / ``runtime_vs_p``: wall-clock timing of the full
  averaging call per map pair over a sweep of the column or row dimension,
  fresh sample cloud per trial, one untimed warm-up run before each timed
  run, medians reported.

Desk-scale defaults keep every run in the minutes range; ``paper_scale=True``
switches to the full-size protocols (bigger sample counts, wider sweeps, 100
trials). All randomness derives from the experiment seed via ``derive_seed``,
so rows are bit-reproducible except for wall-time columns. Each CSV starts
with '#' comment lines recording the complete spec and seed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import stats

from .averaging import AveragingConfig, AveragingReport, fixed_point_mean
from .errors import DomainError, StiefelMeanError, ValidationError
from .manifold import (
    Dims,
    derive_seed,
    discrepancy,
    generate_center,
    generate_samples,
    perturb_initial_guess,
)
from .maps import ALL_PAIRS, MapPair, composition_discrepancy_direct

KINDS = ("discrepancy_stats", "convergence", "runtime_vs_n", "runtime_vs_p")


@dataclass(frozen=True)
class ExperimentSpec:
    """Complete description of one experiment run.

    For the runtime kinds, ``sweep`` lists the varying dimension (n for
    ``runtime_vs_n`` with p fixed, p for ``runtime_vs_p`` with n fixed) and
    must be strictly increasing. ``trials`` repetitions are timed per swept
    value; other kinds use a single draw. ``parallel_trials`` runs trials on
    worker threads (rows stay deterministic; wall times become contention
    prone, so it is off by default and flagged in the output).
    """

    kind: str
    p: int
    n: int
    n_samples: int
    sigma: float
    seed: int
    trials: int = 1
    sweep: Optional[Tuple[int, ...]] = None
    pairs: Tuple[MapPair, ...] = ALL_PAIRS
    paper_scale: bool = False
    parallel_trials: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown experiment kind '{self.kind}'")
        if self.trials < 1:
            raise ValidationError(f"trials must be >= 1, got {self.trials}")
        if self.n_samples < 1:
            raise ValidationError(f"n_samples must be >= 1, got {self.n_samples}")
        if self.sigma < 0.0:
            raise ValidationError(f"sigma must be nonnegative, got {self.sigma}")
        if not self.pairs:
            raise ValidationError("at least one map pair is required")
        if self.kind in ("runtime_vs_n", "runtime_vs_p"):
            if not self.sweep:
                raise ValidationError(f"{self.kind} needs a dimension sweep")
            if any(b <= a for a, b in zip(self.sweep, self.sweep[1:])):
                raise ValidationError("sweep values must be strictly increasing")
        Dims(self.p, self.n)  # validates 1 <= n <= p

    def describe(self) -> str:
        sweep = "-" if self.sweep is None else ",".join(str(v) for v in self.sweep)
        pairs = ",".join(pair.label for pair in self.pairs)
        return (
            f"kind={self.kind} p={self.p} n={self.n} sweep={sweep} "
            f"N={self.n_samples} sigma={self.sigma!r} trials={self.trials} "
            f"seed={self.seed} pairs={pairs} "
            f"paper_scale={str(self.paper_scale).lower()} "
            f"parallel={str(self.parallel_trials).lower()}"
        )


def default_spec(kind: str, seed: int, paper_scale: bool = False, **overrides) -> ExperimentSpec:
    """Desk-scale (or paper-scale) defaults for each experiment kind.

    Keyword overrides replace individual fields, e.g. ``sigma=0.1`` or
    ``sweep=(5, 10)``.
    """
    if kind == "discrepancy_stats":
        base = dict(p=20, n=4, n_samples=20000 if paper_scale else 1000,
                    sigma=0.05, trials=1, sweep=None)
    elif kind == "convergence":
        base = dict(p=20, n=4, n_samples=30, sigma=0.2, trials=1, sweep=None)
    elif kind == "runtime_vs_n":
        base = dict(
            p=100, n=5, n_samples=50, sigma=0.01,
            trials=100 if paper_scale else 20,
            sweep=(5, 10, 15, 20, 25, 30, 35, 40) if paper_scale else (5, 10, 20, 30),
        )
    elif kind == "runtime_vs_p":
        base = dict(
            n=10, p=20, n_samples=50, sigma=0.01,
            trials=100 if paper_scale else 20,
            sweep=(20, 50, 100, 200, 300, 400) if paper_scale else (20, 50, 100, 200),
        )
    else:
        raise ValidationError(f"unknown experiment kind '{kind}'")
    base.update(kind=kind, seed=seed, paper_scale=paper_scale)
    base.update(overrides)
    if "sweep" in base and base["sweep"] is not None:
        base["sweep"] = tuple(int(v) for v in base["sweep"])
    return ExperimentSpec(**base)


@dataclass
class TimingRecord:
    """One timed averaging run: which pair, which swept dimension value,
    which trial, how long, how many iterations, and whether it converged."""

    pair: str
    dim: int
    trial: int
    wall_time: float
    iterations: int
    converged: bool


def csv_filename(spec: ExperimentSpec) -> str:
    return f"{spec.kind}_{spec.seed}.csv"


def _write_csv(path, spec: ExperimentSpec, summary_lines, header: str, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# stiefelmean experiment {spec.describe()}\n")
        for line in summary_lines:
            fh.write(f"# {line}\n")
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")


@dataclass
class DiscrepancyStatsResult:
    spec: ExperimentSpec
    rows: List[Tuple[int, float, float]]
    median_delta: float
    median_composition: float
    spearman: float

    def write_csv(self, path) -> None:
        summary = [
            f"median_delta_C_Xk={self.median_delta:.17g}",
            f"median_Delta_C_Xk={self.median_composition:.17g}",
            f"spearman_rank_correlation={self.spearman:.17g}",
        ]
        rows = [(k, f"{d:.17g}", f"{dd:.17g}") for k, d, dd in self.rows]
        _write_csv(path, self.spec, summary, "k,delta_C_Xk,Delta_C_Xk", rows)


def run_discrepancy_stats(spec: ExperimentSpec) -> DiscrepancyStatsResult:
    """Per-sample (delta(C, X_k), Delta_C(X_k)) pairs on one seeded cloud.

    The composition mismatch is evaluated by actually composing the maps.
    Failures abort with the sample index attached.
    """
    if spec.kind != "discrepancy_stats":
        raise ValidationError(f"spec kind is {spec.kind}, not discrepancy_stats")
    dims = Dims(spec.p, spec.n)
    center = generate_center(dims, derive_seed(spec.seed, 0))
    cloud = generate_samples(center, spec.sigma, spec.n_samples, derive_seed(spec.seed, 1))
    rows = []
    for k, xk in enumerate(cloud.samples):
        try:
            d = discrepancy(center, xk)
            comp = composition_discrepancy_direct(center, xk).value
        except StiefelMeanError as exc:
            raise DomainError(f"sample {k}: {exc}", sample_index=k) from exc
        rows.append((k, d, comp))
    deltas = np.array([r[1] for r in rows])
    comps = np.array([r[2] for r in rows])
    if np.ptp(deltas) == 0.0 and np.ptp(comps) == 0.0:
        spearman = 0.0  # constant columns (e.g. sigma = 0) have no rank trend
    else:
        spearman = float(stats.spearmanr(deltas, comps).statistic)
    return DiscrepancyStatsResult(
        spec=spec,
        rows=rows,
        median_delta=float(np.median(deltas)),
        median_composition=float(np.median(comps)),
        spearman=spearman,
    )


@dataclass
class ConvergenceResult:
    spec: ExperimentSpec
    rows: List[Tuple[str, int, float]]
    reports: Dict[str, AveragingReport]
    failures: Dict[str, str]

    def write_csv(self, path) -> None:
        summary = []
        for label, report in self.reports.items():
            deltas = report.iterates_delta_to_center
            summary.append(
                f"pair={label} converged={str(report.converged).lower()} "
                f"iterations={report.iterations_used} "
                f"final_delta_to_center={deltas[-1]:.17g} "
                f"residual_field_norm={report.residual_field_norm:.17g}"
            )
        for label, message in self.failures.items():
            summary.append(f"pair={label} FAILED: {message}")
        rows = [(label, i, f"{d:.17g}") for label, i, d in self.rows]
        _write_csv(path, self.spec, summary, "pair,iter,delta_to_center", rows)


def run_convergence(spec: ExperimentSpec) -> ConvergenceResult:
    """Average one shared cloud under every configured pair from the same
    initial guess; rows trace delta(X_i, C) per iteration. A pair that fails
    is recorded and the remaining pairs still run."""
    if spec.kind != "convergence":
        raise ValidationError(f"spec kind is {spec.kind}, not convergence")
    dims = Dims(spec.p, spec.n)
    center = generate_center(dims, derive_seed(spec.seed, 0))
    cloud = generate_samples(center, spec.sigma, spec.n_samples, derive_seed(spec.seed, 1))
    initial = perturb_initial_guess(cloud.samples[0], 0.01, derive_seed(spec.seed, 2))
    rows: List[Tuple[str, int, float]] = []
    reports: Dict[str, AveragingReport] = {}
    failures: Dict[str, str] = {}
    for pair in spec.pairs:
        config = AveragingConfig(pair=pair)
        try:
            report = fixed_point_mean(cloud, config, initial)
        except StiefelMeanError as exc:
            failures[pair.label] = str(exc)
            continue
        reports[pair.label] = report
        for i, d in enumerate(report.iterates_delta_to_center):
            rows.append((pair.label, i, d))
    return ConvergenceResult(spec=spec, rows=rows, reports=reports, failures=failures)


@dataclass
class RuntimeResult:
    spec: ExperimentSpec
    records: List[TimingRecord]
    medians: Dict[Tuple[str, int], float]
    failures: Dict[Tuple[str, int], int] = field(default_factory=dict)

    def median_by_dim(self, pair_label: str) -> Dict[int, float]:
        return {
            dim: med for (label, dim), med in self.medians.items()
            if label == pair_label
        }

    def write_csv(self, path) -> None:
        summary = [
            "timing protocol: per trial one untimed warm-up run precedes the "
            "timed run; medians over trials",
        ]
        for (label, dim), med in sorted(self.medians.items()):
            summary.append(f"median pair={label} dim={dim} wall_time_s={med:.17g}")
        for (label, dim), cnt in sorted(self.failures.items()):
            summary.append(f"failed_trials pair={label} dim={dim} count={cnt}")
        rows = [
            (r.pair, r.dim, r.trial, f"{r.wall_time:.9f}", r.iterations,
             str(r.converged).lower())
            for r in self.records
        ]
        _write_csv(
            path, self.spec, summary,
            "pair,dim,trial,wall_time_s,iterations,converged", rows,
        )


def _timed_trial(spec, pair, dims, dim_index, trial):
    sample_seed = derive_seed(spec.seed, dim_index, trial, 0)
    init_seed = derive_seed(spec.seed, dim_index, trial, 1)
    center = generate_center(dims, derive_seed(spec.seed, dim_index, trial, 2))
    cloud = generate_samples(center, spec.sigma, spec.n_samples, sample_seed)
    initial = perturb_initial_guess(cloud.samples[0], 0.01, init_seed)
    config = AveragingConfig(pair=pair)
    fixed_point_mean(cloud, config, initial)  # warm-up, untimed
    t0 = time.perf_counter()
    report = fixed_point_mean(cloud, config, initial)
    elapsed = time.perf_counter() - t0
    return elapsed, report


def _run_runtime(spec: ExperimentSpec, vary: str) -> RuntimeResult:
    records: List[TimingRecord] = []
    failures: Dict[Tuple[str, int], int] = {}

    tasks = []
    for dim_index, dim in enumerate(spec.sweep):
        dims = Dims(dim, spec.n) if vary == "p" else Dims(spec.p, dim)
        for pair in spec.pairs:
            for trial in range(spec.trials):
                tasks.append((pair, dims, dim, dim_index, trial))

    def execute(task):
        pair, dims, dim, dim_index, trial = task
        try:
            elapsed, report = _timed_trial(spec, pair, dims, dim_index, trial)
        except StiefelMeanError:
            return (pair.label, dim, trial, None)
        return (
            pair.label, dim, trial,
            TimingRecord(
                pair=pair.label, dim=dim, trial=trial, wall_time=elapsed,
                iterations=report.iterations_used, converged=report.converged,
            ),
        )

    if spec.parallel_trials:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor() as pool:
            outcomes = list(pool.map(execute, tasks))
    else:
        outcomes = [execute(t) for t in tasks]

    for label, dim, trial, record in outcomes:
        if record is None:
            failures[(label, dim)] = failures.get((label, dim), 0) + 1
        else:
            records.append(record)

    records.sort(key=lambda r: (r.pair, r.dim, r.trial))
    medians: Dict[Tuple[str, int], float] = {}
    for pair in spec.pairs:
        for dim in spec.sweep:
            times = [
                r.wall_time for r in records if r.pair == pair.label and r.dim == dim
            ]
            if times:
                medians[(pair.label, dim)] = float(np.median(times))
    return RuntimeResult(spec=spec, records=records, medians=medians, failures=failures)


def run_runtime_vs_n(spec: ExperimentSpec) -> RuntimeResult:
    """Time the full averaging call on St(p, n) for each swept n (p fixed)."""
    if spec.kind != "runtime_vs_n":
        raise ValidationError(f"spec kind is {spec.kind}, not runtime_vs_n")
    return _run_runtime(spec, vary="n")


def run_runtime_vs_p(spec: ExperimentSpec) -> RuntimeResult:
    """Time the full averaging call on St(p, n) for each swept p (n fixed)."""
    if spec.kind != "runtime_vs_p":
        raise ValidationError(f"spec kind is {spec.kind}, not runtime_vs_p")
    return _run_runtime(spec, vary="p")


def run_experiment(spec: ExperimentSpec):
    """Dispatch on ``spec.kind``."""
    runner = {
        "discrepancy_stats": run_discrepancy_stats,
        "convergence": run_convergence,
        "runtime_vs_n": run_runtime_vs_n,
        "runtime_vs_p": run_runtime_vs_p,
    }[spec.kind]
    return runner(spec)
