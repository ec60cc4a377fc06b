"""Seeded benchmark harness comparing the dense and FFT solver backends.

Each trial draws a sparse geometry, random off-grid targets, and noise
from seeds derived per (solver, L1, n_iter, trial), runs the regular
and fast backends with identical hyperparameters, and records wall
clock times of the iteration loops plus the relative discrepancy
``epsilon_r = ||c_reg - c_fast|| / ||c_reg||`` between the estimates.
Trials run strictly sequentially so timings are not polluted by
concurrent work.
"""

import csv
import logging
import math
import time
from dataclasses import dataclass, fields

import numpy as np

from .arrays import (
    Target,
    make_ura,
    snr_to_noise_variance,
    subsample_preserving_aperture,
    synthesize_snapshot,
)
from .bccb import bccb_matvec, gram_operator
from .dictionary import (
    COMPLEX_BYTES,
    DEFAULT_MEMORY_BUDGET_BYTES,
    apply_adjoint,
    build_subsampled_dictionary,
    dense_gram,
    make_uniform_grid,
)
from .errors import ConfigError, InvalidArgumentError, ZeroReferenceError
from .solvers import (
    BACKEND_FAST,
    BACKEND_REGULAR,
    STEP_SIZE_INFLATION,
    LassoProblem,
    SolverConfig,
    admm_solve,
    fista_solve,
    ista_solve,
    max_gram_eigenvalue,
)
from .textio import fmt

logger = logging.getLogger(__name__)

SOLVER_IDS = {"ista": 1, "fista": 2, "admm": 3}
_SOLVE_FUNCTIONS = {"ista": ista_solve, "fista": fista_solve, "admm": admm_solve}

RECORD_FIELDS = (
    "solver",
    "l1",
    "l2",
    "n_iter",
    "trial_index",
    "t_reg_ms",
    "t_fast_ms",
    "epsilon_r",
    "seed",
    "t_reg_precompute_ms",
    "t_fast_precompute_ms",
)
SUMMARY_FIELDS = (
    "solver",
    "l1",
    "l2",
    "n_iter",
    "trials",
    "mean_t_reg_ms",
    "mean_t_fast_ms",
    "mean_epsilon_r",
)


@dataclass(frozen=True, slots=True)
class ExperimentConfig:
    """Benchmark sweep description; defaults reproduce the reference setup."""

    m1_count: int = 51
    m2_count: int = 16
    element_count: int = 40
    l2: int = 32
    l1_values: tuple[int, ...] = (64, 128, 256, 512)
    iteration_values: tuple[int, ...] = (50, 100, 200, 400)
    snr_db: float = 15.0
    k_range: tuple[int, int] = (1, 10)
    trials: int = 10
    base_seed: int = 1729
    solvers: tuple[str, ...] = ("ista", "fista", "admm")
    memory_budget_bytes: int = DEFAULT_MEMORY_BUDGET_BYTES
    tau_fraction: float = 0.1

    def __post_init__(self) -> None:
        object.__setattr__(self, "l1_values", tuple(int(v) for v in self.l1_values))
        object.__setattr__(
            self, "iteration_values", tuple(int(v) for v in self.iteration_values)
        )
        object.__setattr__(self, "solvers", tuple(str(s) for s in self.solvers))
        object.__setattr__(self, "k_range", tuple(int(v) for v in self.k_range))
        if self.m1_count < 1 or self.m2_count < 1:
            raise InvalidArgumentError("grid extents must be positive")
        if not 4 <= self.element_count <= self.m1_count * self.m2_count:
            raise InvalidArgumentError("element count outside the subsampling range")
        if self.l2 < 1 or not self.l1_values or min(self.l1_values) < 1:
            raise InvalidArgumentError("grid lengths must be positive")
        if not self.iteration_values or min(self.iteration_values) < 1:
            raise InvalidArgumentError("iteration counts must be positive")
        if len(self.k_range) != 2 or not 1 <= self.k_range[0] <= self.k_range[1]:
            raise InvalidArgumentError("k_range must satisfy 1 <= min <= max")
        if self.trials < 1:
            raise InvalidArgumentError("trial count must be positive")
        if not self.solvers or any(s not in SOLVER_IDS for s in self.solvers):
            raise InvalidArgumentError(f"solvers must be a nonempty subset of {set(SOLVER_IDS)}")
        if self.memory_budget_bytes < 1:
            raise InvalidArgumentError("memory budget must be positive")
        if self.tau_fraction <= 0:
            raise InvalidArgumentError("tau fraction must be positive")


@dataclass(frozen=True, slots=True)
class TrialRecord:
    """One backend-comparison run; times in milliseconds, loop only.

    ``t_reg_ms`` and ``epsilon_r`` are NaN when the dense problem did
    not fit the memory budget and only the fast backend ran.  The
    precompute columns report backend-specific setup (dense Gram or
    shifted-inverse build, BCCB eigenvalue build); costs shared by both
    backends (dictionary, right-hand side, step size) are excluded.
    """

    solver: str
    l1: int
    l2: int
    n_iter: int
    trial_index: int
    t_reg_ms: float
    t_fast_ms: float
    epsilon_r: float
    seed: int
    t_reg_precompute_ms: float
    t_fast_precompute_ms: float

    def __post_init__(self) -> None:
        if self.solver not in SOLVER_IDS:
            raise InvalidArgumentError(f"unknown solver {self.solver!r}")
        if not self.t_fast_ms > 0:
            raise InvalidArgumentError("fast timing must be positive")
        if not (math.isnan(self.t_reg_ms) or self.t_reg_ms > 0):
            raise InvalidArgumentError("regular timing must be positive or NaN")
        if not (math.isnan(self.epsilon_r) or self.epsilon_r >= 0):
            raise InvalidArgumentError("epsilon_r must be nonnegative or NaN")


@dataclass(frozen=True, slots=True)
class CellSummary:
    """Per-cell means over trials for one (solver, L1, n_iter) combination."""

    solver: str
    l1: int
    l2: int
    n_iter: int
    trials: int
    mean_t_reg_ms: float
    mean_t_fast_ms: float
    mean_epsilon_r: float


def relative_error(a: np.ndarray, b: np.ndarray) -> float:
    """Relative l2 discrepancy ``||a - b|| / ||a||`` with ``a`` as reference."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise InvalidArgumentError(f"shape mismatch: {a.shape} vs {b.shape}")
    denominator = float(np.linalg.norm(a))
    if denominator == 0.0:
        raise ZeroReferenceError("relative error against a zero-norm reference")
    return float(np.linalg.norm(a - b)) / denominator


def draw_targets(rng: np.random.Generator, k_range: tuple[int, int]) -> list[Target]:
    """Unit-modulus random-phase targets with harmonics uniform on [-1/2, 1/2)^2."""
    count = int(rng.integers(k_range[0], k_range[1] + 1))
    f1 = rng.uniform(-0.5, 0.5, count)
    f2 = rng.uniform(-0.5, 0.5, count)
    phases = rng.uniform(0.0, 2.0 * np.pi, count)
    return [
        Target(float(f1[k]), float(f2[k]), complex(np.exp(1j * phases[k])))
        for k in range(count)
    ]


def run_trial(
    config: ExperimentConfig, solver: str, l1: int, n_iter: int, trial_index: int
) -> TrialRecord:
    """Run one seeded backend comparison and return its record.

    The trial seed is derived from (base_seed, solver, l1, n_iter,
    trial_index), so every cell is independently reproducible.  The
    regular backend is skipped (NaN timings) when the dense ``L x L``
    matrix exceeds the memory budget; the fast backend always runs.
    """
    if solver not in SOLVER_IDS:
        raise InvalidArgumentError(f"unknown solver {solver!r}")
    if l1 < 1 or n_iter < 1 or trial_index < 0:
        raise InvalidArgumentError("l1 and n_iter must be positive, trial_index nonnegative")

    seed_seq = np.random.SeedSequence(
        (config.base_seed, SOLVER_IDS[solver], l1, n_iter, trial_index)
    )
    words = seed_seq.generate_state(4)
    record_seed = int(words[0])

    geometry = subsample_preserving_aperture(
        make_ura(config.m1_count, config.m2_count), config.element_count, seed=int(words[1])
    )
    targets = draw_targets(np.random.default_rng(int(words[2])), config.k_range)
    noise_variance = snr_to_noise_variance(targets, config.snr_db)
    snapshot = synthesize_snapshot(geometry, targets, noise_variance, seed=int(words[3]))

    grid1 = make_uniform_grid(l1)
    grid2 = make_uniform_grid(config.l2)
    dimension = l1 * config.l2
    dictionary = build_subsampled_dictionary(
        geometry, grid1, grid2, memory_budget_bytes=config.memory_budget_bytes
    )
    b = apply_adjoint(dictionary, snapshot.values)
    tau = config.tau_fraction * float(np.max(np.abs(b)))

    build_start = time.perf_counter()
    operator = gram_operator(geometry, l1, config.l2)
    fast_build_seconds = time.perf_counter() - build_start

    mu = None
    if solver in ("ista", "fista"):
        lam = max_gram_eigenvalue(
            lambda vector: bccb_matvec(operator, vector), dimension, seed=record_seed
        )
        mu = 1.0 / (lam * (1.0 + STEP_SIZE_INFLATION))

    solve = _SOLVE_FUNCTIONS[solver]
    nan = float("nan")
    t_reg_ms = nan
    reg_precompute_ms = nan
    epsilon = nan
    reg_estimate = None

    if dimension * dimension * COMPLEX_BYTES <= config.memory_budget_bytes:
        gram_build_seconds = 0.0
        if solver == "admm":
            # The dense shifted inverse is built from the dictionary rows,
            # so the L x L Gram itself is never materialized here.
            reg_problem = LassoProblem(
                gram=operator, adjoint_rhs=b, tau=tau, dictionary_matrix=dictionary.matrix
            )
        else:
            gram_start = time.perf_counter()
            gram = dense_gram(dictionary)
            gram_build_seconds = time.perf_counter() - gram_start
            reg_problem = LassoProblem(gram=gram, adjoint_rhs=b, tau=tau)
            gram = None
        reg_result = solve(
            reg_problem, SolverConfig(iterations=n_iter, step_size_mu=mu, backend=BACKEND_REGULAR)
        )
        reg_estimate = reg_result.estimate
        t_reg_ms = reg_result.total_seconds * 1e3
        reg_precompute_ms = (gram_build_seconds + reg_result.precompute_seconds) * 1e3
        # Release the dense matrices before timing the fast backend.
        reg_problem = None
        reg_result = None

    fast_problem = LassoProblem(gram=operator, adjoint_rhs=b, tau=tau)
    fast_result = solve(
        fast_problem, SolverConfig(iterations=n_iter, step_size_mu=mu, backend=BACKEND_FAST)
    )
    if reg_estimate is not None:
        if not reg_estimate.any():
            # Over-regularized cell: a zero reference leaves epsilon_r
            # undefined; the backends still agree when both are zero.
            epsilon = 0.0 if not fast_result.estimate.any() else float("nan")
            if np.isnan(epsilon):
                logger.warning(
                    "zero regular estimate for %s l1=%d n_iter=%d trial=%d; "
                    "recording epsilon_r as nan",
                    solver, l1, n_iter, trial_index,
                )
        else:
            epsilon = relative_error(reg_estimate, fast_result.estimate)

    return TrialRecord(
        solver=solver,
        l1=l1,
        l2=config.l2,
        n_iter=n_iter,
        trial_index=trial_index,
        t_reg_ms=t_reg_ms,
        t_fast_ms=fast_result.total_seconds * 1e3,
        epsilon_r=epsilon,
        seed=record_seed,
        t_reg_precompute_ms=reg_precompute_ms,
        t_fast_precompute_ms=(fast_build_seconds + fast_result.precompute_seconds) * 1e3,
    )


def summarize(records: list[TrialRecord]) -> list[CellSummary]:
    """Per-cell arithmetic means, cells ordered by first appearance."""
    groups: dict[tuple, list[TrialRecord]] = {}
    for record in records:
        key = (record.solver, record.l1, record.l2, record.n_iter)
        groups.setdefault(key, []).append(record)
    return [
        CellSummary(
            solver=solver,
            l1=l1,
            l2=l2,
            n_iter=n_iter,
            trials=len(cell),
            mean_t_reg_ms=float(np.mean([r.t_reg_ms for r in cell])),
            mean_t_fast_ms=float(np.mean([r.t_fast_ms for r in cell])),
            mean_epsilon_r=float(np.mean([r.epsilon_r for r in cell])),
        )
        for (solver, l1, l2, n_iter), cell in groups.items()
    ]


def run_grid(config: ExperimentConfig) -> tuple[list[TrialRecord], list[CellSummary]]:
    """Full Cartesian sweep over solvers, L1 values, iteration counts, trials."""
    records: list[TrialRecord] = []
    for solver in config.solvers:
        for l1 in config.l1_values:
            for n_iter in config.iteration_values:
                for trial_index in range(config.trials):
                    record = run_trial(config, solver, l1, n_iter, trial_index)
                    logger.info(
                        "%s l1=%d n_iter=%d trial=%d: t_reg=%.3fms t_fast=%.3fms eps=%.3e",
                        solver,
                        l1,
                        n_iter,
                        trial_index,
                        record.t_reg_ms,
                        record.t_fast_ms,
                        record.epsilon_r,
                    )
                    records.append(record)
    return records, summarize(records)


def write_records_csv(path, records: list[TrialRecord]) -> None:
    """Write one CSV row per trial in the fixed field order."""
    with open(path, "w") as fh:
        fh.write(",".join(RECORD_FIELDS) + "\n")
        for r in records:
            fh.write(
                f"{r.solver},{r.l1},{r.l2},{r.n_iter},{r.trial_index},"
                f"{fmt(r.t_reg_ms)},{fmt(r.t_fast_ms)},{fmt(r.epsilon_r)},{r.seed},"
                f"{fmt(r.t_reg_precompute_ms)},{fmt(r.t_fast_precompute_ms)}\n"
            )


def read_records_csv(path) -> list[TrialRecord]:
    """Read back a records CSV written by :func:`write_records_csv`."""
    records: list[TrialRecord] = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            records.append(
                TrialRecord(
                    solver=row["solver"],
                    l1=int(row["l1"]),
                    l2=int(row["l2"]),
                    n_iter=int(row["n_iter"]),
                    trial_index=int(row["trial_index"]),
                    t_reg_ms=float(row["t_reg_ms"]),
                    t_fast_ms=float(row["t_fast_ms"]),
                    epsilon_r=float(row["epsilon_r"]),
                    seed=int(row["seed"]),
                    t_reg_precompute_ms=float(row["t_reg_precompute_ms"]),
                    t_fast_precompute_ms=float(row["t_fast_precompute_ms"]),
                )
            )
    return records


def write_summary_csv(path, summaries: list[CellSummary]) -> None:
    """Write the per-cell aggregate table."""
    with open(path, "w") as fh:
        fh.write(",".join(SUMMARY_FIELDS) + "\n")
        for s in summaries:
            fh.write(
                f"{s.solver},{s.l1},{s.l2},{s.n_iter},{s.trials},"
                f"{fmt(s.mean_t_reg_ms)},{fmt(s.mean_t_fast_ms)},{fmt(s.mean_epsilon_r)}\n"
            )


def write_plot_data_csv(path, summaries: list[CellSummary]) -> None:
    """Write the plot-ready per-cell columns (times and discrepancy only)."""
    with open(path, "w") as fh:
        fh.write("solver,l1,n_iter,mean_t_reg_ms,mean_t_fast_ms,mean_epsilon_r\n")
        for s in summaries:
            fh.write(
                f"{s.solver},{s.l1},{s.n_iter},"
                f"{fmt(s.mean_t_reg_ms)},{fmt(s.mean_t_fast_ms)},{fmt(s.mean_epsilon_r)}\n"
            )


_CONFIG_FIELD_NAMES = {f.name for f in fields(ExperimentConfig)}


def experiment_config_from_dict(payload: dict) -> ExperimentConfig:
    """Build an :class:`ExperimentConfig` from parsed JSON, naming bad fields."""
    if not isinstance(payload, dict):
        raise ConfigError("<root>", "expected a JSON object")
    for key in payload:
        if key not in _CONFIG_FIELD_NAMES:
            raise ConfigError(key, "unknown field")
    try:
        return ExperimentConfig(**payload)
    except InvalidArgumentError as exc:
        raise ConfigError("experiment", str(exc)) from exc


def experiment_config_to_dict(config: ExperimentConfig) -> dict:
    """Plain-JSON-types dict mirroring :func:`experiment_config_from_dict`."""
    return {
        "m1_count": config.m1_count,
        "m2_count": config.m2_count,
        "element_count": config.element_count,
        "l2": config.l2,
        "l1_values": list(config.l1_values),
        "iteration_values": list(config.iteration_values),
        "snr_db": config.snr_db,
        "k_range": list(config.k_range),
        "trials": config.trials,
        "base_seed": config.base_seed,
        "solvers": list(config.solvers),
        "memory_budget_bytes": config.memory_budget_bytes,
        "tau_fraction": config.tau_fraction,
    }
