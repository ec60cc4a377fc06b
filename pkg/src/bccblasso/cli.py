"""Command-line interface: simulate, solve, verify, bench, gram-dump.

Every command reads a flat JSON config file; ``--set key=value`` flags
override individual fields (values are parsed as JSON, falling back to
plain strings).  All numeric output uses 17 significant digits, and all
commands are deterministic given the config and its seeds.  Commands
exit 0 on success and 1 on any error or violated tolerance.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .arrays import (
    ArrayGeometry,
    Target,
    load_geometry,
    load_snapshot_values,
    make_ura,
    save_geometry,
    save_snapshot,
    save_targets,
    snr_to_noise_variance,
    subsample_preserving_aperture,
    synthesize_snapshot,
)
from .bccb import BccbOperator, bccb_matvec, gram_operator, is_bccb
from .dictionary import (
    DEFAULT_MEMORY_BUDGET_BYTES,
    UniformGrid,
    apply_adjoint,
    build_subsampled_dictionary,
    dense_gram,
    make_uniform_grid,
)
from .errors import BccbLassoError, ConfigError
from .experiments import (
    draw_targets,
    experiment_config_from_dict,
    run_grid,
    write_plot_data_csv,
    write_records_csv,
    write_summary_csv,
)
from .solvers import (
    BACKEND_FAST,
    BACKEND_REGULAR,
    LassoProblem,
    SolverConfig,
    admm_solve,
    extract_support,
    fista_solve,
    ista_solve,
    lasso_objective,
    max_gram_eigenvalue,
    STEP_SIZE_INFLATION,
)
from .textio import fmt, write_complex_vector

BCCB_DEVIATION_TOL = 1e-10
TRACE_RESIDUAL_TOL = 1e-8
EIGENVALUE_TOL = 1e-8
VERIFY_DENSE_CAP = 4096

_SOLVE_FUNCTIONS = {"ista": ista_solve, "fista": fista_solve, "admm": admm_solve}


def parse_config(path) -> dict:
    """Load a JSON object config file."""
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError("<config>", f"invalid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigError("<config>", "expected a JSON object")
    return payload


def serialize_config(config: dict) -> str:
    """Canonical config rendering; parse -> serialize is idempotent."""
    return json.dumps(config, indent=2, sort_keys=True) + "\n"


def apply_overrides(config: dict, assignments: list[str]) -> dict:
    """Apply ``key=value`` override strings; values parse as JSON when possible."""
    merged = dict(config)
    for assignment in assignments:
        key, sep, raw = assignment.partition("=")
        if not sep or not key:
            raise ConfigError(key or "<override>", "overrides must look like key=value")
        try:
            merged[key] = json.loads(raw)
        except json.JSONDecodeError:
            merged[key] = raw
    return merged


def _require(config: dict, field: str, kind):
    if field not in config:
        raise ConfigError(field, "missing required field")
    try:
        return kind(config[field])
    except (TypeError, ValueError) as exc:
        raise ConfigError(field, f"expected a {kind.__name__}") from exc


def _optional(config: dict, field: str, kind, default):
    if field not in config:
        return default
    try:
        return kind(config[field])
    except (TypeError, ValueError) as exc:
        raise ConfigError(field, f"expected a {kind.__name__}") from exc


def _geometry_from_config(config: dict) -> ArrayGeometry:
    m1_count = _require(config, "m1_count", int)
    m2_count = _require(config, "m2_count", int)
    element_count = _optional(config, "element_count", int, m1_count * m2_count)
    ura = make_ura(m1_count, m2_count)
    if element_count == ura.element_count:
        return ura
    seed = _require(config, "geometry_seed", int)
    return subsample_preserving_aperture(ura, element_count, seed)


def _targets_from_config(config: dict) -> list[Target]:
    if "targets" in config and "k" in config:
        raise ConfigError("targets", "give either explicit targets or k, not both")
    if "targets" in config:
        targets = []
        for entry in config["targets"]:
            try:
                targets.append(
                    Target(
                        float(entry["f1"]),
                        float(entry["f2"]),
                        complex(float(entry.get("re", 1.0)), float(entry.get("im", 0.0))),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError("targets", f"malformed target entry: {exc}") from exc
        return targets
    if "k" in config:
        k = _require(config, "k", int)
        seed = _require(config, "target_seed", int)
        return draw_targets(np.random.default_rng(seed), (k, k))
    raise ConfigError("targets", "config needs either explicit targets or k")


def write_eigenvalue_dump(path, op: BccbOperator) -> None:
    """Write the eigenvalue matrix as (L1, L2) plus row-major (re, im) pairs."""
    with open(path, "w") as fh:
        fh.write("l1,l2\n")
        fh.write(f"{op.l1},{op.l2}\n")
        fh.write("re,im\n")
        for row in range(op.l1):
            for col in range(op.l2):
                value = op.eigenvalues[row, col]
                fh.write(f"{fmt(value.real)},{fmt(value.imag)}\n")


def read_eigenvalue_dump(path) -> tuple[int, int, np.ndarray]:
    """Read a dump written by :func:`write_eigenvalue_dump`."""
    with open(path) as fh:
        lines = [line.strip() for line in fh if line.strip()]
    l1, l2 = (int(part) for part in lines[1].split(","))
    pairs = [line.split(",") for line in lines[3:]]
    values = np.array([complex(float(re), float(im)) for re, im in pairs])
    return l1, l2, values.reshape(l1, l2)


def _cmd_simulate(args) -> int:
    config = apply_overrides(parse_config(args.config), args.overrides)
    geometry = _geometry_from_config(config)
    targets = _targets_from_config(config)
    if "noise_variance" in config and "snr_db" in config:
        raise ConfigError("noise_variance", "give either noise_variance or snr_db, not both")
    if "noise_variance" in config:
        noise_variance = _require(config, "noise_variance", float)
    elif "snr_db" in config:
        noise_variance = snr_to_noise_variance(targets, _require(config, "snr_db", float))
    else:
        noise_variance = 0.0
    noise_seed = _optional(config, "noise_seed", int, 0)
    snapshot = synthesize_snapshot(geometry, targets, noise_variance, noise_seed)

    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_geometry(out / "geometry.json", geometry)
    save_targets(out / "targets.csv", targets)
    save_snapshot(out / "snapshot.csv", snapshot)
    print(
        f"wrote {geometry.element_count}-element snapshot with {len(targets)} targets "
        f"(noise variance {fmt(noise_variance)}) to {out}"
    )
    return 0


def _write_support(path, support) -> None:
    with open(path, "w") as fh:
        fh.write("f1,f2,re,im,magnitude\n")
        for f1, f2, amplitude in support:
            fh.write(
                f"{fmt(f1)},{fmt(f2)},{fmt(amplitude.real)},{fmt(amplitude.imag)},"
                f"{fmt(abs(amplitude))}\n"
            )


def _cmd_solve(args) -> int:
    config = apply_overrides(parse_config(args.config), args.overrides)
    geometry = load_geometry(_require(config, "geometry_path", str))
    values = load_snapshot_values(_require(config, "snapshot_path", str))
    l1 = _require(config, "l1", int)
    l2 = _require(config, "l2", int)
    solver = _require(config, "solver", str)
    if solver not in _SOLVE_FUNCTIONS:
        raise ConfigError("solver", f"unknown solver {solver!r}")
    backend = _optional(config, "backend", str, BACKEND_FAST)
    if backend not in (BACKEND_REGULAR, BACKEND_FAST):
        raise ConfigError("backend", f"unknown backend {backend!r}")
    iterations = _require(config, "iterations", int)
    rho = _optional(config, "rho", float, 1.0)
    threshold_fraction = _optional(config, "threshold_fraction", float, 0.1)
    budget = _optional(config, "memory_budget_bytes", int, DEFAULT_MEMORY_BUDGET_BYTES)

    grid1 = make_uniform_grid(l1)
    grid2 = make_uniform_grid(l2)
    dictionary = build_subsampled_dictionary(geometry, grid1, grid2, budget)
    if values.shape != (geometry.element_count,):
        raise ConfigError("snapshot_path", "snapshot length does not match the geometry")
    b = apply_adjoint(dictionary, values)
    if "tau" in config:
        tau = _require(config, "tau", float)
    else:
        tau_fraction = _optional(config, "tau_fraction", float, 0.1)
        tau = tau_fraction * float(np.max(np.abs(b)))
        if tau == 0.0:
            tau = 1.0  # zero snapshot: any positive weight keeps the estimate at zero

    operator = gram_operator(geometry, l1, l2)
    mu = None
    if solver in ("ista", "fista"):
        lam = max_gram_eigenvalue(lambda vec: bccb_matvec(operator, vec), l1 * l2)
        mu = 1.0 / (lam * (1.0 + STEP_SIZE_INFLATION))

    if backend == BACKEND_FAST:
        problem = LassoProblem(gram=operator, adjoint_rhs=b, tau=tau)
    elif solver == "admm":
        problem = LassoProblem(
            gram=operator, adjoint_rhs=b, tau=tau, dictionary_matrix=dictionary.matrix
        )
    else:
        problem = LassoProblem(gram=dense_gram(dictionary), adjoint_rhs=b, tau=tau)
    result = _SOLVE_FUNCTIONS[solver](
        problem, SolverConfig(iterations=iterations, step_size_mu=mu, rho=rho, backend=backend)
    )
    objective = lasso_objective(dictionary, values, result.estimate, tau)
    support = extract_support(result.estimate, grid1, grid2, threshold_fraction)

    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_complex_vector(out / "estimate.csv", result.estimate)
    _write_support(out / "support.csv", support)
    print(f"solver: {solver} ({result.backend} backend), {iterations} iterations")
    print(f"final objective: {fmt(objective)}")
    print(
        f"iteration loop seconds: {fmt(result.total_seconds)} "
        f"({fmt(result.per_iteration_seconds)} per iteration)"
    )
    print(f"precompute seconds: {fmt(result.precompute_seconds)}")
    print(f"support entries at threshold {fmt(threshold_fraction)}: {len(support)}")
    return 0


def _cmd_verify(args) -> int:
    config = apply_overrides(parse_config(args.config), args.overrides)
    geometry = _geometry_from_config(config)
    l1 = _require(config, "l1", int)
    l2 = _require(config, "l2", int)
    cap = _optional(config, "cap", int, VERIFY_DENSE_CAP)
    perturbation = _optional(config, "grid_perturbation", float, 0.0)
    size = l1 * l2
    if size > cap:
        print(
            f"L = {size} exceeds the dense verification cap {cap}; "
            "reduce l1/l2 (or raise cap) to keep the dense Gram checkable"
        )
        return 1

    grid1 = make_uniform_grid(l1)
    if perturbation != 0.0:
        # Test hook: offset one grid point so the uniform-grid hypothesis
        # (and hence the BCCB structure) is deliberately violated.
        frequencies = grid1.frequencies.copy()
        frequencies[min(1, l1 - 1)] += perturbation
        grid1 = UniformGrid(l1, frequencies)
    grid2 = make_uniform_grid(l2)
    gram = dense_gram(build_subsampled_dictionary(geometry, grid1, grid2))
    structure_ok, deviation = is_bccb(gram.entries, l1, l2, BCCB_DEVIATION_TOL)

    operator = gram_operator(geometry, l1, l2)
    eigenvalues = operator.eigenvalues
    m = geometry.element_count
    trace_residual = float(abs(eigenvalues.sum() - m * size)) / (m * size)
    max_real = float(eigenvalues.real.max())
    min_real = float(eigenvalues.real.min())
    max_imag = float(np.abs(eigenvalues.imag).max())
    trace_ok = trace_residual <= TRACE_RESIDUAL_TOL
    floor_ok = min_real >= -EIGENVALUE_TOL * max_real
    imag_ok = max_imag <= EIGENVALUE_TOL * max_real

    def line(label: str, ok: bool, detail: str) -> None:
        print(f"{'PASS' if ok else 'FAIL'} {label}: {detail}")

    line("bccb structure", structure_ok, f"max deviation {fmt(deviation)} (tol {fmt(BCCB_DEVIATION_TOL)})")
    line("trace identity", trace_ok, f"relative residual {fmt(trace_residual)} vs M*L = {m * size}")
    line("eigenvalue floor", floor_ok, f"min real part {fmt(min_real)}, max {fmt(max_real)}")
    line("eigenvalue realness", imag_ok, f"max imaginary residue {fmt(max_imag)}")

    if args.dump_eigenvalues:
        write_eigenvalue_dump(args.dump_eigenvalues, operator)
        print(f"eigenvalues written to {args.dump_eigenvalues}")

    return 0 if (structure_ok and trace_ok and floor_ok and imag_ok) else 1


def _cmd_bench(args) -> int:
    config = experiment_config_from_dict(
        apply_overrides(parse_config(args.config), args.overrides)
    )
    records, summaries = run_grid(config)

    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_records_csv(out / "records.csv", records)
    write_summary_csv(out / "summary.csv", summaries)
    write_plot_data_csv(out / "plot_data.csv", summaries)
    # Figures are rendered from the same summaries the CSVs hold.
    from .reporting import render_accuracy_figure, render_runtime_figure

    render_runtime_figure(summaries, out / "runtime.png")
    render_accuracy_figure(summaries, out / "accuracy.png")
    print(f"wrote {len(records)} records across {len(summaries)} cells to {out}")
    return 0


def _cmd_gram_dump(args) -> int:
    config = apply_overrides(parse_config(args.config), args.overrides)
    geometry = _geometry_from_config(config)
    l1 = _require(config, "l1", int)
    l2 = _require(config, "l2", int)
    operator = gram_operator(geometry, l1, l2)
    write_eigenvalue_dump(args.output, operator)
    print(f"wrote {l1}x{l2} eigenvalue dump to {args.output}")
    return 0


def _add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="JSON config file")
    parser.add_argument(
        "--set",
        action="append",
        default=[],
        dest="overrides",
        metavar="KEY=VALUE",
        help="override a config field (value parsed as JSON; repeatable)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bccblasso",
        description="Single-snapshot 2D harmonic recovery with FFT-accelerated LASSO solvers.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    simulate = subparsers.add_parser("simulate", help="synthesize a snapshot and ground truth")
    _add_common_arguments(simulate)
    simulate.add_argument("--output-dir", default=".", help="directory for the output files")
    simulate.set_defaults(handler=_cmd_simulate)

    solve = subparsers.add_parser("solve", help="run one LASSO solve on a saved snapshot")
    _add_common_arguments(solve)
    solve.add_argument("--output-dir", default=".", help="directory for estimate/support files")
    solve.set_defaults(handler=_cmd_solve)

    verify = subparsers.add_parser("verify", help="check the BCCB structure and spectrum")
    _add_common_arguments(verify)
    verify.add_argument(
        "--dump-eigenvalues", default=None, metavar="PATH", help="also write the eigenvalue dump"
    )
    verify.set_defaults(handler=_cmd_verify)

    bench = subparsers.add_parser("bench", help="run the backend comparison sweep")
    _add_common_arguments(bench)
    bench.add_argument("--output-dir", default=".", help="directory for records/figures")
    bench.set_defaults(handler=_cmd_bench)

    gram_dump = subparsers.add_parser("gram-dump", help="write the Gram eigenvalue matrix")
    _add_common_arguments(gram_dump)
    gram_dump.add_argument("--output", required=True, help="eigenvalue dump path")
    gram_dump.set_defaults(handler=_cmd_gram_dump)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.handler(args)
    except (BccbLassoError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
