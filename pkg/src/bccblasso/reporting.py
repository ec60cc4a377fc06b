"""Render benchmark figures to image files from aggregated cell summaries.

Figures are written alongside the delimited benchmark output; there is
no interactive display (the Agg backend is forced).
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiments import CellSummary


def _ordered_unique(values) -> list:
    seen: list = []
    for value in values:
        if value not in seen:
            seen.append(value)
    return seen


def render_runtime_figure(summaries: list[CellSummary], path) -> None:
    """Plot mean iteration-loop time vs L1, regular vs fast, per solver.

    One panel per solver; solid lines are the dense backend, dashed
    lines the FFT backend, one pair per iteration count.  Both axes are
    logarithmic; NaN cells (skipped dense runs) leave gaps.
    """
    solvers = _ordered_unique(s.solver for s in summaries)
    fig, axes = plt.subplots(
        1, max(len(solvers), 1), figsize=(4.2 * max(len(solvers), 1), 3.6), sharey=True
    )
    axes = np.atleast_1d(axes)
    for ax, solver in zip(axes, solvers):
        rows = [s for s in summaries if s.solver == solver]
        for n_iter in _ordered_unique(r.n_iter for r in rows):
            line = sorted((r for r in rows if r.n_iter == n_iter), key=lambda r: r.l1)
            l1_values = [r.l1 for r in line]
            ax.plot(
                l1_values,
                [r.mean_t_reg_ms for r in line],
                marker="o",
                label=f"regular, T={n_iter}",
            )
            ax.plot(
                l1_values,
                [r.mean_t_fast_ms for r in line],
                marker="s",
                linestyle="--",
                label=f"fast, T={n_iter}",
            )
        ax.set_xscale("log", base=2)
        ax.set_yscale("log")
        ax.set_xlabel("L1")
        ax.set_title(solver)
        ax.grid(True, which="both", alpha=0.3)
    axes[0].set_ylabel("iteration-loop time [ms]")
    axes[0].legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_accuracy_figure(summaries: list[CellSummary], path) -> None:
    """Plot mean backend discrepancy epsilon_r vs iteration count, per solver."""
    solvers = _ordered_unique(s.solver for s in summaries)
    fig, axes = plt.subplots(
        1, max(len(solvers), 1), figsize=(4.2 * max(len(solvers), 1), 3.6), sharey=True
    )
    axes = np.atleast_1d(axes)
    for ax, solver in zip(axes, solvers):
        rows = [s for s in summaries if s.solver == solver]
        for l1 in _ordered_unique(r.l1 for r in rows):
            line = sorted((r for r in rows if r.l1 == l1), key=lambda r: r.n_iter)
            ax.plot(
                [r.n_iter for r in line],
                [r.mean_epsilon_r for r in line],
                marker="o",
                label=f"L1={l1}",
            )
        ax.set_yscale("log")
        ax.set_xlabel("iterations")
        ax.set_title(solver)
        ax.grid(True, which="both", alpha=0.3)
    axes[0].set_ylabel("mean epsilon_r")
    axes[0].legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
