"""The four figure kinds built from benchmark outputs.

All figures use a fixed style and carry no timestamps or random ids, so
the same inputs always produce byte-identical image files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np

from .io import (
    EmptySelectionError,
    read_bench_csv,
    read_history,
    read_manifest,
    read_slices,
    select_rows,
)

__all__ = ["FIGURE_KINDS", "make_figure", "save_figure"]

METHOD_COLORS = {"semi-discrete": "tab:blue", "space-time": "tab:red"}

matplotlib.rcParams.update({
    "figure.figsize": (7.0, 4.2),
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "font.size": 9,
    "svg.hashsalt": "plotkit",
    "axes.grid": True,
    "grid.alpha": 0.3,
})


def _color(method: str) -> str:
    return METHOD_COLORS.get(method, "tab:green")


def convergence_figure(dump_dirs, labels=None):
    """Objective, its two terms and the step size per iteration."""
    fig, (ax_j, ax_s) = plt.subplots(
        1, 2, figsize=(9.0, 4.0), constrained_layout=True)
    labels = labels or [Path(d).name for d in dump_dirs]
    for dump, label in zip(dump_dirs, labels):
        hist = read_history(Path(dump) / "history.csv")
        it = hist["iteration"]
        ax_j.semilogy(it, np.maximum(hist["objective"], 1e-300), label=f"{label} J")
        ax_j.semilogy(it, np.maximum(hist["misfit"], 1e-300), "--",
                      label=f"{label} misfit")
        ax_j.semilogy(it, np.maximum(hist["regularization"], 1e-300), ":",
                      label=f"{label} reg")
        ax_s.plot(it[1:], hist["step_size"][1:], label=label)
    ax_j.set_xlabel("iteration")
    ax_j.set_ylabel("objective terms")
    ax_j.legend(fontsize=7)
    ax_s.set_xlabel("iteration")
    ax_s.set_ylabel("accepted step size")
    if len(dump_dirs) > 1:
        ax_s.legend(fontsize=7)
    fig.suptitle("convergence history")
    return fig


def control_profile_figure(dump_dirs, slice_index=-1):
    """Final control profile per dump; side-by-side panels for comparisons."""
    fig, axes = plt.subplots(1, len(dump_dirs),
                             figsize=(4.6 * len(dump_dirs), 3.8),
                             constrained_layout=True, squeeze=False)
    for ax, dump in zip(axes[0], dump_dirs):
        manifest = read_manifest(dump)
        slices = read_slices(dump, "control")
        data = slices[slice_index]
        label = f"{manifest.get('method', '?')} K={manifest.get('K', '?')}"
        if int(manifest.get("dim", data.shape[1] - 1)) == 1:
            ax.plot(data[:, 0], data[:, -1], color=_color(manifest.get("method", "")))
            ax.set_xlabel("x")
            ax.set_ylabel("control")
        else:
            x, y, v = data[:, 0], data[:, 1], data[:, -1]
            nx, ny = np.unique(x).size, np.unique(y).size
            mesh = ax.pcolormesh(x.reshape(nx, ny), y.reshape(nx, ny),
                                 v.reshape(nx, ny), shading="gouraud")
            fig.colorbar(mesh, ax=ax)
            ax.set_xlabel("x")
            ax.set_ylabel("y")
        ax.set_title(f"final control, {label}", fontsize=9)
    return fig


def _series_plot(csv_path, y_column, y_label, case=None, method=None, n_h=None,
                 logy=False):
    rows = read_bench_csv(csv_path)
    rows = select_rows(rows, case=case, method=method, n_h=n_h)
    fig, ax = plt.subplots(constrained_layout=True)
    plotted = False
    for m in sorted({r["method"] for r in rows}):
        series = sorted((r["K"], r[y_column]) for r in rows if r["method"] == m)
        ks = [k for k, _ in series]
        vals = [v for _, v in series]
        ax.plot(ks, vals, "o-", color=_color(m), label=m)
        plotted = True
    if not plotted:
        raise EmptySelectionError("selection produced no series")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel("K")
    ax.set_ylabel(y_label)
    bits = [b for b in (case, f"n_h={n_h}" if n_h else None) if b]
    ax.set_title(", ".join(bits) if bits else y_label, fontsize=9)
    ax.legend()
    return fig


def j_vs_k_figure(csv_path, case=None, method=None, n_h=None):
    return _series_plot(csv_path, "J_final", "objective", case, method, n_h)


def cpu_vs_k_figure(csv_path, case=None, method=None, n_h=None):
    return _series_plot(csv_path, "wall_time_seconds", "wall time [s]",
                        case, method, n_h)


FIGURE_KINDS = ("convergence", "control-profile", "j-vs-k", "cpu-vs-k")


def make_figure(kind, csv_path=None, dump_dirs=(), case=None, method=None,
                n_h=None, slice_index=-1):
    if kind == "convergence":
        if not dump_dirs:
            raise EmptySelectionError("convergence needs at least one --dump directory")
        return convergence_figure(dump_dirs)
    if kind == "control-profile":
        if not dump_dirs:
            raise EmptySelectionError("control-profile needs at least one --dump directory")
        return control_profile_figure(dump_dirs, slice_index=slice_index)
    if kind == "j-vs-k":
        if csv_path is None:
            raise EmptySelectionError("j-vs-k needs --csv")
        return j_vs_k_figure(csv_path, case, method, n_h)
    if kind == "cpu-vs-k":
        if csv_path is None:
            raise EmptySelectionError("cpu-vs-k needs --csv")
        return cpu_vs_k_figure(csv_path, case, method, n_h)
    raise ValueError(f"unknown figure kind {kind!r}, expected one of {FIGURE_KINDS}")


def save_figure(fig, out_path):
    """Write PNG or SVG with all timestamp metadata removed."""
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    suffix = out_path.suffix.lower()
    if suffix == ".svg":
        fig.savefig(out_path, metadata={"Date": None})
    elif suffix == ".png":
        fig.savefig(out_path, metadata={"Software": "plotkit"})
    else:
        raise ValueError(f"unsupported image format {suffix!r}, use .png or .svg")
    plt.close(fig)
