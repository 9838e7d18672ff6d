"""Figure rendering from sweep CSVs: ratio heatmaps, bound curves, and the
weighted-cost tangent construction.

render() is a pure view: every number it draws comes from a CSV (annotations
are formatted with the CSV's own 17-digit format), and nothing is recomputed.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .csvio import SchemaError, SweepData, fmt17, read_sweep, spacing_kind

KINDS = ("heatmap", "curves", "curves-with-tangent")


@dataclass
class FigureSpec:
    """What to draw and from which CSVs.

    csv_paths: the sweep CSV (first) plus, for curves-with-tangent, the
    cost-ratio CSV supplying the tangent intercepts.
    kind: one of KINDS.
    value: grid column for heatmaps ('ratio', 'lower', 'upper').
    at_axis2: select one axis2 column when curves are drawn from a 2-D sweep
    (nearest match); None means the sweep must have a single axis2 value.
    tangent_k: cost weight k for the tangent overlay (nearest cost-CSV cell).
    xscale/yscale: 'log', 'linear', or None to follow the grid spacing.
    """

    csv_paths: list
    kind: str
    out_path: str
    value: str = "ratio"
    at_axis2: float | None = None
    tangent_k: float | None = None
    xscale: str | None = None
    yscale: str | None = None
    title: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}")
        if not self.csv_paths:
            raise SchemaError("at least one input CSV is required")
        if self.kind == "curves-with-tangent":
            if len(self.csv_paths) < 2:
                raise SchemaError(
                    "curves-with-tangent needs the sweep CSV and the cost CSV"
                )
            if self.tangent_k is None:
                raise SchemaError("curves-with-tangent needs tangent_k")


def _axis_scale(requested, axis, name) -> str:
    kind = spacing_kind(axis)
    if requested is None:
        return "log" if kind == "log" else "linear"
    if requested == "log" and kind == "linear" and axis.size > 2:
        raise SchemaError(f"{name} axis is linearly spaced; log scale mismatches")
    if requested == "linear" and kind == "log" and axis.size > 2:
        raise SchemaError(f"{name} axis is log spaced; linear scale mismatches")
    return requested


def _select_column(sweep: SweepData, at_axis2):
    if at_axis2 is None:
        if sweep.axis2.size != 1:
            raise SchemaError(
                f"sweep has {sweep.axis2.size} {sweep.axis2_name} values; "
                "pass at_axis2 to pick one"
            )
        return 0
    return int(np.argmin(np.abs(sweep.axis2 - at_axis2)))


def _render_heatmap(spec: FigureSpec, sweep: SweepData, ax):
    grid = sweep.column(spec.value)
    finite = np.isfinite(grid)
    if not np.any(finite):
        raise SchemaError("heatmap grid has no finite cells")
    shown = np.ma.masked_invalid(grid)
    x = sweep.axis2  # columns
    y = sweep.axis1  # rows
    xs = _axis_scale(spec.xscale, x, sweep.axis2_name)
    ys = _axis_scale(spec.yscale, y, sweep.axis1_name)
    mesh_x = _edges(x, xs)
    mesh_y = _edges(y, ys)
    pcm = ax.pcolormesh(mesh_x, mesh_y, shown, cmap="viridis", shading="flat")
    ax.set_xscale(xs)
    ax.set_yscale(ys)
    ax.set_xlabel(sweep.axis2_name)
    ax.set_ylabel(sweep.axis1_name)
    plt.colorbar(pcm, ax=ax, label=spec.value)
    # annotate the max finite cell with the CSV's own value string
    masked = np.where(finite, grid, -np.inf)
    i, j = np.unravel_index(int(np.argmax(masked)), grid.shape)
    ax.plot([x[j]], [y[i]], "r*", markersize=12)
    ax.annotate(
        f"max {spec.value} = {fmt17(grid[i, j])}",
        xy=(x[j], y[i]),
        xytext=(0.03, 1.02),
        textcoords="axes fraction",
        color="crimson",
    )
    return {"max_cell": (float(y[i]), float(x[j])), "max_value": float(grid[i, j])}


def _render_curves(spec: FigureSpec, sweep: SweepData, ax):
    col = _select_column(sweep, spec.at_axis2)
    x = sweep.axis1
    lower = sweep.column("lower")[:, col]
    upper = sweep.column("upper")[:, col]
    ax.plot(x, upper, "-", color="tab:blue", label="upper bound")
    ax.plot(x, lower, "--", color="tab:red", label="lower bound")
    ax.set_xscale(_axis_scale(spec.xscale, x, sweep.axis1_name))
    if spec.yscale:
        ax.set_yscale(spec.yscale)
    ax.set_xlabel(sweep.axis1_name)
    ax.set_ylabel("bound value")
    ax.legend()
    return {
        "axis2_value": float(sweep.axis2[col]),
        "n_points": int(x.size),
    }


def _render_tangent(spec: FigureSpec, sweep: SweepData, ax):
    info = _render_curves(spec, sweep, ax)
    cost = read_sweep(spec.csv_paths[1])
    col = _select_column(sweep, spec.at_axis2)
    sigma_value = float(sweep.axis2[col])
    i = int(np.argmin(np.abs(cost.axis1 - spec.tangent_k)))
    j = int(np.argmin(np.abs(cost.axis2 - sigma_value)))
    k = float(cost.axis1[i])
    j_lower = float(cost.column("lower")[i, j])
    j_upper = float(cost.column("upper")[i, j])
    x = sweep.axis1
    xs = np.linspace(0.0, float(np.max(x)), 256)
    # slope -k^2 tangents; the intercepts are the weighted-cost minima
    ax.plot(xs, j_upper - k * k * xs, ":", color="tab:blue",
            label=f"tangent, intercept {fmt17(j_upper)}")
    ax.plot(xs, j_lower - k * k * xs, ":", color="tab:red",
            label=f"tangent, intercept {fmt17(j_lower)}")
    ax.set_ylim(bottom=0.0)
    ax.legend()
    info.update({
        "k": k,
        "intercept_lower": j_lower,
        "intercept_upper": j_upper,
        "cost_sigma": float(cost.axis2[j]),
    })
    return info


def render(spec: FigureSpec) -> dict:
    """Render one figure; returns the annotation values actually drawn."""
    sweep = read_sweep(spec.csv_paths[0])
    fig, ax = plt.subplots(figsize=(7.0, 5.2), dpi=130)
    try:
        if spec.kind == "heatmap":
            info = _render_heatmap(spec, sweep, ax)
        elif spec.kind == "curves":
            info = _render_curves(spec, sweep, ax)
        else:
            info = _render_tangent(spec, sweep, ax)
        ax.set_title(spec.title or f"{spec.kind}: {os.path.basename(spec.csv_paths[0])}")
        fig.tight_layout()
        fig.savefig(spec.out_path)
    finally:
        plt.close(fig)
    info["out_path"] = spec.out_path
    return info


def _edges(centers: np.ndarray, scale: str) -> np.ndarray:
    """Cell edges bracketing the given centers for pcolormesh."""
    c = np.log(centers) if scale == "log" else np.asarray(centers, dtype=float)
    if c.size == 1:
        half = 0.5 if scale != "log" else 0.1
        e = np.array([c[0] - half, c[0] + half])
    else:
        mid = 0.5 * (c[1:] + c[:-1])
        e = np.concatenate(([c[0] - (mid[0] - c[0])], mid, [c[-1] + (c[-1] - mid[-1])]))
    return np.exp(e) if scale == "log" else e
