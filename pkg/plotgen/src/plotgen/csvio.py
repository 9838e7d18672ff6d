"""Reader for the embedbounds sweep-CSV interchange format.

Format: `#`-prefixed `key=value` metadata lines, a fixed header row
`axis1,axis2,lower,upper,ratio,sigma_su_star,gamma_star,alpha_star,beta_star`,
then one row per grid cell (axis1-major), numbers with 17 significant digits,
empty fields for not-applicable values and `inf` for unbounded ratios.

plotgen is a pure view over these files; it never recomputes bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SWEEP_COLUMNS = (
    "axis1",
    "axis2",
    "lower",
    "upper",
    "ratio",
    "sigma_su_star",
    "gamma_star",
    "alpha_star",
    "beta_star",
)


class SchemaError(ValueError):
    """CSV does not match the sweep schema."""


@dataclass
class SweepData:
    """One parsed sweep: axes, per-cell grids, and the file's metadata."""

    axis1_name: str
    axis2_name: str
    axis1: np.ndarray
    axis2: np.ndarray
    grids: dict  # column name -> (n1, n2) array
    meta: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        if name not in self.grids:
            raise SchemaError(f"no column {name!r} in sweep")
        return self.grids[name]


def _parse_field(s: str) -> float:
    return float("nan") if s == "" else float(s)


def read_sweep(path) -> SweepData:
    meta = {}
    header = None
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, val = body.split("=", 1)
                    meta[key] = val
                continue
            if header is None:
                header = tuple(line.split(","))
                if header != SWEEP_COLUMNS:
                    raise SchemaError(
                        f"unexpected header {header!r}; want {SWEEP_COLUMNS!r}"
                    )
                continue
            parts = line.split(",")
            if len(parts) != len(SWEEP_COLUMNS):
                raise SchemaError(f"row has {len(parts)} fields: {line!r}")
            rows.append([_parse_field(s) for s in parts])
    if header is None:
        raise SchemaError(f"{path}: not a sweep CSV (no header row)")
    if not rows:
        raise SchemaError(f"{path}: sweep contains no data rows")
    data = np.asarray(rows)
    axis1 = _unique_keep_order(data[:, 0])
    axis2 = _unique_keep_order(data[:, 1])
    n1, n2 = axis1.size, axis2.size
    if n1 * n2 != data.shape[0]:
        raise SchemaError(f"{path}: rows do not form a full {n1} x {n2} grid")
    grids = {
        name: data[:, k].reshape(n1, n2)
        for k, name in enumerate(SWEEP_COLUMNS)
        if k >= 2
    }
    return SweepData(
        axis1_name=meta.get("axis1", "axis1"),
        axis2_name=meta.get("axis2", "axis2"),
        axis1=axis1,
        axis2=axis2,
        grids=grids,
        meta=meta,
    )


def _unique_keep_order(values: np.ndarray) -> np.ndarray:
    seen = {}
    for v in values:
        if v not in seen:
            seen[v] = None
    return np.array(list(seen))


def fmt17(x: float) -> str:
    """The CSV writer's number format; annotations reuse it so every number
    shown on a figure appears verbatim in the source CSV."""
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(float(x), ".17g")


def spacing_kind(axis: np.ndarray) -> str:
    """'log', 'linear', or 'single' according to the grid's spacing."""
    if axis.size < 2:
        return "single"
    d = np.diff(axis)
    if np.allclose(d, d[0], rtol=1e-9, atol=1e-15):
        return "linear"
    if np.all(axis > 0):
        ld = np.diff(np.log(axis))
        if np.allclose(ld, ld[0], rtol=1e-9, atol=1e-15):
            return "log"
    return "irregular"
