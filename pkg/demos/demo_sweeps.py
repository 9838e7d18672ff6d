#!/usr/bin/env python3
"""Small ratio surfaces end to end: build sweep tables, write the CSV format,
read it back, and summarize.

Uses deliberately coarse grids so the demo runs in seconds; the acceptance
suite runs the full 81x81 / 61x61 versions.
"""

import io

import numpy as np

from embedbounds.cli import read_sweep_csv, write_sweep_csv
from embedbounds.witsenhausen import cost_ratio_surface, mmse_ratio_surface

k = np.power(10.0, np.linspace(-1.5, 1.5, 9))
sigma = np.power(10.0, np.linspace(-1, 1, 9))

cost = cost_ratio_surface(k, sigma, "new")
print(f"cost-ratio 9x9 (new bound): max = {cost.max_finite_ratio():.4f}, "
      f"min = {np.min(cost.ratio):.4f}")

power = np.power(10.0, np.linspace(-1.5, 0.5, 9))
mmse_new = mmse_ratio_surface(power, sigma, 0.0, "new")
mmse_leg = mmse_ratio_surface(power, sigma, 0.0, "legacy")
print(f"mmse-ratio 9x9: new max = {mmse_new.max_finite_ratio():.4f} "
      f"(no inf cells: {not np.any(np.isinf(mmse_new.ratio))}); "
      f"legacy has {int(np.isinf(mmse_leg.ratio).sum())} inf cells")

buf = io.StringIO()
write_sweep_csv(mmse_new, buf, ["demo"])
text = buf.getvalue()
buf.seek(0)
back = read_sweep_csv(buf)
print(f"CSV round trip: {len(text.splitlines())} lines, "
      f"values identical: {np.array_equal(back.ratio, mmse_new.ratio)}")
print()
print(text.splitlines()[0])
print(text.splitlines()[7])
print(text.splitlines()[8] + "  ...")
