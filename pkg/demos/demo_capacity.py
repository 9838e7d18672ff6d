#!/usr/bin/env python3
"""Perfect-recovery capacity: the largest rate at which the modified host can
still be reconstructed exactly.

Two independently coded expressions must agree: the converse's sup over
sigma_SU, and the alpha = 1 strategy's achievable rate maximized over the
linear/DPC power split. The demo also locates the crossover rate at which the
upper bound on MMSE leaves zero and shows it matches the capacity.
"""

import math

from embedbounds import (
    ProblemParams,
    achievable_rate_alpha1,
    capacity,
    upper_bound_mmse,
)

print(f"{'sigma':>6} {'P':>6} | {'C(P)':>11} {'alpha1 rate':>11} {'AWGN cap':>9} "
      f"{'sigma_SU*':>10}")
for sigma, power in [(1.0, 1.0), (0.5, 2.0), (3.0, 4.0), (1.0, 0.4)]:
    c, su = capacity(sigma, power)
    r1 = achievable_rate_alpha1(sigma, power)
    awgn = 0.5 * math.log2(1.0 + power)
    print(f"{sigma:6.2f} {power:6.2f} | {c:11.8f} {r1:11.8f} {awgn:9.6f} {su:10.6f}")

sigma, power = 1.0, 1.0
c, _ = capacity(sigma, power)
lo, hi = 0.0, 0.5 * math.log2(1.0 + power) * (1.0 - 1e-12)
while hi - lo > 1e-6:
    mid = 0.5 * (lo + hi)
    if upper_bound_mmse(ProblemParams(sigma, power, mid)).value > 1e-9:
        hi = mid
    else:
        lo = mid
print()
print(f"upper bound leaves zero at R = {0.5 * (lo + hi):.6f}; capacity = {c:.6f}")
print("(negative C(P) means perfect recovery is impossible at any rate)")
