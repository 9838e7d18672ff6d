#!/usr/bin/env python3
"""Vector Witsenhausen weighted cost: the tangent construction.

At R = 0 the control cost is J = k^2 P + MMSE. Minimizing k^2 P + bound(P)
over P is the intercept of the slope -k^2 tangent to the bound-vs-P curve, so
each bound on MMSE(P, 0) yields a bound on the optimal cost. The demo prints
the minima for both bounds (plus the legacy lower bound) across k, and the
resulting upper/lower cost ratios.
"""

import math

from embedbounds import weighted_cost

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

for sigma, ks in [(math.sqrt(GOLDEN), (math.sqrt(0.1), 0.5, 1.0)),
                  (10.0, (0.5, 1.67, 5.0))]:
    print(f"sigma = {sigma:.4f}")
    print(f"{'k':>7} | {'j_lower':>10} {'j_upper':>10} {'ratio':>7} | "
          f"{'j_legacy':>10} {'legacy ratio':>12} | {'P*_up':>9}")
    for k in ks:
        new = weighted_cost(k, sigma)
        leg = weighted_cost(k, sigma, "legacy")
        print(
            f"{k:7.3f} | {new.j_lower:10.6f} {new.j_upper:10.6f} "
            f"{new.j_upper / new.j_lower:7.4f} | {leg.j_lower:10.6f} "
            f"{leg.j_upper / leg.j_lower:12.4f} | {new.p_star_upper:9.5f}"
        )
    print()

print("At small k the new bound's tangent nearly coincides with the upper")
print("bound's (the bound is tight at MMSE = 0), killing the legacy ridge of")
print("ratio 2; near k = 1.67 and large sigma a milder ridge survives.")
