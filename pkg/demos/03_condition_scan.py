"""Scan |<E_i(s)| H_P - H_I |E_j(s)>| across the interpolation grid.

Also checks the single-mode three-term recurrence and the partial-sum probe
at the midpoint.
"""

import numpy as np

from dioph_adiabatic import (
    BoundaryCondition,
    CoherentParams,
    FockSpace,
    build_HI,
    build_HP,
    condition_scan,
    eigendecompose,
    interpolate,
    parse,
    partial_sum_probe,
    recurrence_residual,
)

space = FockSpace(1, 8, BoundaryCondition.antiperiodic())
params = CoherentParams((1.0,))
poly = parse("x1 - 2")
HI, HP = build_HI(space, params), build_HP(space, poly)

report = condition_scan(HI, HP, grid_points=19)
for key, value in report.summary().items():
    print(f"{key:>24}: {value}")

print("\nper-s minimum:")
for s, i, j, v in report.per_s_minimum:
    print(f"  s={s:.2f}  ({int(i)},{int(j)})  {v:.3e}")

H = interpolate(HI, HP, 0.5)
system = eigendecompose(H)
worst = max(recurrence_residual(system, k, 0.5, params, poly, space).max() for k in range(space.dimension))
print(f"\nrecurrence residual / ||H||_F at s=0.5: {worst / H.frobenius_norm():.2e}")
overlap, weighted, variation = partial_sum_probe(system, (0, 1), poly, space.dimension)
print(f"pair (0,1): sum e*f = {abs(overlap):.1e}, weighted sum = {weighted:.4f}, variation sum = {variation}")
