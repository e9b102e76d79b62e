"""Characteristic sweeps across the built-in corpus.

Walks a handful of corpus members over a shared log-spaced radius grid,
prints T(r) next to the closed form where one is known, and finishes with
hyper-order estimates that separate the towered member from the rest.
"""

import math

from nevlab import characteristic_sweep, corpus, hyperorder_estimate, log_radii

members = corpus()

# closed forms used for the side-by-side columns
closed = {
    "exp_z": ("r/pi", lambda r: r / math.pi),
    "exp_z2": ("r^2/pi", lambda r: r * r / math.pi),
    "rat_pole0": ("log r", math.log),
}

grid = log_radii(2.0, 12.0, 8)
for key in ("exp_z", "exp_z2", "rat_pole0", "expz_minus_1"):
    expr = members[key].expr
    print(f"\n{key}  ({members[key].note})")
    header = f"  {'r':>8}  {'m':>12}  {'N':>12}  {'T':>12}"
    if key in closed:
        header += f"  {closed[key][0]:>12}"
    print(header)
    for sample in characteristic_sweep(expr, grid):
        row = (f"  {sample.r:8.3f}  {sample.m:12.6f}  {sample.N:12.6f}"
               f"  {sample.T:12.6f}")
        if key in closed:
            row += f"  {closed[key][1](sample.r):12.6f}"
        print(row)

# The hyper-order is read off the slope of log of the T increments.  The
# tower exp(exp z) sits near 1; everything of finite order collapses to 0.
print("\nhyper-order estimates on [5, 30]:")
wide = log_radii(5.0, 30.0, 40)
for key in ("exp_z", "exp_z3", "exp_exp_z"):
    sweep = characteristic_sweep(members[key].expr, wide)
    est = hyperorder_estimate([s.r for s in sweep], [s.T for s in sweep])
    print(f"  {key:<12} varsigma = {est.varsigma:.4f}"
          f"  (residual {est.residual:.2e}, {est.points_used} pts)")
