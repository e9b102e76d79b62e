"""Tour of the explicit bound checkers.

Four stops: the fractional-power circle integral, the composition
proximity bound with its explicit constant, the doubling scan for
exceptional radii, and the growth-lemma tail probe on a synthetic profile.
"""

import math

import numpy as np

from nevlab import (BoundConfig, ExpPoly, PolyPair, Polynomial, borel_probe,
                    first_stable_radius, growth_lemma_probe, k_constant,
                    lemma1_check, log_radii, pestimate_check)

Z = Polynomial((0j, 1.0))
Z_PLUS_1 = Polynomial((1.0 + 0j, 1.0))

# 1. circle integral of |p|^{-gamma/deg} against its closed-form ceiling.
#    Roots sitting on the contour are fine; the singularity is integrable.
p = Polynomial((-1.0 + 0j, 0j, 1.0))  # z^2 - 1
rep = pestimate_check(p, gamma=0.9, r=1.0)
print("power integral, roots on the contour:")
print(f"  lhs = {rep.lhs:.6f}, rhs = {rep.rhs:.6f}, passed = {rep.passed}")

# 2. proximity of f(omega)/f(phi) against K r^{-delta/n} T(alpha |c| r^n, f).
cfg = BoundConfig(alpha=2.0, delta=0.5)
pair = PolyPair.build(Z_PLUS_1, Z)
print("\ncomposition bound for f = exp(z), unit shift:")
print(f"  K = {k_constant(cfg, pair):.1f}")
reports = lemma1_check(ExpPoly(Z), pair, cfg, log_radii(1.0, 64.0, 10))
print(f"  stable from r0 = {first_stable_radius(reports)}")
for r in reports[::3]:
    print(f"    r = {r.r:7.2f}: lhs = {r.lhs:.6f}, rhs = {r.rhs:10.2f}")

# 3. doubling scan: radii where T(beta r) > 2 T(r) for the adaptive beta.
res = borel_probe(ExpPoly(Polynomial((0j, 0j, 1.0))), n=1, c=1.0,
                  epsilon=1.0, rmax=40.0)
print("\ndoubling scan for exp(z^2):")
print(f"  exceptional log-measure {res.measured_logmeasure:.4f} "
      f"<= bound {res.closed_form_bound:.4f} "
      f"({res.n_exceptional} of {res.n_tested} radii)")

# 4. growth-lemma tail on T(r) = exp(sqrt r).  The candidate exceptional
#    set has finite log-measure, so its windowed increments go Cauchy.
radii = np.exp(np.linspace(0.0, math.log(1e5), 200))
probe = growth_lemma_probe(radii, [math.exp(math.sqrt(r)) for r in radii],
                           step_K=1.0, step_mu=0.25, alpha=0.9)
print("\ngrowth-lemma probe for T = exp(sqrt r):")
print(f"  verdict {probe.verdict}, tail increment "
      f"{probe.window_increments[-1]:.2e}")
