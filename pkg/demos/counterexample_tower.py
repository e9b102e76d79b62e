"""The tower g = exp(exp z) under an additive shift.

Shifting z by log(k+1) raises g to the power k+1, so each k-th root of
unity keeps its entire preimage set: a k-point counterexample family to any
hoped-for rigidity of shared values under shifts.  The script checks the
identity numerically, follows a few preimages through the shift, and shows
the growth sitting at hyper-order one.
"""

import cmath

from nevlab import (characteristic_sweep, counterexample_kit,
                    counterexample_preimages, hyperorder_estimate,
                    identity_probe_points, identity_residuals, log_radii)

k = 3
kit = counterexample_kit(k)
print(f"k = {k}: shift s = log({k + 1}) = {kit.shift:.12f}")
print(f"targets: {[format(t, '.4f') for t in kit.targets]}")

# g(z + s) = g(z)^{k+1} at a hundred pseudo-random probes
residuals = identity_residuals(kit, identity_probe_points(100))
print(f"identity g(z+s) = g(z)^{k + 1}: worst relative residual "
      f"{max(residuals):.3e}")

# each target is a k-th root of unity, so target^{k+1} = target and the
# shifted point is again a preimage
for j, target in enumerate(kit.targets):
    pts = counterexample_preimages(kit, j, count=4)
    print(f"\npreimages of xi_{j} = {target:.4f}:")
    for z in pts:
        before = abs(kit.g.eval(z) - target)
        after = abs(kit.g.eval(z + kit.shift) - target)
        print(f"  z = {z:18.12f}  |g(z)-xi| = {before:.2e}"
              f"  |g(z+s)-xi| = {after:.2e}")

# the tower's characteristic doubles like exp(r): hyper-order 1
sweep = characteristic_sweep(kit.g, log_radii(5.0, 30.0, 40))
est = hyperorder_estimate([s.r for s in sweep], [s.T for s in sweep])
print(f"\nhyper-order of g: {est.varsigma:.4f}")
print(f"sanity, |g(1)| = {abs(kit.g.eval(1.0 + 0j)):.6f} "
      f"vs exp(e) = {cmath.exp(cmath.e).real:.6f}")
