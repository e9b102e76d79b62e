"""Build the two orbit-cloud functions and look at their divisors.

The left family iterates a half-power map with a small drift coefficient
from twelve seeds of modulus four; the right family iterates a tenth-power
binomial shift from eight seeds on the unit circle.  Each family turns its
zero cloud and pole cloud into one rational function.
"""

from collections import Counter

from nevlab import build_orbit_function, divisor_cloud, figure_family

for side in ("left", "right"):
    fam = figure_family(side, generations=6)
    fn = build_orbit_function(fam)
    radius = fam.census_radius()
    div = fn.divisor_in_disc(radius)

    print(f"\n{side} family, {fam.generations} generations")
    print(f"  map: degree {fam.map.n}, coefficients {fam.map.alphas}")
    print(f"  census radius: {radius:.6g}")
    print(f"  zeros in disc: {div.total('zeros')}, "
          f"poles: {div.total('poles')}")

    # generation-by-generation moduli of the zero cloud
    rows = divisor_cloud(fam)
    by_gen = Counter()
    extent = {}
    for label, gen, re, im in rows:
        if label != "P1":
            continue
        by_gen[gen] += 1
        mod = abs(complex(re, im))
        lo, hi = extent.get(gen, (mod, mod))
        extent[gen] = (min(lo, mod), max(hi, mod))
    for gen in sorted(by_gen):
        lo, hi = extent[gen]
        print(f"    gen {gen}: {by_gen[gen]} zeros, |z| in [{lo:.4g}, {hi:.4g}]")
