"""Census of which values the orbit map actually permutes.

The orbit-cloud functions are built so that the map tau sends zeros to
zeros and poles to poles.  A census pushes every solution of f = a through
tau and checks the images land back in the solution set.  For a in {0, inf}
this passes with distance zero; a generic third value breaks immediately,
which is the point of the construction.
"""

from nevlab import (RootFindFailure, build_orbit_function, figure_family,
                    invariance_census)

fam = figure_family("left", generations=12)
fn = build_orbit_function(fam)
radius = fam.census_radius()

print(f"left family at {fam.generations} generations, "
      f"census radius {radius:.5g}")
for rep in invariance_census(fn, fam.map, (0.0, None, 0.3 + 0.2j), radius):
    print(" ", rep.describe())
    for p, q in rep.violations[:3]:
        print(f"    tau({p:.6g}) = {q:.6g} is not a solution")
    if len(rep.violations) > 3:
        print(f"    ... {len(rep.violations) - 3} more")

# The right family is harsher: its generic solutions huddle exponentially
# close to the zeros, far below double precision, and the root finder says
# so instead of inventing points.
fam = figure_family("right", generations=20)
fn = build_orbit_function(fam)
radius = fam.census_radius()
print(f"\nright family at {fam.generations} generations, "
      f"census radius {radius:.5g}")
for rep in invariance_census(fn, fam.map, (0.0, None), radius):
    print(" ", rep.describe())
try:
    invariance_census(fn, fam.map, (0.3 + 0.2j,), radius)
except RootFindFailure as exc:
    print(f"  value 0.3+0.2i: refused ({exc})")
