"""A height profile on the sphere where c(H1 + H2) < max(c(H1), c(H2)).

Run from the repository root::

    python demos/04_sphere_counterexample.py
"""

from fractions import Fraction as F

from unlinked.errors import ConstructionFailed
from unlinked.sphere import bump_data, capped_orbits, counterexample

rep = counterexample(F(1, 10), F(1, 100))
print(f"c(H1 + H2) = {rep.c_sum} (smoothing error {float(rep.c_sum_error):.4f})")
print(f"c(H1) <= {rep.c1}, c(H2) = {rep.c2} ~ {float(rep.c2):.4f}")
print(f"gap = {rep.gap} ~ {float(rep.gap):.4f}, at least {float(rep.gap_lower):.4f}")

b = bump_data(rep.h, warn=False)
print("\ncandidates for c(H):")
for name, v in b.candidates.items():
    print(f"  {name:>6}: {v}")

print("\ncapped orbits of H (one capping each way):")
for o in capped_orbits(rep.h, range(-1, 2)):
    print(f"  z={o.z!s:>6} k={o.k:>2} m={o.m:>2} action={o.action!s:>10} index={o.cz_index}")

# the gap shrinks as z_beta goes to 0, and the construction stops working past about 1/5
for zb in [F(1, 20), F(1, 10), F(3, 20), F(1, 5)]:
    try:
        r = counterexample(zb, F(1, 100))
        print(f"z_beta={zb}: gap {float(r.gap):.4f}")
    except ConstructionFailed as exc:
        print(f"z_beta={zb}: fails ({exc.constraint})")
