"""Truncating a rotation profile and watching the spectrum move.

Writes ``bifurcation.csv`` and ``bifurcation.svg`` to the current
directory.  Run from the repository root::

    python demos/03_deformation.py
"""

from fractions import Fraction as F

from unlinked import io as uio
from unlinked.deformations import (SpecialFamily, bifurcation, continue_c, default_grid, slope_check,
                                   truncation_data)
from unlinked.models import double_mountain
from unlinked.morse_tree import nu_recursive
from unlinked.profile import RhoProfile

# a tent of rotation numbers over the annulus of areas [3, 4]
tent = RhoProfile.of([(3, 0), (F(7, 2), F(5, 2)), (4, 0)])
td = truncation_data(tent)
print("integral h =", td.h)
print("truncation schedule tau =", [str(t) for t in td.tau])

# the double mountain lives on the flat top of the deformed Hamiltonian
fam = SpecialFamily.from_profile(tent, inside=[double_mountain()])
d = bifurcation(fam, default_grid())
print(f"{len(d.branches)} branches over {len(d.sigmas)} samples")

rep = slope_check(d, float(fam.h))
print(f"steepest slope {rep.min_slope:.6f} against -h = {-float(fam.h)}: {'ok' if rep.passed else 'violated'}")

c0 = float(nu_recursive(double_mountain()) + fam.h)
path = continue_c(d, c0)
print(f"c follows its branch from {path[0][1]} to {path[-1][1]}")

with open("bifurcation.csv", "w") as fh:
    fh.write(uio.bifurcation_csv(d))
with open("bifurcation.svg", "w") as fh:
    fh.write(uio.diagram_svg(d))
print("wrote bifurcation.csv and bifurcation.svg")
