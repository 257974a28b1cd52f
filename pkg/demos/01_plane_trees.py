"""Plane trees: spectra, unlinked sets and the invariant nu.

Run from the repository root::

    python demos/01_plane_trees.py
"""

import random

from unlinked.generators import random_tree
from unlinked.models import double_mountain, single_mountain
from unlinked.morse_tree import enumerate_mnus, nu_forest, nu_oracle, nu_recursive, spectrum


def show_spectrum(name, t):
    print(f"{name}: spectrum")
    for s in spectrum(t):
        sign = "neg" if s.negative else "pos"
        print(f"  {s.label:>12}  area={s.area!s:>6}  rho={s.rho!s:>5}  action={s.action} ({sign})")


for name, t in [("single mountain", single_mountain()), ("double mountain", double_mountain())]:
    show_spectrum(name, t)
    # every maximal negative unlinked set, with its largest action
    for m in enumerate_mnus(t):
        print(f"  mnus {{{', '.join(m.labels)}}} sup={m.sup_action}")
    print(f"  nu: recursion {nu_recursive(t)}, brute force {nu_oracle(t)}\n")

# disjoint supports: the invariant of a forest is the max over its trees
ts = [single_mountain(), double_mountain()]
print("forest of both mountains:", nu_forest(ts), "=", max(nu_recursive(t) for t in ts))

# the recursion and the brute force agree on random trees
rng = random.Random(0)
trees = [random_tree(rng, max_depth=4, max_negative=10) for _ in range(50)]
agree = sum(nu_recursive(t) == nu_oracle(t) for t in trees)
print(f"random trees: {agree}/50 agree exactly")
