"""Reeb graphs of closed surfaces: core graph, quasi-state and heavy cells.

Run from the repository root::

    python demos/02_surfaces.py
"""

from unlinked.models import genus2_figure, torus_minimal
from unlinked.reeb_surface import (core_graph, dispersion_check, heavy, nu_surface, shift_surface, superheavy,
                                   zeta)

g = genus2_figure()
dec = core_graph(g)
print("genus 2 figure")
print(f"  essential saddles {len(dec.core_vertices)}, core edges {len(dec.core_edges)}, disks {len(dec.disks)}")
for d in dec.disks:
    print(f"  disk at {d.attachment}: {len(d.vertex_ids)} vertices")
print(f"  zeta = {zeta(g)}, nu = {nu_surface(g)}")
print(f"  zeta after shifting by 1 = {zeta(shift_surface(g, 1))}")
lhs, rhs = dispersion_check(g)
print(f"  dispersion check {lhs} == {rhs}")

t = torus_minimal()
core = core_graph(t).core_cells
print("\ntorus")
print(f"  'long' heavy={heavy(t, ['long'])} superheavy={superheavy(t, ['long'])}")
print(f"  whole core heavy={heavy(t, core)} superheavy={superheavy(t, core)}")
for d in core_graph(t).disks:
    print(f"  disk {d.attachment}: heavy={heavy(t, d.cells)}")
