"""From a sampled height field to a plane tree and back to nu.

Run from the repository root::

    python demos/05_ingest.py
"""

from unlinked.ingest import contour_tree, ingest, rasterize_radial, rasterize_two_peaks
from unlinked.models import double_mountain, single_mountain
from unlinked.morse_tree import nu_recursive

for name, model, raster in [("single", single_mountain(), rasterize_radial),
                            ("double", double_mountain(), rasterize_two_peaks)]:
    exact = nu_recursive(model)
    print(f"{name} mountain, exact nu = {exact}")
    for n in (64, 128, 256):
        grid = raster(model, n)
        ct = contour_tree(grid)
        t = ingest(grid, 256)
        est = float(nu_recursive(t))
        err = abs(est - float(exact)) / float(exact)
        print(f"  {n:>4}^2: {len(ct.leaves)} peaks, {len(ct.saddles)} saddles, nu ~ {est:.5f} ({err:.2%} off)")
