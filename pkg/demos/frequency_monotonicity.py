"""Frequency is nondecreasing in the radius; its limit is the local degree."""
import numpy as np

from qfreq.families import SheetSpec, Superposition
from qfreq.functionals import check_height_bound, radial_profile

z = SheetSpec.holomorphic([0, 1])
z2 = SheetSpec.holomorphic([0, 0, 1])
radii = np.geomspace(1e-4, 1, 12)

# two sheets meeting at 0: the linear one wins as r -> 0, so N -> 1
two = Superposition((z, z2))
prof = radial_profile(two, 0, radii)
print("{z, z^2}:", np.round(prof.n_vals, 6))
print("largest decrease:", prof.max_decrease())

# a constant sheet next to a linear one: not a branch point, N -> 0
control = Superposition((SheetSpec.constant([1.0, 0.0]), z))
print("{c, z}:", np.array2string(radial_profile(control, 0, radii).n_vals, precision=3))

# growth of N gives strict slack in the two-sided height bound
rep = check_height_bound(prof, [(prof.radii[0], prof.radii[-1])])
for row in rep.rows:
    print(f"{row.anchor:20s} slack {row.slack:.4f}")
