"""Reading a Hoelder exponent off the decay of the height.

The three-sheeted field {w : w**3 = z**2} is 2/3-Hoelder at the origin and
no better. Its frequency is flat at 2/3, and log(H(r)/r) has slope 4/3.
"""
import numpy as np

from qfreq.families import BranchFamily
from qfreq.functionals import estimate_holder_exponent, radial_profile

field = BranchFamily(2, 3)
radii = 2.0 ** np.arange(-10, -1)
prof = radial_profile(field, 0, radii)

for r, n in zip(prof.radii, prof.n_vals):
    print(f"r = {r:9.6f}   N(r) = {n:.10f}")

alpha, resid = estimate_holder_exponent(prof)
print(f"fitted exponent {alpha:.6f} (rms residual {resid:.1e})")

# same experiment for other sheet counts
for k, q in [(1, 2), (1, 3), (3, 4), (4, 5)]:
    a, _ = estimate_holder_exponent(radial_profile(BranchFamily(k, q), 0, radii))
    print(f"k/Q = {k}/{q}: exponent {a:.4f}")
