"""Completing a non-conformal harmonic map to a conformal one.

F(u, v) = (2u, v/2) has the constant Hopf differential 15/4. Adding the
completion h as two extra coordinates makes (F, h) conformal.
"""
import numpy as np

from qfreq.families import SheetSpec, SingleHarmonic
from qfreq.hopf import (analytic_package, conformal_completion, conformality_defect,
                        energy_identity_check, fit_phi_series, hopf_differential)

F = SingleHarmonic(SheetSpec.linear([[2, 0], [0, 0.5]]))
print("phi at 0.3+0.2i:", hopf_differential(F, 0.3 + 0.2j))

pkg = fit_phi_series(F, (0, 1.0))           # sampled route
print("series coefficients:", np.round(pkg.phi_coeffs[:3], 12), "residual", pkg.fit_residual)

exact = analytic_package(F, (0, 1.0))       # exact polynomial route
h = conformal_completion(exact)
print("|grad h|^2 =", h.grad_sq(0.1j), " D =", exact.d_big)

z = 0.4 - 0.1j
print("defect of F alone:  ", conformality_defect(F, None, z))
print("defect of (F, h):   ", conformality_defect(F, exact, z))

print(energy_identity_check(F, exact, 0.5).summary())
