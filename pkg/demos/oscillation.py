"""Good circles and the oscillation gap around a branch point."""
import math

from qfreq.corpus import random_harmonic_corpus
from qfreq.families import BranchFamily
from qfreq.oscillation import courant_lebesgue_radius, key_lemma_gap

field = BranchFamily(2, 3)
res = courant_lebesgue_radius(field, 0, 1.0)
print(f"best circle r = {res.r_star:.3f}, osc = {res.osc:.4f}, bound = {res.bound:.4f}")

gap = key_lemma_gap(field, 0, 1.0, 0)
print(f"min distance to f(0) on the circle {gap.lhs:.6f} (sqrt 3 = {math.sqrt(3):.6f})")
print(f"Dir(F) + Dir(h) = {gap.energy_sum:.6f}, delta_hat = {gap.delta_hat:.4f}")

# the oscillation bound on a batch of random fields
fields = random_harmonic_corpus(seed=1, count=20)
results = [courant_lebesgue_radius(f, 0, 1.0, n_scan=16) for f in fields]
print("all pass:", all(r.passed for r in results))
print("largest osc/bound:", round(max(r.osc / r.bound for r in results), 4))
