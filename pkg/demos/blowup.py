"""Blowing up at a point: frequency survives rescaling, and only a
non-branch point lets the energy on the unit disk collapse."""
from qfreq.blowup import BlowupSequence, blowup_report, frequency_gap_scan
from qfreq.corpus import kq_corpus
from qfreq.families import BranchFamily, SheetSpec, Superposition

js = [1, 2, 4, 8, 16, 32]
cases = {
    "branch 2/3": BranchFamily(2, 3),
    "control {c, z}": Superposition((SheetSpec.constant([1.0, 0.0]),
                                     SheetSpec.holomorphic([0, 1]))),
}
for name, field in cases.items():
    rep, steps = blowup_report(BlowupSequence.reciprocal(field, 0, js))
    print(name)
    for s in steps:
        print(f"  j={s.j:3d}  H(1)={s.h_unit:.12f}  D(1)={s.d_unit:.6f}  r0={s.r0:.3f}")

# smallest frequency over all branch families with Q <= 5
delta, table = frequency_gap_scan(kq_corpus(5))
for row in table:
    print(f"{row['field']:>16s}  N = {row['frequency']:.6f}")
print("frequency gap:", round(delta, 6))
