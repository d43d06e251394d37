"""Acceptance gate: one PASS/FAIL line per criterion.

Run ``pytest tests/test_acceptance.py -v`` (the lines are collected in the
terminal summary) or ``python tests/test_acceptance.py``.
"""

import json
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from qfreq.blowup import BlowupSequence, blowup_report, frequency_gap_scan
from qfreq.cli import main as cli_main
from qfreq.corpus import (energy_ratio_corpus, kq_corpus, monotonicity_corpus,
                          polynomial_phi_corpus, random_harmonic_corpus)
from qfreq.families import BranchFamily, SheetSpec, SingleHarmonic, Superposition
from qfreq.functionals import check_height_bound, frequency, radial_profile
from qfreq.hopf import (analytic_package, conformal_completion, conformality_defect_array,
                        energy_identity_check, fit_phi_series, hopf_differential_array)
from qfreq.oscillation import COURANT_LEBESGUE_C, courant_lebesgue_radius, key_lemma_gap
from qfreq.qspace import QPoint, g_metric, g_metric_bruteforce
from qfreq.quadrature import PolarGrid

REFERENCE = PolarGrid(256, 256)
COARSE = PolarGrid(128, 128)
ROUNDOFF_FLOOR = 1e-12


def record(number, title, passed, detail):
    line = f"{'PASS' if passed else 'FAIL'} criterion {number} ({title}): {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert passed, line


@pytest.fixture(scope="module")
def corpus_profiles():
    """Reference and one-coarser profiles for every corpus field and center."""
    out = []
    for entry in monotonicity_corpus():
        for center, radii in zip(entry.centers, entry.radii):
            ref = radial_profile(entry.spec, center, radii, REFERENCE)
            coarse = radial_profile(entry.spec, center, radii, COARSE)
            homogeneous = entry.homogeneous and center == entry.spec.center
            out.append((entry.name, center, homogeneous, ref, coarse))
    return out


def test_criterion_1_holder_exponent(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"field": {"variant": "branch", "k": 2, "q": 3},
                               "radii": [2.0 ** e for e in range(-10, -1)]}))
    t0 = time.perf_counter()
    code = cli_main(["analyze", "--config", str(cfg), "--out", str(tmp_path / "o"),
                     "--grid", "256,256"])
    elapsed = time.perf_counter() - t0
    printed = capsys.readouterr().out
    prof = json.loads((tmp_path / "o" / "profile.json").read_text())
    summary = json.loads((tmp_path / "o" / "holder.json").read_text())
    freq_err = max(abs(n - 2 / 3) for n in prof["N"])
    alpha = summary["alpha_hat"]
    ok = (code == 0 and freq_err <= 1e-3 and abs(alpha - 2 / 3) <= 1e-3
          and "exponent: 0.667" in printed and elapsed < 10.0)
    record(1, "Hoelder exponent 2/3", ok,
           f"max |N - 2/3| = {freq_err:.2e}, alpha_hat = {alpha:.6f}, runtime {elapsed:.2f} s")


def test_criterion_2_frequency_monotonicity(corpus_profiles):
    fields = {name for name, *_ in corpus_profiles}
    sizes = {len(ref.radii) for *_, ref, _ in corpus_profiles}
    v_ref = max(ref.max_decrease() for *_, ref, _ in corpus_profiles)
    v_coarse = max(coarse.max_decrease() for *_, _, coarse in corpus_profiles)
    violations = sum(len(ref.violations) for *_, ref, _ in corpus_profiles)
    # at roundoff level there is nothing left to shrink
    shrinks = v_ref <= v_coarse / 4 or v_ref <= ROUNDOFF_FLOOR
    ok = (len(fields) >= 20 and len(corpus_profiles) >= 3 * len(fields) and sizes == {32}
          and violations == 0 and v_ref <= 1e-6 and shrinks)
    record(2, "frequency monotonicity", ok,
           f"{len(fields)} fields x {len(corpus_profiles) // len(fields)} centers x 32 radii, "
           f"violations {violations}, max decrease {v_coarse:.2e} (128^2) -> {v_ref:.2e} (256^2)")


def test_criterion_3_height_bound(corpus_profiles):
    worst, worst_homog, pairs = math.inf, 0.0, 0
    for _, _, homogeneous, ref, _ in corpus_profiles:
        rep = check_height_bound(ref)
        pairs += len(rep.rows)
        worst = min(worst, min(row.slack for row in rep.rows))
        if homogeneous:
            worst_homog = max(worst_homog, max(abs(row.slack) for row in rep.rows))
    ok = worst >= -1e-6 and worst_homog < 1e-6
    record(3, "height bound", ok,
           f"{pairs} checks, min slack {worst:.2e}, max |slack| on homogeneous {worst_homog:.2e}")


def _augmented_order(spec, pkg, z):
    errs = [conformality_defect_array(spec, pkg, z, method="fd", step=h).max()
            for h in (1e-2, 5e-3, 2.5e-3)]
    return min(math.log2(errs[0] / errs[1]), math.log2(errs[1] / errs[2]))


def test_criterion_4_completion_identities():
    rng = np.random.default_rng(4)
    z = 0.9 * np.sqrt(rng.uniform(size=200)) * np.exp(2j * np.pi * rng.uniform(size=200))
    point_err = exact_err = sampled_err = conf = hopf_ratio = 0.0
    order = math.inf
    for spec in polynomial_phi_corpus():
        exact = analytic_package(spec, (0, 1.0))
        sampled = fit_phi_series(spec, (0, 1.0), M=64)
        h = conformal_completion(exact)
        jac = h.jacobian(z)
        phi = hopf_differential_array(spec, z)
        want = exact.d_big / 2 + np.abs(phi) ** 2 / (2 * exact.d_big)
        point_err = max(point_err, float((np.abs((jac ** 2).sum(axis=(-2, -1)) - want) / want).max()))
        for pkg, slot in ((exact, "exact"), (sampled, "sampled")):
            rep = energy_identity_check(spec, pkg, 0.5, REFERENCE, tol=1.0)
            row = next(r for r in rep.rows if r.check_id == "completion-energy")
            err = 1.0 - row.slack
            if slot == "exact":
                exact_err = max(exact_err, err)
            else:
                sampled_err = max(sampled_err, err)
        conf = max(conf, float(conformality_defect_array(spec, sampled, z, method="fd").max()))
        order = min(order, _augmented_order(spec, sampled, z[:40]))
    for spec in energy_ratio_corpus():
        rep = energy_identity_check(spec, analytic_package(spec, (0, 1.0)), 0.5, REFERENCE)
        row = next(r for r in rep.rows if r.check_id == "hopf-pointwise")
        hopf_ratio = max(hopf_ratio, row.measured)
    ok = (point_err < 1e-8 and exact_err < 1e-8 and sampled_err < 1e-4 and conf < 1e-6
          and order >= 1.9 and hopf_ratio <= 1.0)
    record(4, "completion identities", ok,
           f"pointwise {point_err:.1e}, Dir(h) exact {exact_err:.1e}, sampled {sampled_err:.1e}, "
           f"conformality {conf:.1e} (order {order:.2f}), max |phi|/(2|grad F|^2) {hopf_ratio:.3f}")


def test_criterion_5_energy_ratio():
    worst, ratios = 0.0, []
    for spec in energy_ratio_corpus():
        vals = []
        for grid in (COARSE, REFERENCE):
            pkg = analytic_package(spec, (0, 1.0), grid)
            rep = energy_identity_check(spec, pkg, 0.5, grid)
            vals.append(next(r for r in rep.rows if r.anchor == "augmented energy bound").measured)
        assert all(math.isfinite(v) for v in vals)
        ratios.append(vals[1])
        worst = max(worst, abs(vals[1] - vals[0]) / vals[1])
    ok = worst <= 0.05 and all(math.isfinite(r) for r in ratios)
    record(5, "augmented energy ratio", ok,
           f"{len(ratios)} fields, ratio range [{min(ratios):.3f}, {max(ratios):.3f}], "
           f"max change under refinement {worst:.1e}")


def test_criterion_6_courant_lebesgue():
    fields = random_harmonic_corpus(seed=0, count=200)
    results = [courant_lebesgue_radius(spec, 0, 1.0) for spec in fields]
    passed = sum(r.passed for r in results)
    tight = max(r.osc / r.bound for r in results if r.bound > 0)
    record(6, "Courant-Lebesgue", passed == len(fields),
           f"{passed}/{len(fields)} pass with C = {COURANT_LEBESGUE_C:.6f}, max osc/bound {tight:.3f}")


def test_criterion_7_key_lemma():
    res = key_lemma_gap(BranchFamily(2, 3), 0, 1.0, 0)
    closed = 4 * math.pi + 2 * math.pi ** 2
    lhs_ok = abs(res.lhs - math.sqrt(3)) <= 1e-6
    sum_ok = abs(res.energy_sum - closed) <= 1e-6 * closed
    instances = 0
    positive = True
    for spec in energy_ratio_corpus():
        for w_star in (0, 0.3j, -0.2 + 0.1j):
            r = key_lemma_gap(spec, 0, 1.0, w_star)
            if not r.degenerate:
                instances += 1
                positive &= r.delta_hat > 0
    record(7, "key lemma gap", lhs_ok and sum_ok and positive,
           f"lhs {res.lhs:.9f}, energy_sum {res.energy_sum:.9f} (closed form {closed:.9f}), "
           f"delta_hat > 0 on {instances} instances")


def test_criterion_8_blowup_chain():
    js = [1, 2, 4, 8, 16, 32]
    z = SheetSpec.holomorphic([0, 1])
    control = Superposition((SheetSpec.constant([1.0, 0.0]), z))
    cases = {"branch 2/3": BranchFamily(2, 3), "branch 1/2": BranchFamily(1, 2),
             "branch 3/4": BranchFamily(3, 4), "identity": SingleHarmonic(z),
             "{z, z^2}": Superposition((z, SheetSpec.holomorphic([0, 0, 1]))),
             "control {c, z}": control}
    unit_err = scale_err = 0.0
    d_units = {}
    for name, spec in cases.items():
        seq = BlowupSequence.reciprocal(spec, 0, js)
        rep, steps = blowup_report(seq)
        assert rep.passed, rep.summary()
        unit_err = max(unit_err, max(abs(s.h_unit - 1) for s in steps))
        d_units[name] = np.array([s.d_unit for s in steps])
        for idx in (0, 3, 5):
            f = seq.field(idx)
            for rho in (0.25, 0.5, 1.0):
                want = frequency(spec, 0, seq.radii[idx] * rho)
                scale_err = max(scale_err, abs(frequency(f, 0, rho) - want) / want)
    constant = all(np.ptp(d_units[n]) <= 1e-8 * d_units[n].mean()
                   for n in ("branch 2/3", "branch 1/2", "branch 3/4", "identity"))
    ctl = d_units["control {c, z}"]
    decays = {n: bool(np.all(np.diff(d) < 0) and d[-1] < 0.05 * d[0]) for n, d in d_units.items()}
    only_control = decays["control {c, z}"] and sum(decays.values()) == 1
    delta, _ = frequency_gap_scan(kq_corpus(5))
    ok = (unit_err <= 1e-8 and scale_err <= 1e-8 and constant and only_control
          and abs(delta - 0.2) <= 1e-3)
    record(8, "blow-up chain", ok,
           f"max |H(1)-1| {unit_err:.1e}, scale invariance {scale_err:.1e}, "
           f"control D(1) {ctl[0]:.3g} -> {ctl[-1]:.3g}, k/Q scan delta_hat {delta:.6f}")


def test_criterion_9_metric_oracle():
    mismatches, checked, axiom_slack = 0, 0, math.inf
    for q in range(2, 8):
        rng = np.random.default_rng(9000 + q)
        for _ in range(1000):
            n = int(rng.integers(1, 4))
            S, T, U = (QPoint(rng.normal(size=(q, n))) for _ in range(3))
            st, ts = g_metric(S, T), g_metric(T, S)
            mismatches += st != g_metric_bruteforce(S, T)
            checked += 1
            if st != ts or g_metric(S, S) != 0.0:
                axiom_slack = -math.inf
            axiom_slack = min(axiom_slack, g_metric(S, T) + g_metric(T, U) - g_metric(S, U))
    ok = mismatches == 0 and axiom_slack >= -1e-12
    record(9, "metric oracle", ok,
           f"{checked - mismatches}/{checked} exact matches, min triangle slack {axiom_slack:.2e}")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
