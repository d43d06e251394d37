"""Command-line front end: ``qfreq <command> --config path.json``.

Exit codes: 0 when every enabled check passes, 1 on a failed check, 2 on a
usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .blowup import BlowupSequence, blowup_report, frequency_gap_scan, steps_csv
from .corpus import kq_corpus, random_harmonic_corpus
from .errors import ConfigError, DegenerateEnergyError, DegenerateHeightError, QFreqError
from .families import BranchFamily, FieldSpec, as_complex, field_from_dict
from .functionals import (RadialProfile, check_height_bound, dirichlet_energy,
                          estimate_holder_exponent, radial_profile)
from .hopf import HopfPackage, analytic_package, energy_identity_check, fit_phi_series
from .oscillation import courant_lebesgue_radius, key_lemma_gap
from .quadrature import PolarGrid
from .report import VerificationReport
from .svgplot import line_plot_svg

log = logging.getLogger("qfreq")

COMMANDS = ("analyze", "verify", "blowup", "scan", "export")
DEFAULT_TOLERANCES = {
    "monotone": 1e-6,
    "height_bound": 1e-6,
    "identity_exact": 1e-8,
    "identity_sampled": 1e-4,
    "unit_height": 1e-8,
}


@dataclass
class RunConfig:
    command: str
    raw: dict
    out: str = "qfreq-out"
    seed: int = 0
    grid: PolarGrid = field(default_factory=PolarGrid)
    fd_step: float | None = None
    series_order: int = 64
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def get(self, key, default=None):
        return self.raw.get(key, default)


# ---------------------------------------------------------------------------
# config parsing


def _require(data, key, path):
    if key not in data:
        raise ConfigError(f"{path}.{key}", "missing required key")
    return data[key]


def _parse_field(data, path) -> FieldSpec:
    if not isinstance(data, dict):
        raise ConfigError(path, "expected an object describing a field")
    try:
        return field_from_dict(data)
    except ConfigError:
        raise
    except (QFreqError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(path, f"invalid field: {exc}") from exc


def _parse_point(value, path) -> complex:
    try:
        return as_complex(value)
    except (QFreqError, TypeError, ValueError) as exc:
        raise ConfigError(path, f"expected a point [x, y]: {exc}") from exc


def _parse_radii(value, path) -> np.ndarray:
    if isinstance(value, dict):
        try:
            lo, hi, count = float(value["min"]), float(value["max"]), int(value["count"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(path, "radius grid needs numeric min, max, count") from exc
        if not 0 < lo < hi or count < 2:
            raise ConfigError(path, "radius grid needs 0 < min < max and count >= 2")
        if value.get("spacing", "geometric") == "linear":
            return np.linspace(lo, hi, count)
        return np.geomspace(lo, hi, count)
    try:
        radii = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(path, "expected a list of radii") from exc
    if radii.ndim != 1 or radii.size == 0 or np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
        raise ConfigError(path, "radii must be positive and strictly increasing")
    return radii


def _parse_grid(text, path) -> PolarGrid:
    try:
        a, r = (int(x) for x in str(text).split(","))
        return PolarGrid(a, r)
    except (QFreqError, ValueError) as exc:
        raise ConfigError(path, f"expected 'angular,radial' with an even radial count: {exc}") from exc


def build_config(args) -> RunConfig:
    raw = {}
    if args.config:
        try:
            with open(args.config) as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError("--config", str(exc)) from exc
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config", "top level must be an object")
    cfg = RunConfig(args.command, raw)
    cfg.out = args.out or raw.get("out", cfg.out)
    seed = args.seed if args.seed is not None else raw.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError("config.seed", "expected an integer")
    cfg.seed = seed
    if args.grid is not None:
        cfg.grid = _parse_grid(args.grid, "--grid")
    elif "grid" in raw:
        g = raw["grid"]
        if not isinstance(g, dict):
            raise ConfigError("config.grid", "expected {angular, radial}")
        try:
            cfg.grid = PolarGrid(int(g.get("angular", 256)), int(g.get("radial", 256)))
        except (QFreqError, ValueError, TypeError) as exc:
            raise ConfigError("config.grid", str(exc)) from exc
    cfg.fd_step = args.fd_step if args.fd_step is not None else raw.get("fd_step")
    order = args.order if args.order is not None else raw.get("series_order", 64)
    if not isinstance(order, int) or order < 0:
        raise ConfigError("config.series_order", "expected a non-negative integer")
    cfg.series_order = order
    tol_raw = raw.get("tolerances", {})
    if not isinstance(tol_raw, dict):
        raise ConfigError("config.tolerances", "expected an object")
    for name, value in list(tol_raw.items()) + [tuple(t.split("=", 1)) if "=" in t else (t, None)
                                                for t in (args.tol or [])]:
        if name not in DEFAULT_TOLERANCES:
            raise ConfigError(f"config.tolerances.{name}", "unknown tolerance name")
        try:
            cfg.tolerances[name] = float(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"config.tolerances.{name}", "expected a number") from exc
    return cfg


# ---------------------------------------------------------------------------
# output helpers


def write_atomic(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n"


def _jsonable(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    raise TypeError(type(x))


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def _finish(report: VerificationReport, out_dir: str, stem: str) -> int:
    write_atomic(os.path.join(out_dir, f"{stem}.json"), report.to_json() + "\n")
    write_atomic(os.path.join(out_dir, f"{stem}.csv"), report.to_csv())
    print(report.summary())
    if report.passed:
        return 0
    for row in report.failures():
        print(f"FAIL {row.check_id} [{row.anchor}] measured={row.measured!r} "
              f"bound={row.bound!r} {row.note}")
    return 1


# ---------------------------------------------------------------------------
# commands


def cmd_analyze(cfg: RunConfig) -> int:
    spec = _parse_field(_require(cfg.raw, "field", "config"), "config.field")
    center = _parse_point(cfg.get("center", [0.0, 0.0]), "config.center")
    radii = _parse_radii(cfg.get("radii", {"min": 2.0 ** -10, "max": 0.25, "count": 9}),
                         "config.radii")
    prof = radial_profile(spec, center, radii, cfg.grid, cfg.tolerances["monotone"])
    rep = VerificationReport("analyze", grid_meta=dict(prof.grid_meta))
    rep.add("monotone", "frequency monotonicity", prof.max_decrease(),
            cfg.tolerances["monotone"], cfg.tolerances["monotone"] - prof.max_decrease(),
            not prof.violations)
    summary = {"field": spec.to_dict(), "center": [center.real, center.imag]}
    try:
        alpha, resid = estimate_holder_exponent(prof)
    except DegenerateHeightError as exc:
        rep.add("holder", "Hoelder exponent fit", math.nan, passed=True,
                note=f"degenerate: {exc}")
        summary.update(alpha_hat=None, fit_residual=None)
        print("exponent: undefined (height vanishes)")
    else:
        rep.add("holder", "Hoelder exponent fit", alpha, None, None, math.isfinite(alpha),
                f"rms residual {resid:.3e}")
        finite = np.flatnonzero(np.isfinite(prof.n_vals))
        summary.update(alpha_hat=alpha, fit_residual=resid,
                       frequency_smallest_radius=float(prof.n_vals[finite[0]]))
        print(f"exponent: {alpha:.3f} (frequency at r={prof.radii[finite[0]]:.3g}: "
              f"{prof.n_vals[finite[0]]:.4f})")
        ok = prof.h_vals > 0
        x = np.log(prof.radii[ok])
        y = np.log(prof.h_vals[ok] / prof.radii[ok])
        icpt = float(np.mean(y - 2 * alpha * x))
        svg = line_plot_svg(x, y, f"log(H/r) vs log r, slope {2 * alpha:.4f}",
                            "log r", "log(H(r)/r)", fit=(2 * alpha, icpt))
        write_atomic(os.path.join(cfg.out, "holder.svg"), svg)
    write_atomic(os.path.join(cfg.out, "profile.csv"), prof.to_csv())
    write_atomic(os.path.join(cfg.out, "profile.json"), prof.to_json() + "\n")
    write_atomic(os.path.join(cfg.out, "holder.json"), _dump(summary))
    return _finish(rep, cfg.out, "analyze-report")


def _completion_checks(spec, center, R, r, cfg, rep):
    harmonic = isinstance(spec, BranchFamily) or getattr(spec, "harmonic", False)
    packages = []
    try:
        if harmonic:
            packages.append(analytic_package(spec, (center, R), cfg.grid))
        packages.append(fit_phi_series(spec, (center, R), cfg.series_order, grid=cfg.grid))
    except QFreqError as exc:
        rep.add("completion", "completion energy identity", math.nan, passed=False,
                note=f"package construction failed: {exc}")
        return None
    for pkg in packages:
        tol = cfg.tolerances["identity_exact" if pkg.source == "analytic" else "identity_sampled"]
        try:
            sub = energy_identity_check(spec, pkg, r, cfg.grid, tol)
        except DegenerateEnergyError as exc:
            rep.add(f"completion-{pkg.source}", "completion energy identity", math.nan,
                    passed=True, note=f"degenerate: {exc}")
            continue
        for row in sub.rows:
            row.check_id = f"{row.check_id}[{pkg.source}]"
        rep.extend(sub)
    return packages[0]


def cmd_verify(cfg: RunConfig) -> int:
    spec = _parse_field(_require(cfg.raw, "field", "config"), "config.field")
    center = _parse_point(cfg.get("center", [0.0, 0.0]), "config.center")
    R = float(cfg.get("window_radius", 1.0))
    r = float(cfg.get("inner_radius", R / 2))
    radii = _parse_radii(cfg.get("radii", {"min": 1e-3 * R, "max": R, "count": 32}),
                         "config.radii")
    rep = VerificationReport("verify", grid_meta={**cfg.grid.meta(), "window_radius": R,
                                                  "inner_radius": r, "seed": cfg.seed})

    prof = radial_profile(spec, center, radii, cfg.grid, cfg.tolerances["monotone"])
    if np.isfinite(prof.n_vals).any():
        rep.add("monotone", "frequency monotonicity", prof.max_decrease(),
                cfg.tolerances["monotone"], cfg.tolerances["monotone"] - prof.max_decrease(),
                not prof.violations)
        rep.extend(check_height_bound(prof, tol_rel=cfg.tolerances["height_bound"]))
    else:
        rep.add("monotone", "frequency monotonicity", math.nan, passed=True,
                note="degenerate: height vanishes on every circle")

    pkg = _completion_checks(spec, center, R, r, cfg, rep)

    if spec.radial_grading(center) == 1 and not any(
            abs(b - center) <= R for b in spec.branch_points()):
        d_exact = dirichlet_energy(spec, center, R, cfg.grid)
        d_fd = dirichlet_energy(spec, center, R, cfg.grid, method="fd", step=cfg.fd_step)
        rel = abs(d_fd - d_exact) / d_exact if d_exact > 0 else abs(d_fd)
        rep.add("energy-fd-consistency", "energy quadrature consistency", rel, None, None,
                True, "reported only: sorting kinks of xi0 o f can perturb the fd route")

    cl = courant_lebesgue_radius(spec, center, R, grid=cfg.grid)
    rep.add("courant-lebesgue", "Courant-Lebesgue", cl.osc, cl.bound, cl.bound - cl.osc,
            cl.passed, f"r*={cl.r_star:.6g}")

    w_star = _parse_point(cfg.get("w_star", [center.real, center.imag]), "config.w_star")
    kl = key_lemma_gap(spec, center, R, w_star, pkg if pkg is not None and pkg.radius >= R else None,
                       cfg.grid)
    if kl.degenerate:
        rep.add("key-lemma", "key lemma gap", math.nan, passed=True,
                note=f"degenerate: {kl.note}")
    else:
        rep.add("key-lemma", "key lemma gap", kl.delta_hat, 0.0, kl.delta_hat,
                kl.delta_hat > 0, f"lhs={kl.lhs:.6g} energy_sum={kl.energy_sum:.6g}")

    n_random = int(cfg.get("random_fields", 0))
    if n_random:
        fails = 0
        for i, f in enumerate(random_harmonic_corpus(cfg.seed, n_random)):
            res = courant_lebesgue_radius(f, 0j, 1.0, grid=cfg.grid)
            fails += not res.passed
        rep.add("courant-lebesgue-random", "Courant-Lebesgue", float(fails), 0.0, -float(fails),
                fails == 0, f"{n_random} seeded random harmonic fields")
    return _finish(rep, cfg.out, "verify")


def cmd_blowup(cfg: RunConfig) -> int:
    spec = _parse_field(_require(cfg.raw, "field", "config"), "config.field")
    x0 = _parse_point(cfg.get("x0", [0.0, 0.0]), "config.x0")
    steps = cfg.get("steps", [1, 2, 4, 8, 16, 32])
    if not isinstance(steps, list) or not all(isinstance(j, int) and j > 0 for j in steps):
        raise ConfigError("config.steps", "expected a list of positive integers")
    if any(b <= a for a, b in zip(steps, steps[1:])):
        raise ConfigError("config.steps", "steps must be strictly increasing")
    seq = BlowupSequence.reciprocal(spec, x0, steps, cfg.grid)
    rep, rows = blowup_report(seq, cfg.grid, cfg.tolerances["unit_height"])
    write_atomic(os.path.join(cfg.out, "blowup-steps.csv"), steps_csv(rows))
    for s in rows:
        print(f"j={s.j:4d} r_j={s.r_j:.4g} H(1)={s.h_unit:.10f} D(1)={s.d_unit:.6f} "
              f"r0={s.r0:.4f} H(r0)={s.h_r0:.4f} gap={s.gap:.4f}")
    return _finish(rep, cfg.out, "blowup")


def cmd_scan(cfg: RunConfig) -> int:
    corpus = []
    if "corpus" in cfg.raw:
        entries = cfg.raw["corpus"]
        if not isinstance(entries, list) or not entries:
            raise ConfigError("config.corpus", "expected a non-empty list")
        for i, e in enumerate(entries):
            path = f"config.corpus[{i}]"
            spec = _parse_field(_require(e, "field", path), f"{path}.field")
            pts = [_parse_point(p, f"{path}.points[{k}]")
                   for k, p in enumerate(e.get("points", [[0.0, 0.0]]))]
            corpus.append((spec, pts))
    else:
        kq = cfg.get("kq_max", 5)
        if not isinstance(kq, int) or kq < 2:
            raise ConfigError("config.kq_max", "expected an integer >= 2")
        corpus = kq_corpus(kq)
    radii = _parse_radii(cfg.get("radii", [2.0 ** e for e in range(-10, -1)]), "config.radii")
    delta_hat, table = frequency_gap_scan(corpus, radii, cfg.grid)
    rep = VerificationReport("scan", grid_meta=cfg.grid.meta())
    lines = ["field,x0_re,x0_im,separation,collapsed,frequency,flag"]
    for i, row in enumerate(table):
        lines.append(",".join([row["field"], repr(row["x0"][0]), repr(row["x0"][1]),
                               "" if row["separation"] is None else repr(row["separation"]),
                               str(int(row["collapsed"])), repr(row["frequency"]), row["flag"]]))
        rep.add(f"branch-point[{i}]", "frequency gap", row["frequency"], None, None,
                not row["flag"], f"{row['field']} {row['flag']}".strip())
        print(f"{row['field']:>18s}  N = {row['frequency']:.6f} {row['flag']}")
    rep.add("frequency-gap", "frequency gap", delta_hat, 0.0, delta_hat,
            math.isfinite(delta_hat) and delta_hat > 0, "minimum over branch points")
    print(f"delta_hat = {delta_hat:.6f}")
    write_atomic(os.path.join(cfg.out, "scan.csv"), "\n".join(lines) + "\n")
    write_atomic(os.path.join(cfg.out, "scan-table.json"),
                 _dump({"delta_hat": _clean(delta_hat),
                        "rows": [{k: _clean(v) for k, v in row.items()} for row in table]}))
    return _finish(rep, cfg.out, "scan")


def cmd_export(cfg: RunConfig) -> int:
    src = _require(cfg.raw, "input", "config")
    try:
        with open(src) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError("config.input", f"cannot read artifact: {exc}") from exc
    stem = os.path.splitext(os.path.basename(src))[0]
    out = cfg.out
    if isinstance(data, dict) and "rows" in data and "suite" in data:
        rep = VerificationReport.from_dict(data)
        write_atomic(os.path.join(out, f"{stem}.json"), rep.to_json() + "\n")
        write_atomic(os.path.join(out, f"{stem}.csv"), rep.to_csv())
    elif isinstance(data, dict) and "radii" in data and "D" in data:
        prof = RadialProfile.from_json(json.dumps(data))
        write_atomic(os.path.join(out, f"{stem}.json"), prof.to_json() + "\n")
        write_atomic(os.path.join(out, f"{stem}.csv"), prof.to_csv())
    elif isinstance(data, dict) and "phi_coeffs" in data:
        pkg = HopfPackage.from_dict(data)
        write_atomic(os.path.join(out, f"{stem}.json"), pkg.to_json() + "\n")
    elif isinstance(data, dict) and "variant" in data:
        spec = _parse_field(data, "input")
        write_atomic(os.path.join(out, f"{stem}.json"), spec.to_json() + "\n")
    else:
        raise ConfigError("config.input", "unrecognized artifact type")
    print(f"exported {stem} to {out}")
    return 0


HANDLERS = {"analyze": cmd_analyze, "verify": cmd_verify, "blowup": cmd_blowup,
            "scan": cmd_scan, "export": cmd_export}


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qfreq", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--out", help="output directory (default: qfreq-out)")
    p.add_argument("--seed", type=int, help="seed for random property corpora")
    p.add_argument("--grid", help="angular,radial node counts, e.g. 256,256")
    p.add_argument("--tol", action="append", metavar="NAME=VALUE",
                   help="override a tolerance; may be repeated")
    p.add_argument("--fd-step", type=float, help="finite-difference step")
    p.add_argument("--order", type=int, help="power-series truncation order M")
    p.add_argument("--version", action="version", version=f"qfreq {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = build_config(args)
        return HANDLERS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"qfreq: config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
