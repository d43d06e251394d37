"""Blow-up rescalings about a point and the frequency-gap scan over branch points.

The rescaled field is ``f_j(x) = f(x0 + r_j x) / sqrt(H(r_j) / r_j)``, so
that ``H_{0,f_j}(1) = 1`` and ``D_{0,f_j}(1) = N_{x0,f}(r_j)``: the frequency
of the base field at scale ``r_j`` becomes the unit-disk energy of ``f_j``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateHeightError, ParameterError
from .families import FieldSpec, as_complex, eval_field, sheet_separation
from .functionals import H_FLOOR, dirichlet_energy, height, radial_profile
from .oscillation import courant_lebesgue_radius
from .qspace import QPoint, g_metric, g_metric_batch
from .quadrature import PolarGrid, circle_nodes
from .report import VerificationReport

CL_RADIUS = 0.8
DEFAULT_SCAN_RADII = 2.0 ** np.arange(-10, -1)


def rescale(base: FieldSpec, x0, r_j: float, h_value: float | None = None,
            grid: PolarGrid | None = None) -> FieldSpec:
    """The normalized blow-up ``x -> f(x0 + r_j x) / sqrt(H_{x0,f}(r_j) / r_j)``.

    Raises
    ------
    DegenerateHeightError
        If the height of the base field vanishes on ``dU_{r_j}(x0)``.
    """
    x0 = as_complex(x0)
    if not r_j > 0:
        raise ParameterError(f"blow-up radius must be positive, got {r_j}")
    if h_value is None:
        h_value = height(base, x0, r_j, grid)
    if h_value < H_FLOOR:
        raise DegenerateHeightError(f"height {h_value:.3e} vanishes at r={r_j}")
    return base.pullback(x0, r_j, 1.0 / math.sqrt(h_value / r_j))


@dataclass
class BlowupSequence:
    """Radii ``r_j`` decreasing to 0 with the base heights ``H_{x0,f}(r_j)``."""

    base: FieldSpec
    x0: complex
    radii: np.ndarray
    normalizers: np.ndarray
    steps: tuple = ()

    def __post_init__(self):
        self.x0 = as_complex(self.x0)
        self.radii = np.asarray(self.radii, dtype=float)
        self.normalizers = np.asarray(self.normalizers, dtype=float)
        if self.radii.ndim != 1 or self.radii.size == 0:
            raise ParameterError("a blow-up sequence needs at least one radius")
        if np.any(self.radii <= 0) or np.any(np.diff(self.radii) >= 0):
            raise ParameterError("blow-up radii must be positive and strictly decreasing")
        if self.normalizers.shape != self.radii.shape or np.any(self.normalizers < H_FLOOR):
            raise DegenerateHeightError("every normalizing height must be positive")
        if not self.steps:
            self.steps = tuple(range(1, self.radii.size + 1))

    @classmethod
    def from_radii(cls, base: FieldSpec, x0, radii, grid: PolarGrid | None = None,
                   steps=()) -> "BlowupSequence":
        x0 = as_complex(x0)
        radii = np.asarray(radii, dtype=float)
        heights = np.array([height(base, x0, r, grid) for r in radii])
        return cls(base, x0, radii, heights, tuple(steps))

    @classmethod
    def reciprocal(cls, base: FieldSpec, x0, js, grid: PolarGrid | None = None) -> "BlowupSequence":
        """The sequence ``r_j = 1/j`` for the given increasing indices."""
        js = [int(j) for j in js]
        return cls.from_radii(base, x0, [1.0 / j for j in js], grid, js)

    def field(self, index: int) -> FieldSpec:
        return rescale(self.base, self.x0, self.radii[index], self.normalizers[index])

    def __len__(self):
        return self.radii.size


@dataclass
class BlowupStep:
    j: int
    r_j: float
    h_unit: float
    d_unit: float
    base_frequency: float
    r0: float
    osc: float
    cl_bound: float
    h_r0: float
    h_r0_bound: float
    gap: float


STEP_COLUMNS = ("j", "r_j", "H(1)", "D(1)", "r0", "osc", "H(r0)", "gap")


def steps_csv(steps) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(STEP_COLUMNS)
    for s in steps:
        out.writerow([s.j, repr(s.r_j), repr(s.h_unit), repr(s.d_unit), repr(s.r0),
                      repr(s.osc), repr(s.h_r0), repr(s.gap)])
    return buf.getvalue()


def blowup_report(seq: BlowupSequence, grid: PolarGrid | None = None, tol: float = 1e-8,
                  n_scan: int = 64, n_samples: int = 512):
    """Run the quantitative chain of the blow-up argument on every step.

    For each rescaled field ``f_j`` the report records:

    * the unit height ``H_{0,f_j}(1)`` (expected 1);
    * the unit energy ``D_{0,f_j}(1)`` against ``N_{x0,f}(r_j)``;
    * the Courant-Lebesgue radius ``r0`` in ``[2/5, 4/5]`` and its bound;
    * ``H_{0,f_j}(r0)`` against the height-bound floor ``r0**(1 + 2 N(1))``,
      noting whether it clears 1/2;
    * the gap between ``f_j(0)`` and the trace of ``f_j`` on ``dU_{r0}``.

    Returns
    -------
    report : VerificationReport
    steps : list of BlowupStep
    """
    grid = grid or PolarGrid()
    rep = VerificationReport("blowup", grid_meta={**grid.meta(), "tol": tol,
                                                   "x0": [seq.x0.real, seq.x0.imag]})
    steps = []
    for idx, (j, r_j) in enumerate(zip(seq.steps, seq.radii)):
        f_j = seq.field(idx)
        h1 = height(f_j, 0j, 1.0, grid)
        d1 = dirichlet_energy(f_j, 0j, 1.0, grid)
        base_n = r_j * dirichlet_energy(seq.base, seq.x0, r_j, grid) / seq.normalizers[idx]
        rep.add(f"unit-height[j={j}]", "normalized unit height", h1, 1.0,
                tol - abs(h1 - 1.0), abs(h1 - 1.0) <= tol)
        scale = max(abs(base_n), 1e-300)
        err = abs(d1 - base_n) / scale if base_n != 0 else abs(d1)
        rep.add(f"unit-energy[j={j}]", "unit energy equals base frequency", d1, base_n,
                tol - err, err <= tol)

        cl = courant_lebesgue_radius(f_j, 0j, CL_RADIUS, n_scan, n_samples, grid)
        rep.add(f"courant-lebesgue[j={j}]", "Courant-Lebesgue", cl.osc, cl.bound,
                cl.bound - cl.osc, cl.passed, f"r0={cl.r_star:.6g}")

        r0 = cl.r_star
        h_r0 = height(f_j, 0j, r0, grid)
        n1 = d1 / h1
        floor = r0 ** (1.0 + 2.0 * n1)
        slack = (h_r0 - floor) / h_r0
        rep.add(f"height-floor[j={j}]", "blow-up height floor", h_r0, floor, slack,
                slack >= -1e-6, "clears 1/2" if h_r0 >= 0.5 else "below 1/2")

        centre_val = f_j.values(0j)[None]
        trace = f_j.values(circle_nodes(0j, r0, n_samples))
        gap = float(g_metric_batch(trace, centre_val).min())
        rep.add(f"boundary-gap[j={j}]", "blow-up boundary gap", gap, None, None, True,
                "reported only")
        steps.append(BlowupStep(int(j), float(r_j), h1, d1, float(base_n), r0, cl.osc,
                                cl.bound, h_r0, floor, gap))
    return rep, steps


def field_label(spec: FieldSpec) -> str:
    d = spec.to_dict()
    if d["variant"] == "branch":
        return f"branch(k={d['k']},q={d['q']})"
    return f"{d['variant']}(q={spec.q},n={spec.n})"


def frequency_gap_scan(corpus, radii=None, grid: PolarGrid | None = None,
                       tol: float = 1e-12):
    """Frequencies at listed branch points and their minimum.

    Parameters
    ----------
    corpus : list of (FieldSpec, list of points)
        Every listed point should be a full collapse ``f(x0) = Q[[p]]``.
    radii : increasing radii for the profile; the frequency is read at the
        smallest radius with a defined value.

    Returns
    -------
    delta_hat : float
        Minimum frequency over the unflagged rows (NaN if none).
    table : list of dict
        One row per point: field, x0, separation, collapsed, frequency, flag.
    """
    corpus = list(corpus)
    if not corpus:
        raise ParameterError("frequency-gap scan needs a non-empty corpus")
    radii = DEFAULT_SCAN_RADII if radii is None else np.asarray(radii, dtype=float)
    table = []
    for spec, points in corpus:
        for x0 in points:
            x0 = as_complex(x0)
            sep = sheet_separation(spec, x0)
            val = eval_field(spec, x0)
            mean = QPoint.multiple(val.points.mean(axis=0), val.q)
            spread = g_metric(val, mean)
            collapsed = spread <= tol
            flag = ""
            if spec.q > 1 and sep > tol:
                flag = "not a branch point"
            elif not collapsed:
                flag = "f(x0) is not a multiple point"
            n_hat = math.nan
            if not flag:
                shifted = spec.shifted(val.points.mean(axis=0))
                prof = radial_profile(shifted, x0, radii, grid)
                finite = np.flatnonzero(np.isfinite(prof.n_vals))
                if finite.size:
                    n_hat = float(prof.n_vals[finite[0]])
                else:
                    flag = "height vanishes"
            table.append({"field": field_label(spec), "x0": [x0.real, x0.imag],
                          "separation": sep if math.isfinite(sep) else None,
                          "collapsed": bool(collapsed), "frequency": n_hat, "flag": flag})
    vals = [row["frequency"] for row in table if not row["flag"]]
    delta_hat = min(vals) if vals else math.nan
    return delta_hat, table
