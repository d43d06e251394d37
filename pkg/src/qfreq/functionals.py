"""Dirichlet energy, height and frequency of a Q-valued field on disks.

For a center ``x`` and radius ``r``:

* ``D(r)`` is the Dirichlet energy of xi0 o f over ``U_r(x)``,
* ``H(r)`` is the integral of ``|f|^2`` over the circle ``dU_r(x)``,
* ``N(r) = r D(r) / H(r)`` is the frequency.

The domain is two-dimensional throughout, so the height normalization
``H(r) / r**(m-1)`` reads ``H(r) / r``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateHeightError, ParameterError
from .families import FieldSpec, as_complex, xi0_energy_density_fd
from .quadrature import PolarGrid, circle_nodes, disk_nodes
from .report import VerificationReport

H_FLOOR = 1e-14
MONOTONE_TOL = 1e-6


def energy_density(spec: FieldSpec, zc, method: str = "analytic", step: float | None = None):
    """``|grad(xi0 o f)|^2`` at complex nodes.

    ``method="analytic"`` sums the exact sheet Jacobians (equal to the
    embedded map's energy density wherever the coordinate sorting is locally
    fixed); ``method="fd"`` differentiates xi0 o f by centered differences.
    """
    if method == "analytic":
        g = spec.gradients(zc)
        return (g ** 2).sum(axis=(-3, -2, -1))
    if method == "fd":
        return xi0_energy_density_fd(spec, zc, spec.fd_step() if step is None else step)
    raise ParameterError(f"unknown gradient method {method!r}")


def dirichlet_energy(spec: FieldSpec, center, r: float, grid: PolarGrid | None = None,
                     method: str = "analytic", step: float | None = None) -> float:
    """Dirichlet energy of xi0 o f over the disk ``U_r(center)``."""
    center = as_complex(center)
    spec.check_disk(center, r)
    grid = grid or PolarGrid()
    nodes, weights = disk_nodes(center, r, grid, spec.radial_grading(center))
    return float(np.sum(weights * energy_density(spec, nodes, method, step)))


def height(spec: FieldSpec, center, r: float, grid: PolarGrid | None = None) -> float:
    """Integral of the sum of squared sheet moduli over ``dU_r(center)``."""
    center = as_complex(center)
    spec.check_disk(center, r)
    grid = grid or PolarGrid()
    vals = spec.values(circle_nodes(center, r, grid.n_ang))
    return float(np.sum(vals ** 2) * (2.0 * np.pi * r / grid.n_ang))


def frequency(spec: FieldSpec, center, r: float, grid: PolarGrid | None = None) -> float:
    """Frequency ``r D(r) / H(r)``.

    Raises
    ------
    DegenerateHeightError
        If ``H(r)`` is below ``1e-14`` (the field vanishes on the circle).
    """
    h = height(spec, center, r, grid)
    if h < H_FLOOR:
        raise DegenerateHeightError(f"height {h:.3e} below {H_FLOOR:g} at r={r}")
    return r * dirichlet_energy(spec, center, r, grid) / h


@dataclass
class RadialProfile:
    """D, H and N sampled on an increasing radius grid about one center.

    ``n_vals`` is NaN where the height is below the floor.
    """

    center: complex
    radii: np.ndarray
    d_vals: np.ndarray
    h_vals: np.ndarray
    n_vals: np.ndarray
    m: int = 2
    grid_meta: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    def max_decrease(self) -> float:
        """Largest drop ``N(r_i) - N(r_j)`` over ``r_i < r_j`` (0 if monotone)."""
        n = self.n_vals[np.isfinite(self.n_vals)]
        if n.size < 2:
            return 0.0
        peak = np.maximum.accumulate(n)
        return float(max(0.0, (peak - n).max()))

    def index_of(self, r: float) -> int:
        idx = np.flatnonzero(np.isclose(self.radii, r, rtol=1e-12, atol=0.0))
        if idx.size == 0:
            raise ParameterError(f"radius {r} is not on the profile grid")
        return int(idx[0])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "D", "H", "N"])
        for row in zip(self.radii, self.d_vals, self.h_vals, self.n_vals):
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()

    def sidecar(self) -> dict:
        return {"center": [self.center.real, self.center.imag], "m": self.m,
                "grid_meta": self.grid_meta,
                "violations": [{"r": a, "t": b, "drop": d} for a, b, d in self.violations],
                "max_decrease": self.max_decrease()}

    def to_json(self) -> str:
        data = self.sidecar()
        data.update(radii=self.radii.tolist(), D=self.d_vals.tolist(),
                    H=self.h_vals.tolist(),
                    N=[x if math.isfinite(x) else None for x in self.n_vals.tolist()])
        return json.dumps(data, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RadialProfile":
        d = json.loads(text)
        n = np.array([np.nan if x is None else x for x in d["N"]], dtype=float)
        return cls(complex(*d["center"]), np.asarray(d["radii"], dtype=float),
                   np.asarray(d["D"], dtype=float), np.asarray(d["H"], dtype=float),
                   n, d.get("m", 2), d.get("grid_meta", {}),
                   [(v["r"], v["t"], v["drop"]) for v in d.get("violations", [])])


def radial_profile(spec: FieldSpec, center, radii, grid: PolarGrid | None = None,
                   tol: float = MONOTONE_TOL) -> RadialProfile:
    """Sample D, H, N on ``radii`` and record monotonicity violations of N.

    A violation is a pair ``r < t`` with ``N(r) - N(t) > tol``; for each
    ``t`` only the worst ``r`` is listed.
    """
    center = as_complex(center)
    radii = np.asarray(radii, dtype=float)
    if radii.ndim != 1 or radii.size == 0:
        raise ParameterError("radii must be a non-empty 1-D sequence")
    if np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
        raise ParameterError("radii must be positive and strictly increasing")
    grid = grid or PolarGrid()
    d = np.array([dirichlet_energy(spec, center, r, grid) for r in radii])
    h = np.array([height(spec, center, r, grid) for r in radii])
    n = np.full_like(radii, np.nan)
    ok = h >= H_FLOOR
    n[ok] = radii[ok] * d[ok] / h[ok]

    violations = []
    best, best_r = -math.inf, None
    for r, nv in zip(radii, n):
        if not math.isfinite(nv):
            continue
        if best - nv > tol:
            violations.append((float(best_r), float(r), float(best - nv)))
        if nv > best:
            best, best_r = nv, r
    meta = {**grid.meta(), "grading": spec.radial_grading(center), "tol": tol}
    return RadialProfile(center, radii, d, h, n, 2, meta, violations)


def check_height_bound(profile: RadialProfile, pairs=None,
                       tol_rel: float = 1e-6) -> VerificationReport:
    """Two-sided height bound between radii ``r <= t`` of a profile.

    ``H(t)/t * (r/t)**(2 N(t)) <= H(r)/r <= H(t)/t * (r/t)**(2 N(r))``.
    Slack is measured relative to ``H(r)/r``; a side passes when its slack is
    at least ``-tol_rel``. By default every ordered pair of grid radii with
    a defined frequency is checked.
    """
    rep = VerificationReport("height-bound", grid_meta=dict(profile.grid_meta))
    rep.grid_meta["tol_rel"] = tol_rel
    if pairs is None:
        idx = [i for i in range(len(profile.radii)) if math.isfinite(profile.n_vals[i])]
        index_pairs = [(i, j) for a, i in enumerate(idx) for j in idx[a:]]
    else:
        index_pairs = []
        for r, t in pairs:
            if r > t:
                raise ParameterError(f"height bound needs r <= t, got r={r}, t={t}")
            index_pairs.append((profile.index_of(r), profile.index_of(t)))

    for i, j in index_pairs:
        r, t = profile.radii[i], profile.radii[j]
        n_r, n_t = profile.n_vals[i], profile.n_vals[j]
        if not (math.isfinite(n_r) and math.isfinite(n_t)):
            rep.add(f"height-bound[r={r:.6g},t={t:.6g}]", "height bound", math.nan,
                    passed=False, note="frequency undefined (vanishing height)")
            continue
        mid = profile.h_vals[i] / r
        outer = profile.h_vals[j] / t
        lower = outer * (r / t) ** (2.0 * n_t)
        upper = outer * (r / t) ** (2.0 * n_r)
        s_lo = (mid - lower) / mid
        s_up = (upper - mid) / mid
        rep.add(f"height-bound-lower[r={r:.6g},t={t:.6g}]", "height bound lower",
                mid, lower, s_lo, s_lo >= -tol_rel)
        rep.add(f"height-bound-upper[r={r:.6g},t={t:.6g}]", "height bound upper",
                mid, upper, s_up, s_up >= -tol_rel)
    return rep


def estimate_holder_exponent(profile: RadialProfile) -> tuple[float, float]:
    """Hölder exponent at the profile center from the decay of ``H(r)/r``.

    Fits ``log(H(r)/r) = c + alpha * 2 log r`` by least squares over the
    smallest decade of radii (at least the four smallest radii).

    Returns
    -------
    alpha_hat : float
    fit_residual : float
        Root-mean-square residual of the fit.
    """
    ok = profile.h_vals >= H_FLOOR
    if not ok.any():
        raise DegenerateHeightError("height vanishes at every radius")
    r = profile.radii[ok]
    h = profile.h_vals[ok]
    if r.size < 4:
        raise ParameterError(f"need at least 4 radii with positive height, got {r.size}")
    sel = r <= 10.0 * r[0] * (1 + 1e-12)
    if sel.sum() < 4:
        sel = np.zeros_like(sel)
        sel[:4] = True
    x = 2.0 * np.log(r[sel])
    y = np.log(h[sel] / r[sel])
    coef = np.polyfit(x, y, 1)
    resid = y - np.polyval(coef, x)
    return float(coef[0]), float(np.sqrt(np.mean(resid ** 2)))
