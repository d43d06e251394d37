"""Boundary oscillation, Courant-Lebesgue radius selection and the key-lemma gap."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from .errors import DegenerateEnergyError, ParameterError
from .families import BranchFamily, FieldSpec, as_complex
from .functionals import dirichlet_energy
from .hopf import HopfPackage, analytic_package, conformal_completion, fit_phi_series
from .qspace import g_metric_batch, xi0_array
from .quadrature import PolarGrid, circle_nodes, disk_nodes

# osc <= sqrt(2 pi int |d_t X|^2) on a circle, and Dir(U_R) >= log 2 * min over
# rho in [R/2, R] of int |d_t X|^2 dt
COURANT_LEBESGUE_C = math.sqrt(2.0 * math.pi / math.log(2.0))
DEFAULT_BOUNDARY_SAMPLES = 512
DEFAULT_SCAN = 64
DEGENERATE_GAP = 1e-14


def boundary_oscillation(spec: FieldSpec, center, r: float,
                         n_samples: int = DEFAULT_BOUNDARY_SAMPLES) -> float:
    """Largest matching distance between two sampled points of ``f`` on a circle."""
    center = as_complex(center)
    spec.check_disk(center, r)
    vals = spec.values(circle_nodes(center, r, n_samples))
    if spec.q == 1:
        return float(pdist(vals[:, 0, :]).max())
    # |xi0 S - xi0 T| <= G(S, T) <= |S - T| under the stored sheet labelling,
    # so only pairs whose upper bound reaches the best lower bound can win
    lower = pdist(xi0_array(vals))
    upper = pdist(vals.reshape(n_samples, -1))
    cand = np.flatnonzero(upper >= lower.max() * (1 - 1e-9))
    i, j = np.triu_indices(n_samples, k=1)
    return float(g_metric_batch(vals[i[cand]], vals[j[cand]]).max())


@dataclass
class CourantLebesgueResult:
    r_star: float
    osc: float
    bound: float
    passed: bool
    energy: float
    radii: np.ndarray
    oscillations: np.ndarray


def courant_lebesgue_radius(spec: FieldSpec, w0, R: float, n_scan: int = DEFAULT_SCAN,
                            n_samples: int = DEFAULT_BOUNDARY_SAMPLES,
                            grid: PolarGrid | None = None) -> CourantLebesgueResult:
    """Pick the radius in ``[R/2, R]`` with the smallest boundary oscillation.

    The oscillation there is compared with ``C sqrt(Dir(xi0 o f; U_R))``,
    ``C = sqrt(2 pi / log 2)``. A failed comparison is reported through
    ``passed``, never raised.
    """
    w0 = as_complex(w0)
    spec.check_disk(w0, R)
    radii = np.linspace(0.5 * R, R, n_scan)
    oscs = np.array([boundary_oscillation(spec, w0, r, n_samples) for r in radii])
    k = int(np.argmin(oscs))
    energy = dirichlet_energy(spec, w0, R, grid)
    bound = COURANT_LEBESGUE_C * math.sqrt(max(energy, 0.0))
    osc = float(oscs[k])
    return CourantLebesgueResult(float(radii[k]), osc, bound, osc <= bound * (1 + 1e-12),
                                 energy, radii, oscs)


@dataclass
class KeyLemmaResult:
    """One instance of the oscillation gap estimate.

    ``delta_hat = energy_sum / (2 pi lhs**2)`` is the largest constant for
    which the gap estimate holds on this instance; NaN when degenerate.
    """

    lhs: float
    energy_sum: float
    delta_hat: float
    degenerate: bool = False
    dir_f: float = math.nan
    dir_h: float = math.nan
    note: str = ""


def default_package(spec: FieldSpec, window, grid: PolarGrid | None = None) -> HopfPackage:
    """Exact package for harmonic or branch fields, sampled otherwise."""
    if isinstance(spec, BranchFamily) or getattr(spec, "harmonic", False):
        return analytic_package(spec, window, grid)
    return fit_phi_series(spec, window, grid=grid)


def key_lemma_gap(spec: FieldSpec, w, r: float, w_star, pkg: HopfPackage | None = None,
                  grid: PolarGrid | None = None,
                  n_samples: int = DEFAULT_BOUNDARY_SAMPLES) -> KeyLemmaResult:
    """Measure both sides of the key-lemma gap estimate.

    ``lhs`` is the smallest matching distance between ``f(w_star)`` and the
    sampled boundary values on ``dU_r(w)``; ``energy_sum`` adds the Dirichlet
    energies of xi0 o f and of the completion h over ``U_r(w)``. Without an
    explicit package, h is built on the window ``(w, r)`` itself.
    """
    w = as_complex(w)
    w_star = as_complex(w_star)
    spec.check_disk(w, r)
    if abs(w_star - w) >= r:
        raise ParameterError(f"w_star={w_star} is not inside U_{r}({w})")
    grid = grid or PolarGrid()

    boundary = spec.values(circle_nodes(w, r, n_samples))
    inner = spec.values(w_star)[None]
    lhs = float(g_metric_batch(boundary, inner).min())

    if pkg is None:
        pkg = default_package(spec, (w, r), grid)
    elif abs(w - pkg.center) + r > pkg.radius * (1 + 1e-12):
        raise ParameterError("the package window must contain U_r(w)")
    dir_f = dirichlet_energy(spec, w, r, grid)
    try:
        h = conformal_completion(pkg)
    except DegenerateEnergyError:
        return KeyLemmaResult(lhs, dir_f, math.nan, True, dir_f, math.nan,
                              "zero energy: no completion")
    nodes, weights = disk_nodes(w, r, grid, spec.radial_grading(w))
    dir_h = float(np.sum(weights * h.grad_sq(nodes)))
    energy_sum = dir_f + dir_h
    if lhs < DEGENERATE_GAP:
        return KeyLemmaResult(lhs, energy_sum, math.nan, True, dir_f, dir_h,
                              "boundary meets f(w_star): estimate is vacuous")
    return KeyLemmaResult(lhs, energy_sum, energy_sum / (2 * math.pi * lhs * lhs),
                          False, dir_f, dir_h)


def empirical_delta(results) -> float:
    """Smallest ``delta_hat`` over the nondegenerate instances."""
    vals = [res.delta_hat for res in results if not res.degenerate]
    if not vals:
        raise ParameterError("no nondegenerate key-lemma instances")
    return min(vals)


def key_lemma_csv(rows) -> str:
    """Per-instance CSV; ``rows`` are (label, KeyLemmaResult) pairs."""
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["label", "lhs", "dir_f", "dir_h", "energy_sum", "delta_hat", "degenerate"])
    for label, res in rows:
        out.writerow([label, repr(res.lhs), repr(res.dir_f), repr(res.dir_h),
                      repr(res.energy_sum), repr(res.delta_hat), int(res.degenerate)])
    return buf.getvalue()
