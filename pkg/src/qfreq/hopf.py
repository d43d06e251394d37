"""Hopf differential of xi0 o f and the harmonic map that makes it conformal.

For ``F = xi0 o f`` the Hopf differential is

    phi = (|F_u|^2 - |F_v|^2) - 2i <F_u, F_v>,

holomorphic when every sheet is harmonic. With ``D = D_{w,f}(R)`` and a
holomorphic antiderivative ``psi' = phi``, the completion

    h(z) = (sqrt(D)/2) conj(z - w) - psi(z) / (2 sqrt(D))

has ``d_z h = -phi / (2 sqrt(D))`` and ``d_zbar h = sqrt(D)/2``, so the
Hopf differential of h is ``-phi`` and the augmented map ``(F, h)`` is
weakly conformal. Its energy density is ``D/2 + |phi|^2 / (2D)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numpy.polynomial import Polynomial

from .errors import DegenerateEnergyError, ParameterError, SeriesFitError, SingularPointError
from .families import BranchFamily, FieldSpec, as_complex, xi0_jacobian_fd_array
from .functionals import dirichlet_energy, energy_density
from .quadrature import PolarGrid, angles, disk_nodes
from .report import VerificationReport

DEFAULT_ORDER = 64
DEFAULT_SAMPLES = 512
SAMPLE_FRACTION = 0.9
TEST_FRACTION = 0.5
FIT_RTOL = 1e-8


class Window(NamedTuple):
    center: complex
    radius: float


def as_window(window) -> Window:
    w, R = window
    R = float(R)
    if not R > 0:
        raise ParameterError(f"window radius must be positive, got {R}")
    return Window(as_complex(w), R)


def _jacobian(spec: FieldSpec, zc, method: str, step: float | None):
    """Real Jacobian of F with shape (..., 2, N); column order is irrelevant."""
    if method == "analytic":
        g = spec.gradients(zc)
        g = np.moveaxis(g, -3, -2)  # (..., 2, q, n)
        return g.reshape(g.shape[:-2] + (-1,))
    if method == "fd":
        zc = np.asarray(zc, dtype=complex)
        for b in spec.branch_points():
            if np.any(zc == b):
                raise SingularPointError(f"Hopf differential undefined at branch point {b}")
        return xi0_jacobian_fd_array(spec, zc, spec.fd_step() if step is None else step)
    raise ParameterError(f"unknown gradient method {method!r}")


def _hopf_from_jacobian(jac):
    fu, fv = jac[..., 0, :], jac[..., 1, :]
    return (fu ** 2).sum(-1) - (fv ** 2).sum(-1) - 2j * (fu * fv).sum(-1)


def hopf_differential_array(spec: FieldSpec, zc, method: str = "analytic",
                            step: float | None = None) -> np.ndarray:
    return _hopf_from_jacobian(_jacobian(spec, zc, method, step))


def hopf_differential(spec: FieldSpec, z, method: str = "analytic",
                      step: float | None = None) -> complex:
    """Hopf differential of xi0 o f at ``z``.

    ``method="analytic"`` sums exact per-sheet terms; ``method="fd"`` uses
    the centered-difference Jacobian of xi0 o f.
    """
    return complex(hopf_differential_array(spec, as_complex(z), method, step))


def holomorphy_defect(spec: FieldSpec, window, step: float | None = None,
                      n_ang: int = 64, n_rad: int = 8, method: str = "analytic") -> float:
    """Normalized size of d(phi)/d(zbar) on an annulus inside the window.

    Samples the annulus ``0.25 R <= |z - w| <= 0.9 R`` and estimates
    ``d_zbar phi = (phi_u + i phi_v) / 2`` by centered differences of step
    ``step`` (default ``1e-4 R``). The maximum is divided by ``max |phi|``;
    returns 0 when phi vanishes identically to working precision.
    """
    w, R = as_window(window)
    eta = 1e-4 * R if step is None else float(step)
    if not eta > 0:
        raise ParameterError(f"step must be positive, got {step}")
    rho = np.linspace(0.25 * R, 0.9 * R, n_rad)
    zc = w + rho[:, None] * np.exp(1j * (angles(n_ang) + 0.5 / n_ang))[None, :]
    phi = hopf_differential_array(spec, zc, method)
    scale = np.abs(phi).max()
    dens = energy_density(spec, zc)
    if scale <= 1e-12 * max(dens.max(), np.finfo(float).tiny):
        return 0.0

    def f(x):
        return hopf_differential_array(spec, x, method)

    dzbar = ((f(zc + eta) - f(zc - eta)) + 1j * (f(zc + 1j * eta) - f(zc - 1j * eta))) / (4 * eta)
    return float(np.abs(dzbar).max() / scale)


@dataclass
class HopfPackage:
    """Power series of phi about a window center and everything built on it.

    ``phi_coeffs[m]`` multiplies ``(z - center)**m``; ``psi_coeffs`` is the
    termwise antiderivative with ``psi(center) = 0``.
    """

    center: complex
    radius: float
    d_big: float
    phi_coeffs: np.ndarray
    psi_coeffs: np.ndarray | None = None
    fit_residual: float = 0.0
    source: str = "sampled"
    defects: dict = field(default_factory=dict)

    def __post_init__(self):
        self.center = as_complex(self.center)
        self.phi_coeffs = np.asarray(self.phi_coeffs, dtype=complex)
        if self.psi_coeffs is None:
            m = np.arange(1, len(self.phi_coeffs) + 1)
            self.psi_coeffs = np.concatenate([[0j], self.phi_coeffs / m])
        else:
            self.psi_coeffs = np.asarray(self.psi_coeffs, dtype=complex)

    @property
    def window(self) -> Window:
        return Window(self.center, self.radius)

    def phi(self, zc) -> np.ndarray:
        return np.polynomial.polynomial.polyval(np.asarray(zc) - self.center, self.phi_coeffs)

    def psi(self, zc) -> np.ndarray:
        return np.polynomial.polynomial.polyval(np.asarray(zc) - self.center, self.psi_coeffs)

    def to_dict(self) -> dict:
        pairs = lambda a: [[c.real, c.imag] for c in a.tolist()]  # noqa: E731
        return {"window": {"center": [self.center.real, self.center.imag],
                           "radius": self.radius},
                "d_big": self.d_big, "phi_coeffs": pairs(self.phi_coeffs),
                "psi_coeffs": pairs(self.psi_coeffs), "fit_residual": self.fit_residual,
                "source": self.source, "defects": self.defects}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "HopfPackage":
        cx = lambda a: np.array([complex(*p) for p in a], dtype=complex)  # noqa: E731
        return cls(complex(*d["window"]["center"]), d["window"]["radius"], d["d_big"],
                   cx(d["phi_coeffs"]), cx(d["psi_coeffs"]), d["fit_residual"],
                   d.get("source", "sampled"), dict(d.get("defects", {})))

    @classmethod
    def from_json(cls, text: str) -> "HopfPackage":
        return cls.from_dict(json.loads(text))


def _test_residual(spec, pkg_phi, w, R, method, step):
    n_test = 257
    zt = w + TEST_FRACTION * R * np.exp(1j * (angles(n_test) + np.pi / n_test))
    exact = hopf_differential_array(spec, zt, method, step)
    return float(np.abs(exact - pkg_phi(zt)).max())


def fit_phi_series(spec: FieldSpec, window, M: int = DEFAULT_ORDER,
                   n_samples: int = DEFAULT_SAMPLES, grid: PolarGrid | None = None,
                   method: str = "analytic", step: float | None = None,
                   rtol: float = FIT_RTOL) -> HopfPackage:
    """Fit phi by a truncated power series from samples on a circle.

    ``c_m = (1/2pi) int phi(w + rho e^{it}) rho^{-m} e^{-imt} dt`` on the
    circle ``rho = 0.9 R`` by the trapezoid rule (an FFT of the samples).
    The residual is the sup-norm misfit on a test circle of radius ``R/2``.

    Raises
    ------
    SeriesFitError
        If the residual exceeds ``rtol * max |phi|`` (non-holomorphic or
        under-resolved phi). Identically vanishing phi is measured against
        ``1e-6 max |grad F|^2`` instead.
    """
    w, R = as_window(window)
    if not 0 <= M < n_samples // 2:
        raise ParameterError(f"series order must satisfy 0 <= M < n_samples/2, got {M}")
    rho = SAMPLE_FRACTION * R
    zs = w + rho * np.exp(1j * angles(n_samples))
    samples = hopf_differential_array(spec, zs, method, step)
    coeffs = np.fft.fft(samples)[:M + 1] / n_samples
    coeffs = coeffs / rho ** np.arange(M + 1)

    d_big = dirichlet_energy(spec, w, R, grid)
    pkg = HopfPackage(w, R, d_big, coeffs, source="sampled")
    pkg.fit_residual = _test_residual(spec, pkg.phi, w, R, method, step)

    dens = energy_density(spec, zs)
    scale = max(float(np.abs(samples).max()), 1e-6 * float(dens.max()))
    tol = rtol * scale
    pkg.defects["fit_tolerance"] = tol
    if not pkg.fit_residual <= tol:
        raise SeriesFitError(
            f"power-series fit residual {pkg.fit_residual:.3e} exceeds {tol:.3e}; "
            "phi is not holomorphic on the window or is under-resolved",
            pkg.fit_residual, tol)
    return pkg


def analytic_phi_coeffs(spec: FieldSpec, about) -> np.ndarray:
    """Exact coefficients of phi in powers of ``(z - about)``.

    phi = 4 sum_c (d_z F_c)^2 over all harmonic components of all sheets.
    Branch families are holomorphic sheet by sheet, so their phi vanishes.
    """
    about = as_complex(about)
    if isinstance(spec, BranchFamily):
        return np.zeros(1, dtype=complex)
    if not getattr(spec, "harmonic", False):
        raise ParameterError("exact phi coefficients need harmonic sheets")
    total = Polynomial([0j])
    for sheet in spec.sheets:
        for g in sheet.dz_coeffs():
            g = Polynomial(g)
            total = total + 4 * g * g
    shifted = total(Polynomial([about, 1.0]))
    return np.asarray(shifted.coef, dtype=complex)


def analytic_package(spec: FieldSpec, window, grid: PolarGrid | None = None) -> HopfPackage:
    """Package built from the exact polynomial phi instead of sampled values."""
    w, R = as_window(window)
    coeffs = analytic_phi_coeffs(spec, w)
    pkg = HopfPackage(w, R, dirichlet_energy(spec, w, R, grid), coeffs, source="analytic")
    pkg.fit_residual = _test_residual(spec, pkg.phi, w, R, "analytic", None)
    return pkg


@dataclass(frozen=True)
class ConformalCompletion:
    """The harmonic map h: R^2 -> R^2 (identified with C) of a package."""

    center: complex
    sqrt_d: float
    psi_coeffs: np.ndarray

    def __call__(self, zc) -> np.ndarray:
        zc = np.asarray(zc, dtype=complex)
        psi = np.polynomial.polynomial.polyval(zc - self.center, self.psi_coeffs)
        return 0.5 * self.sqrt_d * np.conj(zc - self.center) - psi / (2 * self.sqrt_d)

    def values(self, zc) -> np.ndarray:
        h = self(zc)
        return np.stack([h.real, h.imag], axis=-1)

    def dz(self, zc) -> np.ndarray:
        """d_z h from the derivative of the psi series."""
        zc = np.asarray(zc, dtype=complex)
        dpsi = np.polynomial.polynomial.polyder(self.psi_coeffs)
        return -np.polynomial.polynomial.polyval(zc - self.center, dpsi) / (2 * self.sqrt_d)

    def dzbar(self, zc) -> np.ndarray:
        return np.full(np.shape(zc), 0.5 * self.sqrt_d, dtype=complex)

    def jacobian(self, zc) -> np.ndarray:
        """Real Jacobian (..., 2, 2); rows d/du, d/dv; columns Re h, Im h."""
        a, b = self.dz(zc), self.dzbar(zc)
        hu = a + b
        hv = 1j * (a - b)
        return np.stack([np.stack([hu.real, hu.imag], -1),
                         np.stack([hv.real, hv.imag], -1)], axis=-2)

    def grad_sq(self, zc) -> np.ndarray:
        return (self.jacobian(zc) ** 2).sum(axis=(-2, -1))


def conformal_completion(pkg: HopfPackage) -> ConformalCompletion:
    """The completion h of a package.

    Raises
    ------
    DegenerateEnergyError
        If the window energy is not positive (constant fields).
    """
    if not pkg.d_big > 0:
        raise DegenerateEnergyError(
            f"window energy {pkg.d_big!r} is not positive; no completion exists")
    return ConformalCompletion(pkg.center, math.sqrt(pkg.d_big), pkg.psi_coeffs)


def _defect_from_jacobian(jac):
    gu, gv = jac[..., 0, :], jac[..., 1, :]
    nu, nv = (gu ** 2).sum(-1), (gv ** 2).sum(-1)
    total = nu + nv
    raw = np.abs(nu - nv) + 2 * np.abs((gu * gv).sum(-1))
    return np.where(total > 0, raw / np.where(total > 0, total, 1.0), 0.0)


def conformality_defect_array(spec: FieldSpec, pkg: HopfPackage | None, zc,
                              method: str = "analytic", step: float | None = None):
    jac = _jacobian(spec, zc, method, step)
    if pkg is not None:
        jac = np.concatenate([jac, conformal_completion(pkg).jacobian(zc)], axis=-1)
    return _defect_from_jacobian(jac)


def conformality_defect(spec: FieldSpec, pkg: HopfPackage | None, z,
                        method: str = "analytic", step: float | None = None) -> float:
    """Normalized failure of weak conformality of ``G = (xi0 o f, h)`` at z.

    ``(| |G_u|^2 - |G_v|^2 | + 2 |<G_u, G_v>|) / |grad G|^2``; with
    ``pkg=None`` the bare map xi0 o f is measured.
    """
    return float(conformality_defect_array(spec, pkg, as_complex(z), method, step))


def energy_identity_check(spec: FieldSpec, pkg: HopfPackage, r: float,
                          grid: PolarGrid | None = None, tol: float | None = None) -> VerificationReport:
    """Energy identities of the completion on the inner disk ``U_r(w)``.

    Rows:

    * completion energy identity: quadrature of ``|grad h|^2`` against
      ``D pi r^2 / 2 + (2D)^-1 int |phi|^2`` with phi taken from the field;
    * completion gradient identity: the same, pointwise on the nodes;
    * augmented energy ratio: ``Dir((F, h); U_r) / Dir(F; U_R)``, reported;
    * Hopf pointwise bound: ``|phi| <= 2 |grad F|^2`` on every node;
    * augmented conformality: maximum defect of ``(F, h)`` on the nodes.

    ``tol`` defaults to 1e-8 for exact packages and 1e-4 for sampled ones.
    """
    w, R = pkg.center, pkg.radius
    if r > R * (1 + 1e-12) or not r > 0:
        raise ParameterError(f"inner radius must satisfy 0 < r <= R={R}, got {r}")
    if tol is None:
        tol = 1e-8 if pkg.source == "analytic" else 1e-4
    grid = grid or PolarGrid()
    h = conformal_completion(pkg)
    D = pkg.d_big
    nodes, weights = disk_nodes(w, r, grid, spec.radial_grading(w))

    grad_h = h.grad_sq(nodes)
    phi = hopf_differential_array(spec, nodes)
    dens = energy_density(spec, nodes)
    dir_h = float(np.sum(weights * grad_h))
    int_phi2 = float(np.sum(weights * np.abs(phi) ** 2))
    predicted = D * math.pi * r * r / 2 + int_phi2 / (2 * D)
    rep = VerificationReport("completion-identities",
                             grid_meta={**grid.meta(), "r": r, "R": R, "source": pkg.source})

    err = abs(dir_h - predicted) / predicted
    rep.add("completion-energy", "completion energy identity", dir_h, predicted,
            tol - err, err < tol, f"relative error {err:.3e}")

    point_pred = D / 2 + np.abs(phi) ** 2 / (2 * D)
    perr = float((np.abs(grad_h - point_pred) / point_pred).max())
    rep.add("completion-gradient", "completion gradient identity", perr, tol,
            tol - perr, perr < tol, "max relative error over nodes")

    dir_f_inner = float(np.sum(weights * dens))
    ratio = (dir_f_inner + dir_h) / D
    rep.add("augmented-energy-ratio", "augmented energy bound", ratio, None, None,
            math.isfinite(ratio), f"Dir((F,h);U_{r:g}) / Dir(F;U_{R:g})")

    mask = dens > 0
    worst = float((np.abs(phi[mask]) / (2 * dens[mask])).max()) if mask.any() else 0.0
    if np.any(np.abs(phi[~mask]) > 0):
        worst = math.inf
    rep.add("hopf-pointwise", "Hopf pointwise bound", worst, 1.0, 1.0 - worst, worst <= 1.0,
            "max |phi| / (2 |grad F|^2)")

    defect = float(conformality_defect_array(spec, pkg, nodes[::8, ::8]).max())
    conf_tol = 1e-6
    rep.add("augmented-conformality", "augmented conformality", defect, conf_tol,
            conf_tol - defect, defect < conf_tol)
    return rep
