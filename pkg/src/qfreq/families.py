"""Analytic Q-valued test fields on planar disks.

Three variants cover the test corpus:

* :class:`BranchFamily` -- the holomorphic branch varieties
  ``{a * zeta**k : zeta**Q = z - c}``, homogeneous of degree ``k/Q``;
* :class:`SingleHarmonic` -- a single-valued harmonic polynomial map;
* :class:`Superposition` -- an unordered union of harmonic polynomial sheets.

Points of the plane are handled as complex numbers internally; public
functions accept either a complex scalar or a length-2 sequence.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import DomainError, ParameterError, SingularPointError
from .qspace import QPoint, xi0_array


def as_complex(z) -> complex:
    """Read a planar point given as complex, or as an (x, y) pair."""
    if isinstance(z, (complex, float, int, np.number)):
        return complex(z)
    z = np.asarray(z, dtype=float).ravel()
    if z.shape != (2,):
        raise ParameterError(f"expected a point in R^2, got {z!r}")
    return complex(z[0], z[1])


def _pad_table(t: np.ndarray, size: int) -> np.ndarray:
    out = np.zeros((size, size))
    out[:t.shape[0], :t.shape[1]] = t
    return out


def laplacian_table(table: np.ndarray) -> np.ndarray:
    """Coefficient table of the Laplacian of a bivariate polynomial."""
    table = np.atleast_2d(np.asarray(table, dtype=float))
    size = max(table.shape)
    uu = P.polyder(_pad_table(table, size), 2, axis=0) if size > 2 else np.zeros((1, 1))
    vv = P.polyder(_pad_table(table, size), 2, axis=1) if size > 2 else np.zeros((1, 1))
    return _pad_table(uu, size) + _pad_table(vv, size)


def _holomorphic_tables(coeffs, about=0j) -> list[np.ndarray]:
    """Real and imaginary coefficient tables of sum_m c_m (z - about)^m."""
    coeffs = np.asarray(coeffs, dtype=complex)
    deg = len(coeffs) - 1
    # expand in z first, then split z^m = (u + i v)^m binomially
    zpoly = np.zeros(deg + 1, dtype=complex)
    for m, c in enumerate(coeffs):
        if c != 0:
            zpoly[:m + 1] += c * P.polypow([-about, 1.0], m)[:m + 1]
    table = np.zeros((deg + 1, deg + 1), dtype=complex)
    for m, c in enumerate(zpoly):
        for j in range(m + 1):
            table[m - j, j] += c * math.comb(m, j) * (1j ** j)
    return [table.real.copy(), table.imag.copy()]


def _compose_affine(table: np.ndarray, u0: float, v0: float, s: float) -> np.ndarray:
    """Table of (u, v) -> p(u0 + s u, v0 + s v)."""
    d = table.shape[0]
    upows = [P.polypow([u0, s], i) for i in range(d)]
    vpows = [P.polypow([v0, s], j) for j in range(d)]
    out = np.zeros((d, d))
    for i in range(d):
        for j in range(d):
            c = table[i, j]
            if c != 0:
                a, b = upows[i], vpows[j]
                out[:len(a), :len(b)] += c * np.outer(a, b)
    return out


@dataclass(frozen=True, eq=False)
class SheetSpec:
    """One single-valued polynomial sheet R^2 -> R^n.

    ``tables[c][i, j]`` is the coefficient of ``u**i * v**j`` in component
    ``c``. Components are checked to be harmonic unless ``harmonic=False``
    (used only for negative controls).
    """

    tables: tuple
    harmonic: bool = True

    def __post_init__(self):
        raw = [np.atleast_2d(np.asarray(t, dtype=float)) for t in self.tables]
        if not raw:
            raise ParameterError("a sheet needs at least one component")
        size = max(max(t.shape) for t in raw)
        tabs = []
        for t in raw:
            t = _pad_table(t, size)
            t.setflags(write=False)
            tabs.append(t)
        object.__setattr__(self, "tables", tuple(tabs))
        if self.harmonic:
            for c, t in enumerate(tabs):
                lap = laplacian_table(t)
                scale = max(1.0, float(np.abs(t).max()))
                if np.abs(lap).max() > 1e-12 * scale:
                    raise ParameterError(f"sheet component {c} is not harmonic")
        grads = []
        for t in tabs:
            if size > 1:
                tu = _pad_table(P.polyder(t, 1, axis=0), size)
                tv = _pad_table(P.polyder(t, 1, axis=1), size)
            else:
                tu = tv = np.zeros((1, 1))
            grads.append((tu, tv))
        object.__setattr__(self, "_grads", tuple(grads))

    # constructors ---------------------------------------------------------

    @classmethod
    def holomorphic(cls, coeffs, about=0j) -> "SheetSpec":
        """Sheet ``z -> sum_m coeffs[m] (z - about)**m`` into R^2 = C."""
        return cls(tuple(_holomorphic_tables(coeffs, as_complex(about))))

    @classmethod
    def real_parts(cls, polys, about=0j) -> "SheetSpec":
        """Sheet into R^n whose c-th component is ``Re sum_m polys[c][m] (z - about)**m``."""
        about = as_complex(about)
        return cls(tuple(_holomorphic_tables(p, about)[0] for p in polys))

    @classmethod
    def linear(cls, matrix, offset=None) -> "SheetSpec":
        """Affine sheet ``(u, v) -> offset + matrix @ (u, v)``; matrix is n x 2."""
        matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        n = matrix.shape[0]
        offset = np.zeros(n) if offset is None else np.asarray(offset, dtype=float)
        tabs = []
        for c in range(n):
            t = np.zeros((2, 2))
            t[0, 0] = offset[c]
            t[1, 0] = matrix[c, 0]
            t[0, 1] = matrix[c, 1]
            tabs.append(t)
        return cls(tuple(tabs))

    @classmethod
    def constant(cls, value) -> "SheetSpec":
        value = np.atleast_1d(np.asarray(value, dtype=float))
        return cls(tuple(np.array([[v]]) for v in value))

    # evaluation -----------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.tables)

    @property
    def degree(self) -> int:
        return self.tables[0].shape[0] - 1

    def values(self, u, v) -> np.ndarray:
        return np.stack([P.polyval2d(u, v, t) for t in self.tables], axis=-1)

    def gradients(self, u, v) -> np.ndarray:
        """Jacobian of shape (..., 2, n): row 0 is d/du, row 1 is d/dv."""
        du = np.stack([P.polyval2d(u, v, g[0]) for g in self._grads], axis=-1)
        dv = np.stack([P.polyval2d(u, v, g[1]) for g in self._grads], axis=-1)
        return np.stack([du, dv], axis=-2)

    def dz_coeffs(self) -> list[np.ndarray]:
        """Complex coefficients (in z) of d/dz of each harmonic component."""
        if not self.harmonic:
            raise ParameterError("d/dz of a non-harmonic sheet is not holomorphic")
        out = []
        for t, (tu, tv) in zip(self.tables, self._grads):
            # restrict (F_u - i F_v)/2 to the real axis v = 0
            out.append(0.5 * (tu[:, 0] - 1j * tv[:, 0]))
        return out

    # transforms -----------------------------------------------------------

    def affine_pullback(self, x0: complex, r: float, scale: float = 1.0) -> "SheetSpec":
        """Sheet ``x -> scale * F(x0 + r x)``."""
        tabs = tuple(scale * _compose_affine(t, x0.real, x0.imag, r) for t in self.tables)
        return SheetSpec(tabs, harmonic=self.harmonic)

    def shifted(self, p) -> "SheetSpec":
        """Sheet ``x -> F(x) - p``."""
        p = np.broadcast_to(np.asarray(p, dtype=float), (self.n,))
        tabs = []
        for t, pc in zip(self.tables, p):
            t = t.copy()
            t[0, 0] -= pc
            tabs.append(t)
        return SheetSpec(tuple(tabs), harmonic=self.harmonic)

    def to_dict(self) -> dict:
        return {"tables": [t.tolist() for t in self.tables], "harmonic": self.harmonic}

    @classmethod
    def from_dict(cls, data: dict) -> "SheetSpec":
        if "holomorphic" in data:
            coeffs = [complex(*c) if isinstance(c, (list, tuple)) else complex(c)
                      for c in data["holomorphic"]]
            return cls.holomorphic(coeffs, as_complex(data.get("about", [0.0, 0.0])))
        if "linear" in data:
            return cls.linear(data["linear"], data.get("offset"))
        if "constant" in data:
            return cls.constant(data["constant"])
        return cls(tuple(np.asarray(t, dtype=float) for t in data["tables"]),
                   harmonic=bool(data.get("harmonic", True)))


class FieldSpec:
    """Common interface of the analytic Q-valued fields.

    Subclasses provide ``q``, ``n``, ``center``, ``domain_radius`` and the
    vectorized ``values`` / ``gradients`` on complex arrays.
    """

    q: int
    n: int
    center: complex
    domain_radius: float

    # vectorized core, overridden by subclasses
    def values(self, zc) -> np.ndarray:  # (..., q, n)
        raise NotImplementedError

    def gradients(self, zc) -> np.ndarray:  # (..., q, 2, n)
        raise NotImplementedError

    def branch_points(self) -> list[complex]:
        """Points where the sheets' derivatives are singular."""
        return []

    def radial_grading(self, center: complex, tol: float = 1e-14) -> int:
        """Grading exponent that makes polar quadrature about ``center`` smooth."""
        return 1

    def scaled(self, c: float) -> "FieldSpec":
        raise NotImplementedError

    def shifted(self, p) -> "FieldSpec":
        raise NotImplementedError

    def pullback(self, x0: complex, r: float, scale: float) -> "FieldSpec":
        """The field ``x -> scale * f(x0 + r x)``."""
        raise NotImplementedError

    def fd_step(self) -> float:
        """Default finite-difference step: 1e-5 of the domain radius."""
        base = self.domain_radius if math.isfinite(self.domain_radius) else 1.0
        return 1e-5 * base

    def check_disk(self, center: complex, r: float):
        if r <= 0 or not math.isfinite(r):
            raise ParameterError(f"radius must be positive and finite, got {r}")
        if math.isfinite(self.domain_radius):
            if abs(center - self.center) + r > self.domain_radius * (1 + 1e-12):
                raise DomainError(
                    f"disk of radius {r} about {center} leaves the domain "
                    f"of radius {self.domain_radius} about {self.center}")

    def to_dict(self) -> dict:
        raise NotImplementedError

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _pt(z: complex) -> list:
    return [z.real, z.imag]


@dataclass(frozen=True, eq=False)
class BranchFamily(FieldSpec):
    """The branch variety ``{offset + a * zeta**k : zeta**q = z - center}``.

    Values live in C = R^2. For ``k < q`` the field is Hölder continuous of
    exponent ``k/q`` at ``center`` and nowhere smoother there.
    """

    k: int
    q: int
    a: complex = 1.0
    center: complex = 0j
    offset: complex = 0j
    domain_radius: float = math.inf

    n = 2

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ParameterError(f"k must be a positive integer, got {self.k}")
        if int(self.q) != self.q or self.q < 2:
            raise ParameterError(f"q must be an integer >= 2, got {self.q}")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "q", int(self.q))
        for name in ("a", "center", "offset"):
            object.__setattr__(self, name, as_complex(getattr(self, name)))

    @property
    def alpha(self) -> float:
        """Homogeneity degree k/q."""
        return self.k / self.q

    def _roots(self, zc):
        w = np.asarray(zc, dtype=complex) - self.center
        # principal branch, cut on the negative real axis
        base = np.abs(w) ** (1.0 / self.q) * np.exp(1j * np.angle(w) / self.q)
        turns = np.exp(2j * np.pi * np.arange(self.q) / self.q)
        return w, base[..., None] * turns

    def complex_values(self, zc) -> np.ndarray:
        _, zeta = self._roots(zc)
        return self.offset + self.a * zeta ** self.k

    def values(self, zc):
        s = self.complex_values(zc)
        return np.stack([s.real, s.imag], axis=-1)

    def complex_derivatives(self, zc) -> np.ndarray:
        w, zeta = self._roots(zc)
        if np.any(w == 0):
            raise SingularPointError(
                f"sheet derivatives are singular at the branch point {self.center}")
        return self.a * self.k * zeta ** self.k / (self.q * w[..., None])

    def gradients(self, zc):
        d = self.complex_derivatives(zc)
        row_u = np.stack([d.real, d.imag], axis=-1)
        row_v = np.stack([-d.imag, d.real], axis=-1)
        return np.stack([row_u, row_v], axis=-2)

    def branch_points(self):
        return [self.center]

    def radial_grading(self, center, tol=1e-14):
        scale = max(1.0, abs(self.center))
        return self.q if abs(as_complex(center) - self.center) <= tol * scale else 1

    def scaled(self, c):
        return BranchFamily(self.k, self.q, self.a * c, self.center,
                            self.offset * c, self.domain_radius)

    def shifted(self, p):
        return BranchFamily(self.k, self.q, self.a, self.center,
                            self.offset - as_complex(p), self.domain_radius)

    def pullback(self, x0, r, scale):
        x0 = as_complex(x0)
        return BranchFamily(
            self.k, self.q,
            a=self.a * scale * r ** (self.k / self.q),
            center=(self.center - x0) / r,
            offset=self.offset * scale,
            domain_radius=self.domain_radius / r)

    def to_dict(self):
        out = {"variant": "branch", "k": self.k, "q": self.q, "a": _pt(self.a),
               "center": _pt(self.center), "offset": _pt(self.offset)}
        if math.isfinite(self.domain_radius):
            out["domain_radius"] = self.domain_radius
        return out


class _PolynomialField(FieldSpec):
    sheets: tuple

    @property
    def q(self):
        return len(self.sheets)

    @property
    def n(self):
        return self.sheets[0].n

    def values(self, zc):
        zc = np.asarray(zc, dtype=complex)
        return np.stack([s.values(zc.real, zc.imag) for s in self.sheets], axis=-2)

    def gradients(self, zc):
        zc = np.asarray(zc, dtype=complex)
        return np.stack([s.gradients(zc.real, zc.imag) for s in self.sheets], axis=-3)

    @property
    def harmonic(self) -> bool:
        return all(s.harmonic for s in self.sheets)

    def _rebuild(self, sheets, center, domain_radius):
        raise NotImplementedError

    def scaled(self, c):
        return self._rebuild([s.affine_pullback(0j, 1.0, c) for s in self.sheets],
                             self.center, self.domain_radius)

    def shifted(self, p):
        return self._rebuild([s.shifted(p) for s in self.sheets],
                             self.center, self.domain_radius)

    def pullback(self, x0, r, scale):
        x0 = as_complex(x0)
        return self._rebuild([s.affine_pullback(x0, r, scale) for s in self.sheets],
                             (self.center - x0) / r, self.domain_radius / r)

    def _base_dict(self):
        out = {"center": _pt(self.center)}
        if math.isfinite(self.domain_radius):
            out["domain_radius"] = self.domain_radius
        return out


@dataclass(frozen=True, eq=False)
class SingleHarmonic(_PolynomialField):
    """A single-valued harmonic polynomial map, viewed as a 1-valued field."""

    sheet: SheetSpec
    center: complex = 0j
    domain_radius: float = math.inf

    def __post_init__(self):
        object.__setattr__(self, "center", as_complex(self.center))

    @property
    def sheets(self):
        return (self.sheet,)

    def _rebuild(self, sheets, center, domain_radius):
        return SingleHarmonic(sheets[0], center, domain_radius)

    def to_dict(self):
        return {"variant": "single", "sheet": self.sheet.to_dict(), **self._base_dict()}


@dataclass(frozen=True, eq=False)
class Superposition(_PolynomialField):
    """Unordered union of Q single-valued harmonic sheets."""

    sheets: tuple
    center: complex = 0j
    domain_radius: float = math.inf

    def __post_init__(self):
        sheets = tuple(self.sheets)
        if not sheets:
            raise ParameterError("a superposition needs at least one sheet")
        if len({s.n for s in sheets}) != 1:
            raise ParameterError("all sheets must share the target dimension")
        for i in range(len(sheets)):
            for j in range(i):
                a, b = sheets[i].tables, sheets[j].tables
                if all(np.array_equal(x, y) for x, y in zip(a, b)):
                    raise ParameterError(f"sheets {j} and {i} coincide")
        object.__setattr__(self, "sheets", sheets)
        object.__setattr__(self, "center", as_complex(self.center))

    def _rebuild(self, sheets, center, domain_radius):
        return Superposition(tuple(sheets), center, domain_radius)

    def to_dict(self):
        return {"variant": "superposition",
                "sheets": [s.to_dict() for s in self.sheets], **self._base_dict()}


def field_from_dict(data: dict) -> FieldSpec:
    """Inverse of ``FieldSpec.to_dict``; also accepts the shorthand sheet forms."""
    variant = data.get("variant")
    common = {}
    if "center" in data:
        common["center"] = as_complex(data["center"])
    if "domain_radius" in data:
        common["domain_radius"] = float(data["domain_radius"])
    if variant == "branch":
        kw = dict(common)
        for name in ("a", "offset"):
            if name in data:
                kw[name] = as_complex(data[name])
        return BranchFamily(int(data["k"]), int(data["q"]), **kw)
    if variant == "single":
        return SingleHarmonic(SheetSpec.from_dict(data["sheet"]), **common)
    if variant == "superposition":
        return Superposition(tuple(SheetSpec.from_dict(s) for s in data["sheets"]), **common)
    raise ParameterError(f"unknown field variant {variant!r}")


def field_from_json(text: str) -> FieldSpec:
    return field_from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# point-wise operations


def eval_field(spec: FieldSpec, z) -> QPoint:
    """The unordered tuple of sheet values at ``z``."""
    return QPoint(spec.values(as_complex(z)))


def sheet_gradients(spec: FieldSpec, z) -> list[np.ndarray]:
    """Exact per-sheet Jacobians (each 2 x n, rows d/du and d/dv)."""
    g = spec.gradients(as_complex(z))
    return [g[i] for i in range(spec.q)]


def xi0_field(spec: FieldSpec, zc) -> np.ndarray:
    """xi0 applied to the field on an array of complex points."""
    return xi0_array(spec.values(zc))


def xi0_jacobian_fd_array(spec: FieldSpec, zc, step: float) -> np.ndarray:
    """Centered-difference Jacobian of xi0 o f, shape (..., 2, n*q)."""
    if not step > 0:
        raise ParameterError(f"finite-difference step must be positive, got {step}")
    zc = np.asarray(zc, dtype=complex)
    du = (xi0_field(spec, zc + step) - xi0_field(spec, zc - step)) / (2 * step)
    dv = (xi0_field(spec, zc + 1j * step) - xi0_field(spec, zc - 1j * step)) / (2 * step)
    return np.stack([du, dv], axis=-2)


def xi0_energy_density_fd(spec: FieldSpec, zc, step: float, kink_rtol: float = 1e-3) -> np.ndarray:
    """``|grad(xi0 o f)|^2`` from finite differences, robust at sorting ties.

    Centered differences are used where the forward and backward quotients
    agree. A quotient straddling a tie mixes two swapped slopes, which only
    lowers the sum of squares, so where they disagree by more than
    ``kink_rtol`` (relative) the larger one-sided value is taken instead.
    """
    if not step > 0:
        raise ParameterError(f"finite-difference step must be positive, got {step}")
    zc = np.asarray(zc, dtype=complex)
    mid = xi0_field(spec, zc)
    total = np.zeros(zc.shape)
    for e in (1.0, 1j):
        ahead = xi0_field(spec, zc + step * e)
        behind = xi0_field(spec, zc - step * e)
        cen = (((ahead - behind) / (2 * step)) ** 2).sum(-1)
        fwd = (((ahead - mid) / step) ** 2).sum(-1)
        bwd = (((mid - behind) / step) ** 2).sum(-1)
        kink = np.abs(fwd - bwd) > kink_rtol * (fwd + bwd)
        total += np.where(kink, np.maximum(fwd, bwd), cen)
    return total


def xi0_jacobian_fd(spec: FieldSpec, z, step: float | None = None) -> np.ndarray:
    """Centered-difference Jacobian (2 x nQ) of xi0 o f at ``z``.

    Accurate to O(step**2) where the coordinate sorting is locally a fixed
    permutation and no branch point lies within ``step``.
    """
    if step is None:
        step = spec.fd_step()
    return xi0_jacobian_fd_array(spec, as_complex(z), step)


def sheet_separation(spec: FieldSpec, z) -> float:
    """Smallest distance between two sheet values (inf when q == 1)."""
    if spec.q == 1:
        return math.inf
    vals = spec.values(as_complex(z))
    diff = vals[:, None, :] - vals[None, :, :]
    dist = np.sqrt((diff ** 2).sum(axis=-1))
    return float(dist[~np.eye(spec.q, dtype=bool)].min())


def coordinate_gap(spec: FieldSpec, z) -> float:
    """Smallest gap between two sheets' values in any single coordinate.

    Where this is positive the coordinate sorting inside xi0 is locally a
    fixed permutation, so xi0 o f is smooth there.
    """
    if spec.q == 1:
        return math.inf
    vals = spec.values(as_complex(z))
    s = np.sort(vals, axis=0)
    return float(np.diff(s, axis=0).min())
