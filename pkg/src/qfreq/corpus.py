"""Reproducible test corpora of analytic fields."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .families import BranchFamily, FieldSpec, SheetSpec, SingleHarmonic, Superposition


@dataclass
class CorpusEntry:
    name: str
    spec: FieldSpec
    centers: list
    radii: list  # one radius grid per center

    @property
    def homogeneous(self) -> bool:
        return isinstance(self.spec, BranchFamily) and self.spec.offset == 0


def kq_corpus(max_q: int = 5):
    """Homogeneous branch families ``k/Q`` with ``1 <= k < Q <= max_q`` at 0."""
    return [(BranchFamily(k, q), [0j]) for q in range(2, max_q + 1) for k in range(1, q)]


def random_polynomial(rng: np.random.Generator, degree: int, scale: float = 1.0) -> np.ndarray:
    c = rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1)
    return scale * c / np.arange(1, degree + 2)


def random_harmonic_sheet(rng: np.random.Generator, n: int, degree: int) -> SheetSpec:
    """Components are real parts of independent random complex polynomials."""
    return SheetSpec.real_parts([random_polynomial(rng, degree) for _ in range(n)])


def random_harmonic_field(rng: np.random.Generator, q: int | None = None,
                          n: int | None = None, degree: int | None = None) -> FieldSpec:
    q = int(rng.integers(1, 4)) if q is None else q
    n = int(rng.integers(1, 4)) if n is None else n
    degree = int(rng.integers(1, 5)) if degree is None else degree
    sheets = tuple(random_harmonic_sheet(rng, n, degree) for _ in range(q))
    if q == 1:
        return SingleHarmonic(sheets[0])
    return Superposition(sheets)


def random_harmonic_corpus(seed: int = 0, count: int = 200):
    rng = np.random.default_rng(seed)
    return [random_harmonic_field(rng) for _ in range(count)]


def _geom(lo, hi, count=32):
    return list(np.geomspace(lo, hi, count))


def monotonicity_corpus(seed: int = 7, count: int = 32) -> list[CorpusEntry]:
    """Twenty-plus fields, three centers each, ``count`` radii per center.

    Branch families are probed at their branch point and at two points at
    distance 1 from it; off-branch disks stop at radius 1/2 so no branch
    point enters them.
    """
    rng = np.random.default_rng(seed)
    out = []
    branch = [(1, 2, 1.0, 0j, 0j), (2, 3, 1.0, 0j, 0j), (1, 3, 1.0, 0j, 0j),
              (3, 4, 1.0, 0j, 0j), (2, 5, 1.0, 0j, 0j), (4, 5, 1.0, 0j, 0j),
              (3, 2, 1.0, 0j, 0j), (1, 2, 2 - 1j, 0.3 + 0.1j, 0j),
              (2, 3, 1.0, 0j, 0.5 + 0.25j)]
    for k, q, a, c, off in branch:
        spec = BranchFamily(k, q, a, c, off)
        centers = [c, c + 1.0, c + np.exp(2j)]
        radii = [_geom(1e-3, 1.0, count), _geom(1e-3, 0.5, count), _geom(1e-3, 0.5, count)]
        name = f"branch k={k} q={q}"
        if a != 1 or c != 0 or off != 0:
            name += f" a={a:g} c={c:g} offset={off:g}"
        out.append(CorpusEntry(name, spec, centers, radii))

    poly_centers = [0j, 0.3 + 0.2j, -0.5j]
    poly_radii = [_geom(1e-3, 1.0, count)] * 3
    singles = {
        "identity": SheetSpec.linear([[1, 0], [0, 1]]),
        "anisotropic": SheetSpec.linear([[2, 0], [0, 0.5]]),
        "z^2": SheetSpec.holomorphic([0, 0, 1]),
        "z^3+z": SheetSpec.holomorphic([0, 1, 0, 1]),
        "shear": SheetSpec.linear([[1, 1], [0, 0]]),
        "quadratic+const": SheetSpec.holomorphic([0.2, 0.5, 1]),
        "random n=3": random_harmonic_sheet(rng, 3, 3),
    }
    for name, sheet in singles.items():
        out.append(CorpusEntry(f"single {name}", SingleHarmonic(sheet), poly_centers, poly_radii))

    z = SheetSpec.holomorphic([0, 1])
    supers = {
        "{z, z^2}": (z, SheetSpec.holomorphic([0, 0, 1])),
        "{c, z}": (SheetSpec.constant([1.0, 0.0]), z),
        "{z, -z}": (z, SheetSpec.holomorphic([0, -1])),
        "{z^2, -z^2, z^3/2}": (SheetSpec.holomorphic([0, 0, 1]),
                               SheetSpec.holomorphic([0, 0, -1]),
                               SheetSpec.holomorphic([0, 0, 0, 0.5])),
        "random q=2 n=1": tuple(random_harmonic_sheet(rng, 1, 3) for _ in range(2)),
        "random q=3 n=2": tuple(random_harmonic_sheet(rng, 2, 2) for _ in range(3)),
        "random q=2 n=3": tuple(random_harmonic_sheet(rng, 3, 2) for _ in range(2)),
    }
    for name, sheets in supers.items():
        out.append(CorpusEntry(f"superposition {name}", Superposition(sheets),
                               poly_centers, poly_radii))
    return out


def polynomial_phi_corpus(seed: int = 11) -> list[FieldSpec]:
    """Non-conformal harmonic fields with nonconstant polynomial phi (degree >= 3)."""
    rng = np.random.default_rng(seed)
    fields = [
        SingleHarmonic(SheetSpec.real_parts([[0, 1, 0.5, 0.25], [0, 0.3j, 0, -0.4]])),
        SingleHarmonic(random_harmonic_sheet(rng, 3, 3)),
        Superposition((random_harmonic_sheet(rng, 2, 3), random_harmonic_sheet(rng, 2, 3))),
        Superposition((SheetSpec.real_parts([[0, 1, 0, 0.5]]),
                       SheetSpec.real_parts([[1.0, 0, 0.7j, 0, 0.2]]))),
    ]
    return fields


def energy_ratio_corpus() -> list[FieldSpec]:
    """Every field family with positive energy on the unit disk."""
    z = SheetSpec.holomorphic([0, 1])
    return [
        BranchFamily(2, 3),
        BranchFamily(1, 2),
        SingleHarmonic(z),
        SingleHarmonic(SheetSpec.linear([[2, 0], [0, 0.5]])),
        SingleHarmonic(SheetSpec.linear([[1, 1], [0, 0]])),
        Superposition((z, SheetSpec.holomorphic([0, 0, 1]))),
        Superposition((SheetSpec.constant([1.0, 0.0]), z)),
        *polynomial_phi_corpus(),
    ]

