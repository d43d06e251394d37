import cmath
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qfreq.errors import DomainError, ParameterError, SingularPointError
from qfreq.families import (BranchFamily, SheetSpec, SingleHarmonic, Superposition,
                            coordinate_gap, eval_field, field_from_dict, field_from_json,
                            sheet_gradients, sheet_separation, xi0_jacobian_fd)
from qfreq.qspace import QPoint, g_metric, g_metric_batch

OMEGA = cmath.exp(2j * math.pi / 3)


def as_qpoint(zs):
    return QPoint([[z.real, z.imag] for z in zs])


def branch_oracle(k, q, a, c, offset, z):
    """Sheet values from numpy's polynomial root finder."""
    if z == c:
        return [offset] * q
    roots = np.roots([1] + [0] * (q - 1) + [-(z - c)])
    return [offset + a * r ** k for r in roots]


def test_branch_values_at_branch_point():
    assert eval_field(BranchFamily(2, 3), 0) == QPoint.multiple([0.0, 0.0], 3)


def test_branch_values_are_cube_roots_of_unity():
    got = eval_field(BranchFamily(2, 3), 1)
    want = as_qpoint([1, OMEGA, OMEGA ** 2])
    assert g_metric(got, want) < 1e-15


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(2, 5),
       st.complex_numbers(min_magnitude=0.1, max_magnitude=2),
       st.complex_numbers(max_magnitude=1), st.complex_numbers(min_magnitude=0.05, max_magnitude=3))
def test_branch_values_match_root_finder(k, q, a, offset, z):
    c = 0.25 - 0.5j
    spec = BranchFamily(k, q, a, c, offset)
    got = eval_field(spec, c + z)
    want = as_qpoint(branch_oracle(k, q, a, c, offset, c + z))
    assert g_metric(got, want) < 1e-10 * max(1.0, abs(a) * abs(z) ** (k / q))


def test_single_harmonic_value():
    a, b = 2.0, -0.5
    spec = SingleHarmonic(SheetSpec.linear([[a, 0], [0, b]]))
    assert eval_field(spec, 1 + 1j) == QPoint([[a, b]])


def test_holomorphic_tables_match_complex_polynomial(rng):
    coeffs = rng.normal(size=5) + 1j * rng.normal(size=5)
    about = 0.3 - 0.2j
    sheet = SheetSpec.holomorphic(coeffs, about)
    z = rng.normal(size=20) + 1j * rng.normal(size=20)
    want = np.polyval(coeffs[::-1], z - about)
    got = sheet.values(z.real, z.imag)
    np.testing.assert_allclose(got[..., 0] + 1j * got[..., 1], want, rtol=1e-12, atol=1e-12)


def test_non_harmonic_sheet_rejected():
    table = np.zeros((3, 3))
    table[2, 0] = 1.0  # u**2
    with pytest.raises(ParameterError, match="harmonic"):
        SheetSpec((table,))
    SheetSpec((table, np.zeros((1, 1))), harmonic=False)


def test_single_gradient():
    a, b = 3.0, 0.25
    spec = SingleHarmonic(SheetSpec.linear([[a, 0], [0, b]]))
    (g,) = sheet_gradients(spec, 0.4 - 0.7j)
    np.testing.assert_allclose(g, [[a, 0], [0, b]], atol=1e-15)


def test_branch_gradient_modulus_two_thirds():
    grads = sheet_gradients(BranchFamily(2, 3), 1)
    # the branch with zeta = 1 has the real derivative 2/3
    matches = [g for g in grads if np.allclose(g, [[2 / 3, 0], [0, 2 / 3]], atol=1e-14)]
    assert len(matches) == 1
    for g in grads:
        # holomorphic sheet: |grad|^2 = 2 |d_z s|^2
        assert (g ** 2).sum() == pytest.approx(2 * (2 / 3) ** 2, rel=1e-14)


def test_superposition_gradients_concatenate(rng):
    s1 = SheetSpec.holomorphic([0, 1, 0.5])
    s2 = SheetSpec.linear([[2, 0], [1, -1]])
    z = 0.3 + 0.6j
    both = sheet_gradients(Superposition((s1, s2)), z)
    np.testing.assert_allclose(both[0], sheet_gradients(SingleHarmonic(s1), z)[0])
    np.testing.assert_allclose(both[1], sheet_gradients(SingleHarmonic(s2), z)[0])


def test_branch_gradient_singular_at_branch_point():
    with pytest.raises(SingularPointError):
        sheet_gradients(BranchFamily(2, 3, center=0.5j), 0.5j)


def test_fd_jacobian_single_matches_exact():
    a, b = 1.5, -2.0
    spec = SingleHarmonic(SheetSpec.linear([[a, 0], [0, b]]))
    J = xi0_jacobian_fd(spec, 0.2 + 0.1j)
    np.testing.assert_allclose(J, [[a, 0], [0, b]], atol=1e-9)


def test_fd_jacobian_constant_is_zero():
    spec = Superposition((SheetSpec.constant([1.0, 2.0]), SheetSpec.constant([0.0, -1.0])))
    np.testing.assert_array_equal(xi0_jacobian_fd(spec, 0.3j, 1e-3), np.zeros((2, 4)))


def test_fd_jacobian_rejects_bad_step():
    with pytest.raises(ParameterError):
        xi0_jacobian_fd(BranchFamily(2, 3), 1, 0.0)
    with pytest.raises(ParameterError):
        xi0_jacobian_fd(BranchFamily(2, 3), 1, -1e-3)


def test_fd_frobenius_matches_sheets_where_sorting_is_fixed():
    spec = BranchFamily(2, 3)
    z = cmath.exp(0.4j)
    assert coordinate_gap(spec, z) > 0.1
    J = xi0_jacobian_fd(spec, z)
    exact = sum((g ** 2).sum() for g in sheet_gradients(spec, z))
    assert (J ** 2).sum() == pytest.approx(exact, rel=1e-9)
    assert exact == pytest.approx(3 * 2 * (2 / 3) ** 2, rel=1e-14)


def test_sorting_tie_at_unit_point():
    # x-coordinates of two branches coincide on the positive real axis
    assert coordinate_gap(BranchFamily(2, 3), 1) < 1e-14


def _fd_error(spec, z, step):
    J = xi0_jacobian_fd(spec, z, step)
    exact = sum((g ** 2).sum() for g in sheet_gradients(spec, z))
    return abs((J ** 2).sum() - exact)


@pytest.mark.parametrize("spec,z", [
    (BranchFamily(2, 3), cmath.exp(0.4j)),
    (BranchFamily(1, 2, 1.5 - 0.5j, 0.1), 0.8 + 0.5j),
    (Superposition((SheetSpec.holomorphic([0, 1, 0, 1]), SheetSpec.holomorphic([1, 0, 1]))),
     0.35 + 0.2j),
])
def test_fd_convergence_order(spec, z):
    assert sheet_separation(spec, z) > 0 and coordinate_gap(spec, z) > 0
    steps = [1e-2, 5e-3, 2.5e-3]
    errs = [_fd_error(spec, z, h) for h in steps]
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert min(orders) >= 1.9, orders


def test_separation_examples():
    spec = BranchFamily(2, 3)
    assert sheet_separation(spec, 0) == 0.0
    assert sheet_separation(spec, 1) == pytest.approx(math.sqrt(3), rel=1e-14)
    consts = Superposition((SheetSpec.constant([1.0, 2.0]), SheetSpec.constant([4.0, -2.0])))
    for z in (0, 0.5j, -0.3 + 0.1j):
        assert sheet_separation(consts, z) == pytest.approx(5.0, rel=1e-15)
    assert sheet_separation(SingleHarmonic(SheetSpec.holomorphic([0, 1])), 0.2) == math.inf


def test_coincident_sheets_rejected():
    s = SheetSpec.holomorphic([0, 1])
    with pytest.raises(ParameterError):
        Superposition((s, SheetSpec.holomorphic([0, 1])))


def test_mismatched_dimension_rejected():
    with pytest.raises(ParameterError):
        Superposition((SheetSpec.holomorphic([0, 1]), SheetSpec.real_parts([[0, 1]])))


def test_domain_check():
    spec = SingleHarmonic(SheetSpec.holomorphic([0, 1]), domain_radius=1.0)
    with pytest.raises(DomainError):
        spec.check_disk(0.5, 0.6)
    spec.check_disk(0.5, 0.5)


@pytest.mark.parametrize("k,q", [(1, 2), (2, 3), (3, 4), (4, 5), (3, 2)])
def test_branch_homogeneity(k, q):
    spec = BranchFamily(k, q)
    th = np.linspace(0, 2 * np.pi, 17)
    for r in (1e-3, 0.1, 1.0, 7.0):
        vals = spec.values(r * np.exp(1j * th))
        mod = np.sqrt((vals ** 2).sum(-1))
        np.testing.assert_allclose(mod, r ** (k / q), rtol=1e-13)


def _holder_constant(spec, alpha, n_rad, n_ang):
    rho = np.linspace(0.5, 1.0, n_rad)
    th = 2 * np.pi * np.arange(n_ang) / n_ang
    z = (rho[:, None] * np.exp(1j * th)[None, :]).ravel()
    vals = spec.values(z)
    i, j = np.triu_indices(z.size, k=1)
    d = g_metric_batch(vals[i], vals[j])
    return float((d / np.abs(z[i] - z[j]) ** alpha).max())


@pytest.mark.parametrize("spec", [BranchFamily(2, 3), BranchFamily(1, 2, 1 + 1j),
                                  Superposition((SheetSpec.holomorphic([0, 1]),
                                                 SheetSpec.holomorphic([0, 0, 1])))])
def test_continuity_constant_stable(spec):
    alpha = min(getattr(spec, "alpha", 1.0), 1.0)
    coarse = _holder_constant(spec, alpha, 6, 24)
    fine = _holder_constant(spec, alpha, 12, 48)
    assert math.isfinite(coarse) and coarse > 0
    assert abs(fine - coarse) <= 0.05 * coarse


def test_pullback_composes(rng):
    specs = [BranchFamily(2, 3, 1 - 0.5j, 0.2j, 0.3), SingleHarmonic(SheetSpec.holomorphic([1, 2, 0.5])),
             Superposition((SheetSpec.linear([[1, 2], [0, 1]]), SheetSpec.holomorphic([0, 0, 1])))]
    x0, r, scale = 0.1 - 0.3j, 0.37, 2.5
    z = 0.5 * (rng.normal(size=10) + 1j * rng.normal(size=10))
    for spec in specs:
        pulled = spec.pullback(x0, r, scale)
        for zz in z:
            got = eval_field(pulled, zz)
            want = QPoint(scale * spec.values(x0 + r * zz))
            assert g_metric(got, want) < 1e-12


@pytest.mark.parametrize("spec", [
    BranchFamily(2, 3, 1 - 0.5j, 0.2j, 0.3, domain_radius=4.0),
    SingleHarmonic(SheetSpec.real_parts([[0, 1, 0.5j], [1, 0, 0, 2]]), center=0.5),
    Superposition((SheetSpec.linear([[1, 2], [0, 1]]), SheetSpec.holomorphic([0, 0, 1])),
                  domain_radius=2.0),
])
def test_field_json_round_trip(spec):
    text = spec.to_json()
    again = field_from_json(text)
    assert again.to_json() == text
    z = np.array([0.3 + 0.1j, -0.2 + 0.5j])
    np.testing.assert_array_equal(again.values(z), spec.values(z))
    assert field_from_dict(json.loads(text)).to_dict() == spec.to_dict()
