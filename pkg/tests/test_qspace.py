import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qfreq.errors import BruteForceLimitError, DimensionMismatchError
from qfreq.qspace import (QPoint, g_metric, g_metric_batch, g_metric_bruteforce, xi0,
                          xi0_array)

SQRT2 = math.sqrt(2.0)

coord = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@st.composite
def qpoint_pair(draw, count=2):
    q = draw(st.integers(1, 5))
    n = draw(st.integers(1, 3))
    return [QPoint(draw(arrays(float, (q, n), elements=coord))) for _ in range(count)]


def test_metric_identical_multiple_points():
    S = QPoint.multiple([0.0], 2)
    assert g_metric(S, S) == 0.0
    assert g_metric_bruteforce(S, S) == 0.0


def test_metric_two_points_on_line():
    S, T = QPoint([[0.0], [1.0]]), QPoint([[1.0], [2.0]])
    assert g_metric(S, T) == pytest.approx(SQRT2, abs=1e-15)
    assert g_metric_bruteforce(S, T) == pytest.approx(SQRT2, abs=1e-15)


def test_metric_against_collapsed_point():
    S = QPoint([[1.0, 0.0], [0.0, 1.0]])
    T = QPoint.multiple([0.0, 0.0], 2)
    assert g_metric(S, T) == pytest.approx(SQRT2, abs=1e-15)


def test_mismatch_errors():
    with pytest.raises(DimensionMismatchError):
        g_metric(QPoint([[0.0], [1.0]]), QPoint([[0.0]]))
    with pytest.raises(DimensionMismatchError):
        g_metric(QPoint([[0.0, 1.0]]), QPoint([[0.0]]))


def test_bruteforce_refuses_large_q():
    S = QPoint(np.zeros((9, 1)))
    with pytest.raises(BruteForceLimitError, match="8"):
        g_metric_bruteforce(S, S)


@pytest.mark.parametrize("q", range(2, 8))
def test_assignment_matches_bruteforce_exactly(q):
    rng = np.random.default_rng(100 + q)
    for _ in range(200):
        n = int(rng.integers(1, 4))
        S = QPoint(rng.normal(size=(q, n)))
        T = QPoint(rng.normal(size=(q, n)))
        assert g_metric(S, T) == g_metric_bruteforce(S, T)


def test_batch_matches_pointwise(rng):
    for q in (1, 2, 3, 4, 7):
        A = rng.normal(size=(50, q, 2))
        B = rng.normal(size=(50, q, 2))
        got = g_metric_batch(A, B)
        want = [g_metric(QPoint(a), QPoint(b)) for a, b in zip(A, B)]
        np.testing.assert_allclose(got, want, rtol=1e-13, atol=1e-14)


def test_xi0_examples():
    np.testing.assert_array_equal(xi0(QPoint([[3.0], [1.0]])), [1.0, 3.0])
    np.testing.assert_array_equal(xi0(QPoint([[3.0, 1.0], [1.0, 2.0]])), [1.0, 3.0, 1.0, 2.0])
    S = QPoint([[0.0], [1.0]])
    assert np.linalg.norm(xi0(S)) == 1.0 == S.norm()


def test_xi0_array_layout():
    pts = np.array([[[3.0, 1.0], [1.0, 2.0]], [[0.0, 5.0], [2.0, -1.0]]])
    np.testing.assert_array_equal(xi0_array(pts), [[1, 3, 1, 2], [0, 2, -1, 5]])


def test_json_round_trip():
    S = QPoint([[3.0, 1.0], [1.0, 2.0], [0.5, -4.0]])
    text = S.to_json()
    assert isinstance(json.loads(text), list)
    assert QPoint.from_json(text) == S


@settings(max_examples=200, deadline=None)
@given(qpoint_pair(3))
def test_metric_axioms(pts):
    S, T, U = pts
    assert g_metric(S, T) == g_metric(T, S)
    assert g_metric(S, S) == 0.0
    assert g_metric(S, U) <= g_metric(S, T) + g_metric(T, U) + 1e-12


@settings(max_examples=200, deadline=None)
@given(qpoint_pair(2))
def test_xi0_contracts(pts):
    S, T = pts
    assert np.linalg.norm(xi0(S) - xi0(T)) <= g_metric(S, T) + 1e-12


@settings(max_examples=200, deadline=None)
@given(qpoint_pair(1))
def test_xi0_preserves_norm(pts):
    (S,) = pts
    # same squared terms, possibly summed in a different order
    assert np.linalg.norm(xi0(S)) == pytest.approx(S.norm(), rel=1e-14, abs=1e-300)


@settings(max_examples=100, deadline=None)
@given(qpoint_pair(2), st.randoms(use_true_random=False))
def test_permutation_invariance(pts, rnd):
    S, T = pts
    raw = [list(p) for p in S.points]
    rnd.shuffle(raw)
    S2 = QPoint(np.array(raw))
    assert S2 == S
    assert hash(S2) == hash(S)
    assert g_metric(S2, T) == g_metric(S, T)
    np.testing.assert_array_equal(xi0(S2), xi0(S))
