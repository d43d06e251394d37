"""Unordered Q-tuples of points in R^n and the matching metric.

A Q-point is stored in a canonical (lexicographically sorted) order so that
every derived quantity is independent of the order in which the points were
supplied.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import BruteForceLimitError, DimensionMismatchError

BRUTE_FORCE_MAX_Q = 8


def _canonical(points: np.ndarray) -> np.ndarray:
    # lexsort keys run last-to-first, so feed columns reversed
    order = np.lexsort(points.T[::-1])
    out = np.ascontiguousarray(points[order])
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class QPoint:
    """An element of the space of unordered Q-tuples of points of R^n.

    Parameters
    ----------
    points : array_like, shape (q, n)
        The Q points. A 1-D input is read as Q points in R^1.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise DimensionMismatchError(
                f"expected a (q, n) array with q, n >= 1, got shape {pts.shape}")
        object.__setattr__(self, "points", _canonical(pts))

    @classmethod
    def multiple(cls, p, q: int) -> "QPoint":
        """The point ``q[[p]]``: ``p`` repeated with multiplicity ``q``."""
        p = np.atleast_1d(np.asarray(p, dtype=float))
        return cls(np.tile(p, (q, 1)))

    @property
    def q(self) -> int:
        return self.points.shape[0]

    @property
    def n(self) -> int:
        return self.points.shape[1]

    def norm(self) -> float:
        """sqrt of the sum of squared moduli, i.e. the distance to q[[0]]."""
        return math.sqrt(math.fsum((self.points ** 2).ravel()))

    def __eq__(self, other):
        if not isinstance(other, QPoint):
            return NotImplemented
        return self.points.shape == other.points.shape and bool(
            np.array_equal(self.points, other.points))

    def __hash__(self):
        return hash((self.points.shape, self.points.tobytes()))

    def __repr__(self):
        return f"QPoint(q={self.q}, n={self.n}, points={self.points.tolist()})"

    def to_json(self) -> str:
        return json.dumps(self.points.tolist())

    @classmethod
    def from_json(cls, text: str) -> "QPoint":
        return cls(np.asarray(json.loads(text), dtype=float))


def _check_compatible(S: QPoint, T: QPoint):
    if S.q != T.q or S.n != T.n:
        raise DimensionMismatchError(
            f"cannot compare Q-points of shapes (q={S.q}, n={S.n}) "
            f"and (q={T.q}, n={T.n})")


def _cost_matrix(S: QPoint, T: QPoint) -> np.ndarray:
    diff = S.points[:, None, :] - T.points[None, :, :]
    return (diff ** 2).sum(axis=-1)


def g_metric(S: QPoint, T: QPoint) -> float:
    """Matching distance between two Q-points.

    The minimum over permutations of ``sqrt(sum_i |p_i - t_sigma(i)|^2)``,
    found by a shortest-augmenting-path assignment solve on the squared
    distance matrix. The optimal cost is re-summed with ``math.fsum`` so the
    result is bit-identical to :func:`g_metric_bruteforce`.
    """
    _check_compatible(S, T)
    cost = _cost_matrix(S, T)
    rows, cols = linear_sum_assignment(cost)
    return math.sqrt(math.fsum(cost[rows, cols]))


def g_metric_bruteforce(S: QPoint, T: QPoint) -> float:
    """Exact matching distance by enumerating all Q! permutations."""
    _check_compatible(S, T)
    if S.q > BRUTE_FORCE_MAX_Q:
        raise BruteForceLimitError(
            f"brute force limited to q <= {BRUTE_FORCE_MAX_Q}, got q={S.q}")
    cost = _cost_matrix(S, T)
    perms = _perms(S.q)
    rows = np.arange(S.q)
    # screen with plain float sums, then compare the survivors exactly;
    # the screen's rounding error is far below the 1e-9 relative margin
    approx = cost[rows, perms].sum(axis=1)
    lo = approx.min()
    keep = perms[approx <= lo + 1e-9 * lo + 1e-300]
    best = min(math.fsum(cost[rows, p]) for p in keep)
    return math.sqrt(best)


_PERM_CACHE: dict[int, np.ndarray] = {}


def _perms(q: int) -> np.ndarray:
    if q not in _PERM_CACHE:
        _PERM_CACHE[q] = np.array(list(itertools.permutations(range(q))))
    return _PERM_CACHE[q]


def g_metric_batch(A, B, chunk: int = 65536) -> np.ndarray:
    """Vectorized matching distance between stacks of Q-points.

    Parameters
    ----------
    A, B : ndarray, shape (m, q, n)
        Raw (unsorted) point arrays; broadcasting over the leading axis is
        supported.

    Returns
    -------
    ndarray, shape (m,)
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    A, B = np.broadcast_arrays(A, B)
    m, q, n = A.shape
    if q == 1:
        return np.sqrt(((A[:, 0] - B[:, 0]) ** 2).sum(axis=-1))
    if q > 6:
        return np.array([g_metric(QPoint(a), QPoint(b)) for a, b in zip(A, B)])
    perms = _perms(q)
    out = np.empty(m)
    for lo in range(0, m, chunk):
        a, b = A[lo:lo + chunk], B[lo:lo + chunk]
        cost = [[((a[:, i] - b[:, j]) ** 2).sum(axis=-1) for j in range(q)]
                for i in range(q)]
        best = None
        for perm in perms:
            total = cost[0][perm[0]].copy()
            for i in range(1, q):
                total += cost[i][perm[i]]
            best = total if best is None else np.minimum(best, total, out=best)
        out[lo:lo + chunk] = np.sqrt(best)
    return out


def xi0(S: QPoint) -> np.ndarray:
    """Coordinate-sorting map into R^{nQ}.

    Each coordinate's Q values are sorted ascending; the blocks are laid out
    coordinate-major, ``(s_11..s_1Q, s_21..s_2Q, ..., s_nQ)``.
    """
    return xi0_array(S.points)


def xi0_array(points) -> np.ndarray:
    """:func:`xi0` on raw arrays of shape (..., q, n); returns (..., n*q)."""
    pts = np.sort(np.asarray(points, dtype=float), axis=-2)
    pts = np.swapaxes(pts, -1, -2)
    return pts.reshape(pts.shape[:-2] + (-1,))
