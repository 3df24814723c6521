"""Hausdorff distance between finite point sets.

Empty sets follow the convention ``H(empty, empty) = 0`` and
``H(empty, A) = INFINITE`` for non-empty ``A``; the directed distance from the
empty set is 0 (vacuous containment).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .sets import FiniteClosedSet
from .space import MetricSpace

__all__ = [
    "INFINITE",
    "HausdorffResult",
    "directed_hausdorff",
    "hausdorff",
    "hausdorff_accelerated",
    "hausdorff_auto",
]

# max entries of a distance block held in memory at once
BLOCK_ENTRIES = 4_000_000
# above this many pairs d_R and friends switch to the spatial index
ACCELERATE_ABOVE = 4_000_000


class _Infinite:
    """Value of the Hausdorff distance when exactly one set is empty."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITE"

    def __reduce__(self):
        return (_Infinite, ())


INFINITE = _Infinite()


@dataclass(frozen=True)
class HausdorffResult:
    """``value`` is a float or :data:`INFINITE`.  Witnesses are the pair
    ``(a, b)``, ``a`` from the first set and ``b`` from the second, that
    realises the max-min; both are ``None`` unless both sets are non-empty."""

    value: float | _Infinite
    witness_a: tuple | None = None
    witness_b: tuple | None = None

    @property
    def is_infinite(self) -> bool:
        return self.value is INFINITE

    def capped(self, cap: float = 1.0) -> float:
        """``min(cap, value)`` with INFINITE mapped to ``cap``."""
        if self.value is INFINITE:
            return cap
        return min(cap, self.value)


def _directed_brute(space: MetricSpace, X: np.ndarray, Y: np.ndarray) -> tuple[float, int, int]:
    """max-min over arrays; returns (value, index in X, index in Y)."""
    rows = max(1, BLOCK_ENTRIES // max(1, Y.shape[0]))
    best, bi, bj = -1.0, -1, -1
    for start in range(0, X.shape[0], rows):
        D = space.pairwise(X[start : start + rows], Y)
        nn = D.argmin(axis=1)
        mins = D[np.arange(D.shape[0]), nn]
        k = int(mins.argmax())
        if mins[k] > best:
            best, bi, bj = float(mins[k]), start + k, int(nn[k])
    return best, bi, bj


def _row(S: FiniteClosedSet, i: int) -> tuple:
    return tuple(S.points[i].tolist())


def directed_hausdorff(space: MetricSpace, A: FiniteClosedSet, B: FiniteClosedSet) -> HausdorffResult:
    """Smallest ``eps`` with ``A`` inside the closed ``eps``-neighbourhood of ``B``.

    Examples
    --------
    >>> from chabauty_metric.space import euclidean
    >>> directed_hausdorff(euclidean(dim=1), FiniteClosedSet([0.0, 2.0]), FiniteClosedSet([1.0])).value
    1.0
    """
    if not A:
        return HausdorffResult(0.0)
    if not B:
        return HausdorffResult(INFINITE)
    value, i, j = _directed_brute(space, A.points, B.points)
    return HausdorffResult(value, _row(A, i), _row(B, j))


def _combine(ab: HausdorffResult, ba: HausdorffResult) -> HausdorffResult:
    # ba has its witnesses in (B, A) order; report them as (A, B)
    if ab.value is INFINITE or ba.value is INFINITE:
        return HausdorffResult(INFINITE)
    if ba.value > ab.value:
        return HausdorffResult(ba.value, ba.witness_b, ba.witness_a)
    return ab


def hausdorff(space: MetricSpace, A: FiniteClosedSet, B: FiniteClosedSet) -> HausdorffResult:
    """Hausdorff distance by exhaustive max-min over all pairs."""
    if not A and not B:
        return HausdorffResult(0.0)
    if not A or not B:
        return HausdorffResult(INFINITE)
    return _combine(directed_hausdorff(space, A, B), directed_hausdorff(space, B, A))


def _directed_tree(
    space: MetricSpace,
    X: np.ndarray,
    Y: np.ndarray,
    tree: cKDTree,
    block: int,
    workers: int,
) -> tuple[float, int, int]:
    p = space.minkowski_p
    # visit X far-from-centroid first so the running max grows early
    centroid = Y.mean(axis=0, keepdims=True)
    order = np.argsort(-space.pairwise(X, centroid)[:, 0], kind="stable")
    best, bi, bj = -1.0, -1, -1
    for start in range(0, X.shape[0], block):
        idx = order[start : start + block]
        chunk = X[idx]
        if best > 0:
            # points with a neighbour closer than the running max cannot raise it
            d, _ = tree.query(chunk, k=1, p=p, distance_upper_bound=best, workers=workers)
            live = ~np.isfinite(d)
            idx, chunk = idx[live], chunk[live]
            if idx.size == 0:
                continue
        _, nn = tree.query(chunk, k=1, p=p, workers=workers)
        exact = space.rowwise(chunk, Y[nn])
        k = int(exact.argmax())
        # ties resolved towards the smaller index, as in the brute-force scan
        if exact[k] > best or (exact[k] == best and idx[k] < bi):
            best, bi, bj = float(exact[k]), int(idx[k]), int(nn[k])
    return best, bi, bj


def hausdorff_accelerated(
    space: MetricSpace,
    A: FiniteClosedSet,
    B: FiniteClosedSet,
    block: int = 2048,
    workers: int = 1,
) -> HausdorffResult:
    """Hausdorff distance using k-d trees and running-max pruning.

    Nearest neighbours come from a k-d tree; each block of query points is
    first screened with a search bounded by the current maximum, and only
    the points with no neighbour inside that bound get a full query.  The
    winning distances are recomputed with the space's own metric, so the
    value matches :func:`hausdorff` up to ties at the last ulp.

    Graph spaces fall back to :func:`hausdorff`.  ``workers`` is passed to
    the tree queries; the reduction is order-independent, so the result does
    not depend on it.
    """
    if space.is_graph:
        return hausdorff(space, A, B)
    if not A and not B:
        return HausdorffResult(0.0)
    if not A or not B:
        return HausdorffResult(INFINITE)
    Xa, Xb = A.points, B.points
    ta, tb = cKDTree(Xa), cKDTree(Xb)
    v_ab, i, j = _directed_tree(space, Xa, Xb, tb, block, workers)
    v_ba, k, l = _directed_tree(space, Xb, Xa, ta, block, workers)
    if v_ba > v_ab:
        return HausdorffResult(v_ba, _row(A, l), _row(B, k))
    return HausdorffResult(v_ab, _row(A, i), _row(B, j))


def hausdorff_auto(space: MetricSpace, A: FiniteClosedSet, B: FiniteClosedSet) -> HausdorffResult:
    """Exhaustive for small inputs, k-d tree for large coordinate sets."""
    if not space.is_graph and len(A) * len(B) > ACCELERATE_ABOVE:
        return hausdorff_accelerated(space, A, B)
    return hausdorff(space, A, B)
