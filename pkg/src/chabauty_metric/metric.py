"""The Chabauty metric ``d(A, B) = int_0^inf w(R) d_R(A, B) dR``.

``d_R(A, B) = min(1, H(A_R, B_R))`` compares the truncations of ``A`` and
``B`` to the closed ball of radius ``R`` about the base point.  For finite
sets ``R -> d_R`` is a step function that can only jump at the radii of the
points, so the integral is a finite sum of step values times exact weight
masses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hausdorff import BLOCK_ENTRIES, hausdorff_auto
from .sets import FiniteClosedSet, truncate
from .space import MetricSpace
from .weights import WeightFunction, as_weight

__all__ = [
    "CAP",
    "d_R",
    "breakpoints",
    "DistanceCurve",
    "distance_curve",
    "chabauty_distance_exact",
    "ClosedBall",
    "OpenBall",
    "subbasis_membership",
]

CAP = 1.0


def d_R(
    space: MetricSpace,
    A: FiniteClosedSet,
    B: FiniteClosedSet,
    R: float,
    closed: bool = True,
    cap: float = CAP,
) -> float:
    """Truncated pseudo-metric ``min(cap, H(A_R, B_R))``.

    A truncation that is empty on exactly one side gives ``cap``.
    """
    A_R = truncate(space, A, R, closed=closed)
    B_R = truncate(space, B, R, closed=closed)
    return hausdorff_auto(space, A_R, B_R).capped(cap)


def breakpoints(space: MetricSpace, A: FiniteClosedSet, B: FiniteClosedSet) -> np.ndarray:
    """Sorted distinct radii of the points of ``A`` and ``B``."""
    radii = [space.radii(S.points) for S in (A, B) if S]
    if not radii:
        return np.zeros(0)
    return np.unique(np.concatenate(radii))


@dataclass(frozen=True)
class DistanceCurve:
    """``R -> d_R(A, B)`` as a step function.

    ``values[0]`` holds on ``[0, breakpoints[0])``, ``values[k]`` on
    ``[breakpoints[k-1], breakpoints[k])`` and ``values[-1]`` on
    ``[breakpoints[-1], inf)``.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    cap: float = CAP

    def __call__(self, R: float) -> float:
        return float(self.values[np.searchsorted(self.breakpoints, R, side="right")])

    def intervals(self):
        """Yield ``(start, end, value)`` for the non-degenerate pieces."""
        edges = np.concatenate([[0.0], self.breakpoints, [math.inf]])
        for k, v in enumerate(self.values):
            lo, hi = float(edges[k]), float(edges[k + 1])
            if hi > lo:
                yield lo, hi, float(v)

    def integrate(self, weight: WeightFunction | None = None) -> float:
        weight = as_weight(weight)
        edges = np.concatenate([[0.0], self.breakpoints, [math.inf]])
        live = self.values != 0.0
        masses = weight.masses(edges[:-1][live], edges[1:][live])
        total = math.fsum((self.values[live] * masses).tolist())
        if self.breakpoints.size:
            # d_R vanishes below the first breakpoint and never exceeds the cap
            total = min(total, self.cap * weight.tail(float(self.breakpoints[0])))
        return total


def _prefix_directed(space, X, Y, alpha, beta):
    """``max_{i < alpha_k} min_{j < beta_k} d(X_i, Y_j)`` for every k.

    ``X`` and ``Y`` are sorted by radius so each truncation is a prefix.
    Row blocks bound the memory; entries with an empty prefix are left at -1.
    """
    m = alpha.size
    out = np.full(m, -1.0)
    need = (alpha > 0) & (beta > 0)
    if not need.any():
        return out
    # only the distinct Y-prefix lengths matter: at most |Y| columns
    cols, which = np.unique(np.maximum(beta, 1) - 1, return_inverse=True)
    rows = max(1, BLOCK_ENTRIES // (Y.shape[0] + cols.size))
    for start in range(0, X.shape[0], rows):
        stop = min(start + rows, X.shape[0])
        D = space.pairwise(X[start:stop], Y)
        # nearest point among the first j+1 Y's, then running max down the X rows
        prefix_min = np.minimum.accumulate(D, axis=1)[:, cols]
        running = np.maximum.accumulate(prefix_min, axis=0)
        last = np.minimum(alpha, stop) - 1 - start
        ok = need & (last >= 0)
        if ok.any():
            out[ok] = np.maximum(out[ok], running[last[ok], which[ok]])
    return out


def distance_curve(
    space: MetricSpace,
    A: FiniteClosedSet,
    B: FiniteClosedSet,
    cap: float = CAP,
) -> DistanceCurve:
    """Step-function form of ``R -> d_R(A, B)``.

    Both sets are sorted by radius, so on each piece the truncations are
    prefixes.  Prefix-min along one axis of the distance matrix and
    running-max along the other give every piece's directed distances in a
    single ``O(|A| |B|)`` sweep.
    """
    bps = breakpoints(space, A, B)
    m = bps.size
    values = np.zeros(m + 1)
    if m == 0:
        return DistanceCurve(bps, values, cap)

    def by_radius(S):
        if not S:
            return S.points, np.zeros(0)
        r = space.radii(S.points)
        order = np.argsort(r, kind="stable")
        return S.points[order], r[order]

    XA, rA = by_radius(A)
    XB, rB = by_radius(B)
    alpha = np.searchsorted(rA, bps, side="right")
    beta = np.searchsorted(rB, bps, side="right")

    d_ab = _prefix_directed(space, XA, XB, alpha, beta) if A and B else np.full(m, -1.0)
    d_ba = _prefix_directed(space, XB, XA, beta, alpha) if A and B else np.full(m, -1.0)
    H = np.minimum(np.maximum(d_ab, d_ba), cap)
    one_sided = (alpha == 0) != (beta == 0)
    H[one_sided] = cap
    H[(alpha == 0) & (beta == 0)] = 0.0
    values[1:] = H
    return DistanceCurve(bps, values, cap)


def chabauty_distance_exact(
    space: MetricSpace,
    A: FiniteClosedSet,
    B: FiniteClosedSet,
    weight: WeightFunction | str | None = None,
    cap: float = CAP,
) -> float:
    """Chabauty distance between finite sets, summed piece by piece.

    Examples
    --------
    >>> from chabauty_metric.space import euclidean
    >>> round(chabauty_distance_exact(euclidean(dim=1), FiniteClosedSet([0.0]), FiniteClosedSet([0.5])), 6)
    0.696735
    """
    return distance_curve(space, A, B, cap=cap).integrate(weight)


@dataclass(frozen=True)
class ClosedBall:
    center: tuple
    radius: float


@dataclass(frozen=True)
class OpenBall:
    center: tuple
    radius: float


def subbasis_membership(
    space: MetricSpace,
    C: FiniteClosedSet,
    K: ClosedBall,
    U: OpenBall,
) -> tuple[bool, bool]:
    """Whether ``C`` misses the compact ball ``K`` and whether it meets the
    open ball ``U`` (the two generating families of the topology)."""
    if K.radius < 0 or U.radius < 0:
        raise ValueError("ball radii must be non-negative")
    if not C:
        return True, False
    dK = space.pairwise(C.points, [K.center])[:, 0]
    dU = space.pairwise(C.points, [U.center])[:, 0]
    return bool(np.all(dK > K.radius)), bool(np.any(dU < U.radius))
