"""Closed subsets: exact finite sets, distance oracles, truncation and
deterministic test families."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .space import MetricSpace, euclidean

__all__ = [
    "FiniteClosedSet",
    "SetOracle",
    "NetBudgetError",
    "truncate",
    "epsilon_net",
    "generate",
    "GENERATORS",
]


class FiniteClosedSet:
    """A finite (possibly empty) subset of a metric space.

    Points are deduplicated by exact coordinate equality and kept in
    lexicographic order, so two sets are equal iff their point arrays are.
    Negative zero is normalised to zero.
    """

    __slots__ = ("_points", "_key")

    def __init__(self, points=(), dim: int | None = None):
        arr = np.asarray(points)
        if arr.size == 0:
            arr = np.zeros((0, dim or 0), dtype=np.float64)
        else:
            if arr.dtype.kind not in "iuf":
                arr = arr.astype(np.float64)
            if arr.ndim == 1:
                arr = arr.reshape(-1, 1) if dim in (None, 1) else arr.reshape(1, -1)
            if arr.ndim != 2:
                raise ValueError(f"points must form a 2-D array, got shape {arr.shape}")
            if dim is not None and arr.shape[1] != dim:
                raise ValueError(f"expected dimension {dim}, got {arr.shape[1]}")
            if arr.dtype.kind == "f":
                if not np.all(np.isfinite(arr)):
                    raise ValueError("point coordinates must be finite")
                arr = arr + 0.0
            else:
                arr = arr.astype(np.int64)
            arr = _canonical(arr)
        arr.setflags(write=False)
        self._points = arr
        self._key = None

    @classmethod
    def empty(cls, dim: int = 0) -> "FiniteClosedSet":
        return cls((), dim=dim)

    @classmethod
    def _from_canonical(cls, arr: np.ndarray) -> "FiniteClosedSet":
        obj = cls.__new__(cls)
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        obj._points = arr
        obj._key = None
        return obj

    @property
    def points(self) -> np.ndarray:
        """Read-only ``(n, dim)`` array in canonical order."""
        return self._points

    @property
    def dim(self) -> int:
        return self._points.shape[1]

    def __len__(self) -> int:
        return self._points.shape[0]

    def __bool__(self) -> bool:
        return len(self) > 0

    def __iter__(self):
        for row in self._points:
            yield tuple(row.tolist())

    def __contains__(self, point) -> bool:
        if not self:
            return False
        row = np.asarray(point, dtype=self._points.dtype).reshape(-1)
        return bool(np.any(np.all(self._points == row, axis=1)))

    def _canonical_key(self):
        if self._key is None:
            # empty sets of any dimension compare equal
            self._key = (self._points.shape[1] if len(self) else 0, self._points.tobytes())
        return self._key

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteClosedSet):
            return NotImplemented
        if not self and not other:
            return True
        return self._points.shape == other._points.shape and bool(np.array_equal(self._points, other._points))

    def __hash__(self) -> int:
        return hash(self._canonical_key())

    def issubset(self, other: "FiniteClosedSet") -> bool:
        return all(p in other for p in self)

    def union(self, other: "FiniteClosedSet") -> "FiniteClosedSet":
        if not self:
            return other
        if not other:
            return self
        return FiniteClosedSet(np.vstack([self._points, other._points]))

    def __repr__(self) -> str:
        if len(self) <= 6:
            return f"FiniteClosedSet({list(self)})"
        return f"FiniteClosedSet(<{len(self)} points, dim={self.dim}>)"


def _canonical(arr: np.ndarray) -> np.ndarray:
    if arr.shape[0] <= 1:
        return np.ascontiguousarray(arr)
    order = np.lexsort(arr.T[::-1])
    arr = arr[order]
    keep = np.ones(arr.shape[0], dtype=bool)
    keep[1:] = np.any(arr[1:] != arr[:-1], axis=1)
    return np.ascontiguousarray(arr[keep])


def truncate(space: MetricSpace, A: FiniteClosedSet, R: float, closed: bool = True) -> FiniteClosedSet:
    """Points of ``A`` in the ball of radius ``R`` about the base point.

    The ball is closed by default, so points at radius exactly ``R`` are
    kept.  ``closed=False`` gives the open ball instead.
    """
    if not (R >= 0 and np.isfinite(R)):
        raise ValueError(f"truncation radius must be finite and non-negative, got {R}")
    if not A:
        return A
    r = space.radii(A.points)
    mask = r <= R if closed else r < R
    if mask.all():
        return A
    return FiniteClosedSet._from_canonical(A.points[mask])


@dataclass(frozen=True)
class SetOracle:
    """Implicit closed set given by its distance function.

    ``nearest_distance`` maps an ``(n, dim)`` array to the distances from
    each row to the set; it must be 1-Lipschitz and return ``inf`` everywhere
    for the empty set.  ``reach_radius`` bounds the region where the oracle
    is trusted; outside of it the set is assumed empty.
    """

    nearest_distance: Callable[[np.ndarray], np.ndarray]
    reach_radius: float = np.inf
    label: str = "oracle"

    def __call__(self, X) -> np.ndarray:
        return np.asarray(self.nearest_distance(np.atleast_2d(np.asarray(X, dtype=np.float64))), dtype=np.float64)

    def is_empty_in_ball(self, space: MetricSpace, R: float) -> bool:
        """True when the set provably misses the closed ball of radius ``R``."""
        return bool(self(space.base_array)[0] > R)

    @classmethod
    def empty(cls) -> "SetOracle":
        return cls(lambda X: np.full(X.shape[0], np.inf), label="empty")

    @classmethod
    def from_finite(cls, space: MetricSpace, A: FiniteClosedSet) -> "SetOracle":
        if not A:
            return cls.empty()
        pts = A.points
        return cls(lambda X: space.pairwise(X, pts).min(axis=1), label="finite")

    @classmethod
    def sphere(cls, center, radius: float) -> "SetOracle":
        """Euclidean sphere (a circle in the plane)."""
        c = np.asarray(center, dtype=np.float64)
        return cls(lambda X: np.abs(np.linalg.norm(X - c, axis=1) - radius), label="sphere")


class NetBudgetError(RuntimeError):
    """The requested net would need more grid cells than allowed."""


def epsilon_net(
    oracle: SetOracle,
    space: MetricSpace,
    R_cut: float,
    eps: float,
    max_points: int = 2_000_000,
) -> FiniteClosedSet:
    """Finite approximation of an implicit set inside the ball ``B(p, R_cut)``.

    A cube around the ball is refined dyadically; a cell survives a level
    only if its centre is within ``eps`` plus the cell half-diagonal of the
    set (valid because the oracle is 1-Lipschitz).  At the finest level,
    whose half-diagonal is at most ``eps``, the centres within ``eps`` of the
    set and inside the ball are returned.  Every set point inside the
    searched cube is then within ``eps`` of a returned point.

    This is an approximation: set points within ``eps`` of the sphere
    ``|x| = R_cut`` may be represented by net points on the wrong side of it.

    Raises
    ------
    NetBudgetError
        If the number of live cells exceeds ``max_points``.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    if not R_cut > 0:
        raise ValueError("R_cut must be positive")
    R = min(R_cut, oracle.reach_radius)

    if space.is_graph:
        verts = np.arange(space.n_vertices).reshape(-1, 1)
        verts = verts[space.radii(verts) <= R]
        if verts.size == 0:
            return FiniteClosedSet.empty(1)
        return FiniteClosedSet(verts[oracle(verts) <= eps])

    if oracle.is_empty_in_ball(space, R + eps):
        return FiniteClosedSet.empty(space.dim)

    dim = space.dim
    base = np.asarray(space.base_point)
    # in every norm used here the ball sits inside the cube of half-width R
    side = 2.0 * R
    levels = 0
    while space.cell_half_diagonal(side / 2**levels) > eps:
        levels += 1
    centres = base.reshape(1, dim)
    for level in range(levels + 1):
        h = side / 2**level
        if level > 0:
            offsets = np.array(list(itertools.product((-0.25, 0.25), repeat=dim))) * (2 * h)
            centres = (centres[:, None, :] + offsets[None, :, :]).reshape(-1, dim)
            if centres.shape[0] > max_points:
                raise NetBudgetError(
                    f"eps={eps} needs more than {max_points} cells for R_cut={R_cut}; raise eps or the budget"
                )
        slack = space.cell_half_diagonal(h)
        dist = oracle(centres)
        # drop cells that cannot reach the set or the ball
        keep = (dist <= eps + slack) & (space.radii(centres) <= R + slack)
        centres = centres[keep]
        if centres.shape[0] == 0:
            return FiniteClosedSet.empty(dim)
    final = centres[(oracle(centres) <= eps) & (space.radii(centres) <= R)]
    return FiniteClosedSet(final, dim=dim)


# -- generators ----------------------------------------------------------


def _indexed(fn, i=None, n=None, start=1):
    if (i is None) == (n is None):
        raise ValueError("give exactly one of i (single member) or n (sequence length)")
    if i is not None:
        if int(i) < 1:
            raise ValueError("family index starts at 1")
        return fn(int(i))
    return [fn(k) for k in range(start, start + int(n))]


def _boundary_approach(i=None, n=None):
    return _indexed(lambda k: FiniteClosedSet([(1.0 + 1.0 / k, 0.0)]), i, n)


def _boundary_approach_limit():
    return FiniteClosedSet([(1.0, 0.0)])


def _moving_point(i=None, n=None, target=(0.0, 0.0), offset=(1.0, 0.0)):
    t = np.asarray(target, dtype=np.float64)
    o = np.asarray(offset, dtype=np.float64)
    return _indexed(lambda k: FiniteClosedSet([t + o / k]), i, n)


def _alternating(i=None, n=None):
    return _indexed(lambda k: FiniteClosedSet([(float((-1) ** k), 0.0)]), i, n)


def _escape(i=None, n=None, direction=(1.0, 0.0)):
    d = np.asarray(direction, dtype=np.float64)
    return _indexed(lambda k: FiniteClosedSet([k * d]), i, n)


def _lattice(eps, r, dim=1, base=None, embed_dim=None, space=None):
    """``eps * Z^dim`` intersected with the closed ball ``B(base, r)``."""
    if not (eps > 0 and r > 0):
        raise ValueError("lattice needs eps > 0 and r > 0")
    if space is None:
        space = euclidean(base if base is not None else (0.0,) * dim)
    elif space.dim != dim:
        raise ValueError("space dimension does not match the lattice dimension")
    centre = np.asarray(space.base_point, dtype=np.float64)
    lo = np.ceil((centre - r) / eps - 1e-9).astype(int)
    hi = np.floor((centre + r) / eps + 1e-9).astype(int)
    axes = [np.arange(a, b + 1) * eps for a, b in zip(lo, hi)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
    grid = grid[space.radii(grid) <= r]
    if embed_dim is not None and embed_dim > dim:
        grid = np.hstack([grid, np.zeros((grid.shape[0], embed_dim - dim))])
    return FiniteClosedSet(grid, dim=embed_dim or dim)


def _lattice_refinement(i=None, n=None, r=1.0, embed_dim=2):
    """Points ``j / i`` of ``[-r, r]``, padded with zeros to ``embed_dim``.

    Coordinates are formed by one division each, so members whose spacing
    divides another member's share those points exactly.
    """

    def member(k):
        m = int(np.floor(k * r + 1e-9))
        xs = np.arange(-m, m + 1) / k
        pts = np.zeros((xs.size, embed_dim))
        pts[:, 0] = xs
        return FiniteClosedSet(pts, dim=embed_dim)

    return _indexed(member, i, n)


def _random_cloud(n_points, dim=2, scale=1.0, seed=0):
    if n_points < 0:
        raise ValueError("n_points must be non-negative")
    rng = np.random.default_rng(seed)
    return FiniteClosedSet(rng.uniform(-scale, scale, size=(int(n_points), dim)), dim=dim)


def _empty(dim=2):
    return FiniteClosedSet.empty(dim)


GENERATORS = {
    "boundary-approach": _boundary_approach,
    "boundary-approach-limit": _boundary_approach_limit,
    "moving-point": _moving_point,
    "alternating": _alternating,
    "escape": _escape,
    "lattice": _lattice,
    "lattice-refinement": _lattice_refinement,
    "random-cloud": _random_cloud,
    "empty": _empty,
}


def generate(kind: str, **params):
    """Build a named test set or sequence of sets.

    Indexed families (``boundary-approach``, ``moving-point``,
    ``alternating``, ``escape``, ``lattice-refinement``) take ``i=`` for a
    single member or ``n=`` for members ``1..n``.

    >>> generate("boundary-approach", i=4)
    FiniteClosedSet([(1.25, 0.0)])
    >>> generate("lattice", eps=1.0, r=1.5, dim=1)
    FiniteClosedSet([(-1.0,), (0.0,), (1.0,)])
    """
    try:
        fn = GENERATORS[kind]
    except KeyError:
        raise ValueError(f"unknown generator {kind!r}; known: {', '.join(sorted(GENERATORS))}") from None
    return fn(**params)
