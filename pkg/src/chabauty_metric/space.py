"""Ambient metric spaces with a distinguished base point.

Every distance in the package is computed through :meth:`MetricSpace.pairwise`
or :meth:`MetricSpace.rowwise`.  Both evaluate the norm one coordinate at a
time with elementwise array operations, so a given pair of points always gets
the same double, regardless of how many other pairs share the call.  The
truncation code relies on this: ``radius(x)`` computed alone and the radius of
``x`` computed inside a batch must agree bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

__all__ = [
    "COORDINATE_KINDS",
    "DimensionError",
    "UnknownVertexError",
    "MetricSpace",
    "euclidean",
    "chebyshev",
    "manhattan",
    "graph",
    "distance",
    "radius",
]

COORDINATE_KINDS = ("euclidean", "chebyshev", "manhattan")
GRAPH_KIND = "graph-shortest-path"


class DimensionError(ValueError):
    """Point dimension does not match the space."""


class UnknownVertexError(ValueError):
    """Vertex id outside a graph space."""


@dataclass(frozen=True, eq=False)
class MetricSpace:
    """A metric space together with its base point.

    Use the constructors :func:`euclidean`, :func:`chebyshev`,
    :func:`manhattan` and :func:`graph` rather than instantiating directly.

    For coordinate spaces ``base_point`` is a tuple of floats.  For graph
    spaces points are vertex ids ``0 .. n-1`` and ``base_point`` is an int.
    """

    kind: str
    base_point: tuple | int
    dim: int
    _apsp: np.ndarray | None = field(default=None, repr=False)

    @property
    def is_graph(self) -> bool:
        return self.kind == GRAPH_KIND

    @property
    def n_vertices(self) -> int | None:
        return None if self._apsp is None else self._apsp.shape[0]

    @property
    def base_array(self) -> np.ndarray:
        return self.as_points([self.base_point])

    def with_base(self, base_point) -> "MetricSpace":
        """Same metric, different base point."""
        if self.is_graph:
            v = int(base_point)
            self._check_vertices(np.array([[v]]))
            return MetricSpace(self.kind, v, 1, self._apsp)
        base = _as_coord_tuple(base_point)
        if len(base) != self.dim:
            raise DimensionError(f"base point has dimension {len(base)}, space has {self.dim}")
        return MetricSpace(self.kind, base, self.dim)

    # -- point handling -------------------------------------------------

    def as_points(self, points) -> np.ndarray:
        """Validate ``points`` and return them as an ``(n, dim)`` array."""
        if self.is_graph:
            arr = np.asarray(points, dtype=np.int64)
            if arr.ndim == 0:
                arr = arr.reshape(1, 1)
            elif arr.ndim == 1:
                arr = arr.reshape(-1, 1)
            if arr.shape[1] != 1:
                raise DimensionError("graph points are single vertex ids")
            self._check_vertices(arr)
            return arr
        arr = np.asarray(points, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1) if arr.size == self.dim else arr.reshape(-1, 1)
        if arr.size == 0:
            return arr.reshape(0, self.dim)
        if arr.ndim != 2 or arr.shape[1] != self.dim:
            raise DimensionError(f"expected points of dimension {self.dim}, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("point coordinates must be finite")
        return arr

    def _check_vertices(self, arr: np.ndarray) -> None:
        n = self._apsp.shape[0]
        bad = (arr < 0) | (arr >= n)
        if np.any(bad):
            raise UnknownVertexError(f"unknown vertex id {int(arr[bad][0])} (graph has {n} vertices)")

    # -- distances ------------------------------------------------------

    def pairwise(self, X, Y) -> np.ndarray:
        """Distance matrix ``D[i, j] = d(X[i], Y[j])``."""
        X = self.as_points(X)
        Y = self.as_points(Y)
        if self.is_graph:
            return self._apsp[np.ix_(X[:, 0], Y[:, 0])]
        return _norm(self.kind, [X[:, k, None] - Y[None, :, k] for k in range(self.dim)])

    def rowwise(self, X, Y) -> np.ndarray:
        """Distances ``d(X[i], Y[i])`` for equally long point arrays."""
        X = self.as_points(X)
        Y = self.as_points(Y)
        if X.shape[0] != Y.shape[0]:
            raise ValueError("rowwise needs arrays of equal length")
        if self.is_graph:
            return self._apsp[X[:, 0], Y[:, 0]]
        return _norm(self.kind, [X[:, k] - Y[:, k] for k in range(self.dim)])

    def radii(self, X) -> np.ndarray:
        """Distances from the base point to each row of ``X``."""
        return self.pairwise(X, self.base_array)[:, 0]

    def distance(self, x, y) -> float:
        return float(self.pairwise([x], [y])[0, 0])

    def radius(self, x) -> float:
        return float(self.radii([x])[0])

    def cell_half_diagonal(self, side: float) -> float:
        """Largest distance from the centre of an axis-aligned cube of edge
        ``side`` to any point of the cube."""
        if self.kind == "euclidean":
            return 0.5 * side * float(np.sqrt(self.dim))
        if self.kind == "chebyshev":
            return 0.5 * side
        if self.kind == "manhattan":
            return 0.5 * side * self.dim
        raise TypeError("graph spaces have no cells")

    @property
    def minkowski_p(self) -> float:
        """Minkowski exponent matching the metric (for spatial indexes)."""
        return {"euclidean": 2.0, "manhattan": 1.0, "chebyshev": np.inf}[self.kind]


def _norm(kind: str, diffs: list[np.ndarray]) -> np.ndarray:
    # coordinate-by-coordinate accumulation: identical per-pair rounding for any batch shape
    if kind == "euclidean":
        acc = diffs[0] * diffs[0]
        for d in diffs[1:]:
            acc = acc + d * d
        return np.sqrt(acc)
    if kind == "manhattan":
        acc = np.abs(diffs[0])
        for d in diffs[1:]:
            acc = acc + np.abs(d)
        return acc
    if kind == "chebyshev":
        acc = np.abs(diffs[0])
        for d in diffs[1:]:
            acc = np.maximum(acc, np.abs(d))
        return acc
    raise ValueError(f"unknown metric kind {kind!r}")


def _as_coord_tuple(point) -> tuple:
    arr = np.atleast_1d(np.asarray(point, dtype=np.float64))
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionError("base point must be a non-empty coordinate vector")
    if not np.all(np.isfinite(arr)):
        raise ValueError("base point coordinates must be finite")
    return tuple(float(c) + 0.0 for c in arr)


def _coordinate_space(kind: str, base_point=None, dim: int | None = None) -> MetricSpace:
    if base_point is None:
        if dim is None:
            raise ValueError("give a base point or a dimension")
        base_point = (0.0,) * dim
    base = _as_coord_tuple(base_point)
    if dim is not None and dim != len(base):
        raise DimensionError(f"base point has dimension {len(base)}, expected {dim}")
    return MetricSpace(kind, base, len(base))


def euclidean(base_point=None, dim: int | None = None) -> MetricSpace:
    """Euclidean space; ``euclidean(dim=2)`` puts the base point at the origin."""
    return _coordinate_space("euclidean", base_point, dim)


def chebyshev(base_point=None, dim: int | None = None) -> MetricSpace:
    return _coordinate_space("chebyshev", base_point, dim)


def manhattan(base_point=None, dim: int | None = None) -> MetricSpace:
    return _coordinate_space("manhattan", base_point, dim)


def coordinate_space(kind: str, base_point=None, dim: int | None = None) -> MetricSpace:
    if kind not in COORDINATE_KINDS:
        raise ValueError(f"unknown metric {kind!r}; expected one of {', '.join(COORDINATE_KINDS)}")
    return _coordinate_space(kind, base_point, dim)


def graph(n_vertices: int, edges, base_point: int = 0) -> MetricSpace:
    """Shortest-path metric on a finite connected graph.

    Parameters
    ----------
    n_vertices : int
        Vertices are labelled ``0 .. n_vertices - 1``.
    edges : iterable of (u, v, weight)
        Undirected edges with strictly positive weights.  Parallel edges keep
        the lightest weight.
    base_point : int
        The base vertex.
    """
    if n_vertices < 1:
        raise ValueError("graph needs at least one vertex")
    rows, cols, weights = [], [], []
    best: dict[tuple[int, int], float] = {}
    for u, v, w in edges:
        u, v, w = int(u), int(v), float(w)
        if not (0 <= u < n_vertices and 0 <= v < n_vertices):
            raise UnknownVertexError(f"edge ({u}, {v}) references a missing vertex")
        if not (w > 0 and np.isfinite(w)):
            raise ValueError(f"edge weight must be positive and finite, got {w}")
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        best[key] = min(w, best.get(key, np.inf))
    for (u, v), w in sorted(best.items()):
        rows.append(u)
        cols.append(v)
        weights.append(w)
    adj = csr_matrix((weights, (rows, cols)), shape=(n_vertices, n_vertices))
    n_comp, _ = connected_components(adj, directed=False)
    if n_comp != 1:
        raise ValueError(f"graph must be connected (found {n_comp} components)")
    apsp = shortest_path(adj, method="D", directed=False)
    # floating sums along different paths can differ by an ulp; force exact symmetry
    apsp = np.minimum(apsp, apsp.T)
    np.fill_diagonal(apsp, 0.0)
    apsp.setflags(write=False)
    space = MetricSpace(GRAPH_KIND, 0, 1, apsp)
    return space.with_base(base_point)


def distance(space: MetricSpace, x, y) -> float:
    """Ambient distance between two points of ``space``."""
    return space.distance(x, y)


def radius(space: MetricSpace, x) -> float:
    """Distance from the base point of ``space`` to ``x``."""
    return space.radius(x)
