"""Seeded property checks, shared by the ``selftest`` command and the tests."""

from __future__ import annotations

import math
import time

import numpy as np

from .metric import CAP, chabauty_distance_exact, d_R, distance_curve
from .quadrature import chabauty_distance_quadrature
from .sets import FiniteClosedSet
from .space import MetricSpace, coordinate_space
from .weights import ExponentialWeight, WeightFunction

__all__ = ["random_set", "run_selftest", "SUITES"]


def random_set(rng: np.random.Generator, dim: int, max_size: int = 50, scale: float = 3.0) -> FiniteClosedSet:
    """Random finite set of 0..max_size points in ``[-scale, scale]^dim``.

    A third of the draws snap to a coarse grid, which produces repeated
    radii and shared points between sets.
    """
    n = int(rng.integers(0, max_size + 1))
    pts = rng.uniform(-scale, scale, size=(n, dim))
    if rng.random() < 1 / 3:
        pts = np.round(pts * 2) / 2
    return FiniteClosedSet(pts, dim=dim)


def _space(rng, metric: str) -> MetricSpace:
    return coordinate_space(metric, dim=int(rng.integers(1, 3)))


def suite_metric_axioms(rng, trials, metric, cap, weight):
    failed = 0
    for _ in range(trials):
        space = _space(rng, metric)
        A, B, C = (random_set(rng, space.dim) for _ in range(3))
        dab = chabauty_distance_exact(space, A, B, weight, cap)
        dba = chabauty_distance_exact(space, B, A, weight, cap)
        dac = chabauty_distance_exact(space, A, C, weight, cap)
        dbc = chabauty_distance_exact(space, B, C, weight, cap)
        ok = (
            chabauty_distance_exact(space, A, A, weight, cap) == 0.0
            and dab == dba
            and ((dab > 0) == (A != B))
            and dac <= dab + dbc + 1e-9
        )
        failed += not ok
    return failed


def suite_piecewise_constancy(rng, trials, metric, cap, weight, samples=10):
    failed = 0
    for _ in range(trials):
        space = _space(rng, metric)
        A, B = random_set(rng, space.dim, 20), random_set(rng, space.dim, 20)
        curve = distance_curve(space, A, B, cap)
        ok = True
        for lo, hi, v in curve.intervals():
            top = hi if math.isfinite(hi) else lo + 5.0
            for R in rng.uniform(lo, top, size=samples):
                if lo < R < top and d_R(space, A, B, float(R), cap=cap) != v:
                    ok = False
        failed += not ok
    return failed


def suite_exact_vs_quadrature(rng, trials, metric, cap, weight, R_cut=30.0, tol=1e-9):
    failed = 0
    for _ in range(trials):
        space = _space(rng, metric)
        A, B = random_set(rng, space.dim, 15), random_set(rng, space.dim, 15)
        exact = chabauty_distance_exact(space, A, B, weight, cap)
        quad = chabauty_distance_quadrature(space, A, B, weight, R_cut=R_cut, tol=tol, cap=cap)
        failed += not abs(exact - quad.value) <= tol + weight.tail(R_cut)
    return failed


def suite_cap(rng, trials, metric, cap, weight):
    space1 = coordinate_space(metric, dim=1)
    failed = 0
    if abs(chabauty_distance_exact(space1, FiniteClosedSet([0.0]), FiniteClosedSet([1.0]), None, cap) - 1.0) > 1e-12:
        failed += 1
    for _ in range(trials):
        space = _space(rng, metric)
        A, B = random_set(rng, space.dim), random_set(rng, space.dim)
        weights = (ExponentialWeight(1.0), ExponentialWeight(2.0))
        failed += not all(chabauty_distance_exact(space, A, B, w, cap) <= w.total for w in weights)
    return failed


def suite_empty_formula(rng, trials, metric, cap, weight):
    failed = 0
    for _ in range(trials):
        space = _space(rng, metric)
        A = random_set(rng, space.dim)
        empty = FiniteClosedSet.empty(space.dim)
        if not A:
            failed += chabauty_distance_exact(space, empty, A, weight, cap) != 0.0
            continue
        expected = weight.tail(float(space.radii(A.points).min()))
        failed += not abs(chabauty_distance_exact(space, empty, A, weight, cap) - expected) <= 1e-12
    return failed


SUITES = {
    "metric-axioms": (suite_metric_axioms, 1.0),
    "piecewise-constancy": (suite_piecewise_constancy, 0.2),
    "exact-vs-quadrature": (suite_exact_vs_quadrature, 0.05),
    "cap": (suite_cap, 0.5),
    "empty-formula": (suite_empty_formula, 1.0),
}


def run_selftest(
    seed: int = 0,
    trials: int = 200,
    metric: str = "euclidean",
    weight: WeightFunction | None = None,
    cap: float = CAP,
    log=None,
) -> dict:
    """Run every suite; the report is a plain dict that depends only on the
    arguments.  ``cap`` other than 1 deliberately breaks the metric."""
    weight = weight or ExponentialWeight(1.0)
    suites = {}
    for k, (name, (fn, share)) in enumerate(SUITES.items()):
        rng = np.random.default_rng([seed, k])
        n = max(1, int(round(trials * share)))
        t0 = time.perf_counter()
        failed = fn(rng, n, metric, cap, weight)
        if log is not None:
            log(f"{name}: {n - failed}/{n} passed in {time.perf_counter() - t0:.2f}s")
        suites[name] = {"checked": n, "failed": int(failed)}
    return {
        "seed": seed,
        "trials": trials,
        "metric": metric,
        "weight": weight.spec(),
        "suites": suites,
        "passed": all(s["failed"] == 0 for s in suites.values()),
    }
