"""Finite-data checks of Chabauty convergence ``C_i -> C``.

Convergence means two things: every accumulation point of points of the
``C_i`` lies in ``C``, and every point of ``C`` is a limit of points of the
``C_i``.  Neither can be decided from finitely many sets, so both are
replaced by tail surrogates with explicit tolerances:

* condition 1: from ``tail_start`` on, every point of ``C_i`` is within
  ``tol`` of ``C``;
* condition 2: from ``tail_start`` on, every point of ``C`` is within
  ``tol`` of ``C_i``.

Condition 1 is stronger than "accumulation points lie in ``C``".  Points
that run off to infinity have no accumulation point, so both checks accept a
``window``: only points within that radius of the base point are examined.
:func:`analyze` derives the window from the weight, as the radius beyond
which the weight's tail is negligible against ``d_threshold``.

Sequence positions in reports are 0-based list indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .metric import chabauty_distance_exact
from .sets import FiniteClosedSet
from .space import MetricSpace
from .weights import WeightFunction, as_weight

__all__ = [
    "ConditionResult",
    "ConvergenceConfig",
    "ConvergenceReport",
    "check_condition1",
    "check_condition2",
    "analyze",
]

# fraction of d_threshold allowed for the weight tail beyond the window
WINDOW_TAIL_FRACTION = 1e-3


class ConditionResult(NamedTuple):
    ok: bool
    witness: tuple | None
    failures: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


def _validate(sequence, tail_start):
    if len(sequence) == 0:
        raise ValueError("empty sequence")
    if not 0 <= tail_start < len(sequence):
        raise ValueError(f"tail_start {tail_start} outside sequence of length {len(sequence)}")


def _in_window(space, S: FiniteClosedSet, window):
    if window is None or not S:
        return S.points
    return S.points[space.radii(S.points) <= window]


def _gaps(space, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Distance from each row of X to the set Y (inf if Y is empty)."""
    if Y.shape[0] == 0:
        return np.full(X.shape[0], np.inf)
    return space.pairwise(X, Y).min(axis=1)


def check_condition1(
    space: MetricSpace,
    sequence: Sequence[FiniteClosedSet],
    limit: FiniteClosedSet,
    tail_start: int,
    tol: float,
    window: float | None = None,
) -> ConditionResult:
    """Tail points stay near the limit.

    The witness is ``(i, x)``: the first index whose set has a point ``x``
    farther than ``tol`` from ``limit`` (the farthest such point).
    ``failures`` lists one witness per failing index.
    """
    _validate(sequence, tail_start)
    failures = []
    for i in range(tail_start, len(sequence)):
        X = _in_window(space, sequence[i], window)
        if X.shape[0] == 0:
            continue
        gaps = _gaps(space, X, limit.points)
        k = int(np.argmax(gaps))
        if gaps[k] > tol:
            failures.append((i, tuple(X[k].tolist())))
    return ConditionResult(not failures, failures[0] if failures else None, tuple(failures))


def check_condition2(
    space: MetricSpace,
    sequence: Sequence[FiniteClosedSet],
    limit: FiniteClosedSet,
    tail_start: int,
    tol: float,
    window: float | None = None,
) -> ConditionResult:
    """Limit points are approximated along the tail.

    The witness is ``(x, i)``: a point of ``limit`` and the first index whose
    set has nothing within ``tol`` of it.  Vacuously true for an empty limit.
    """
    _validate(sequence, tail_start)
    targets = _in_window(space, limit, window)
    failures = []
    if targets.shape[0]:
        for i in range(tail_start, len(sequence)):
            gaps = _gaps(space, targets, sequence[i].points)
            k = int(np.argmax(gaps))
            if gaps[k] > tol:
                failures.append((tuple(targets[k].tolist()), i))
    return ConditionResult(not failures, failures[0] if failures else None, tuple(failures))


@dataclass
class ConvergenceConfig:
    """``tail_start=None`` means the middle of the sequence; ``window=None``
    means derived from ``weight`` and ``d_threshold``."""

    tail_start: int | None = None
    tol: float = 1e-2
    d_threshold: float = 1e-3
    weight: WeightFunction | str | None = None
    window: float | None = None
    min_tail: int = 3

    def resolved_window(self) -> float:
        if self.window is not None:
            return self.window
        return as_weight(self.weight).inverse_tail(WINDOW_TAIL_FRACTION * self.d_threshold)


@dataclass
class ConvergenceReport:
    condition1: ConditionResult
    condition2: ConditionResult
    d_values: list[float]
    verdict: str
    tail_start: int
    window: float
    notes: list[str] = field(default_factory=list)

    @property
    def condition1_ok(self) -> bool:
        return self.condition1.ok

    @property
    def condition2_ok(self) -> bool:
        return self.condition2.ok

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "tail_start": self.tail_start,
            "window": self.window,
            "condition1": {"ok": self.condition1.ok, "witness": _witness1(self.condition1.witness)},
            "condition2": {"ok": self.condition2.ok, "witness": _witness2(self.condition2.witness)},
            "d_values": list(self.d_values),
            "notes": list(self.notes),
        }


def _witness1(w):
    return None if w is None else {"index": w[0], "point": list(w[1])}


def _witness2(w):
    return None if w is None else {"point": list(w[0]), "index": w[1]}


def _stable(failures, index_of, tail_start, n) -> bool:
    # a failure counts as stable if it recurs in the second half of the tail
    late = tail_start + (n - tail_start) // 2
    return any(index_of(f) >= late for f in failures)


def analyze(
    space: MetricSpace,
    sequence: Sequence[FiniteClosedSet],
    limit: FiniteClosedSet,
    config: ConvergenceConfig | None = None,
) -> ConvergenceReport:
    """Run both conditions and the distances ``d(C_i, limit)``.

    Verdicts:

    ``converges``
        both conditions hold and the last distance is below ``d_threshold``;
    ``diverges``
        a condition fails at some index in the second half of the tail and
        the distances over the tail are not strictly decreasing (a witness
        that is still closing in on the limit is not stable);
    ``inconclusive``
        anything else, including tails shorter than ``min_tail``.
    """
    config = config or ConvergenceConfig()
    n = len(sequence)
    if n == 0:
        raise ValueError("empty sequence")
    tail_start = n // 2 if config.tail_start is None else config.tail_start
    window = config.resolved_window()
    weight = as_weight(config.weight)

    c1 = check_condition1(space, sequence, limit, tail_start, config.tol, window)
    c2 = check_condition2(space, sequence, limit, tail_start, config.tol, window)
    d_values = [chabauty_distance_exact(space, C, limit, weight) for C in sequence]
    notes = []

    if n - tail_start < config.min_tail:
        verdict = "inconclusive"
        notes.append(f"tail has {n - tail_start} sets, need {config.min_tail}")
    elif c1.ok and c2.ok:
        if d_values[-1] < config.d_threshold:
            verdict = "converges"
        else:
            verdict = "inconclusive"
            notes.append(f"conditions hold but last d = {d_values[-1]:.3e} >= {config.d_threshold:g}")
    elif not (
        _stable(c1.failures, lambda f: f[0], tail_start, n)
        or _stable(c2.failures, lambda f: f[1], tail_start, n)
    ):
        verdict = "inconclusive"
        notes.append("violations only early in the tail")
    elif all(a > b for a, b in zip(d_values[tail_start:], d_values[tail_start + 1 :])):
        verdict = "inconclusive"
        notes.append("late violations, but d is still strictly decreasing over the tail")
    else:
        verdict = "diverges"
    return ConvergenceReport(c1, c2, d_values, verdict, tail_start, window, notes)
