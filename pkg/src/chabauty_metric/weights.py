"""Positive integrable weights on ``[0, inf)`` with exact tail integrals."""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "WeightFunction",
    "ExponentialWeight",
    "TabulatedWeight",
    "as_weight",
    "parse_weight",
    "DEFAULT_WEIGHT",
]


class WeightFunction:
    """Base class.  Subclasses provide ``__call__`` (the density, vectorised)
    and ``tail(R)``, the integral of the density over ``[R, inf)``."""

    def __call__(self, R):
        raise NotImplementedError

    def tail(self, R: float) -> float:
        raise NotImplementedError

    def mass(self, r0: float, r1: float) -> float:
        """Integral of the density over ``[r0, r1]``; ``r1`` may be ``inf``."""
        if r1 <= r0:
            return 0.0
        return self.tail(r0) - self.tail(r1)

    def masses(self, lo, hi) -> np.ndarray:
        """Vectorised :meth:`mass` over interval end arrays."""
        return np.array([self.mass(float(a), float(b)) for a, b in zip(lo, hi)])

    @property
    def total(self) -> float:
        return self.tail(0.0)

    @property
    def kinks(self) -> tuple:
        """Radii where the density is not smooth (quadrature splits there)."""
        return ()

    def inverse_tail(self, level: float) -> float:
        """Smallest ``R >= 0`` with ``tail(R) <= level`` (by bisection)."""
        if level >= self.total:
            return 0.0
        hi = 1.0
        while self.tail(hi) > level:
            hi *= 2.0
        lo = 0.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            if self.tail(mid) > level:
                lo = mid
            else:
                hi = mid
        return hi

    def spec(self) -> str:
        return repr(self)


class ExponentialWeight(WeightFunction):
    """``w(R) = exp(-rate * R)``, so ``tail(R) = exp(-rate * R) / rate``."""

    def __init__(self, rate: float = 1.0):
        rate = float(rate)
        if not (rate > 0 and math.isfinite(rate)):
            raise ValueError(f"rate must be positive and finite, got {rate}")
        self.rate = rate

    def __call__(self, R):
        return np.exp(-self.rate * np.asarray(R, dtype=np.float64))

    def tail(self, R: float) -> float:
        if R == math.inf:
            return 0.0
        return math.exp(-self.rate * R) / self.rate

    def mass(self, r0: float, r1: float) -> float:
        if r1 <= r0:
            return 0.0
        if r1 == math.inf:
            return self.tail(r0)
        # W(r0) * (1 - exp(-a (r1 - r0))), free of cancellation
        return self.tail(r0) * -math.expm1(-self.rate * (r1 - r0))

    def masses(self, lo, hi) -> np.ndarray:
        lo = np.asarray(lo, dtype=np.float64)
        hi = np.asarray(hi, dtype=np.float64)
        head = np.exp(-self.rate * lo) / self.rate
        with np.errstate(invalid="ignore"):
            frac = np.where(np.isinf(hi), 1.0, -np.expm1(-self.rate * (hi - lo)))
        return np.where(hi > lo, head * frac, 0.0)

    def inverse_tail(self, level: float) -> float:
        if level >= self.total:
            return 0.0
        return -math.log(level * self.rate) / self.rate

    def spec(self) -> str:
        return f"exp:{self.rate:g}"

    def __repr__(self) -> str:
        return f"ExponentialWeight(rate={self.rate!r})"

    def __eq__(self, other):
        return isinstance(other, ExponentialWeight) and other.rate == self.rate

    def __hash__(self):
        return hash(("exp", self.rate))


class TabulatedWeight(WeightFunction):
    """Piecewise-linear density through ``(knots[k], values[k])`` with an
    exponential tail ``values[-1] * exp(-tail_rate * (R - knots[-1]))``.

    ``knots`` must start at 0 and increase strictly; all values positive.
    """

    def __init__(self, knots, values, tail_rate: float = 1.0):
        knots = np.asarray(knots, dtype=np.float64)
        values = np.asarray(values, dtype=np.float64)
        if knots.ndim != 1 or knots.shape != values.shape or knots.size < 1:
            raise ValueError("knots and values must be equally long 1-D sequences")
        if knots[0] != 0.0 or np.any(np.diff(knots) <= 0):
            raise ValueError("knots must start at 0 and increase strictly")
        if np.any(values <= 0) or not np.all(np.isfinite(values)):
            raise ValueError("tabulated weight values must be positive and finite")
        if not tail_rate > 0:
            raise ValueError("tail_rate must be positive")
        self.knots = knots
        self.values = values
        self.tail_rate = float(tail_rate)
        widths = np.diff(knots)
        pieces = 0.5 * widths * (values[:-1] + values[1:])
        tail_mass = values[-1] / self.tail_rate
        # suffix[k] = mass of [knots[k], inf)
        self._suffix = np.append(np.cumsum(pieces[::-1])[::-1], 0.0) + tail_mass

    @property
    def kinks(self) -> tuple:
        return tuple(self.knots[1:].tolist())

    def __call__(self, R):
        R = np.asarray(R, dtype=np.float64)
        inside = np.interp(R, self.knots, self.values)
        beyond = self.values[-1] * np.exp(-self.tail_rate * (R - self.knots[-1]))
        return np.where(R <= self.knots[-1], inside, beyond)

    def tail(self, R: float) -> float:
        if R == math.inf:
            return 0.0
        R = max(float(R), 0.0)
        last = self.knots[-1]
        if R >= last:
            return float(self.values[-1] * math.exp(-self.tail_rate * (R - last)) / self.tail_rate)
        k = int(np.searchsorted(self.knots, R, side="right")) - 1
        x0, x1 = self.knots[k], self.knots[k + 1]
        v0, v1 = self.values[k], self.values[k + 1]
        vR = v0 + (v1 - v0) * (R - x0) / (x1 - x0)
        return float(0.5 * (x1 - R) * (vR + v1) + self._suffix[k + 1])

    def __repr__(self) -> str:
        return f"TabulatedWeight(knots={self.knots.tolist()}, values={self.values.tolist()}, tail_rate={self.tail_rate})"


DEFAULT_WEIGHT = ExponentialWeight(1.0)


def as_weight(weight) -> WeightFunction:
    """Accept a :class:`WeightFunction`, a spec string, or ``None`` (default).

    Bare callables are refused: exact integration needs the tail integral.
    """
    if weight is None:
        return DEFAULT_WEIGHT
    if isinstance(weight, WeightFunction):
        return weight
    if isinstance(weight, str):
        return parse_weight(weight)
    raise TypeError(
        "weights must be WeightFunction instances with an analytic tail; "
        f"got {type(weight).__name__}"
    )


def parse_weight(text: str) -> WeightFunction:
    """Parse ``exp:<rate>``."""
    kind, sep, arg = text.strip().partition(":")
    if kind != "exp" or not sep:
        raise ValueError(f"unsupported weight spec {text!r}; expected exp:<rate>")
    try:
        rate = float(arg)
    except ValueError:
        raise ValueError(f"bad rate in weight spec {text!r}") from None
    return ExponentialWeight(rate)
