"""Explicit metric for the Chabauty topology on closed subsets of a proper
metric space, with exact evaluation on finite point sets."""

from .convergence import ConvergenceConfig, ConvergenceReport, analyze, check_condition1, check_condition2
from .hausdorff import INFINITE, HausdorffResult, directed_hausdorff, hausdorff, hausdorff_accelerated
from .metric import (
    ClosedBall,
    DistanceCurve,
    OpenBall,
    breakpoints,
    chabauty_distance_exact,
    d_R,
    distance_curve,
    subbasis_membership,
)
from .quadrature import QuadratureBudgetError, QuadratureResult, chabauty_distance_quadrature
from .sets import FiniteClosedSet, NetBudgetError, SetOracle, epsilon_net, generate, truncate
from .space import MetricSpace, chebyshev, distance, euclidean, graph, manhattan, radius
from .weights import ExponentialWeight, TabulatedWeight, WeightFunction, parse_weight

__version__ = "0.1.0"
