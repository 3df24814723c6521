import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chabauty_metric.hausdorff import hausdorff
from chabauty_metric.sets import (
    FiniteClosedSet,
    NetBudgetError,
    SetOracle,
    epsilon_net,
    generate,
    truncate,
)
from chabauty_metric.space import chebyshev, euclidean, graph, manhattan

R1 = euclidean(dim=1)
R2 = euclidean(dim=2)


def test_canonical_order_and_dedup():
    S = FiniteClosedSet([(1.0, 0.0), (0.0, 2.0), (1.0, 0.0), (0.0, -1.0)])
    assert list(S) == [(0.0, -1.0), (0.0, 2.0), (1.0, 0.0)]
    assert S == FiniteClosedSet([(0.0, 2.0), (1.0, 0.0), (0.0, -1.0)])
    assert len({S, FiniteClosedSet(list(S))}) == 1


def test_negative_zero_is_zero():
    assert FiniteClosedSet([-0.0]) == FiniteClosedSet([0.0])
    assert len(FiniteClosedSet([0.0, -0.0])) == 1


def test_dedup_is_exact():
    S = FiniteClosedSet([1.0, 1.0 + 2**-52])
    assert len(S) == 2


def test_empty_sets_equal_across_dims():
    assert FiniteClosedSet.empty(1) == FiniteClosedSet.empty(3) == FiniteClosedSet()
    assert not FiniteClosedSet()


def test_rejects_non_finite():
    with pytest.raises(ValueError):
        FiniteClosedSet([(0.0, np.inf)])


def test_truncate_examples():
    A = FiniteClosedSet([-2.0, 0.5, 3.0])
    assert truncate(R1, A, 2.0) == FiniteClosedSet([-2.0, 0.5])
    assert truncate(R1, A, 3.0) == A
    assert truncate(R1, A, 100.0) == A
    x = FiniteClosedSet([(3.0, 4.0)])
    assert truncate(R2, x, 5.0) == x
    assert truncate(R2, x, 5.0, closed=False) == FiniteClosedSet()
    assert truncate(R1, FiniteClosedSet(), 1.0) == FiniteClosedSet()


def test_truncate_rejects_bad_radius():
    with pytest.raises(ValueError):
        truncate(R1, FiniteClosedSet([1.0]), -1.0)
    with pytest.raises(ValueError):
        truncate(R1, FiniteClosedSet([1.0]), np.inf)


point_lists = st.lists(
    st.tuples(st.floats(-50, 50, allow_nan=False), st.floats(-50, 50, allow_nan=False)), max_size=30
)
radii = st.floats(0, 80, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(point_lists, radii, radii, st.sampled_from([euclidean, chebyshev, manhattan]))
def test_truncate_monotone_and_idempotent(points, r1, r2, make):
    space = make((1.0, -2.0))
    A = FiniteClosedSet(points, dim=2)
    lo, hi = sorted((r1, r2))
    small, big = truncate(space, A, lo), truncate(space, A, hi)
    assert small.issubset(big)
    assert truncate(space, small, lo) == small


@settings(max_examples=200, deadline=None)
@given(point_lists)
def test_truncate_exact_at_breakpoints(points):
    A = FiniteClosedSet(points, dim=2)
    for x in A:
        r = R2.radius(x)
        assert x in truncate(R2, A, r)
        delta = 1e-9 * (1 + r)
        if r - delta >= 0:
            assert x not in truncate(R2, A, r - delta)


def test_generate_examples():
    assert generate("boundary-approach", i=4) == FiniteClosedSet([(1.25, 0.0)])
    assert generate("lattice", eps=1.0, r=1.5, dim=1) == FiniteClosedSet([-1.0, 0.0, 1.0])
    assert generate("empty") == FiniteClosedSet()
    seq = generate("boundary-approach", n=3)
    assert seq == [FiniteClosedSet([(2.0, 0.0)]), FiniteClosedSet([(1.5, 0.0)]), FiniteClosedSet([(1 + 1 / 3, 0.0)])]
    assert generate("boundary-approach-limit") == FiniteClosedSet([(1.0, 0.0)])


def test_generate_other_families():
    assert generate("moving-point", i=4) == FiniteClosedSet([(0.25, 0.0)])
    assert generate("alternating", i=3) == FiniteClosedSet([(-1.0, 0.0)])
    assert generate("escape", i=7) == FiniteClosedSet([(7.0, 0.0)])
    ten = generate("lattice-refinement", i=10)
    assert len(ten) == 21 and ten.dim == 2
    # spacing 1/20 contains every point of spacing 1/10 exactly
    assert ten.issubset(generate("lattice-refinement", i=20))
    lat2 = generate("lattice", eps=0.5, r=1.0, dim=2)
    assert len(lat2) == 13  # points of (Z/2)^2 with norm <= 1


def test_random_cloud_is_seeded():
    a = generate("random-cloud", n_points=50, seed=3)
    assert a == generate("random-cloud", n_points=50, seed=3)
    assert a != generate("random-cloud", n_points=50, seed=4)


def test_generate_errors():
    with pytest.raises(ValueError, match="unknown generator"):
        generate("spiral")
    with pytest.raises(ValueError):
        generate("lattice", eps=0.0, r=1.0)
    with pytest.raises(ValueError):
        generate("lattice", eps=1.0, r=-1.0)
    with pytest.raises(ValueError):
        generate("boundary-approach", i=0)


def test_net_of_singleton():
    oracle = SetOracle.from_finite(R1, FiniteClosedSet([0.0]))
    net = epsilon_net(oracle, R1, 1.0, 0.1)
    assert net
    assert hausdorff(R1, net, FiniteClosedSet([0.0])).value <= 0.1


def test_net_of_empty():
    assert not epsilon_net(SetOracle.empty(), R2, 2.0, 0.05)


def test_net_of_circle_dense_sampling():
    oracle = SetOracle.sphere((0.0, 0.0), 1.0)
    net = epsilon_net(oracle, R2, 2.0, 0.05)
    # soundness: each net point is near the circle
    assert np.all(oracle(net.points) <= 0.05)
    # coverage, checked on a dense sample of the circle
    t = np.linspace(0, 2 * np.pi, 20000, endpoint=False)
    circle = np.column_stack([np.cos(t), np.sin(t)])
    gaps = R2.pairwise(circle, net.points).min(axis=1)
    assert gaps.max() <= 0.05


@pytest.mark.parametrize("make", [euclidean, chebyshev, manhattan])
def test_net_soundness_other_norms(make):
    space = make(dim=2)
    S = FiniteClosedSet([(0.3, 0.1), (-1.2, 0.7)])
    oracle = SetOracle.from_finite(space, S)
    net = epsilon_net(oracle, space, 2.0, 0.1)
    assert np.all(oracle(net.points) <= 0.1)
    assert hausdorff(space, net, S).value <= 0.1


def test_net_budget():
    oracle = SetOracle.sphere((0.0, 0.0), 1.0)
    with pytest.raises(NetBudgetError):
        epsilon_net(oracle, R2, 2.0, 1e-4, max_points=10_000)


def test_net_on_graph():
    g = graph(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)])
    target = FiniteClosedSet([[2]])
    net = epsilon_net(SetOracle.from_finite(g, target), g, 2.5, 0.5)
    assert net == target
