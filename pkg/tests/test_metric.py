import numpy as np
import pytest
from hypothesis import given, settings

from conftest import float_spaces, integer_spaces
from stonecover.errors import AsymmetricMatrix, BadParams, DegenerateDistance, InvalidMatrix, NegativeDistance, TriangleViolation
from stonecover.metric import (
    SkeletonParams, ball, check_metric_axioms, equilateral_space, generate_space, greedy_skeleton,
    line_space, lp_space, map_moduli, nearest_point_reduction, space_from_json, space_to_json,
    tree_space, validate_space,
)


def test_two_point_space_is_valid():
    s = validate_space([[0, 1], [1, 0]])
    assert s.n == 2 and s.d(0, 1) == 1


def test_asymmetric_rejected():
    with pytest.raises(AsymmetricMatrix):
        validate_space([[0, 1], [2, 0]])


def test_triangle_violation_reports_witness():
    with pytest.raises(TriangleViolation) as info:
        validate_space([[0, 1, 3], [1, 0, 1], [3, 1, 0]])
    i, j, k = info.value.witness
    assert (i, k) == (0, 2) and j == 1


@pytest.mark.parametrize("m, exc", [
    ([[0, -1], [-1, 0]], NegativeDistance),
    ([[0, 0], [0, 0]], DegenerateDistance),
    ([[1, 1], [1, 1]], DegenerateDistance),
    ([[0, 1, 2]], InvalidMatrix),
    ([[0, float("nan")], [float("nan"), 0]], InvalidMatrix),
    ([], InvalidMatrix),
])
def test_invalid_matrices(m, exc):
    with pytest.raises(exc):
        validate_space(m)


def test_triangle_tolerance_is_relative():
    big = 1e12
    d = [[0, big, 2 * big + 1], [big, 0, big], [2 * big + 1, big, 0]]
    validate_space(d)  # excess 1 on a side of 2e12 is within 1e-9 relative
    with pytest.raises(TriangleViolation):
        validate_space(d, tol=1e-15)


def test_lp_inf_pair():
    s = generate_space("lp-point-cloud", {"points": [[0, 0], [1, 0]], "p": "inf"})
    assert s.d(0, 1) == 1


def test_weighted_tree_path_sum():
    s = generate_space("weighted-tree", {"edges": [["a", "b", 2], ["b", "c", 3]], "root": "a"})
    assert s.d(s.index("a"), s.index("c")) == 5


@pytest.mark.parametrize("kind, params", [
    ("random-integer", {"n": 4}),
    ("lp-point-cloud", {"n": 6, "p": 1}),
    ("weighted-tree", {"n": 7}),
    ("grid-net", {"dim": 2, "radius": 2, "p": 1}),
])
def test_generators_are_deterministic_and_valid(kind, params):
    a = generate_space(kind, params, seed=11)
    b = generate_space(kind, params, seed=11)
    assert np.array_equal(a.dist, b.dist)
    assert check_metric_axioms(a)


def test_grid_net_l1_ball_counts_lattice_points():
    # |x| + |y| <= 2 on Z^2 has 13 points
    assert generate_space("grid-net", {"dim": 2, "radius": 2, "p": 1}).n == 13


def test_unknown_generator():
    with pytest.raises(BadParams):
        generate_space("spiral", {}, 0)


def test_ball_is_open():
    eq = equilateral_space(3)
    assert ball(eq, 0, 1) == {0}
    assert ball(eq, 0, 0) == frozenset()
    assert ball(line_space([0, 1, 2, 3]), 1, 1.5) == {0, 1, 2}


def test_greedy_skeleton_examples(line4):
    assert greedy_skeleton(line4, 2) == (0, 2)
    assert greedy_skeleton(line4, 0.5) == (0, 1, 2, 3)
    assert greedy_skeleton(equilateral_space(3), 1) == (0, 1, 2)
    with pytest.raises(BadParams):
        SkeletonParams(0, 1)


@given(float_spaces(max_n=9))
@settings(max_examples=60, deadline=None)
def test_greedy_skeleton_separated_and_dense(space):
    for a in (0.3, 1.0, 2.5):
        S = greedy_skeleton(space, a)
        assert all(space.dist[s, t] >= a for s in S for t in S if s != t)
        assert all(space.dist[x, list(S)].min() < a for x in range(space.n))


def test_nearest_point_reduction(line4):
    assert nearest_point_reduction(line4, range(4)) == {0: 0, 1: 1, 2: 2, 3: 3}
    red = nearest_point_reduction(line4, [0, 2])
    assert red[1] == 0 and red[3] == 2


def test_map_moduli_identity_and_constant(line4):
    ident = map_moduli(line4, line4, list(range(4)))
    for t in (1, 2, 3):
        assert ident.omega(t) == t and ident.rho(t) == t
    const = map_moduli(line4, line4, [0, 0, 0, 0])
    for t in (1, 2, 3):
        assert const.omega(t) == 0 and const.rho(t) == 0


def test_map_moduli_doubling():
    src, tgt = line_space([0, 1, 2, 3]), line_space([0, 2, 4, 6])
    mm = map_moduli(src, tgt, [0, 1, 2, 3])
    assert [mm.omega(t) for t in (1, 2, 3)] == [2, 4, 6]


@given(integer_spaces(min_n=2, max_n=7), integer_spaces(min_n=1, max_n=5))
@settings(max_examples=60, deadline=None)
def test_map_moduli_sandwich_and_monotone(src, tgt):
    rng = np.random.default_rng(src.n * 31 + tgt.n)
    f = rng.integers(0, tgt.n, size=src.n)
    mm = map_moduli(src, tgt, f)
    for i in range(src.n):
        for j in range(src.n):
            d, e = src.dist[i, j], tgt.dist[f[i], f[j]]
            assert mm.rho(d) <= e <= mm.omega(d)
    assert np.all(np.diff(mm.omega_values) >= 0)
    assert np.all(np.diff(mm.rho_values) >= 0)


def test_json_round_trip():
    s = lp_space([[0, 0], [1, 2], [3, 1]], 1)
    back = space_from_json(space_to_json(s))
    assert np.array_equal(back.dist, s.dist) and back.labels == s.labels
    t = space_from_json({"tree": {"edges": [[0, 1, 1.5], [1, 2, 2]], "root": 0}})
    assert t.diameter == 3.5
    assert tree_space([[0, 1, 1.5]], 0).n == 2
