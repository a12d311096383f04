from fractions import Fraction

import pytest

from newton_motivic.exact_geometry import (
    cone_from_generators, cone_from_constraints, cone_constraints, cone_rays, polyhedron_hull, system_point,
    rank,
)


def test_rank():
    assert rank([(1, 2), (2, 4)]) == 1
    assert rank([(1, 0, 0), (0, 1, 0), (1, 1, 0)]) == 2


def test_generators_to_constraints():
    cone = cone_from_generators([(1, 0), (1, 2)], 2)
    equalities, inequalities = cone_constraints(cone, 2)
    assert equalities == []
    assert sorted(inequalities) == [(0, 1), (2, -1)]


def test_lower_dimensional_cone_has_equalities():
    cone = cone_from_generators([(1, 1, 0)], 3)
    equalities, _ = cone_constraints(cone, 3)
    assert len(equalities) == 2
    assert all(e[0] + e[1] == 0 for e in equalities)


def test_constraints_to_rays():
    cone = cone_from_constraints(2, [], [((1, 0), False), ((-1, 1), False)])
    assert cone_rays(cone, 2) == [(0, 1), (1, 1)]


def test_rays_reject_lines():
    cone = cone_from_constraints(2, [], [((1, 0), False)])
    with pytest.raises(ValueError, match="line"):
        cone_rays(cone, 2)


def test_hull_of_support_plus_orthant():
    points = [(2, 0), (1, 1), (0, 3)]
    vertices, facets = polyhedron_hull(points, [(1, 0), (0, 1)], 2)
    # (1, 1) 在 (2, 0) 与 (0, 3) 的连线下方
    assert sorted(vertices) == [(0, 3), (1, 1), (2, 0)]
    offsets = {tuple(w): off for w, off in facets}
    assert offsets[(1, 1)] == 2
    assert offsets[(2, 1)] == 3


def test_hull_requires_full_dimension():
    with pytest.raises(ValueError, match="full-dimensional"):
        polyhedron_hull([(0, 0), (1, 1)], [], 2)


def test_system_point_with_strict_inequalities():
    point = system_point(2, [], [((1, 0), True), ((0, 1), True)])
    assert point[0] > 0 and point[1] > 0
    assert all(isinstance(x, Fraction) for x in point)


def test_system_point_detects_empty_open_cone():
    assert system_point(2, [], [((1, 0), True), ((-1, 0), True)]) is None
    assert system_point(2, [], [((0, 0), True)]) is None


def test_system_point_prefers_a_nonzero_point():
    point = system_point(2, [(1, -1)], [])
    assert any(point)
    assert point[0] == point[1]
