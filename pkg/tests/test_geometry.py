import math

import numpy as np
import pytest

from core.errors import GeometryError
from core.geometry import (
    BoundaryCycle,
    Configuration,
    Location,
    connectivity_boundary,
    convex_hull,
    diameter,
    disc_graph,
    has_delta_hole,
    is_connected,
    is_convex_cycle,
    is_near_gathering,
    largest_empty_circle,
    min_pairwise_distance,
    point_in_polygon,
    polygon_area,
    smallest_enclosing_circle,
)
from tests.shapes import cycle_of, square_grid

UNIT_SQUARE = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]


def test_disc_graph_uses_closed_unit_disc():
    config = Configuration([(0.0, 0.0), (1.0, 0.0), (2.0001, 0.0)])
    graph = disc_graph(config, 1.0)
    assert graph.adjacent(0, 1)
    assert not graph.adjacent(1, 2)
    assert not is_connected(graph)


def test_disc_graph_rejects_non_positive_radius():
    with pytest.raises(GeometryError):
        disc_graph(Configuration([(0.0, 0.0)]), 0.0)


def test_single_robot_is_connected_and_gathered():
    config = Configuration([(3.0, 4.0)])
    assert is_connected(disc_graph(config, 1.0))
    assert diameter(config) == 0.0
    assert min_pairwise_distance(config) == math.inf
    assert is_near_gathering(config, 1.0)


def test_diameter_and_min_distance_of_unit_square():
    config = Configuration(UNIT_SQUARE)
    assert diameter(config) == pytest.approx(math.sqrt(2.0), abs=1e-12)
    assert min_pairwise_distance(config) == pytest.approx(1.0, abs=1e-12)
    assert is_near_gathering(config, 1.5)
    assert not is_near_gathering(config, 1.0)


def test_polygon_area_is_signed():
    assert polygon_area(np.array(UNIT_SQUARE)) == pytest.approx(1.0)
    assert polygon_area(np.array(UNIT_SQUARE[::-1])) == pytest.approx(-1.0)


def test_point_in_polygon_locations():
    square = np.array(UNIT_SQUARE)
    assert point_in_polygon((0.5, 0.5), square) is Location.INSIDE
    assert point_in_polygon((1.0, 0.5), square) is Location.ON
    assert point_in_polygon((1.5, 0.5), square) is Location.OUTSIDE


def test_smallest_enclosing_circle_of_equilateral_triangle():
    triangle = [(0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3.0) / 2.0)]
    circle = smallest_enclosing_circle(triangle)
    assert circle.radius == pytest.approx(1.0 / math.sqrt(3.0), abs=1e-12)
    assert circle.center.x == pytest.approx(0.5, abs=1e-12)
    assert circle.center.y == pytest.approx(math.sqrt(3.0) / 6.0, abs=1e-12)


def test_smallest_enclosing_circle_of_obtuse_triangle_uses_longest_side():
    circle = smallest_enclosing_circle([(0.0, 0.0), (2.0, 0.0), (1.0, 0.2)])
    assert circle.radius == pytest.approx(1.0, abs=1e-12)
    assert circle.center.x == pytest.approx(1.0, abs=1e-12)


def test_smallest_enclosing_circle_contains_random_points(rng):
    pts = rng.uniform(-3, 3, size=(60, 2))
    circle = smallest_enclosing_circle(pts)
    assert all(circle.contains(p, tol=1e-9) for p in pts)


def test_smallest_enclosing_circle_of_empty_set_raises():
    with pytest.raises(GeometryError):
        smallest_enclosing_circle([])


def test_convex_hull_skips_interior_points():
    config = Configuration(UNIT_SQUARE + [(0.5, 0.5)])
    hull = convex_hull(config)
    assert sorted(hull) == [0, 1, 2, 3]
    assert hull[0] == 0
    assert polygon_area(config.positions[list(hull)]) > 0


def test_connectivity_boundary_of_grid_walks_outer_ring():
    config = square_grid(3, 0.9)
    cycle = connectivity_boundary(config)
    assert len(cycle) == 8
    assert 4 not in cycle.indices
    assert cycle.area > 0
    assert not cycle.degenerate and not cycle.pinched
    assert is_convex_cycle(cycle)


def test_connectivity_boundary_of_disconnected_swarm_raises():
    with pytest.raises(GeometryError):
        connectivity_boundary(Configuration([(0.0, 0.0), (5.0, 0.0)]))


def test_connectivity_boundary_of_pair_is_degenerate():
    cycle = connectivity_boundary(Configuration([(0.0, 0.0), (0.5, 0.0)]))
    assert cycle.degenerate


def test_is_convex_cycle_cases():
    assert is_convex_cycle(cycle_of(UNIT_SQUARE))
    dented = [(0.0, 0.0), (0.5, 0.2), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    assert not is_convex_cycle(cycle_of(dented))
    collinear = [(0.0, 0.0), (0.5, 0.0), (1.0, 0.0), (1.0, 0.5),
                 (1.0, 1.0), (0.5, 1.0), (0.0, 1.0), (0.0, 0.5)]
    assert is_convex_cycle(cycle_of(collinear))


def test_largest_empty_circle_of_unit_square_is_inscribed():
    config = Configuration(UNIT_SQUARE)
    circle = largest_empty_circle(config, connectivity_boundary(config))
    assert circle.diameter == pytest.approx(1.0, abs=1e-9)
    assert circle.center.x == pytest.approx(0.5, abs=1e-9)


def test_largest_empty_circle_of_triangle_is_incircle():
    config = Configuration([(0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3.0) / 2.0)])
    circle = largest_empty_circle(config, connectivity_boundary(config))
    assert circle.diameter == pytest.approx(1.0 / math.sqrt(3.0), abs=1e-9)


def test_largest_empty_circle_of_dense_grid_is_small():
    config = square_grid(6, 0.5)
    circle = largest_empty_circle(config, connectivity_boundary(config))
    assert circle.diameter <= math.sqrt(2.0) / 2.0 + 1e-9


def test_largest_empty_circle_of_degenerate_cycle_is_zero():
    config = Configuration([(0.0, 0.0), (0.6, 0.0)])
    assert largest_empty_circle(config, connectivity_boundary(config)).radius == 0.0


def test_has_delta_hole_threshold():
    config = Configuration(UNIT_SQUARE)
    assert has_delta_hole(config, 1.0)
    assert not has_delta_hole(config, 1.01)
    assert not has_delta_hole(square_grid(6, 0.5), 1.0)


def test_boundary_cycle_with_positions_keeps_indices():
    cycle = cycle_of(UNIT_SQUARE)
    moved = cycle.with_positions(np.array(UNIT_SQUARE) * 2.0)
    assert moved.indices == cycle.indices
    assert moved.area == pytest.approx(4.0)
    assert isinstance(moved, BoundaryCycle)
