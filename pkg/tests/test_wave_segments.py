import numpy as np
import pytest

from core.errors import GeometryError
from core.wave_segments import (
    Degeneracy,
    SegCoord,
    WaveSegment,
    from_seg_coords,
    segment_degeneracy,
    segment_twisted,
    to_seg_coords,
)


@pytest.fixture
def trapezoid():
    return WaveSegment(0, (0.0, 0.0), (1.0, 0.0), (0.8, 0.2), (0.2, 0.2))


def test_trapezoid_is_convex_and_regular(trapezoid):
    assert trapezoid.convex
    assert trapezoid.orientation == 1.0
    assert trapezoid.degeneracy is Degeneracy.NON_DEGENERATED
    assert not segment_twisted(trapezoid)


@pytest.mark.parametrize("corner, expected", [
    ((0.0, 0.0), (0.0, 0.0)),
    ((1.0, 0.0), (0.0, 1.0)),
    ((0.8, 0.2), (1.0, 1.0)),
    ((0.2, 0.2), (1.0, 0.0)),
])
def test_corner_coordinates(trapezoid, corner, expected):
    coord = to_seg_coords(trapezoid, corner)
    assert (coord.d, coord.s) == pytest.approx(expected, abs=1e-12)


def test_chart_of_interior_point(trapezoid):
    coord = to_seg_coords(trapezoid, (0.5, 0.1))
    assert coord.d == pytest.approx(0.5, abs=1e-12)
    assert coord.s == pytest.approx(0.5, abs=1e-12)
    np.testing.assert_allclose(from_seg_coords(trapezoid, SegCoord(0.5, 0.5)), [0.5, 0.1], atol=1e-12)


def test_chart_inverts_on_interior_points(trapezoid):
    for p in [(0.3, 0.05), (0.7, 0.12), (0.5, 0.19)]:
        back = from_seg_coords(trapezoid, to_seg_coords(trapezoid, p))
        np.testing.assert_allclose(back, p, atol=1e-9)


@pytest.mark.parametrize("outside", [(0.5, -0.1), (0.5, 0.3)])
def test_points_outside_raise(trapezoid, outside):
    with pytest.raises(GeometryError):
        to_seg_coords(trapezoid, outside)


def test_connector_of_convex_segment_is_straight(trapezoid):
    connector = trapezoid.connector(0.5)
    np.testing.assert_allclose(connector, [[0.1, 0.1], [0.9, 0.1]], atol=1e-12)


def test_fully_degenerate_segment_uses_carrier_line():
    seg = WaveSegment(3, (0.0, 0.0), (1.0, 0.0), (0.8, 0.0), (0.2, 0.0))
    assert seg.degeneracy is Degeneracy.FULLY
    assert not seg.convex
    coord = to_seg_coords(seg, (0.5, 0.0))
    assert coord.d == 0.0
    assert coord.s == pytest.approx(0.5)
    with pytest.raises(GeometryError):
        to_seg_coords(seg, (0.5, 0.1))


def test_partially_degenerate_segment():
    seg = WaveSegment(1, (0.0, 0.0), (1.0, 0.0), (0.8, 0.2), (0.5, 0.0))
    assert seg.degeneracy is Degeneracy.PARTIALLY
    assert segment_degeneracy(seg, tol=1e-12) is Degeneracy.PARTIALLY


def test_bow_tie_is_twisted():
    seg = WaveSegment(0, (0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0))
    assert segment_twisted(seg)


def test_seg_coord_range_is_checked():
    with pytest.raises(GeometryError):
        SegCoord(1.2, 0.0)
    with pytest.raises(GeometryError):
        SegCoord(0.5, -0.01)
