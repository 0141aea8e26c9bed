"""
SwarmWave Wave Segments

A wave segment is the quadrilateral between two consecutive boundary robots
and their images after one epsilon-Go-to-the-Middle step:

    A = b^t_k,  B = b^t_{k+1},  C = b^{t+1}_{k+1},  D = b^{t+1}_k

Each segment carries a normalised chart (d, s). The depth d runs from the old
edge A-B (d = 0) to the new edge D-C (d = 1) along both cut sides; the span s
runs from the cut side A-D (s = 0) to the cut side B-C (s = 1). Convex segments
use the straight connector between the two cut-side points; non-convex ones
use a two-piece connector whose pieces are parallel to A-B and D-C.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from core.errors import GeometryError
from core.geometry import EPS_GEOM, Point, PointLike, cross, polygon_area

# Configure logging
logger = logging.getLogger(__name__)

# Largest distance between a charted point and its connector
CONNECTOR_TOL = 1e-7


class Degeneracy(Enum):
    """How many of the four corners are collinear"""
    NON_DEGENERATED = "non-degenerated"
    PARTIALLY = "partially"
    FULLY = "fully"


@dataclass(frozen=True)
class SegCoord:
    """Normalised (depth, span) coordinate inside a wave segment"""

    d: float
    s: float

    def __post_init__(self):
        if not (0.0 <= self.d <= 1.0 and 0.0 <= self.s <= 1.0):
            raise GeometryError(f"segment coordinate ({self.d}, {self.s}) outside [0, 1]^2")


def _cross2(u: np.ndarray, v: np.ndarray) -> float:
    return float(u[0] * v[1] - u[1] * v[0])


def _collinear3(a: np.ndarray, b: np.ndarray, c: np.ndarray, tol: float) -> bool:
    longest = max(math.dist(a, b), math.dist(a, c), math.dist(b, c))
    if longest <= tol:
        return True
    # height over the longest side
    return abs(cross(a, b, c)) / longest <= tol


def _classify(corners: np.ndarray, tol: float) -> Degeneracy:
    flags = [_collinear3(corners[i], corners[j], corners[k], tol)
             for i, j, k in combinations(range(4), 3)]
    if all(flags):
        return Degeneracy.FULLY
    if any(flags):
        return Degeneracy.PARTIALLY
    return Degeneracy.NON_DEGENERATED


def _proper_crossing(p1, p2, q1, q2, tol: float) -> bool:
    d1, d2 = cross(q1, q2, p1), cross(q1, q2, p2)
    d3, d4 = cross(p1, p2, q1), cross(p1, p2, q2)
    return ((d1 > tol and d2 < -tol) or (d1 < -tol and d2 > tol)) and \
           ((d3 > tol and d4 < -tol) or (d3 < -tol and d4 > tol))


@dataclass(frozen=True, eq=False)
class WaveSegment:
    k: int
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    tol: float = EPS_GEOM
    degeneracy: Degeneracy = field(init=False)
    convex: bool = field(init=False)
    orientation: float = field(init=False)

    def __post_init__(self):
        for name in ("A", "B", "C", "D"):
            value = np.array(Point.of(getattr(self, name)).as_array())
            value.setflags(write=False)
            object.__setattr__(self, name, value)
        corners = self.corners
        area = polygon_area(corners)
        object.__setattr__(self, "degeneracy", _classify(corners, self.tol))
        object.__setattr__(self, "orientation", 1.0 if area >= 0 else -1.0)
        object.__setattr__(self, "convex", self._is_convex(corners, area))

    @property
    def corners(self) -> np.ndarray:
        return np.array([self.A, self.B, self.C, self.D])

    def _is_convex(self, corners: np.ndarray, area: float) -> bool:
        if abs(area) <= self.tol:
            return False
        sign = 1.0 if area > 0 else -1.0
        return all(sign * cross(corners[i - 1], corners[i], corners[(i + 1) % 4]) >= -self.tol
                   for i in range(4))

    def side_points(self, d: float) -> Tuple[np.ndarray, np.ndarray]:
        """Depth-d points on the cut sides A->D and B->C"""
        return self.A + d * (self.D - self.A), self.B + d * (self.C - self.B)

    def connector(self, d: float) -> np.ndarray:
        """Vertices of the depth-d connector polyline, from side A-D to side B-C"""
        p, q = self.side_points(d)
        if self.convex:
            return np.array([p, q])
        u, w = self.B - self.A, self.C - self.D
        denom = _cross2(u, w)
        if abs(denom) <= self.tol * max(float(np.hypot(*u)) * float(np.hypot(*w)), self.tol):
            # parallel rays never meet
            return np.array([p, q])
        t = _cross2(q - p, w) / denom
        return np.array([p, p + t * u, q])

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "corners": self.corners.tolist(),
            "degeneracy": self.degeneracy.value,
            "convex": self.convex,
        }


def segment_degeneracy(seg: WaveSegment, tol: Optional[float] = None) -> Degeneracy:
    """non-degenerated / partially (some three corners collinear) / fully (all four)"""
    return _classify(seg.corners, seg.tol if tol is None else tol)


def segment_twisted(seg: WaveSegment) -> bool:
    """True iff opposite sides A-B / C-D or A-D / B-C cross in a single interior point"""
    return _proper_crossing(seg.A, seg.B, seg.C, seg.D, seg.tol) or \
        _proper_crossing(seg.A, seg.D, seg.B, seg.C, seg.tol)


def _pieces(poly: np.ndarray, tol: float) -> List[Tuple[np.ndarray, np.ndarray, float]]:
    pieces = []
    for start, end in zip(poly[:-1], poly[1:]):
        length = math.dist(start, end)
        if length > tol:
            pieces.append((start, end, length))
    return pieces


def _signed_side(p: np.ndarray, poly: np.ndarray, tol: float) -> float:
    """Signed distance of p from the polyline, positive on its left"""
    pieces = _pieces(poly, tol)
    if not pieces:
        return 0.0
    sides = [_cross2(end - start, p - start) / length for start, end, length in pieces]
    if len(sides) == 1:
        return sides[0]
    (s1, e1, _), (s2, e2, _) = pieces
    # left region of a left turn is the wedge, of a right turn the union
    if _cross2(e1 - s1, e2 - s2) > 0:
        return min(sides)
    return max(sides)


def _locate_on(p: np.ndarray, poly: np.ndarray, tol: float) -> Tuple[float, float]:
    """(span fraction, distance) of the closest point of the polyline to p"""
    pieces = _pieces(poly, tol)
    if not pieces:
        return 0.0, math.dist(p, poly[0])
    total = sum(length for _, _, length in pieces)
    best_dist, best_arc, walked = math.inf, 0.0, 0.0
    for start, end, length in pieces:
        direction = end - start
        t = min(1.0, max(0.0, float(np.dot(p - start, direction)) / (length * length)))
        dist = math.dist(p, start + t * direction)
        if dist < best_dist:
            best_dist, best_arc = dist, walked + t * length
        walked += length
    return best_arc / total, best_dist


def _point_on(poly: np.ndarray, s: float, tol: float) -> np.ndarray:
    pieces = _pieces(poly, tol)
    if not pieces:
        return poly[0].copy()
    target = s * sum(length for _, _, length in pieces)
    walked = 0.0
    for start, end, length in pieces:
        if target <= walked + length:
            return start + ((target - walked) / length) * (end - start)
        walked += length
    return pieces[-1][1].copy()


def _clip_unit(value: float, slack: float, what: str) -> float:
    if value < -slack or value > 1.0 + slack:
        raise GeometryError(f"{what} {value} outside the segment")
    return min(1.0, max(0.0, value))


# Fully degenerate segments: every corner on one carrier line.

def _carrier(seg: WaveSegment) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    corners = seg.corners
    best, pair = 0.0, (0, 0)
    for i, j in combinations(range(4), 2):
        dist = math.dist(corners[i], corners[j])
        if dist > best:
            best, pair = dist, (i, j)
    if best <= seg.tol:
        return corners[0], None
    return corners[0], (corners[pair[1]] - corners[pair[0]]) / best


def _line_coords(seg: WaveSegment, p: np.ndarray) -> SegCoord:
    origin, direction = _carrier(seg)
    tol = seg.tol
    if direction is None:
        if math.dist(p, origin) > tol:
            raise GeometryError(f"point {p.tolist()} is not on the collapsed segment {seg.k}")
        return SegCoord(0.0, 0.0)
    if abs(_cross2(direction, p - origin)) > tol:
        raise GeometryError(f"point {p.tolist()} is off the carrier line of segment {seg.k}")
    u = float(np.dot(p - origin, direction))
    ua, ub, uc, ud = (float(np.dot(c - origin, direction)) for c in (seg.A, seg.B, seg.C, seg.D))

    depths = []
    if min(ua, ub) - tol <= u <= max(ua, ub) + tol:
        depths.append(0.0)
    for start, end in ((ua, ud), (ub, uc)):
        if abs(end - start) > tol:
            d = (u - start) / (end - start)
            if -tol <= d <= 1.0 + tol:
                depths.append(min(1.0, max(0.0, d)))
    if min(ud, uc) - tol <= u <= max(ud, uc) + tol:
        depths.append(1.0)
    if not depths:
        raise GeometryError(f"point {p.tolist()} lies outside the collapsed segment {seg.k}")
    d = min(depths)
    up, uq = ua + d * (ud - ua), ub + d * (uc - ub)
    if abs(uq - up) <= tol:
        return SegCoord(d, 0.0)
    s = _clip_unit((u - up) / (uq - up), 10.0 * tol / abs(uq - up), "span")
    return SegCoord(d, s)


def to_seg_coords(seg: WaveSegment, p: PointLike) -> SegCoord:
    """
    Chart inverse: the depth is the root of the signed side function of the
    connector family, the span the arc-length fraction along that connector.
    """
    point = Point.of(p).as_array()
    if seg.degeneracy is Degeneracy.FULLY:
        return _line_coords(seg, point)
    tol = seg.tol

    def phi(d: float) -> float:
        return seg.orientation * _signed_side(point, seg.connector(d), tol)

    at_old, at_new = phi(0.0), phi(1.0)
    if at_old < -tol or at_new > tol:
        raise GeometryError(f"point {point.tolist()} lies outside segment {seg.k}")
    if abs(at_old) <= tol:
        d = 0.0
    elif at_new >= -tol:
        d = 1.0
    else:
        d = brentq(phi, 0.0, 1.0, xtol=1e-15, maxiter=200)
    poly = seg.connector(d)
    span, dist = _locate_on(point, poly, tol)
    if dist > CONNECTOR_TOL:
        raise GeometryError(
            f"point {point.tolist()} is {dist:.3e} away from its depth-{d} connector in segment {seg.k}"
        )
    return SegCoord(d, span)


def from_seg_coords(seg: WaveSegment, coord: SegCoord) -> np.ndarray:
    if seg.degeneracy is Degeneracy.FULLY:
        p, q = seg.side_points(coord.d)
        return p + coord.s * (q - p)
    return _point_on(seg.connector(coord.d), coord.s, seg.tol)
