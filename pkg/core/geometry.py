"""
SwarmWave Geometry

Planar primitives used by every protocol and auditor:
- Point / Configuration: robot positions as seen by the external observer
- DiscGraph: the unit (or r-) disc graph of a configuration
- Circle: smallest enclosing and largest empty circles
- BoundaryCycle: the Connectivity-Boundary extracted by an outer-face walk

All comparisons use one absolute tolerance, EPS_GEOM.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum, auto
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import ConvexHull, Voronoi, cKDTree

from core.errors import GeometryError

# Configure logging
logger = logging.getLogger(__name__)

# Absolute tolerance for distance and collinearity comparisons
EPS_GEOM = 1e-9

PointLike = Union["Point", Sequence[float], np.ndarray]


@dataclass(frozen=True)
class Point:
    """A robot position in the observer's frame"""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"non-finite point ({self.x}, {self.y})")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    def distance_to(self, other: "Point") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    @classmethod
    def of(cls, value: PointLike) -> "Point":
        if isinstance(value, Point):
            return value
        return cls(float(value[0]), float(value[1]))


class Configuration:
    """
    Ordered tuple of robot positions.

    Robot identity is the index; the underlying array is read-only so a
    configuration can be shared between rounds, audits and threads.
    """

    def __init__(self, positions: Union[np.ndarray, Sequence[PointLike]]):
        if isinstance(positions, np.ndarray):
            array = np.array(positions, dtype=float)
        else:
            array = np.array([Point.of(p).as_array() for p in positions], dtype=float)
        if array.size == 0:
            raise GeometryError("a configuration needs at least one robot")
        array = array.reshape(-1, 2)
        if not np.all(np.isfinite(array)):
            raise GeometryError("configuration contains non-finite coordinates")
        array.setflags(write=False)
        self._positions = array

    @classmethod
    def from_points(cls, points: Sequence[PointLike]) -> "Configuration":
        return cls(list(points))

    @property
    def positions(self) -> np.ndarray:
        return self._positions

    @property
    def n(self) -> int:
        return self._positions.shape[0]

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, index: int) -> Point:
        return Point(float(self._positions[index, 0]), float(self._positions[index, 1]))

    def __iter__(self) -> Iterator[Point]:
        for i in range(self.n):
            yield self[i]

    def __repr__(self) -> str:
        return f"Configuration(n={self.n})"

    def with_positions(self, positions: np.ndarray) -> "Configuration":
        return Configuration(np.asarray(positions, dtype=float))

    def to_list(self) -> List[List[float]]:
        return [[float(x), float(y)] for x, y in self._positions]


@dataclass(frozen=True)
class DiscGraph:
    """Disc graph: robots adjacent iff within `radius` of each other"""

    n: int
    radius: float
    neighbors: Tuple[Tuple[int, ...], ...]

    def adjacent(self, i: int, j: int) -> bool:
        return j in self.neighbors[i]

    def edges(self) -> List[Tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in self.neighbors[i] if i < j]

    def degree(self, i: int) -> int:
        return len(self.neighbors[i])


@dataclass(frozen=True)
class Circle:
    center: Point
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise GeometryError(f"negative circle radius {self.radius}")

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    def contains(self, p: PointLike, tol: float = EPS_GEOM) -> bool:
        q = Point.of(p)
        return self.center.distance_to(q) <= self.radius + tol


@dataclass(frozen=True)
class BoundaryCycle:
    """
    Connectivity-Boundary: robot indices on the outer face, counterclockwise.

    `degenerate` marks cycles without enclosed area (n <= 2, collinear swarms);
    `pinched` lists robots the outer-face walk passed more than once.
    """

    indices: Tuple[int, ...]
    positions: np.ndarray = field(repr=False, compare=False)
    degenerate: bool = False
    pinched: Tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.indices)

    @property
    def area(self) -> float:
        return polygon_area(self.positions)

    def with_positions(self, positions: np.ndarray) -> "BoundaryCycle":
        array = np.array(positions, dtype=float).reshape(-1, 2)
        array.setflags(write=False)
        return BoundaryCycle(self.indices, array, self.degenerate, self.pinched)


class Location(Enum):
    """Result of a point-in-polygon query"""
    INSIDE = auto()
    ON = auto()
    OUTSIDE = auto()


def _as_array(points: Union[Configuration, np.ndarray, Sequence[PointLike]]) -> np.ndarray:
    if isinstance(points, Configuration):
        return points.positions
    if isinstance(points, np.ndarray):
        return np.asarray(points, dtype=float).reshape(-1, 2)
    return np.array([Point.of(p).as_array() for p in points], dtype=float).reshape(-1, 2)


def cross(o: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    """Twice the signed area of triangle (o, a, b)"""
    return float((a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]))


def polygon_area(polygon: np.ndarray) -> float:
    """Signed shoelace area, positive for counterclockwise order"""
    poly = np.asarray(polygon, dtype=float).reshape(-1, 2)
    if poly.shape[0] < 3:
        return 0.0
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def segment_distances(points: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance from each point to the closed segment a-b"""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    ab = b - a
    length_sq = float(np.dot(ab, ab))
    if length_sq == 0.0:
        return np.hypot(pts[:, 0] - a[0], pts[:, 1] - a[1])
    t = np.clip(((pts - a) @ ab) / length_sq, 0.0, 1.0)
    foot = a + t[:, None] * ab
    return np.hypot(pts[:, 0] - foot[:, 0], pts[:, 1] - foot[:, 1])


def boundary_distances(points: np.ndarray, polygon: np.ndarray) -> np.ndarray:
    """Distance from each point to the closed polyline of the polygon"""
    poly = np.asarray(polygon, dtype=float).reshape(-1, 2)
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    best = np.full(pts.shape[0], np.inf)
    for k in range(poly.shape[0]):
        best = np.minimum(best, segment_distances(pts, poly[k], poly[(k + 1) % poly.shape[0]]))
    return best


def points_in_polygon(points: np.ndarray, polygon: np.ndarray,
                      tol: float = EPS_GEOM) -> List[Location]:
    """Vectorised ray casting with an on-edge tolerance band"""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    poly = np.asarray(polygon, dtype=float).reshape(-1, 2)
    if poly.shape[0] == 0:
        return [Location.OUTSIDE] * pts.shape[0]
    on_edge = boundary_distances(pts, poly) <= tol
    inside = np.zeros(pts.shape[0], dtype=bool)
    if poly.shape[0] >= 3:
        x, y = pts[:, 0], pts[:, 1]
        for k in range(poly.shape[0]):
            x1, y1 = poly[k]
            x2, y2 = poly[(k + 1) % poly.shape[0]]
            straddles = (y1 > y) != (y2 > y)
            if not np.any(straddles):
                continue
            with np.errstate(divide="ignore", invalid="ignore"):
                x_cross = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            inside ^= straddles & (x < x_cross)
    result = []
    for on, ins in zip(on_edge, inside):
        if on:
            result.append(Location.ON)
        elif ins:
            result.append(Location.INSIDE)
        else:
            result.append(Location.OUTSIDE)
    return result


def point_in_polygon(p: PointLike, polygon: np.ndarray, tol: float = EPS_GEOM) -> Location:
    return points_in_polygon(Point.of(p).as_array(), polygon, tol)[0]


def disc_graph(config: Configuration, radius: float, tol: float = EPS_GEOM) -> DiscGraph:
    """Robots i != j are adjacent iff ||z_i - z_j|| <= radius (+ tol)"""
    if radius <= 0:
        raise GeometryError(f"disc graph radius must be positive, got {radius}")
    pts = config.positions
    neighbors: List[List[int]] = [[] for _ in range(config.n)]
    if config.n > 1:
        tree = cKDTree(pts)
        for i, j in sorted(tree.query_pairs(radius + tol)):
            neighbors[i].append(j)
            neighbors[j].append(i)
    return DiscGraph(
        n=config.n,
        radius=radius,
        neighbors=tuple(tuple(sorted(adj)) for adj in neighbors),
    )


def is_connected(graph: DiscGraph) -> bool:
    if graph.n <= 1:
        return True
    edges = graph.edges()
    if not edges:
        return False
    rows = np.array([e[0] for e in edges])
    cols = np.array([e[1] for e in edges])
    matrix = coo_matrix((np.ones(len(edges)), (rows, cols)), shape=(graph.n, graph.n))
    count, _ = connected_components(matrix, directed=False)
    return count == 1


def diameter(config: Configuration) -> float:
    """Largest pairwise distance (0 for a single robot)"""
    if config.n < 2:
        return 0.0
    pts = config.positions[list(convex_hull(config))]
    if pts.shape[0] < 2:
        return 0.0
    deltas = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt(np.max(np.sum(deltas * deltas, axis=-1))))


def min_pairwise_distance(config: Configuration) -> float:
    if config.n < 2:
        return math.inf
    distances, _ = cKDTree(config.positions).query(config.positions, k=2)
    return float(np.min(distances[:, 1]))


def is_near_gathering(config: Configuration, range_: float, tol: float = EPS_GEOM) -> bool:
    """True iff every pair of robots is within `range_` (diameter <= range_)"""
    if range_ <= 0:
        raise GeometryError(f"near-gathering range must be positive, got {range_}")
    return diameter(config) <= range_ + tol


# Smallest enclosing circle: randomized incremental (move-to-front) construction.

def _circle_two(a: np.ndarray, b: np.ndarray) -> Tuple[float, float, float]:
    cx, cy = (a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0
    return cx, cy, max(math.hypot(cx - a[0], cy - a[1]), math.hypot(cx - b[0], cy - b[1]))


def _circumcircle(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> Optional[Tuple[float, float, float]]:
    ox = (min(a[0], b[0], c[0]) + max(a[0], b[0], c[0])) / 2.0
    oy = (min(a[1], b[1], c[1]) + max(a[1], b[1], c[1])) / 2.0
    ax, ay = a[0] - ox, a[1] - oy
    bx, by = b[0] - ox, b[1] - oy
    cx, cy = c[0] - ox, c[1] - oy
    d = (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by)) * 2.0
    if d == 0.0:
        return None
    x = ox + ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay)
              + (cx * cx + cy * cy) * (ay - by)) / d
    y = oy + ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx)
              + (cx * cx + cy * cy) * (bx - ax)) / d
    radius = max(math.hypot(x - a[0], y - a[1]), math.hypot(x - b[0], y - b[1]),
                 math.hypot(x - c[0], y - c[1]))
    return x, y, radius


def _in_circle(p: np.ndarray, c: Optional[Tuple[float, float, float]]) -> bool:
    return c is not None and math.hypot(p[0] - c[0], p[1] - c[1]) <= c[2] * (1 + 1e-14)


def _circle_with_two(points: np.ndarray, p: np.ndarray, q: np.ndarray) -> Tuple[float, float, float]:
    base = _circle_two(p, q)
    left = None
    right = None
    for r in points:
        if _in_circle(r, base):
            continue
        side = cross(p, q, r)
        circ = _circumcircle(p, q, r)
        if circ is None:
            continue
        centre = np.array(circ[:2])
        if side > 0.0 and (left is None or cross(p, q, centre) > cross(p, q, np.array(left[:2]))):
            left = circ
        elif side < 0.0 and (right is None or cross(p, q, centre) < cross(p, q, np.array(right[:2]))):
            right = circ
    if left is None and right is None:
        return base
    if left is None:
        return right
    if right is None:
        return left
    return left if left[2] <= right[2] else right


def _circle_with_one(points: np.ndarray, p: np.ndarray) -> Tuple[float, float, float]:
    circ = (float(p[0]), float(p[1]), 0.0)
    for i, q in enumerate(points):
        if not _in_circle(q, circ):
            if circ[2] == 0.0:
                circ = _circle_two(p, q)
            else:
                circ = _circle_with_two(points[: i + 1], p, q)
    return circ


def smallest_enclosing_circle(points: Union[Configuration, np.ndarray, Sequence[PointLike]],
                              seed: int = 0) -> Circle:
    """Minimal circle containing all points; the shuffle is seeded so results are reproducible"""
    pts = _as_array(points)
    if pts.shape[0] == 0:
        raise GeometryError("smallest enclosing circle of an empty point set")
    order = np.random.default_rng(seed).permutation(pts.shape[0])
    shuffled = pts[order]
    circ = None
    for i, p in enumerate(shuffled):
        if circ is None or not _in_circle(p, circ):
            circ = _circle_with_one(shuffled[: i + 1], p)
    return Circle(Point(float(circ[0]), float(circ[1])), float(circ[2]))


def _collinear(pts: np.ndarray, tol: float) -> bool:
    if pts.shape[0] < 3:
        return True
    spread = pts - pts[0]
    far = int(np.argmax(np.sum(spread * spread, axis=1)))
    direction = spread[far]
    length = float(np.hypot(*direction))
    if length <= tol:
        return True
    normal_offsets = np.abs(spread[:, 0] * direction[1] - spread[:, 1] * direction[0]) / length
    return bool(np.all(normal_offsets <= tol))


def convex_hull(config: Union[Configuration, np.ndarray], tol: float = EPS_GEOM) -> Tuple[int, ...]:
    """
    Counterclockwise hull vertex indices, starting at the lowest (y, x) vertex.
    Collinear non-extreme points are excluded.
    """
    pts = _as_array(config)
    n = pts.shape[0]
    if n == 0:
        raise GeometryError("convex hull of an empty configuration")
    if _collinear(pts, tol):
        order = np.lexsort((pts[:, 1], pts[:, 0]))
        first, last = int(order[0]), int(order[-1])
        if np.hypot(*(pts[last] - pts[first])) <= tol:
            return (first,)
        return tuple(sorted((first, last), key=lambda k: (pts[k, 1], pts[k, 0])))
    vertices = [int(v) for v in ConvexHull(pts).vertices]
    start = min(range(len(vertices)), key=lambda k: (pts[vertices[k], 1], pts[vertices[k], 0]))
    return tuple(vertices[start:] + vertices[:start])


def connectivity_boundary(config: Configuration, tol: float = EPS_GEOM) -> BoundaryCycle:
    """
    Outer face of the unit disc graph, walked counterclockwise.

    The walk starts at the lowest (y, then x) robot with the reversed incoming
    edge pointing along -x, and always takes the neighbor edge with the
    smallest counterclockwise turn; among equal angles the longer edge wins.
    """
    graph = disc_graph(config, 1.0, tol)
    if not is_connected(graph):
        raise GeometryError("unit disc graph is disconnected; no Connectivity-Boundary")
    pts = config.positions
    if config.n == 1:
        return BoundaryCycle((0,), pts[[0]], degenerate=True)

    start = int(np.lexsort((pts[:, 0], pts[:, 1]))[0])

    def next_vertex(current: int, back: np.ndarray) -> int:
        back_angle = math.atan2(back[1], back[0])
        best, best_turn, best_len = -1, math.inf, -1.0
        for w in graph.neighbors[current]:
            delta = pts[w] - pts[current]
            length = math.hypot(delta[0], delta[1])
            if length <= tol:
                continue
            turn = (math.atan2(delta[1], delta[0]) - back_angle) % (2.0 * math.pi)
            if turn <= tol or turn >= 2.0 * math.pi - tol:
                turn = 2.0 * math.pi
            if turn < best_turn - tol or (abs(turn - best_turn) <= tol and length > best_len):
                best, best_turn, best_len = w, turn, length
        if best < 0:
            raise GeometryError(f"robot {current} has no distinct neighbor")
        return best

    sequence = [start]
    back = np.array([-1.0, 0.0])
    first = next_vertex(start, back)
    previous, current = start, first
    limit = 2 * len(graph.edges()) + 2
    while True:
        if len(sequence) > limit:
            raise GeometryError("outer-face walk did not close")
        sequence.append(current)
        nxt = next_vertex(current, pts[previous] - pts[current])
        if current == start and nxt == first:
            sequence.pop()
            break
        previous, current = current, nxt

    indices = tuple(sequence)
    positions = pts[list(indices)].copy()
    positions.setflags(write=False)
    seen = {}
    for idx in indices:
        seen[idx] = seen.get(idx, 0) + 1
    pinched = tuple(sorted(i for i, count in seen.items() if count > 1))
    degenerate = len(set(indices)) <= 2 or abs(polygon_area(positions)) <= tol
    if pinched and not degenerate:
        logger.debug(f"Connectivity-Boundary passes robots {list(pinched)} more than once")
    return BoundaryCycle(indices, positions, degenerate=degenerate, pinched=pinched)


def is_convex_cycle(cycle: BoundaryCycle, tol: float = EPS_GEOM) -> bool:
    """No right turns along the cycle; collinear robots are allowed"""
    poly = cycle.positions
    m = poly.shape[0]
    if cycle.degenerate or m < 3:
        return True
    total_turn = 0.0
    for k in range(m):
        a, b, c = poly[k - 1], poly[k], poly[(k + 1) % m]
        if cross(a, b, c) < -tol:
            return False
        u, v = b - a, c - b
        if np.hypot(*u) > tol and np.hypot(*v) > tol:
            total_turn += math.atan2(u[0] * v[1] - u[1] * v[0], float(np.dot(u, v)))
    # a convex simple polygon turns exactly once
    return abs(total_turn - 2.0 * math.pi) <= 1e-6


def _line_sites(polygon: np.ndarray, tol: float) -> Tuple[np.ndarray, np.ndarray]:
    """Inward unit normals and offsets (n . c = offset on the line) for each edge"""
    normals, offsets = [], []
    m = polygon.shape[0]
    for k in range(m):
        a, b = polygon[k], polygon[(k + 1) % m]
        d = b - a
        length = math.hypot(d[0], d[1])
        if length <= tol:
            continue
        normal = np.array([-d[1], d[0]]) / length
        if normals and np.allclose(normal, normals[-1], atol=1e-12) and \
                abs(float(normal @ a) - offsets[-1]) <= tol:
            continue
        normals.append(normal)
        offsets.append(float(normal @ a))
    return np.array(normals).reshape(-1, 2), np.array(offsets)


def _candidates_lll(normals: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    m = normals.shape[0]
    if m < 3:
        return np.empty((0, 2))
    i, j, k = np.array([t for t in _triples(m)]).T
    rows = np.stack([
        np.column_stack([normals[i], -np.ones(len(i))]),
        np.column_stack([normals[j], -np.ones(len(j))]),
        np.column_stack([normals[k], -np.ones(len(k))]),
    ], axis=1)
    rhs = np.column_stack([offsets[i], offsets[j], offsets[k]])
    det = np.linalg.det(rows)
    ok = np.abs(det) > 1e-12
    if not np.any(ok):
        return np.empty((0, 2))
    sol = np.linalg.solve(rows[ok], rhs[ok][..., None])[..., 0]
    return sol[sol[:, 2] > 0, :2]


def _triples(m: int) -> Iterator[Tuple[int, int, int]]:
    for a in range(m):
        for b in range(a + 1, m):
            for c in range(b + 1, m):
                yield a, b, c


def _positive_roots(qa: np.ndarray, qb: np.ndarray, qc: np.ndarray) -> List[np.ndarray]:
    """Real roots of qa t^2 + 2 qb t + qc = 0, as two arrays (NaN where absent)"""
    roots = []
    linear = np.abs(qa) <= 1e-14
    disc = qb * qb - qa * qc
    sqrt_disc = np.sqrt(np.where(disc >= 0, disc, np.nan))
    with np.errstate(divide="ignore", invalid="ignore"):
        roots.append(np.where(linear, np.where(np.abs(qb) > 1e-14, -qc / (2 * qb), np.nan),
                              (-qb + sqrt_disc) / qa))
        roots.append(np.where(linear, np.nan, (-qb - sqrt_disc) / qa))
    return roots


def _candidates_pll(robots: np.ndarray, normals: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Centres touching one robot and two edge lines"""
    m = normals.shape[0]
    if m < 2 or robots.shape[0] == 0:
        return np.empty((0, 2))
    pairs = np.array([(a, b) for a in range(m) for b in range(a + 1, m)])
    na, nb = normals[pairs[:, 0]], normals[pairs[:, 1]]
    oa, ob = offsets[pairs[:, 0]], offsets[pairs[:, 1]]
    det = na[:, 0] * nb[:, 1] - na[:, 1] * nb[:, 0]
    out = []
    general = np.abs(det) > 1e-12
    if np.any(general):
        na_g, nb_g, oa_g, ob_g, det_g = na[general], nb[general], oa[general], ob[general], det[general]
        # centre(r) = c0 + r v solves na.c = oa + r, nb.c = ob + r
        c0 = np.column_stack([(oa_g * nb_g[:, 1] - ob_g * na_g[:, 1]) / det_g,
                              (na_g[:, 0] * ob_g - nb_g[:, 0] * oa_g) / det_g])
        v = np.column_stack([(nb_g[:, 1] - na_g[:, 1]) / det_g,
                             (na_g[:, 0] - nb_g[:, 0]) / det_g])
        w = c0[None, :, :] - robots[:, None, :]
        qa = np.broadcast_to(np.sum(v * v, axis=1) - 1.0, w.shape[:2])
        qb = np.sum(w * v[None, :, :], axis=2)
        qc = np.sum(w * w, axis=2)
        for r in _positive_roots(qa, qb, qc):
            keep = np.isfinite(r) & (r > 0)
            centres = c0[None, :, :] + r[..., None] * v[None, :, :]
            out.append(centres[keep])
    opposite = (~general) & (np.einsum("ij,ij->i", na, nb) < 0)
    if np.any(opposite):
        na_o, oa_o, ob_o = na[opposite], oa[opposite], ob[opposite]
        # parallel edges facing each other: centres on the mid-line
        radius = -(oa_o + ob_o) / 2.0
        valid = radius > 0
        if np.any(valid):
            na_o, oa_o, radius = na_o[valid], oa_o[valid], radius[valid]
            base = na_o * (oa_o + radius)[:, None]
            tangent = np.column_stack([-na_o[:, 1], na_o[:, 0]])
            w = base[None, :, :] - robots[:, None, :]
            qb = np.sum(w * tangent[None, :, :], axis=2)
            qc = np.sum(w * w, axis=2) - radius[None, :] ** 2
            qa = np.ones_like(qb)
            for t in _positive_roots(qa, qb, qc):
                keep = np.isfinite(t)
                centres = base[None, :, :] + t[..., None] * tangent[None, :, :]
                out.append(centres[keep])
    if not out:
        return np.empty((0, 2))
    return np.concatenate(out, axis=0)


def _candidates_ppl(robots: np.ndarray, pairs: np.ndarray,
                    normals: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Centres on the bisector of two robots that also touch an edge line"""
    if pairs.shape[0] == 0 or normals.shape[0] == 0:
        return np.empty((0, 2))
    p, q = robots[pairs[:, 0]], robots[pairs[:, 1]]
    mid = (p + q) / 2.0
    d = q - p
    half = np.hypot(d[:, 0], d[:, 1]) / 2.0
    nonzero = half > 0
    mid, d, half = mid[nonzero], d[nonzero], half[nonzero]
    u = np.column_stack([-d[:, 1], d[:, 0]]) / (2.0 * half[:, None])
    a = mid @ normals.T - offsets[None, :]
    b = u @ normals.T
    qa = b * b - 1.0
    qb = a * b
    qc = a * a - (half * half)[:, None]
    out = []
    for t in _positive_roots(qa, qb, qc):
        keep = np.isfinite(t) & (a + b * np.nan_to_num(t) > 0)
        centres = mid[:, None, :] + np.nan_to_num(t)[..., None] * u[:, None, :]
        out.append(centres[keep])
    return np.concatenate(out, axis=0) if out else np.empty((0, 2))


def largest_empty_circle(config: Configuration, cycle: BoundaryCycle,
                         tol: float = EPS_GEOM) -> Circle:
    """
    Largest circle inside the boundary polygon with no robot in its interior.

    Candidate centres: Voronoi vertices of the robots, centres touching two
    robots and an edge (on Voronoi ridges), one robot and two edges, and
    three edges. Every candidate is scored by min(robot distance, boundary
    distance), so the result is always a valid empty circle.
    """
    polygon = np.asarray(cycle.positions, dtype=float)
    if cycle.degenerate or abs(polygon_area(polygon)) <= tol:
        return Circle(Point.of(polygon[0]), 0.0)
    if polygon_area(polygon) < 0:
        polygon = polygon[::-1]
    robots = np.unique(config.positions, axis=0)
    normals, offsets = _line_sites(polygon, tol)

    candidates = [_candidates_lll(normals, offsets), _candidates_pll(robots, normals, offsets)]
    if robots.shape[0] >= 3 and not _collinear(robots, tol):
        vor = Voronoi(robots)
        candidates.append(vor.vertices)
        pairs = np.asarray(vor.ridge_points, dtype=int)
    else:
        pairs = np.array([(a, b) for a in range(robots.shape[0])
                          for b in range(a + 1, robots.shape[0])], dtype=int).reshape(-1, 2)
    candidates.append(_candidates_ppl(robots, pairs, normals, offsets))
    centres = np.concatenate([c.reshape(-1, 2) for c in candidates], axis=0)
    centres = centres[np.all(np.isfinite(centres), axis=1)]
    if centres.shape[0] == 0:
        return Circle(Point.of(polygon[0]), 0.0)

    robot_dist, _ = cKDTree(robots).query(centres)
    order = np.argsort(-robot_dist, kind="stable")
    best_radius, best_centre = 0.0, polygon[0]
    chunk = 512
    for start in range(0, order.shape[0], chunk):
        block = order[start:start + chunk]
        if robot_dist[block[0]] <= best_radius:
            break
        locations = points_in_polygon(centres[block], polygon, tol)
        inside = np.array([loc is Location.INSIDE for loc in locations])
        if not np.any(inside):
            continue
        block = block[inside]
        radii = np.minimum(robot_dist[block], boundary_distances(centres[block], polygon))
        k = int(np.argmax(radii))
        if radii[k] > best_radius:
            best_radius, best_centre = float(radii[k]), centres[block[k]]
    return Circle(Point.of(best_centre), best_radius)


def has_delta_hole(config: Configuration, delta: float, tol: float = EPS_GEOM) -> bool:
    """True iff an empty circle of diameter >= delta fits inside the Connectivity-Boundary"""
    if delta <= 0:
        raise GeometryError(f"hole diameter must be positive, got {delta}")
    cycle = connectivity_boundary(config, tol)
    return largest_empty_circle(config, cycle, tol).diameter >= delta - tol
