"""
SwarmWave Symmetry

Symmetricity of point sets and the symmetry group of a configuration:
rotations about the smallest-enclosing-circle centre paired with the index
permutation that restores the configuration tuple. Also provides the
executable equivariance and symmetry-preservation checks used by the
auditors.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from core.errors import AmbiguousMatchError, SizeMismatchError, SymmetryError
from core.geometry import Configuration, Point, smallest_enclosing_circle

# Configure logging
logger = logging.getLogger(__name__)

# Matching tolerance; looser than EPS_GEOM because positions pick up round-off over many rounds
SYMMETRY_TOL = 1e-6

TWO_PI = 2.0 * math.pi


def _normalize_angle(angle: float) -> float:
    value = math.fmod(angle, TWO_PI)
    if value < 0:
        value += TWO_PI
    if value >= TWO_PI - 1e-12:
        value = 0.0
    return value


@dataclass(frozen=True)
class Rotation:
    """Rotation by `angle` about `center`"""

    angle: float
    center: Point = Point(0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "angle", _normalize_angle(self.angle))

    def matrix(self) -> np.ndarray:
        c, s = math.cos(self.angle), math.sin(self.angle)
        return np.array([[c, -s], [s, c]])

    def apply(self, points: np.ndarray) -> np.ndarray:
        centre = self.center.as_array()
        return (np.asarray(points, dtype=float) - centre) @ self.matrix().T + centre


@dataclass(frozen=True)
class Permutation:
    """Bijection on robot indices, stored as a tuple: i -> mapping[i]"""

    mapping: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "mapping", tuple(int(k) for k in self.mapping))
        if sorted(self.mapping) != list(range(len(self.mapping))):
            raise SymmetryError(f"not a permutation: {self.mapping}")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    def __len__(self) -> int:
        return len(self.mapping)

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.mapping)
        for i, k in enumerate(self.mapping):
            inv[k] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == k for i, k in enumerate(self.mapping))


@dataclass(frozen=True)
class SymmetryElement:
    """
    A potential symmetry: rotate every position, then reindex.

    apply_symmetry(g, z)[i] = rotation(z[permutation[i]]); g fixes z when this
    reproduces z.
    """

    rotation: Rotation
    permutation: Permutation

    @classmethod
    def identity(cls, n: int, center: Point = Point(0.0, 0.0)) -> "SymmetryElement":
        return cls(Rotation(0.0, center), Permutation.identity(n))

    @property
    def angle(self) -> float:
        return self.rotation.angle

    def to_dict(self) -> dict:
        return {"angle": self.angle, "permutation": list(self.permutation.mapping)}


@dataclass(frozen=True)
class SymmetryGroup:
    """Detected symmetries of one configuration, sorted by angle"""

    elements: Tuple[SymmetryElement, ...]
    center: Point = Point(0.0, 0.0)

    @property
    def order(self) -> int:
        return len(self.elements)

    def angles(self) -> List[float]:
        return [e.angle for e in self.elements]


@dataclass
class SymmetryReport:
    """Outcome of comparing the symmetries before and after a round"""

    gained: int
    lost: int
    preserved: bool
    order_before: int
    order_after: int
    angles_gained: List[float] = field(default_factory=list)
    angles_lost: List[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "gained": self.gained,
            "lost": self.lost,
            "preserved": self.preserved,
            "order_before": self.order_before,
            "order_after": self.order_after,
        }


def _distinct_points(points: np.ndarray, tol: float) -> np.ndarray:
    """Merge points closer than tol, keeping the first representative"""
    if points.shape[0] < 2:
        return points
    tree = cKDTree(points)
    keep = np.ones(points.shape[0], dtype=bool)
    for i in range(points.shape[0]):
        if not keep[i]:
            continue
        for j in tree.query_ball_point(points[i], tol):
            if j > i:
                keep[j] = False
    return points[keep]


def _radius_classes(radii: np.ndarray, tol: float) -> List[int]:
    """Sizes of the equal-radius classes"""
    ordered = np.sort(radii)
    sizes = [1]
    for a, b in zip(ordered[:-1], ordered[1:]):
        if b - a <= tol:
            sizes[-1] += 1
        else:
            sizes.append(1)
    return sizes


def _divisors_desc(value: int) -> List[int]:
    return [d for d in range(value, 0, -1) if value % d == 0]


def _match(points: np.ndarray, tree: cKDTree, center: Point, angle: float,
           tol: float, strict: bool) -> Optional[np.ndarray]:
    """
    Greedy nearest-neighbor matching of the rotated points onto the originals.

    Returns target indices (rotation(points[i]) ~ points[target[i]]) or None
    when some robot has no partner within tol or the matching is not a
    bijection. Two partners within tol raise AmbiguousMatchError if strict.
    """
    n = points.shape[0]
    rotated = Rotation(angle, center).apply(points)
    if n == 1:
        dist, idx = tree.query(rotated, k=1)
        return np.atleast_1d(idx) if float(np.atleast_1d(dist)[0]) <= tol else None
    dist, idx = tree.query(rotated, k=2)
    for i in range(n):
        if dist[i, 1] <= tol:
            if strict:
                raise AmbiguousMatchError(i, idx[i], angle)
            return None
    if np.any(dist[:, 0] > tol):
        return None
    target = idx[:, 0]
    if len(set(int(t) for t in target)) != n:
        return None
    return target


def symmetricity(points, tol: float = SYMMETRY_TOL, center_rule: bool = True) -> int:
    """
    Largest m such that rotating by 2*pi/m about the smallest enclosing circle
    centre maps the point set onto itself; 1 when a point sits on the centre.

    With center_rule=False a point on the centre is ignored, which gives the
    order of the rotation group of the set.
    """
    if isinstance(points, Configuration):
        pts = points.positions
    else:
        pts = np.asarray([Point.of(p).as_array() for p in points], dtype=float).reshape(-1, 2)
    if pts.shape[0] == 0:
        raise SymmetryError("symmetricity of an empty point set")
    pts = _distinct_points(pts, tol)
    if pts.shape[0] == 1:
        return 1
    center = smallest_enclosing_circle(pts).center
    radii = np.hypot(pts[:, 0] - center.x, pts[:, 1] - center.y)
    on_centre = radii <= tol
    if np.any(on_centre):
        if center_rule or np.all(on_centre):
            return 1
        pts, radii = pts[~on_centre], radii[~on_centre]
    classes = _radius_classes(radii, tol)
    common = reduce(math.gcd, classes)
    tree = cKDTree(pts)
    for m in _divisors_desc(common):
        if m == 1:
            break
        if _match(pts, tree, center, TWO_PI / m, tol, strict=False) is not None:
            return m
    return 1


def detect_symmetries(config: Configuration, tol: float = SYMMETRY_TOL) -> SymmetryGroup:
    """All rotation/permutation pairs fixing the configuration, sorted by angle"""
    pts = config.positions
    center = smallest_enclosing_circle(pts).center
    tree = cKDTree(pts)
    m = symmetricity(pts, tol, center_rule=False)
    elements = []
    for j in range(m):
        angle = TWO_PI * j / m
        target = _match(pts, tree, center, angle, tol, strict=True)
        if target is None:
            if j == 0:
                raise SymmetryError("identity rotation failed to match the configuration")
            logger.debug(f"rotation {angle:.6f} rejected during detection")
            continue
        kappa = Permutation(tuple(int(t) for t in target)).inverse()
        elements.append(SymmetryElement(Rotation(angle, center), kappa))
    elements.sort(key=lambda e: e.angle)
    return SymmetryGroup(tuple(elements), center)


def apply_symmetry(elem: SymmetryElement, config: Configuration) -> Configuration:
    if len(elem.permutation) != config.n:
        raise SizeMismatchError(
            f"permutation of size {len(elem.permutation)} applied to {config.n} robots"
        )
    rotated = elem.rotation.apply(config.positions)
    return config.with_positions(rotated[list(elem.permutation.mapping)])


def compose(g: SymmetryElement, h: SymmetryElement) -> SymmetryElement:
    """The element acting as h first, then g"""
    if len(g.permutation) != len(h.permutation):
        raise SizeMismatchError("cannot compose elements acting on different swarm sizes")
    if g.rotation.center.distance_to(h.rotation.center) > SYMMETRY_TOL:
        raise SymmetryError("cannot compose rotations about different centres")
    kappa = tuple(h.permutation.mapping[k] for k in g.permutation.mapping)
    return SymmetryElement(
        Rotation(g.angle + h.angle, g.rotation.center),
        Permutation(kappa),
    )


def check_equivariance(step: Callable[[Configuration], Configuration],
                       config: Configuration, elem: SymmetryElement) -> float:
    """max_i || step(g z)_i - (g step(z))_i ||"""
    lhs = step(apply_symmetry(elem, config)).positions
    rhs = apply_symmetry(elem, step(config)).positions
    return float(np.max(np.hypot(lhs[:, 0] - rhs[:, 0], lhs[:, 1] - rhs[:, 1])))


def _angle_set(config: Configuration, tol: float) -> List[float]:
    try:
        return detect_symmetries(config, tol).angles()
    except AmbiguousMatchError:
        # robots share positions, so only the position set has symmetries
        m = symmetricity(config.positions, tol, center_rule=False)
        return [TWO_PI * j / m for j in range(m)]


def _unmatched(angles: Sequence[float], reference: Sequence[float]) -> List[float]:
    remaining = list(reference)
    missing = []
    for a in angles:
        hit = next((k for k, b in enumerate(remaining)
                    if abs(math.remainder(a - b, TWO_PI)) <= 1e-9), None)
        if hit is None:
            missing.append(a)
        else:
            remaining.pop(hit)
    return missing


def symmetry_preserved(before: Configuration, after: Configuration,
                       tol: float = SYMMETRY_TOL) -> SymmetryReport:
    if before.n != after.n:
        raise SizeMismatchError(f"configurations of size {before.n} and {after.n}")
    angles_before = _angle_set(before, tol)
    angles_after = _angle_set(after, tol)
    gained = _unmatched(angles_after, angles_before)
    lost = _unmatched(angles_before, angles_after)
    return SymmetryReport(
        gained=len(gained),
        lost=len(lost),
        preserved=not gained and not lost,
        order_before=len(angles_before),
        order_after=len(angles_after),
        angles_gained=gained,
        angles_lost=lost,
    )


def _is_regular_polygon(pts: np.ndarray, center: np.ndarray, tol: float) -> bool:
    m = pts.shape[0]
    radii = np.hypot(pts[:, 0] - center[0], pts[:, 1] - center[1])
    if m == 1:
        return True
    if np.min(radii) <= tol or np.ptp(radii) > tol:
        return False
    angles = np.sort(np.arctan2(pts[:, 1] - center[1], pts[:, 0] - center[0]))
    gaps = np.diff(np.concatenate([angles, [angles[0] + TWO_PI]]))
    return bool(np.all(np.abs(gaps * radii[0] - TWO_PI / m * radii[0]) <= tol * m))


def regular_partition(points, m: int, tol: float = SYMMETRY_TOL) -> Optional[List[Tuple[int, ...]]]:
    """
    Brute-force search for a partition into regular m-gons sharing the
    smallest enclosing circle centre. Exponential; meant for n <= 8.
    """
    pts = np.asarray([Point.of(p).as_array() for p in points], dtype=float).reshape(-1, 2)
    n = pts.shape[0]
    if m < 1 or n % m != 0:
        return None
    if m == 1:
        return [(i,) for i in range(n)]
    center = smallest_enclosing_circle(pts).center.as_array()

    def search(remaining: Tuple[int, ...]) -> Optional[List[Tuple[int, ...]]]:
        if not remaining:
            return []
        head, rest = remaining[0], remaining[1:]
        for combo in itertools.combinations(rest, m - 1):
            group = (head,) + combo
            if not _is_regular_polygon(pts[list(group)], center, tol):
                continue
            tail = search(tuple(k for k in rest if k not in combo))
            if tail is not None:
                return [group] + tail
        return None

    return search(tuple(range(n)))
