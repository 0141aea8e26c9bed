"""
SwarmWave Contracting Wave

Protocol for swarms with a convex Connectivity-Boundary and no holes:
- boundary robots run epsilon-Go-to-the-Middle along the boundary cycle
- wave robots (in the ring between the boundary and its next two images)
  are pushed inward, old-ring robots into the outer half of the new ring,
  new-ring robots into its inner half
- inner robots stay put

Every round is invertible by an external observer; invert_round is that
inverter.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import solve_circulant

from core.errors import GeometryError, InversionError, PreconditionError, ProtocolError
from core.geometry import (
    EPS_GEOM,
    BoundaryCycle,
    Configuration,
    Location,
    PointLike,
    Point,
    connectivity_boundary,
    is_convex_cycle,
    largest_empty_circle,
    points_in_polygon,
)
from core.wave_segments import (
    Degeneracy,
    SegCoord,
    WaveSegment,
    from_seg_coords,
    segment_twisted,
    to_seg_coords,
)

# Configure logging
logger = logging.getLogger(__name__)

WAVE_VIEWING_RANGE = 2.0 + math.sqrt(2.0)
DEFAULT_WAVE_EPSILON = 0.3

# Hole diameters: the start-configuration requirement and the per-round bound
HOLE_PRECONDITION_DELTA = 1.0
HOLE_AUDIT_DELTA = 2.24

# Two candidate targets (or pre-images) of one robot must agree this closely
TARGET_AGREEMENT_TOL = 1e-9


@dataclass
class WaveParams:
    epsilon: float = DEFAULT_WAVE_EPSILON
    viewing_range: float = WAVE_VIEWING_RANGE
    hole_check_delta: float = HOLE_PRECONDITION_DELTA
    audit_hole_delta: float = HOLE_AUDIT_DELTA

    def __post_init__(self):
        if not 0.0 < self.epsilon < 0.5:
            raise ProtocolError(f"wave epsilon must lie in (0, 0.5), got {self.epsilon}")
        if self.viewing_range <= 0:
            raise ProtocolError(f"viewing range must be positive, got {self.viewing_range}")
        if self.hole_check_delta <= 0 or self.audit_hole_delta <= 0:
            raise ProtocolError("hole diameters must be positive")


class RoleKind(Enum):
    BOUNDARY = "boundary"
    WAVE = "wave"
    INNER = "inner"


class WaveTier(Enum):
    """Which ring a wave robot sits in: OUTER is W^t, INNER is W^(t+1)"""
    OUTER = "outer"
    INNER = "inner"


@dataclass(frozen=True)
class RobotRole:
    """
    Role of one robot in one round. For boundary robots `segment` is the
    position on the boundary cycle; for wave robots the segment index.
    """

    kind: RoleKind
    segment: Optional[int] = None
    tier: Optional[WaveTier] = None

    @classmethod
    def boundary(cls, position: int) -> "RobotRole":
        return cls(RoleKind.BOUNDARY, position)

    @classmethod
    def wave(cls, k: int, tier: WaveTier) -> "RobotRole":
        return cls(RoleKind.WAVE, k, tier)

    @classmethod
    def inner(cls) -> "RobotRole":
        return cls(RoleKind.INNER)

    @property
    def label(self) -> str:
        if self.kind is RoleKind.WAVE:
            return f"wave-{self.tier.value}:{self.segment}"
        if self.kind is RoleKind.BOUNDARY:
            return f"boundary:{self.segment}"
        return "inner"

    @classmethod
    def from_label(cls, label: str) -> "RobotRole":
        head, _, index = label.partition(":")
        if head == "inner":
            return cls.inner()
        if head == "boundary":
            return cls.boundary(int(index))
        if head.startswith("wave-"):
            return cls.wave(int(index), WaveTier(head[len("wave-"):]))
        raise ValueError(f"unknown role label '{label}'")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "segment": self.segment,
            "tier": self.tier.value if self.tier else None,
        }


@dataclass
class WaveRegions:
    """The boundary, its next two images, and the two rings of wave segments"""

    b0: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    segments_old: Tuple[WaveSegment, ...]
    segments_new: Tuple[WaveSegment, ...]

    @property
    def m(self) -> int:
        return self.b0.shape[0]


@dataclass
class RoundPlan:
    cycle: BoundaryCycle
    regions: WaveRegions
    roles: List[RobotRole]
    targets: np.ndarray


@dataclass
class CornerDistance:
    max_distance: float
    bound: float
    applicable: bool = True

    @property
    def holds(self) -> bool:
        return not self.applicable or self.max_distance <= self.bound + EPS_GEOM


def _check_epsilon(epsilon: float):
    if not 0.0 <= epsilon < 0.5:
        raise ProtocolError(f"epsilon-GtM needs epsilon in [0, 0.5), got {epsilon}")


def _egtm(positions: np.ndarray, epsilon: float) -> np.ndarray:
    neighbours = np.roll(positions, 1, axis=0) + np.roll(positions, -1, axis=0)
    return epsilon * neighbours / 2.0 + (1.0 - epsilon) * positions


def egtm_step(cycle: BoundaryCycle, epsilon: float) -> BoundaryCycle:
    """b_k -> eps (b_(k-1) + b_(k+1)) / 2 + (1 - eps) b_k for all k at once"""
    _check_epsilon(epsilon)
    if len(cycle) == 0:
        raise GeometryError("epsilon-GtM step on an empty cycle")
    return cycle.with_positions(_egtm(cycle.positions, epsilon))


def egtm_invert(next_cycle: BoundaryCycle, epsilon: float) -> BoundaryCycle:
    """Solve the circulant system of the step; diagonally dominant for eps < 0.5"""
    _check_epsilon(epsilon)
    m = len(next_cycle)
    if m == 0:
        raise GeometryError("epsilon-GtM inversion of an empty cycle")
    unit = np.zeros((m, 1))
    unit[0, 0] = 1.0
    column = _egtm(unit, epsilon)[:, 0]
    try:
        previous = solve_circulant(column, next_cycle.positions, singular="raise")
    except np.linalg.LinAlgError as e:
        raise ProtocolError(f"epsilon-GtM system is singular for m={m}, epsilon={epsilon}: {e}") from e
    return next_cycle.with_positions(np.real(previous))


def _ring(outer: np.ndarray, inner: np.ndarray) -> Tuple[WaveSegment, ...]:
    m = outer.shape[0]
    return tuple(
        WaveSegment(k, outer[k], outer[(k + 1) % m], inner[(k + 1) % m], inner[k])
        for k in range(m)
    )


def wave_regions(cycle: BoundaryCycle, epsilon: float, tol: float = EPS_GEOM) -> WaveRegions:
    _check_epsilon(epsilon)
    if cycle.degenerate or len(cycle) < 3:
        raise PreconditionError("non_degenerate_boundary", f"cycle of {len(cycle)} robots encloses no area")
    if not is_convex_cycle(cycle, tol):
        raise PreconditionError("convex_boundary", "the Connectivity-Boundary has a reflex corner")
    b0 = np.array(cycle.positions, dtype=float)
    b1 = _egtm(b0, epsilon)
    b2 = _egtm(b1, epsilon)
    old, new = _ring(b0, b1), _ring(b1, b2)
    for seg in old + new:
        if segment_twisted(seg):
            raise PreconditionError("segments_not_twisted", f"segment {seg.k} is twisted")
    return WaveRegions(b0, b1, b2, old, new)


def wave_step(role: RobotRole, p: PointLike, regions: WaveRegions) -> np.ndarray:
    """
    Old-ring robots at (d, s) move to (d/2, s) of the matching new segment,
    new-ring robots to (1/2 + d/2, s).
    """
    if role.kind is not RoleKind.WAVE:
        raise ProtocolError(f"wave_step called for a {role.kind.value} robot")
    k = role.segment
    target_seg = regions.segments_new[k]
    if role.tier is WaveTier.OUTER:
        coord = to_seg_coords(regions.segments_old[k], p)
        depth = coord.d / 2.0
    else:
        coord = to_seg_coords(target_seg, p)
        depth = 0.5 + coord.d / 2.0
    return from_seg_coords(target_seg, SegCoord(depth, coord.s))


def _memberships(points: np.ndarray, segments: Sequence[WaveSegment],
                 tol: float) -> List[List[WaveSegment]]:
    hits: List[List[WaveSegment]] = [[] for _ in range(points.shape[0])]
    if points.shape[0] == 0:
        return hits
    for seg in segments:
        corners = seg.corners
        lo, hi = corners.min(axis=0) - tol, corners.max(axis=0) + tol
        near = np.nonzero(np.all((points >= lo) & (points <= hi), axis=1))[0]
        if near.size == 0:
            continue
        for slot, loc in zip(near, points_in_polygon(points[near], corners, tol)):
            if loc is not Location.OUTSIDE:
                hits[slot].append(seg)
    return hits


def _agree(results: List[Tuple[WaveSegment, np.ndarray]], robot: int, error_type) -> np.ndarray:
    """First candidate wins; candidates from segments with area must agree with it"""
    winner = results[0][1]
    for seg, value in results[1:]:
        if seg.degeneracy is Degeneracy.FULLY or results[0][0].degeneracy is Degeneracy.FULLY:
            continue
        gap = float(np.hypot(*(value - winner)))
        if gap > TARGET_AGREEMENT_TOL:
            raise error_type(
                f"robot {robot}: segments {results[0][0].k} and {seg.k} disagree by {gap:.3e}"
            )
    return winner


def plan_round(config: Configuration, params: Optional[WaveParams] = None,
               check_holes: bool = True, tol: float = EPS_GEOM) -> RoundPlan:
    """Boundary, wave regions, roles and targets of one round"""
    params = params or WaveParams()
    try:
        cycle = connectivity_boundary(config, tol)
    except GeometryError as e:
        raise PreconditionError("connected", str(e)) from e
    if cycle.pinched and not cycle.degenerate:
        raise PreconditionError("simple_boundary", f"robots {list(cycle.pinched)} pinch the boundary")
    regions = wave_regions(cycle, params.epsilon, tol)
    if check_holes:
        hole = largest_empty_circle(config, cycle, tol)
        if hole.diameter > params.audit_hole_delta + tol:
            raise PreconditionError(
                "hole_free",
                f"empty circle of diameter {hole.diameter:.4f} > {params.audit_hole_delta}",
            )

    pts = config.positions
    roles: List[Optional[RobotRole]] = [None] * config.n
    targets = np.array(pts, dtype=float)
    for position, index in enumerate(cycle.indices):
        roles[index] = RobotRole.boundary(position)
        targets[index] = regions.b1[position]

    others = [i for i in range(config.n) if roles[i] is None]
    sub = pts[others] if others else np.zeros((0, 2))
    old_hits = _memberships(sub, regions.segments_old, tol)
    new_hits = _memberships(sub, regions.segments_new, tol)
    for slot, i in enumerate(others):
        candidates = [(WaveTier.OUTER, seg) for seg in old_hits[slot]] + \
                     [(WaveTier.INNER, seg) for seg in new_hits[slot]]
        results = []
        for tier, seg in candidates:
            role = RobotRole.wave(seg.k, tier)
            try:
                results.append((role, seg, wave_step(role, pts[i], regions)))
            except GeometryError as e:
                logger.debug(f"robot {i} rejected by segment {seg.k} ({tier.value}): {e}")
        if not results:
            if candidates:
                raise ProtocolError(f"robot {i} lies on wave segments but no chart accepts it")
            roles[i] = RobotRole.inner()
            continue
        roles[i] = results[0][0]
        targets[i] = _agree([(seg, target) for _, seg, target in results], i, ProtocolError)
    return RoundPlan(cycle, regions, roles, targets)


def classify_roles(config: Configuration, params: Optional[WaveParams] = None) -> List[RobotRole]:
    return plan_round(config, params).roles


def main_step(config: Configuration, params: Optional[WaveParams] = None) -> Configuration:
    """One FSYNC round of the contracting wave"""
    plan = plan_round(config, params)
    return config.with_positions(plan.targets)


def _preimage(old: WaveSegment, new: WaveSegment, p: np.ndarray) -> np.ndarray:
    coord = to_seg_coords(new, p)
    from_old = from_seg_coords(old, SegCoord(min(1.0, 2.0 * coord.d), coord.s))
    from_new = from_seg_coords(new, SegCoord(max(0.0, 2.0 * coord.d - 1.0), coord.s))
    if abs(coord.d - 0.5) <= 1e-12:
        # d = 1 of the old ring and d = 0 of the new ring are the same edge
        gap = float(np.hypot(*(from_old - from_new)))
        if gap > TARGET_AGREEMENT_TOL:
            raise InversionError(f"half-depth pre-images in segment {new.k} differ by {gap:.3e}")
        return from_old
    return from_old if coord.d < 0.5 else from_new


def invert_round(next_config: Configuration, params: Optional[WaveParams] = None,
                 tol: float = EPS_GEOM) -> Configuration:
    """Reconstruct the configuration main_step was applied to"""
    params = params or WaveParams()
    try:
        cycle = connectivity_boundary(next_config, tol)
    except GeometryError as e:
        raise InversionError(f"no Connectivity-Boundary: {e}") from e
    if cycle.degenerate or cycle.pinched or not is_convex_cycle(cycle, tol):
        raise InversionError("the boundary is not a convex epsilon-GtM image")

    previous_cycle = egtm_invert(cycle, params.epsilon)
    b0 = previous_cycle.positions
    steps = np.hypot(*(np.roll(b0, -1, axis=0) - b0).T)
    if np.max(steps) > 1.0 + 1e-6:
        raise InversionError(
            f"recovered boundary has an edge of length {np.max(steps):.6f} > 1"
        )
    try:
        regions = wave_regions(previous_cycle, params.epsilon, tol)
    except PreconditionError as e:
        raise InversionError(f"recovered boundary is not a valid round start: {e}") from e

    pts = next_config.positions
    previous = np.array(pts, dtype=float)
    on_cycle = set(cycle.indices)
    for position, index in enumerate(cycle.indices):
        previous[index] = b0[position]

    others = [i for i in range(next_config.n) if i not in on_cycle]
    sub = pts[others] if others else np.zeros((0, 2))
    hits = _memberships(sub, regions.segments_new, tol)
    for slot, i in enumerate(others):
        results = []
        for seg in hits[slot]:
            try:
                results.append((seg, _preimage(regions.segments_old[seg.k], seg, pts[i])))
            except GeometryError as e:
                logger.debug(f"robot {i} rejected by new segment {seg.k}: {e}")
        if results:
            previous[i] = _agree(results, i, InversionError)
            continue
        if points_in_polygon(pts[i], regions.b2, tol)[0] is Location.OUTSIDE:
            raise InversionError(
                f"robot {i} at {pts[i].tolist()} is outside the inner region and every wave segment"
            )
    return next_config.with_positions(previous)


def corner_distance_bound(cycle: BoundaryCycle, epsilon: float) -> CornerDistance:
    """
    Largest distance from a corner of the k-th old or new segment to b_k or
    b_(k+1), against 1 + eps^2 / 2. Only applies to unit-step cycles.
    """
    _check_epsilon(epsilon)
    bound = 1.0 + epsilon * epsilon / 2.0
    b0 = np.asarray(cycle.positions, dtype=float)
    m = b0.shape[0]
    if m < 2:
        return CornerDistance(0.0, bound)
    steps = np.hypot(*(np.roll(b0, -1, axis=0) - b0).T)
    b1 = _egtm(b0, epsilon)
    b2 = _egtm(b1, epsilon)
    worst = 0.0
    for k in range(m):
        nxt = (k + 1) % m
        corners = np.array([b0[k], b0[nxt], b1[nxt], b1[k], b2[nxt], b2[k]])
        for anchor in (b0[k], b0[nxt]):
            worst = max(worst, float(np.max(np.hypot(*(corners - anchor).T))))
    return CornerDistance(worst, bound, applicable=bool(np.max(steps) <= 1.0 + EPS_GEOM))
