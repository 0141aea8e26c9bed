"""
SwarmWave Local View

Recomputes the contracting-wave round from each robot's own view: only the
robots within the viewing range are used. A robot decides it is a boundary
robot when it lies on the convex hull border of its 2.24-surrounding, finds
its boundary neighbours by walking unit-distance hull edges, and rebuilds the
few wave segments around it.

verify_local_executability compares these local results with the global
ones; local_main_step moves every robot by its local result only.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree

from core.errors import GeometryError, PreconditionError, SwarmWaveError
from core.geometry import (
    EPS_GEOM,
    BoundaryCycle,
    Configuration,
    Location,
    convex_hull,
    point_in_polygon,
    points_in_polygon,
)
from core.protocol_wave import (
    TARGET_AGREEMENT_TOL,
    RobotRole,
    RoleKind,
    RoundPlan,
    WaveParams,
    WaveTier,
    plan_round,
    wave_regions,
)
from core.wave_segments import SegCoord, WaveSegment, from_seg_coords, to_seg_coords

# Configure logging
logger = logging.getLogger(__name__)

# Radius of the surrounding a robot needs to see to decide whether it is on the boundary
LOCAL_SURROUNDING = 2.24

# Boundary robots walked in each direction from the first one found
CHAIN_REACH = 4


@dataclass
class LocalOutcome:
    role: Optional[RobotRole]
    target: Optional[np.ndarray]
    reason: str = ""

    @property
    def decided(self) -> bool:
        return self.role is not None


@dataclass
class LocalCheck:
    robot: int
    global_role: RobotRole
    local_role: Optional[RobotRole]
    target_gap: float
    agrees: bool
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "robot": self.robot,
            "global_role": self.global_role.label,
            "local_role": self.local_role.kind.value if self.local_role else None,
            "target_gap": self.target_gap,
            "agrees": self.agrees,
            "reason": self.reason,
        }


@dataclass
class ExecutabilityReport:
    viewing_range: float
    checks: List[LocalCheck] = field(default_factory=list)

    @property
    def all_agree(self) -> bool:
        return all(c.agrees for c in self.checks)

    @property
    def disagreements(self) -> List[LocalCheck]:
        return [c for c in self.checks if not c.agrees]

    def to_dict(self) -> dict:
        return {
            "viewing_range": self.viewing_range,
            "all_agree": self.all_agree,
            "disagreements": [c.to_dict() for c in self.disagreements],
        }


class RobotView:
    """What robot `observer` sees: indices of the robots within its viewing range"""

    def __init__(self, positions: np.ndarray, tree: cKDTree, observer: int,
                 viewing_range: float, tol: float = EPS_GEOM):
        self.positions = positions
        self.observer = observer
        self.viewing_range = viewing_range
        self.tol = tol
        here = positions[observer]
        self.visible = np.array(sorted(tree.query_ball_point(here, viewing_range + tol)), dtype=int)
        self.distance = {int(j): math.dist(here, positions[j]) for j in self.visible}

    def sees(self, j: int) -> bool:
        return j in self.distance

    def is_boundary(self, j: int) -> bool:
        """j lies on the hull border of its 2.24-surrounding"""
        pts = self.positions
        near = [int(l) for l in self.visible
                if math.dist(pts[l], pts[j]) <= LOCAL_SURROUNDING + self.tol]
        hull = convex_hull(pts[near], self.tol)
        polygon = pts[near][list(hull)]
        return point_in_polygon(pts[j], polygon, self.tol) is not Location.INSIDE

    def chain_step(self, c: int, forward: bool) -> Optional[int]:
        """
        Next (forward) or previous boundary robot after c: the farthest unit
        neighbour such that no visible robot lies right of the directed edge.
        """
        pts = self.positions
        others = pts[self.visible]
        best, best_len = None, -1.0
        for j in self.visible:
            j = int(j)
            length = math.dist(pts[c], pts[j])
            if length <= self.tol or length > 1.0 + self.tol:
                continue
            start, end = (pts[c], pts[j]) if forward else (pts[j], pts[c])
            direction = end - start
            sides = direction[0] * (others[:, 1] - start[1]) - direction[1] * (others[:, 0] - start[0])
            if np.all(sides >= -self.tol * length) and length > best_len:
                best, best_len = j, length
        return best


def _walk(view: RobotView, start: int, forward: bool) -> Tuple[List[int], bool]:
    """Up to CHAIN_REACH boundary robots after start; True if the cycle closed"""
    reach = view.viewing_range - 1.0 + view.tol
    chain: List[int] = []
    current = start
    for _ in range(CHAIN_REACH):
        # every unit neighbour of current must be in view
        if view.distance.get(current, math.inf) > reach:
            break
        nxt = view.chain_step(current, forward)
        if nxt is None or not view.sees(nxt):
            break
        if nxt == start:
            return chain, True
        if nxt in chain:
            break
        chain.append(nxt)
        current = nxt
    return chain, False


def _egtm_interior(positions: np.ndarray, epsilon: float) -> np.ndarray:
    """Go-to-the-middle images of positions[1:-1] of an open chain"""
    neighbours = positions[:-2] + positions[2:]
    return epsilon * neighbours / 2.0 + (1.0 - epsilon) * positions[1:-1]


def _open_segments(positions: np.ndarray, epsilon: float) -> List[Tuple[WaveSegment, WaveSegment]]:
    """(old, new) segment pairs of an open chain whose corners are all known"""
    L = positions.shape[0]
    if L < 6:
        return []
    b1 = _egtm_interior(positions, epsilon)      # chain positions 1 .. L-2
    b2 = _egtm_interior(b1, epsilon)             # chain positions 2 .. L-3
    pairs = []
    for p in range(2, L - 3):
        old = WaveSegment(p, positions[p], positions[p + 1], b1[p], b1[p - 1])
        new = WaveSegment(p, b1[p - 1], b1[p], b2[p - 1], b2[p - 2])
        pairs.append((old, new))
    return pairs


def _local_wave(p: np.ndarray, pairs: List[Tuple[WaveSegment, WaveSegment]],
                tol: float) -> Tuple[Optional[RobotRole], Optional[np.ndarray]]:
    candidates = []
    for tier, slot in ((WaveTier.OUTER, 0), (WaveTier.INNER, 1)):
        for pair in pairs:
            seg = pair[slot]
            if points_in_polygon(p, seg.corners, tol)[0] is not Location.OUTSIDE:
                candidates.append((tier, pair))
    for tier, (old, new) in candidates:
        try:
            if tier is WaveTier.OUTER:
                coord = to_seg_coords(old, p)
                depth = coord.d / 2.0
            else:
                coord = to_seg_coords(new, p)
                depth = 0.5 + coord.d / 2.0
            return RobotRole(RoleKind.WAVE, None, tier), from_seg_coords(new, SegCoord(depth, coord.s))
        except GeometryError as e:
            logger.debug(f"local chart rejected point {p.tolist()}: {e}")
    return None, None


def local_outcome(config: Configuration, i: int, params: Optional[WaveParams] = None,
                  tree: Optional[cKDTree] = None, tol: float = EPS_GEOM) -> LocalOutcome:
    """Role and target robot i computes from its own view"""
    params = params or WaveParams()
    pts = config.positions
    tree = tree if tree is not None else cKDTree(pts)
    view = RobotView(pts, tree, i, params.viewing_range, tol)
    reach = params.viewing_range - LOCAL_SURROUNDING
    if reach < -tol:
        return LocalOutcome(None, None, "2.24-surrounding is out of view")
    eps = params.epsilon

    if view.is_boundary(i):
        pred, succ = view.chain_step(i, forward=False), view.chain_step(i, forward=True)
        if pred is None or succ is None:
            return LocalOutcome(None, None, "boundary neighbours not found")
        trio = np.array([pts[pred], pts[i], pts[succ]])
        return LocalOutcome(RobotRole(RoleKind.BOUNDARY), _egtm_interior(trio, eps)[0])

    computable = sorted((d, j) for j, d in view.distance.items() if j != i and d <= reach + tol)
    start = next((j for _, j in computable if view.is_boundary(j)), None)
    if start is None:
        return LocalOutcome(RobotRole.inner(), pts[i].copy())

    ahead, closed = _walk(view, start, forward=True)
    if closed:
        chain = [start] + ahead
        cycle = BoundaryCycle(tuple(chain), pts[chain])
        try:
            regions = wave_regions(cycle, eps, tol)
        except PreconditionError as e:
            return LocalOutcome(None, None, f"visible boundary is invalid: {e}")
        pairs = list(zip(regions.segments_old, regions.segments_new))
    else:
        behind, _ = _walk(view, start, forward=False)
        chain = behind[::-1] + [start] + ahead
        pairs = _open_segments(pts[chain], eps)

    role, target = _local_wave(pts[i], pairs, tol)
    if role is None:
        return LocalOutcome(RobotRole.inner(), pts[i].copy())
    return LocalOutcome(role, target)


def _compare(i: int, global_role: RobotRole, global_target: np.ndarray,
             outcome: LocalOutcome) -> LocalCheck:
    if not outcome.decided:
        return LocalCheck(i, global_role, None, math.inf, False, outcome.reason)
    gap = math.dist(global_target, outcome.target)
    same_kind = outcome.role.kind is global_role.kind
    same_tier = global_role.kind is not RoleKind.WAVE or outcome.role.tier is global_role.tier
    agrees = same_kind and same_tier and gap <= TARGET_AGREEMENT_TOL
    reason = "" if agrees else (
        f"local {outcome.role.kind.value} vs global {global_role.label}, target gap {gap:.3e}"
    )
    return LocalCheck(i, global_role, outcome.role, gap, agrees, reason)


def verify_local_executability(config: Configuration, params: Optional[WaveParams] = None,
                               plan: Optional[RoundPlan] = None,
                               tol: float = EPS_GEOM) -> ExecutabilityReport:
    """Per-robot agreement of the local and the global computation"""
    params = params or WaveParams()
    report = ExecutabilityReport(params.viewing_range)
    if config.n <= 1:
        return report
    plan = plan or plan_round(config, params, tol=tol)
    tree = cKDTree(config.positions)
    for i in range(config.n):
        try:
            outcome = local_outcome(config, i, params, tree, tol)
        except SwarmWaveError as e:
            outcome = LocalOutcome(None, None, str(e))
        report.checks.append(_compare(i, plan.roles[i], plan.targets[i], outcome))
    if not report.all_agree:
        logger.debug(f"{len(report.disagreements)} robots disagree at range {params.viewing_range}")
    return report


def local_main_step(config: Configuration, params: Optional[WaveParams] = None,
                    tol: float = EPS_GEOM) -> Configuration:
    """Every robot moves to its own local target; undecided robots stay"""
    params = params or WaveParams()
    pts = config.positions
    tree = cKDTree(pts)
    targets = np.array(pts, dtype=float)
    for i in range(config.n):
        try:
            outcome = local_outcome(config, i, params, tree, tol)
        except SwarmWaveError as e:
            logger.debug(f"robot {i} stays: {e}")
            continue
        if outcome.decided:
            targets[i] = outcome.target
    return config.with_positions(targets)
