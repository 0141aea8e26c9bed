"""
SwarmWave Simulator

FSYNC round engine. Every round the selected protocol maps the whole
configuration at once; the per-round metrics are recomputed from positions
and the enabled audits check the structural properties of the step. Audits
of a finished round run on a thread pool while the next round is computed.
"""

import logging
import math
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from shapely.geometry import Polygon

from core.errors import GeometryError, SwarmWaveError
from core.geometry import (
    EPS_GEOM,
    Configuration,
    Location,
    connectivity_boundary,
    convex_hull,
    diameter,
    disc_graph,
    is_connected,
    is_convex_cycle,
    is_near_gathering,
    largest_empty_circle,
    min_pairwise_distance,
    points_in_polygon,
    polygon_area,
    smallest_enclosing_circle,
)
from core.local_view import verify_local_executability
from core.protocol_gta import (
    gershgorin_certify,
    gta_invert,
    gta_jacobian,
    gta_step,
    gta_target,
)
from core.protocol_gtc import gtc_step
from core.protocol_wave import (
    RobotRole,
    RoleKind,
    RoundPlan,
    corner_distance_bound,
    egtm_step,
    invert_round,
    plan_round,
    wave_step,
)
from core.scenarios import Scenario
from core.symmetry import symmetricity, symmetry_preserved
from core.wave_segments import Degeneracy
from utils.helpers import thread_hint

# Configure logging
logger = logging.getLogger(__name__)

# Largest swarm whose empty-circle metric is computed outside wave runs
HOLE_METRIC_LIMIT = 300

ROUNDTRIP_TOL = 1e-8
REFERENCE_TOL = 1e-12
OVERLAP_AREA_TOL = 1e-12


class Termination(Enum):
    NEAR_GATHERING = "near_gathering"
    MAX_ROUNDS = "max_rounds"
    ERROR = "error"


@dataclass
class AuditResult:
    name: str
    passed: bool
    detail: str = ""

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "detail": self.detail}


@dataclass
class RoundRecord:
    round: int
    positions: Configuration
    diameter: float
    symmetricity: int
    rotation_order: int
    connected: bool
    convex_boundary: bool
    max_empty_circle_diameter: float
    min_pairwise_distance: float
    roles: Optional[List[RobotRole]] = None
    audit_results: Dict[str, AuditResult] = field(default_factory=dict)

    @property
    def audits_failed(self) -> int:
        return sum(1 for r in self.audit_results.values() if not r.passed)

    def metrics_dict(self) -> dict:
        return {
            "round": self.round,
            "diameter": self.diameter,
            "symmetricity": self.symmetricity,
            "rotation_order": self.rotation_order,
            "connected": self.connected,
            "convex_boundary": self.convex_boundary,
            "max_hole": self.max_empty_circle_diameter,
            "min_dist": self.min_pairwise_distance,
            "audits_failed": self.audits_failed,
        }


@dataclass
class Trace:
    scenario: Scenario
    records: List[RoundRecord] = field(default_factory=list)
    termination: Termination = Termination.MAX_ROUNDS
    detail: str = ""
    # checks of the start configuration, kept apart from the per-round audits
    start_audits: Dict[str, AuditResult] = field(default_factory=dict)

    @property
    def rounds(self) -> int:
        return self.records[-1].round if self.records else 0

    @property
    def final(self) -> RoundRecord:
        return self.records[-1]

    def symmetricity_series(self) -> List[int]:
        return [r.symmetricity for r in self.records]

    def symmetricity_constant(self) -> bool:
        return len(set(self.symmetricity_series())) <= 1

    def audit_failures(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for record in self.records:
            for name, result in record.audit_results.items():
                counts.setdefault(name, 0)
                if not result.passed:
                    counts[name] += 1
        return counts

    def start_audit_failures(self) -> int:
        return sum(1 for r in self.start_audits.values() if not r.passed)

    @property
    def total_audit_failures(self) -> int:
        return sum(self.audit_failures().values())

    def summary(self) -> dict:
        return {
            "scenario": self.scenario.name,
            "protocol": self.scenario.protocol,
            "termination": self.termination.value,
            "detail": self.detail,
            "rounds": self.rounds,
            "final_diameter": self.final.diameter if self.records else None,
            "symmetricity_start": self.records[0].symmetricity if self.records else None,
            "symmetricity_end": self.final.symmetricity if self.records else None,
            "audit_failures": self.total_audit_failures,
            "start_checks_failed": self.start_audit_failures(),
        }


def measure(config: Configuration, protocol: str, round_index: int = 0) -> RoundRecord:
    """Metrics of one configuration, computed from its positions alone"""
    connected = bool(is_connected(disc_graph(config, 1.0)))
    convex_boundary = False
    max_hole = math.nan
    if connected:
        cycle = connectivity_boundary(config)
        convex_boundary = bool(not cycle.degenerate and not cycle.pinched and is_convex_cycle(cycle))
        if protocol == "wave" or config.n <= HOLE_METRIC_LIMIT:
            max_hole = largest_empty_circle(config, cycle).diameter
    return RoundRecord(
        round=round_index,
        positions=config,
        diameter=diameter(config),
        symmetricity=symmetricity(config.positions),
        rotation_order=symmetricity(config.positions, center_rule=False),
        connected=connected,
        convex_boundary=convex_boundary,
        max_empty_circle_diameter=max_hole,
        min_pairwise_distance=min_pairwise_distance(config),
    )


def _max_gap(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape[0] == 0:
        return 0.0
    return float(np.max(np.hypot(*(a - b).T)))


def _hull_area(config: Configuration) -> float:
    return abs(polygon_area(config.positions[list(convex_hull(config))]))


# Individual audits: each returns (passed, detail).

def _audit_symmetry(before, after, protocol, params, plan) -> Tuple[bool, str]:
    report = symmetry_preserved(before, after)
    return report.preserved, f"rotations {report.order_before} -> {report.order_after}"


def _audit_collisions(before, after, protocol, params, plan) -> Tuple[bool, str]:
    d_before, d_after = min_pairwise_distance(before), min_pairwise_distance(after)
    passed = not (d_before > EPS_GEOM and d_after <= EPS_GEOM)
    return passed, f"min distance {d_before:.3e} -> {d_after:.3e}"


def _audit_convexity(before, after, protocol, params, plan) -> Tuple[bool, str]:
    try:
        cycle = connectivity_boundary(after)
    except GeometryError as e:
        return False, str(e)
    if cycle.degenerate or cycle.pinched or not is_convex_cycle(cycle):
        return False, "boundary after the round is not convex"
    locations = points_in_polygon(cycle.positions, plan.cycle.positions)
    outside = sum(1 for loc in locations if loc is Location.OUTSIDE)
    return outside == 0, f"{outside} boundary robots outside the previous boundary"


def _audit_boundary_identity(before, after, protocol, params, plan) -> Tuple[bool, str]:
    expected = egtm_step(plan.cycle, params.epsilon)
    try:
        cycle = connectivity_boundary(after)
    except GeometryError as e:
        return False, str(e)
    if sorted(cycle.indices) != sorted(expected.indices):
        return False, f"boundary robots changed: {len(cycle.indices)} vs {len(expected.indices)}"
    where = {idx: pos for pos, idx in zip(expected.positions, expected.indices)}
    gap = max(float(np.hypot(*(after.positions[idx] - where[idx]))) for idx in cycle.indices)
    return gap <= EPS_GEOM, f"largest deviation {gap:.3e}"


def _audit_hole_bound(before, after, protocol, params, plan) -> Tuple[bool, str]:
    try:
        cycle = connectivity_boundary(after)
    except GeometryError as e:
        return False, str(e)
    hole = largest_empty_circle(after, cycle).diameter
    return hole <= params.audit_hole_delta + EPS_GEOM, f"largest empty circle {hole:.4f}"


def _audit_start_holes(before, after, protocol, params, plan) -> Tuple[bool, str]:
    hole = largest_empty_circle(before, plan.cycle).diameter
    return hole <= params.hole_check_delta + EPS_GEOM, f"largest empty circle {hole:.4f}"


def _audit_invert(before, after, protocol, params, plan) -> Tuple[bool, str]:
    try:
        if protocol == "gta":
            recovered = gta_invert(after, params)
        else:
            recovered = invert_round(after, params)
    except SwarmWaveError as e:
        return False, f"inversion failed: {e}"
    gap = _max_gap(recovered.positions, before.positions)
    return gap <= ROUNDTRIP_TOL, f"round-trip residual {gap:.3e}"


def _audit_gershgorin(before, after, protocol, params, plan) -> Tuple[bool, str]:
    certificate = gershgorin_certify(gta_jacobian(before, params))
    return certificate.certified, f"margin {certificate.margin:.3e}"


def _audit_hull_area(before, after, protocol, params, plan) -> Tuple[bool, str]:
    area_before, area_after = _hull_area(before), _hull_area(after)
    if protocol == "wave" and area_before > EPS_GEOM:
        passed = area_after < area_before
    else:
        passed = area_after <= area_before + EPS_GEOM
    return passed, f"hull area {area_before:.6f} -> {area_after:.6f}"


def _audit_segments_disjoint(before, after, protocol, params, plan) -> Tuple[bool, str]:
    worst = 0.0
    for ring in (plan.regions.segments_old, plan.regions.segments_new):
        shapes = [Polygon(seg.corners) for seg in ring]
        shapes = [s if s.is_valid else s.buffer(0) for s in shapes]
        lows = np.array([seg.corners.min(axis=0) for seg in ring])
        highs = np.array([seg.corners.max(axis=0) for seg in ring])
        for a in range(len(ring)):
            overlap = np.all((lows[a + 1:] <= highs[a]) & (highs[a + 1:] >= lows[a]), axis=1)
            for b in np.nonzero(overlap)[0] + a + 1:
                worst = max(worst, shapes[a].intersection(shapes[b]).area)
    return worst <= OVERLAP_AREA_TOL, f"largest overlap area {worst:.3e}"


def _audit_degeneracy_flow(before, after, protocol, params, plan) -> Tuple[bool, str]:
    violations = []
    for old, new in zip(plan.regions.segments_old, plan.regions.segments_new):
        if old.degeneracy is not Degeneracy.FULLY and new.degeneracy is not Degeneracy.NON_DEGENERATED:
            violations.append(old.k)
    return not violations, f"segments getting more degenerate: {violations[:10]}"


def _audit_corner_distance(before, after, protocol, params, plan) -> Tuple[bool, str]:
    result = corner_distance_bound(plan.cycle, params.epsilon)
    return result.holds, f"max corner distance {result.max_distance:.6f} (bound {result.bound:.6f})"


def _audit_local(before, after, protocol, params, plan) -> Tuple[bool, str]:
    report = verify_local_executability(before, params, plan)
    return report.all_agree, f"{len(report.disagreements)} robots disagree"


def _reference_targets(before: Configuration, protocol: str, params, plan) -> np.ndarray:
    """Targets computed robot by robot from the frozen start of the round"""
    pts = before.positions
    if protocol == "gta":
        moves = np.array([gta_target(i, before, params.viewing_range) for i in range(before.n)])
        return pts + params.epsilon * moves
    if protocol == "gtc":
        out = []
        for p in pts:
            visible = pts[np.hypot(*(pts - p).T) <= params.viewing_range + EPS_GEOM]
            out.append(smallest_enclosing_circle(visible).center.as_array())
        return np.array(out)
    targets = np.array(pts, dtype=float)
    m = len(plan.cycle)
    for position, index in enumerate(plan.cycle.indices):
        trio = plan.cycle.positions[[(position - 1) % m, position, (position + 1) % m]]
        targets[index] = params.epsilon * (trio[0] + trio[2]) / 2.0 + (1.0 - params.epsilon) * trio[1]
    for i, role in enumerate(plan.roles):
        if role.kind is RoleKind.WAVE:
            targets[i] = wave_step(role, pts[i], plan.regions)
    return targets


def _audit_fsync(before, after, protocol, params, plan) -> Tuple[bool, str]:
    gap = _max_gap(_reference_targets(before, protocol, params, plan), after.positions)
    return gap <= REFERENCE_TOL, f"deviation from the two-phase reference {gap:.3e}"


AUDITS: Dict[str, Callable] = {
    "symmetry_preserved": _audit_symmetry,
    "collision_free": _audit_collisions,
    "convexity": _audit_convexity,
    "boundary_identity": _audit_boundary_identity,
    "hole_bound": _audit_hole_bound,
    "start_hole_free": _audit_start_holes,
    "invert_roundtrip": _audit_invert,
    "gershgorin_certified": _audit_gershgorin,
    "hull_area_monotone": _audit_hull_area,
    "segments_disjoint": _audit_segments_disjoint,
    "degeneracy_flow": _audit_degeneracy_flow,
    "corner_distance": _audit_corner_distance,
    "local_executability": _audit_local,
    "fsync_reference": _audit_fsync,
}

# Checks of the start configuration instead of a transition
START_AUDITS = ("start_hole_free",)


def audit_round(before: Configuration, after: Configuration, protocol: str, params,
                names: Optional[List[str]] = None, plan: Optional[RoundPlan] = None,
                first_round: bool = False) -> Dict[str, AuditResult]:
    """Run the named audits on one round; failures are recorded, never raised"""
    names = list(AUDITS) if names is None else names
    if protocol == "wave" and plan is None:
        try:
            plan = plan_round(before, params, check_holes=False)
        except SwarmWaveError as e:
            return {name: AuditResult(name, False, f"no round plan: {e}") for name in names}
    results = {}
    for name in names:
        if name in START_AUDITS and not first_round:
            continue
        try:
            passed, detail = AUDITS[name](before, after, protocol, params, plan)
        except SwarmWaveError as e:
            passed, detail = False, f"audit raised: {e}"
        results[name] = AuditResult(name, bool(passed), detail)
        if not passed:
            logger.debug(f"audit {name} failed: {detail}")
    return results


class Simulator:
    """Runs one scenario round by round"""

    def __init__(self, scenario: Scenario, audit_every: int = 1, threads: Optional[int] = None,
                 audits: Optional[List[str]] = None):
        if audit_every < 1:
            raise ValueError(f"audit stride must be positive, got {audit_every}")
        self.scenario = scenario
        self.audit_every = audit_every
        self.threads = threads or thread_hint()
        self.audits = audits if audits is not None else scenario.resolved_audits
        self.params = scenario.protocol_params()

    def step(self, config: Configuration) -> Tuple[Configuration, Optional[RoundPlan]]:
        protocol = self.scenario.protocol
        if protocol == "gta":
            return gta_step(config, self.params), None
        if protocol == "gtc":
            return gtc_step(config, self.params), None
        plan = plan_round(config, self.params)
        return config.with_positions(plan.targets), plan

    def _final_roles(self, config: Configuration) -> Optional[List[RobotRole]]:
        if self.scenario.protocol != "wave":
            return None
        try:
            return plan_round(config, self.params, check_holes=False).roles
        except SwarmWaveError:
            return None

    def run(self) -> Trace:
        scenario = self.scenario
        threshold = scenario.resolved_threshold
        trace = Trace(scenario)
        logger.info(
            f"Running '{scenario.name}' ({scenario.protocol}, n={scenario.n}, "
            f"max_rounds={scenario.max_rounds})"
        )
        pending: List[Tuple[RoundRecord, Future]] = []
        config = scenario.positions
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            for t in range(scenario.max_rounds + 1):
                record = measure(config, scenario.protocol, t)
                trace.records.append(record)
                if is_near_gathering(config, threshold):
                    trace.termination = Termination.NEAR_GATHERING
                    record.roles = self._final_roles(config)
                    break
                if t == scenario.max_rounds:
                    trace.termination = Termination.MAX_ROUNDS
                    record.roles = self._final_roles(config)
                    break
                try:
                    after, plan = self.step(config)
                except SwarmWaveError as e:
                    trace.termination = Termination.ERROR
                    trace.detail = str(e)
                    logger.warning(f"Round {t} of '{scenario.name}' failed: {e}")
                    break
                if plan is not None:
                    record.roles = plan.roles
                if self.audits and t % self.audit_every == 0:
                    future = pool.submit(audit_round, config, after, scenario.protocol,
                                         self.params, self.audits, plan, t == 0)
                    pending.append((record, future))
                logger.debug(f"round {t}: diameter {record.diameter:.6f}")
                config = after
            for record, future in pending:
                # audits of round t -> t+1 are attached to round t+1
                target = trace.records[record.round + 1] if record.round + 1 < len(trace.records) else None
                results = future.result()
                trace.start_audits.update({k: v for k, v in results.items() if k in START_AUDITS})
                if target is None:
                    continue
                target.audit_results.update({k: v for k, v in results.items() if k not in START_AUDITS})
        logger.info(
            f"'{scenario.name}' ended after {trace.rounds} rounds: {trace.termination.value}"
            + (f" ({trace.detail})" if trace.detail else "")
        )
        return trace


def run(scenario: Scenario, audit_every: int = 1, threads: Optional[int] = None) -> Trace:
    return Simulator(scenario, audit_every, threads).run()
