"""
SwarmWave Go-To-The-Center

Each robot moves to the centre of the smallest circle enclosing the robots it
sees. Robots strictly inside that circle have no influence on the result, so
they can be moved a little without changing the next configuration. This
makes the protocol non-invertible, and it can create symmetries the swarm
did not have.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Set, Tuple

import numpy as np
from scipy.spatial import cKDTree

from core.errors import ProtocolError
from core.geometry import EPS_GEOM, Circle, Configuration, smallest_enclosing_circle
from core.symmetry import SYMMETRY_TOL, symmetricity

# Configure logging
logger = logging.getLogger(__name__)

# A robot closer than this to a rim or to the viewing range counts as on it
RIM_TOL = 1e-6

DEFAULT_JITTER = 0.005


@dataclass
class GtcParams:
    viewing_range: float = 1.0

    def __post_init__(self):
        if self.viewing_range <= 0:
            raise ProtocolError(f"viewing range must be positive, got {self.viewing_range}")


@dataclass
class SymmetryGainReport:
    symmetricity_start: int
    symmetricity_perturbed: int
    symmetricity_image: int
    symmetricity_perturbed_image: int
    images_coincide: bool
    moved: List[int]

    @property
    def symmetry_gained(self) -> bool:
        return self.symmetricity_perturbed_image > self.symmetricity_perturbed

    def to_dict(self) -> dict:
        return {
            "symmetricity_start": self.symmetricity_start,
            "symmetricity_perturbed": self.symmetricity_perturbed,
            "symmetricity_image": self.symmetricity_image,
            "symmetricity_perturbed_image": self.symmetricity_perturbed_image,
            "images_coincide": self.images_coincide,
            "symmetry_gained": self.symmetry_gained,
            "moved": self.moved,
        }


def _views(pts: np.ndarray, viewing_range: float) -> List[List[int]]:
    tree = cKDTree(pts)
    return [sorted(tree.query_ball_point(p, viewing_range + EPS_GEOM)) for p in pts]


def _local_circles(pts: np.ndarray, views: List[List[int]]) -> List[Circle]:
    return [smallest_enclosing_circle(pts[view]) for view in views]


def gtc_step(config: Configuration, params: Optional[GtcParams] = None) -> Configuration:
    params = params or GtcParams()
    pts = config.positions
    circles = _local_circles(pts, _views(pts, params.viewing_range))
    return config.with_positions(np.array([c.center.as_array() for c in circles]))


def rim_robots(config: Configuration, params: Optional[GtcParams] = None) -> Set[int]:
    """Robots on the rim of a local circle, or at the edge of some robot's view"""
    params = params or GtcParams()
    pts = config.positions
    views = _views(pts, params.viewing_range)
    rim: Set[int] = set()
    for view, circle in zip(views, _local_circles(pts, views)):
        centre = circle.center.as_array()
        for j in view:
            if abs(np.hypot(*(pts[j] - centre)) - circle.radius) <= RIM_TOL:
                rim.add(j)
    for a, b in cKDTree(pts).query_pairs(params.viewing_range + RIM_TOL):
        if np.hypot(*(pts[a] - pts[b])) >= params.viewing_range - RIM_TOL:
            rim.update((a, b))
    return rim


def _same_views(pts: np.ndarray, other: np.ndarray, params: GtcParams) -> bool:
    before, after = _views(pts, params.viewing_range), _views(other, params.viewing_range)
    if before != after:
        return False
    for c1, c2 in zip(_local_circles(pts, before), _local_circles(other, after)):
        if c1.center.distance_to(c2.center) > EPS_GEOM or abs(c1.radius - c2.radius) > EPS_GEOM:
            return False
    return True


def perturb_off_rim(config: Configuration, params: Optional[GtcParams] = None,
                    jitter: float = DEFAULT_JITTER, seed: int = 0) -> Tuple[Configuration, List[int]]:
    """Move free robots by a seeded offset without changing any view or local circle"""
    params = params or GtcParams()
    if jitter <= 0:
        raise ProtocolError(f"jitter must be positive, got {jitter}")
    rng = np.random.default_rng(seed)
    rim = rim_robots(config, params)
    pts = np.array(config.positions, dtype=float)
    moved = []
    for i in range(config.n):
        angle = rng.uniform(0.0, 2.0 * np.pi)
        if i in rim:
            continue
        trial = pts.copy()
        trial[i] += jitter * np.array([np.cos(angle), np.sin(angle)])
        if _same_views(pts, trial, params):
            pts = trial
            moved.append(i)
    if not moved:
        raise ProtocolError("no robot can be moved without changing a view")
    logger.debug(f"perturbed robots {moved} by {jitter}")
    return config.with_positions(pts), moved


def symmetry_gain_demo(config: Configuration, params: Optional[GtcParams] = None,
                       jitter: float = DEFAULT_JITTER, seed: int = 0,
                       tol: float = SYMMETRY_TOL) -> SymmetryGainReport:
    """Perturb a symmetric start and compare the symmetricity before and after one round"""
    params = params or GtcParams()
    perturbed, moved = perturb_off_rim(config, params, jitter, seed)
    image = gtc_step(config, params)
    perturbed_image = gtc_step(perturbed, params)
    gap = float(np.max(np.hypot(*(image.positions - perturbed_image.positions).T)))
    report = SymmetryGainReport(
        symmetricity_start=symmetricity(config.positions, tol),
        symmetricity_perturbed=symmetricity(perturbed.positions, tol),
        symmetricity_image=symmetricity(image.positions, tol),
        symmetricity_perturbed_image=symmetricity(perturbed_image.positions, tol),
        images_coincide=gap <= tol,
        moved=moved,
    )
    logger.info(
        f"Go-To-The-Center: symmetricity {report.symmetricity_perturbed} -> "
        f"{report.symmetricity_perturbed_image} after one round"
    )
    return report
