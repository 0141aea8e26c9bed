"""
SwarmWave Scenarios

Scenario files (one JSON document per run) and the built-in start
configuration generators:
- grid_polygon: square, triangle or hexagon filled with a lattice
- m_fold: base points replicated under m rotations
- figure1a / figure1b: the hole example and the split-cluster example
- satellite_ring: a regular boundary ring with an inner ring of wave robots
- gtc_clusters: rotated copies of a cluster with one free robot
"""

import json
import logging
import math
import os
from dataclasses import dataclass, field, fields, replace
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from core.errors import GeometryError, ScenarioError
from core.geometry import Configuration, PointLike, Point
from core.protocol_gta import GtaParams
from core.protocol_gtc import GtcParams
from core.protocol_wave import WAVE_VIEWING_RANGE, WaveParams

# Configure logging
logger = logging.getLogger(__name__)

PROTOCOLS = ("gta", "wave", "gtc")

DEFAULT_MAX_ROUNDS = 10000

DEFAULT_VIEWING_RANGE = {"gta": 1.0, "wave": WAVE_VIEWING_RANGE, "gtc": 1.0}

DEFAULT_AUDITS = {
    "gta": ["symmetry_preserved", "collision_free", "gershgorin_certified",
            "hull_area_monotone", "fsync_reference"],
    "wave": ["symmetry_preserved", "collision_free", "convexity", "boundary_identity",
             "hole_bound", "invert_roundtrip", "hull_area_monotone", "segments_disjoint",
             "degeneracy_flow", "corner_distance", "start_hole_free"],
    "gtc": ["symmetry_preserved", "collision_free", "fsync_reference"],
}

# Audits that are valid for a protocol but too costly to run by default
OPTIONAL_AUDITS = {
    "gta": ["invert_roundtrip"],
    "wave": ["local_executability", "fsync_reference"],
    "gtc": ["hull_area_monotone"],
}

GRID_SHAPES = ("square", "triangle", "hexagon")

# Grid spacing of the figure-1 layouts
FIGURE_SPACING = 1.0 / math.sqrt(2.0)


def known_audits(protocol: str) -> List[str]:
    return DEFAULT_AUDITS[protocol] + OPTIONAL_AUDITS[protocol]


@dataclass
class Scenario:
    name: str
    positions: Configuration
    protocol: str = "wave"
    epsilon: Optional[float] = None
    viewing_range: Optional[float] = None
    max_rounds: int = DEFAULT_MAX_ROUNDS
    audits: Optional[List[str]] = None
    seed: int = 0
    near_gathering_threshold: Optional[float] = None
    qualitative: bool = False
    description: str = ""

    def __post_init__(self):
        if not isinstance(self.positions, Configuration):
            try:
                self.positions = Configuration(self.positions)
            except (GeometryError, ValueError, TypeError) as e:
                raise ScenarioError("positions", str(e)) from e
        self.validate()

    def validate(self):
        if not self.name:
            raise ScenarioError("name", "must not be empty")
        if self.positions.n == 0:
            raise ScenarioError("positions", "at least one robot is required")
        if self.protocol not in PROTOCOLS:
            raise ScenarioError("protocol", f"expected one of {list(PROTOCOLS)}, got '{self.protocol}'")
        if self.epsilon is not None:
            if self.protocol == "gta" and not 0.0 < self.epsilon < 1.0:
                raise ScenarioError("epsilon", f"gta epsilon must lie in (0, 1), got {self.epsilon}")
            if self.protocol == "wave" and not 0.0 < self.epsilon < 0.5:
                raise ScenarioError("epsilon", f"wave epsilon must lie in (0, 0.5), got {self.epsilon}")
        if self.viewing_range is not None and self.viewing_range <= 0:
            raise ScenarioError("viewing_range", f"must be positive, got {self.viewing_range}")
        if self.near_gathering_threshold is not None and self.near_gathering_threshold <= 0:
            raise ScenarioError("near_gathering_threshold", "must be positive")
        if self.max_rounds < 0:
            raise ScenarioError("max_rounds", f"must be non-negative, got {self.max_rounds}")
        if self.audits is not None:
            unknown = [a for a in self.audits if a not in known_audits(self.protocol)]
            if unknown:
                raise ScenarioError("audits", f"unknown for protocol {self.protocol}: {unknown}")

    @property
    def n(self) -> int:
        return self.positions.n

    @property
    def resolved_viewing_range(self) -> float:
        if self.viewing_range is not None:
            return self.viewing_range
        return DEFAULT_VIEWING_RANGE[self.protocol]

    @property
    def resolved_threshold(self) -> float:
        if self.near_gathering_threshold is not None:
            return self.near_gathering_threshold
        return self.resolved_viewing_range

    @property
    def resolved_audits(self) -> List[str]:
        return list(self.audits) if self.audits is not None else list(DEFAULT_AUDITS[self.protocol])

    def protocol_params(self):
        """GtaParams, WaveParams or GtcParams for this scenario"""
        if self.protocol == "gta":
            if self.epsilon is None:
                return GtaParams.default(self.n, self.resolved_viewing_range)
            return GtaParams(self.epsilon, self.n, self.resolved_viewing_range)
        if self.protocol == "wave":
            if self.epsilon is None:
                return WaveParams(viewing_range=self.resolved_viewing_range)
            return WaveParams(epsilon=self.epsilon, viewing_range=self.resolved_viewing_range)
        return GtcParams(self.resolved_viewing_range)

    def with_overrides(self, overrides: Dict[str, str]) -> "Scenario":
        """Apply key=value overrides, type-checked against the scenario fields"""
        changes: Dict[str, Any] = {}
        for key, raw in overrides.items():
            if key not in OVERRIDE_PARSERS:
                raise ScenarioError(key, "not an overridable scenario field")
            try:
                changes[key] = OVERRIDE_PARSERS[key](raw)
            except ValueError as e:
                raise ScenarioError(key, f"cannot parse '{raw}': {e}") from e
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "protocol": self.protocol,
            "epsilon": self.epsilon,
            "viewing_range": self.viewing_range,
            "max_rounds": self.max_rounds,
            "near_gathering_threshold": self.near_gathering_threshold,
            "seed": self.seed,
            "audits": self.audits,
            "qualitative": self.qualitative,
            "description": self.description,
            "positions": self.positions.to_list(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Scenario":
        if not isinstance(data, dict):
            raise ScenarioError("<document>", "a scenario must be a JSON object")
        allowed = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - allowed)
        if unknown:
            raise ScenarioError(unknown[0], "unknown scenario field")
        for required in ("name", "positions"):
            if required not in data:
                raise ScenarioError(required, "missing")
        kwargs = dict(data)
        for key, kind in FIELD_TYPES.items():
            if key in kwargs and kwargs[key] is not None and not isinstance(kwargs[key], kind):
                raise ScenarioError(key, f"expected {kind}, got {type(kwargs[key]).__name__}")
        if kwargs.get("epsilon") is not None:
            kwargs["epsilon"] = float(kwargs["epsilon"])
        return cls(**kwargs)

    def save(self, path: str):
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2)
        logger.debug(f"Scenario '{self.name}' written to {path}")

    @classmethod
    def load(cls, path: str) -> "Scenario":
        try:
            with open(path, "r") as f:
                data = json.load(f)
        except FileNotFoundError as e:
            raise ScenarioError("scenario_path", f"no such file: {path}") from e
        except json.JSONDecodeError as e:
            raise ScenarioError("<document>", f"invalid JSON: {e}") from e
        return cls.from_dict(data)


def _parse_bool(raw: str) -> bool:
    value = raw.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected a boolean")


def _parse_optional_float(raw: str) -> Optional[float]:
    return None if raw.strip().lower() in ("", "none", "null") else float(raw)


def _parse_audits(raw: str) -> List[str]:
    return [a.strip() for a in raw.split(",") if a.strip()]


OVERRIDE_PARSERS: Dict[str, Callable[[str], Any]] = {
    "name": str,
    "protocol": str,
    "epsilon": _parse_optional_float,
    "viewing_range": _parse_optional_float,
    "max_rounds": int,
    "near_gathering_threshold": _parse_optional_float,
    "seed": int,
    "audits": _parse_audits,
    "qualitative": _parse_bool,
    "description": str,
}

FIELD_TYPES = {
    "name": str,
    "protocol": str,
    "epsilon": (int, float),
    "viewing_range": (int, float),
    "max_rounds": int,
    "near_gathering_threshold": (int, float),
    "seed": int,
    "audits": list,
    "qualitative": bool,
    "description": str,
    "positions": list,
}


# Generators

def gen_grid_polygon(shape: str, side_count: int, spacing: float) -> Configuration:
    """
    Lattice points filling a square, triangle or hexagon, centred on the
    origin. The hexagon leaves out its central robot so the centre is empty.
    """
    if shape not in GRID_SHAPES:
        raise ScenarioError("shape", f"expected one of {list(GRID_SHAPES)}, got '{shape}'")
    if spacing <= 0 or spacing >= 1:
        raise ScenarioError("spacing", f"must lie in (0, 1) for a connected grid, got {spacing}")
    if side_count < 1 or (shape == "hexagon" and side_count < 2):
        raise ScenarioError("side_count", f"too small for a {shape}: {side_count}")
    k = side_count
    points = []
    if shape == "square":
        offset = (k - 1) / 2.0
        points = [((i - offset) * spacing, (j - offset) * spacing) for j in range(k) for i in range(k)]
    elif shape == "triangle":
        height = math.sqrt(3.0) / 2.0
        for r in range(k):
            for j in range(k - r):
                points.append(((j + r / 2.0) * spacing, r * height * spacing))
        centroid = ((k - 1) * spacing / 2.0, (k - 1) * height * spacing / 3.0)
        points = [(x - centroid[0], y - centroid[1]) for x, y in points]
    else:
        height = math.sqrt(3.0) / 2.0
        for r in range(-(k - 1), k):
            for q in range(-(k - 1), k):
                if abs(q + r) > k - 1 or (q == 0 and r == 0):
                    continue
                points.append(((q + r / 2.0) * spacing, r * height * spacing))
    return Configuration(np.array(points, dtype=float))


def gen_m_fold(m: int, base_points: Sequence[PointLike], jitter: float = 0.0,
               seed: int = 0) -> Configuration:
    """Base points replicated under rotations by 2*pi*j/m about the origin"""
    if m < 1:
        raise ScenarioError("m", f"must be at least 1, got {m}")
    base = np.array([Point.of(p).as_array() for p in base_points], dtype=float).reshape(-1, 2)
    if base.shape[0] == 0:
        raise ScenarioError("base_points", "at least one base point is required")
    if m > 1 and np.any(np.hypot(base[:, 0], base[:, 1]) <= 1e-12):
        raise ScenarioError("base_points", "a base point at the origin forces symmetricity 1")
    if jitter > 0:
        rng = np.random.default_rng(seed)
        base = base + rng.uniform(-jitter, jitter, size=base.shape)
    copies = []
    for j in range(m):
        angle = 2.0 * math.pi * j / m
        c, s = math.cos(angle), math.sin(angle)
        copies.append(base @ np.array([[c, -s], [s, c]]).T)
    return Configuration(np.concatenate(copies, axis=0))


def gen_satellite_ring(m: int = 8, spacing: float = 0.9, inset: float = 0.05) -> Configuration:
    """Regular m-gon with edge length `spacing` plus one robot just inside each edge midpoint"""
    if m < 3:
        raise ScenarioError("m", f"a ring needs at least 3 robots, got {m}")
    if not 0 < spacing <= 1:
        raise ScenarioError("spacing", f"must lie in (0, 1], got {spacing}")
    radius = spacing / (2.0 * math.sin(math.pi / m))
    apothem = radius * math.cos(math.pi / m)
    if not 0 < inset < apothem:
        raise ScenarioError("inset", f"must lie in (0, {apothem:.4f}), got {inset}")
    ring = [(radius * math.cos(2 * math.pi * k / m), radius * math.sin(2 * math.pi * k / m))
            for k in range(m)]
    satellites = [((apothem - inset) * math.cos(2 * math.pi * (k + 0.5) / m),
                   (apothem - inset) * math.sin(2 * math.pi * (k + 0.5) / m)) for k in range(m)]
    return Configuration(np.array(ring + satellites, dtype=float))


def gen_split_clusters(side: int = 20, spacing: float = FIGURE_SPACING,
                       gap: float = 0.95) -> Configuration:
    """Two square grid clusters side by side, joined only across a gap just below 1"""
    if side < 1:
        raise ScenarioError("side", f"must be positive, got {side}")
    if not 0 < gap < 1:
        raise ScenarioError("gap", f"must lie in (0, 1) to keep the swarm connected, got {gap}")
    cols = np.arange(side) * spacing
    rows = (np.arange(side) - (side - 1) / 2.0) * spacing
    right = np.array([(gap / 2.0 + x, y) for y in rows for x in cols])
    left = -right
    return Configuration(np.concatenate([right, left], axis=0))


def gen_hole_rectangle(width: int = 16, height: int = 10, spacing: float = FIGURE_SPACING,
                       hole_radius: float = 1.6) -> Configuration:
    """Filled rectangular grid with the robots inside a central disc removed"""
    if width < 2 or height < 2:
        raise ScenarioError("width", "the rectangle needs at least 2 x 2 robots")
    xs = (np.arange(width) - (width - 1) / 2.0) * spacing
    ys = (np.arange(height) - (height - 1) / 2.0) * spacing
    points = [(x, y) for y in ys for x in xs if math.hypot(x, y) > hole_radius]
    if len(points) == 0:
        raise ScenarioError("hole_radius", "the hole removes every robot")
    return Configuration(np.array(points, dtype=float))


def gen_gtc_clusters(m: int = 3, radius: float = 3.0) -> Configuration:
    """
    m rotated copies of the cluster u, w, v, f. f is strictly inside every
    local smallest enclosing circle, so moving it changes nothing.
    """
    if m < 2:
        raise ScenarioError("m", f"needs at least 2 clusters, got {m}")
    cluster = np.array([(0.0, 0.0), (1.6, 0.0), (0.8, 0.3), (0.8, 0.1)])
    cluster = cluster - np.array([0.8, 0.15]) + np.array([radius, 0.0])
    chord = 2.0 * (radius - 0.8) * math.sin(math.pi / m)
    if chord <= 1.0:
        raise ScenarioError("radius", f"clusters at radius {radius} see each other")
    return gen_m_fold(m, cluster)


def gen_figure1(case: str, **params) -> "Scenario":
    """The two figure-1 layouts; coordinates are reconstructions, hence qualitative"""
    if case == "a":
        config = gen_hole_rectangle(**params)
        return Scenario(
            name="figure1a",
            positions=config,
            protocol="gta",
            # wide enough to see across the hole
            viewing_range=WAVE_VIEWING_RANGE,
            qualitative=True,
            description="filled rectangle with a large central hole",
        )
    if case == "b":
        config = gen_split_clusters(**params)
        return Scenario(
            name="figure1b",
            positions=config,
            protocol="gta",
            qualitative=True,
            description="two grid clusters joined across a gap just below the viewing range",
        )
    raise ScenarioError("case", f"expected 'a' or 'b', got '{case}'")


@dataclass
class Generator:
    build: Callable[..., Scenario]
    description: str
    defaults: Dict[str, Any] = field(default_factory=dict)


def _wrap(name: str, protocol: str, make: Callable[..., Configuration],
          description: str) -> Callable[..., Scenario]:
    def build(**params) -> Scenario:
        return Scenario(name=name, positions=make(**params), protocol=protocol,
                        description=description)
    return build


GENERATORS: Dict[str, Generator] = {
    "grid_polygon": Generator(
        _wrap("grid_polygon", "wave", gen_grid_polygon, "lattice-filled polygon"),
        "square / triangle / hexagon filled with a lattice",
        {"shape": "square", "side_count": 5, "spacing": 0.9},
    ),
    "m_fold": Generator(
        _wrap("m_fold", "gta", gen_m_fold, "m-fold symmetric point set"),
        "base points replicated under m rotations",
        {"m": 4, "base_points": [[0.6, 0.2], [0.3, 0.5]], "jitter": 0.0, "seed": 0},
    ),
    "figure1a": Generator(
        lambda **p: gen_figure1("a", **p),
        "rectangle with a central hole (breaks the wave preconditions)",
    ),
    "figure1b": Generator(
        lambda **p: gen_figure1("b", **p),
        "two clusters that the averaging protocol pulls apart",
    ),
    "satellite_ring": Generator(
        _wrap("satellite_ring", "wave", gen_satellite_ring, "boundary ring with wave robots"),
        "regular ring with one robot inside each edge",
    ),
    "gtc_clusters": Generator(
        _wrap("gtc_clusters", "gtc", gen_gtc_clusters, "free-robot clusters"),
        "rotated clusters for the Go-To-The-Center counterexample",
    ),
}


def build_scenario(name: str, **params) -> Scenario:
    if name not in GENERATORS:
        raise ScenarioError("generator", f"unknown generator '{name}'")
    generator = GENERATORS[name]
    merged = {**generator.defaults, **params}
    return generator.build(**merged)
