"""
SwarmWave SVG frames

One SVG file per recorded round: robots as circles coloured by role, the
Connectivity-Boundary as a closed polyline, the two wave rings shaded and,
optionally, the viewing range of one robot.
"""

import logging
import os
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np

from core.errors import GeometryError, PreconditionError
from core.geometry import Configuration, connectivity_boundary
from core.protocol_wave import wave_regions
from ui.config import FRAME_DIMENSIONS, get_current_theme, role_color
from utils.trace_io import LoadedFrame, LoadedTrace

# Configure logging
logger = logging.getLogger(__name__)


def frame_name(round_index: int) -> str:
    return f"frame_{round_index:04d}.svg"


@dataclass
class FrameTransform:
    """Maps world coordinates to pixels; y points up in the world, down in SVG"""

    min_x: float
    max_y: float
    scale: float
    margin: float

    @classmethod
    def fit(cls, configs: Iterable[Configuration], width: int, height: int,
            margin: int, pad: float = 0.0) -> "FrameTransform":
        pts = np.concatenate([c.positions for c in configs], axis=0)
        low, high = pts.min(axis=0) - pad, pts.max(axis=0) + pad
        span = np.maximum(high - low, 1e-9)
        scale = min((width - 2 * margin) / span[0], (height - 2 * margin) / span[1])
        return cls(float(low[0]), float(high[1]), float(scale), float(margin))

    def __call__(self, p) -> tuple:
        return (self.margin + (p[0] - self.min_x) * self.scale,
                self.margin + (self.max_y - p[1]) * self.scale)


def _fmt(value: float) -> str:
    return f"{value:.3f}"


def _points_attr(points: Sequence, transform: FrameTransform) -> str:
    return " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in (transform(p) for p in points))


def svg_string_draw_circle(x, y, r, fill, stroke="none", opacity=1.0, css_class=""):
    cls = f' class="{css_class}"' if css_class else ""
    return (f'<circle{cls} cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(r)}" fill="{fill}" '
            f'stroke="{stroke}" fill-opacity="{opacity}"/>\n')


def svg_string_draw_polyline(points: np.ndarray, transform: FrameTransform, stroke: str,
                             width: float, closed: bool = True, css_class: str = ""):
    ring = list(points) + ([points[0]] if closed and len(points) else [])
    cls = f' class="{css_class}"' if css_class else ""
    return (f'<polyline{cls} points="{_points_attr(ring, transform)}" fill="none" '
            f'stroke="{stroke}" stroke-width="{width}"/>\n')


def svg_string_draw_polygon(points: np.ndarray, transform: FrameTransform, fill: str,
                            opacity: float, css_class: str = ""):
    cls = f' class="{css_class}"' if css_class else ""
    return (f'<polygon{cls} points="{_points_attr(points, transform)}" fill="{fill}" '
            f'fill-opacity="{opacity}" stroke="none"/>\n')


def svg_string_draw_label(x, y, text, fill):
    return f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-size="14" fill="{fill}">{text}</text>\n'


def render_frame(frame: LoadedFrame, transform: FrameTransform, theme: dict,
                 epsilon: Optional[float] = None, viewing_range: Optional[float] = None,
                 range_for: Optional[int] = None) -> str:
    dims = FRAME_DIMENSIONS
    config = frame.positions
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{dims["width"]}" '
        f'height="{dims["height"]}">\n',
        f'<rect width="100%" height="100%" fill="{theme["background"]}"/>\n',
    ]
    try:
        cycle = connectivity_boundary(config)
    except GeometryError:
        cycle = None
    if cycle is not None and epsilon is not None and not cycle.degenerate:
        try:
            regions = wave_regions(cycle, epsilon)
            for ring, colour in ((regions.segments_old, "segment_old"), (regions.segments_new, "segment_new")):
                for seg in ring:
                    parts.append(svg_string_draw_polygon(
                        seg.corners, transform, theme[colour], dims["segment_opacity"], colour))
        except PreconditionError as e:
            logger.debug(f"round {frame.round}: no wave segments drawn ({e})")
    if cycle is not None and len(cycle) >= 2:
        parts.append(svg_string_draw_polyline(
            cycle.positions, transform, theme["boundary_line"], dims["line_width"], css_class="boundary"))
    if range_for is not None and viewing_range is not None and 0 <= range_for < config.n:
        x, y = transform(config.positions[range_for])
        parts.append(svg_string_draw_circle(
            x, y, viewing_range * transform.scale, "none", theme["range_circle"], css_class="range"))
    radius = dims["robot_radius"] * transform.scale
    for i, p in enumerate(config.positions):
        label = frame.roles[i] if i < len(frame.roles) else ""
        x, y = transform(p)
        parts.append(svg_string_draw_circle(x, y, radius, role_color(theme, label), css_class="robot"))
    parts.append(svg_string_draw_label(10, 20, f"round {frame.round}", theme["text_light"]))
    parts.append("</svg>\n")
    return "".join(parts)


def render_trace(trace: LoadedTrace, out_dir: str, frames_every: int = 1,
                 range_for: Optional[int] = None, theme_name: str = "light") -> List[str]:
    """Write frame_NNNN.svg for every frames_every-th round; returns the paths"""
    if not trace.frames:
        raise GeometryError("the trace holds no rounds to render")
    if frames_every < 1:
        raise ValueError(f"frames_every must be positive, got {frames_every}")
    theme = get_current_theme(theme_name)
    dims = FRAME_DIMENSIONS
    epsilon = viewing_range = None
    if trace.scenario is not None:
        viewing_range = trace.scenario.resolved_viewing_range
        if trace.scenario.protocol == "wave":
            epsilon = trace.scenario.protocol_params().epsilon
    pad = viewing_range if range_for is not None and viewing_range else 0.0
    transform = FrameTransform.fit((f.positions for f in trace.frames),
                                   dims["width"], dims["height"], dims["margin"], pad)
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for frame in trace.frames[::frames_every]:
        path = os.path.join(out_dir, frame_name(frame.round))
        with open(path, "w") as f:
            f.write(render_frame(frame, transform, theme, epsilon, viewing_range, range_for))
        written.append(path)
    logger.info(f"Rendered {len(written)} frames to {out_dir}")
    return written
