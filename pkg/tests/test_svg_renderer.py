import os
import re

import pytest

from core.errors import GeometryError
from core.geometry import Configuration
from core.scenarios import Scenario, gen_satellite_ring
from core.simulator import Trace, run
from tests.shapes import regular_polygon
from ui.config import DARK_THEME, LIGHT_THEME, get_current_theme, role_color
from ui.console import summary_line
from ui.svg_renderer import FrameTransform, frame_name, render_trace
from utils.trace_io import LoadedTrace, load_trace, write_trace


def rendered(trace: Trace, tmp_path, **kwargs):
    trace_dir = tmp_path / "trace"
    write_trace(trace, str(trace_dir))
    return render_trace(load_trace(str(trace_dir)), str(tmp_path / "frames"), **kwargs)


@pytest.fixture
def gta_trace():
    return run(Scenario(name="square", positions=regular_polygon(4, radius=0.45), protocol="gta",
                        max_rounds=2, near_gathering_threshold=0.1))


def test_frame_names():
    assert frame_name(0) == "frame_0000.svg"
    assert frame_name(123) == "frame_0123.svg"


def test_transform_flips_y():
    transform = FrameTransform.fit([Configuration([(0.0, 0.0), (1.0, 1.0)])], 100, 100, 10)
    assert transform((0.0, 0.0)) == pytest.approx((10.0, 90.0))
    assert transform((1.0, 1.0)) == pytest.approx((90.0, 10.0))


def test_one_frame_per_round(gta_trace, tmp_path):
    paths = rendered(gta_trace, tmp_path)
    assert [os.path.basename(p) for p in paths] == ["frame_0000.svg", "frame_0001.svg",
                                                   "frame_0002.svg"]
    svg = open(paths[0]).read()
    assert svg.count('class="robot"') == 4
    assert "round 0" in svg


def test_boundary_polyline_is_closed(gta_trace, tmp_path):
    svg = open(rendered(gta_trace, tmp_path)[0]).read()
    points = re.search(r'<polyline class="boundary" points="([^"]+)"', svg).group(1).split()
    assert len(points) == 5
    assert points[0] == points[-1]


def test_frame_stride_and_range_circle(gta_trace, tmp_path):
    paths = rendered(gta_trace, tmp_path, frames_every=2, range_for=0)
    assert [os.path.basename(p) for p in paths] == ["frame_0000.svg", "frame_0002.svg"]
    assert 'class="range"' in open(paths[0]).read()


def test_wave_frames_shade_segments(tmp_path):
    trace = run(Scenario(name="ring", positions=gen_satellite_ring(), audits=[]))
    svg = open(rendered(trace, tmp_path)[0]).read()
    assert svg.count('class="segment_old"') == 8
    assert svg.count('class="segment_new"') == 8
    assert LIGHT_THEME["role_wave_outer"] in svg


def test_empty_trace_raises(tmp_path):
    with pytest.raises(GeometryError):
        render_trace(LoadedTrace([]), str(tmp_path))


def test_bad_stride_raises(gta_trace, tmp_path):
    with pytest.raises(ValueError):
        rendered(gta_trace, tmp_path, frames_every=0)


def test_role_colours():
    assert role_color(LIGHT_THEME, "wave-inner:2") == LIGHT_THEME["role_wave_inner"]
    assert role_color(LIGHT_THEME, "boundary:0") == LIGHT_THEME["role_boundary"]
    assert role_color(LIGHT_THEME, "") == LIGHT_THEME["role_unknown"]
    assert get_current_theme("Dark") is DARK_THEME


def test_summary_line(gta_trace):
    line = summary_line(gta_trace)
    assert "square" in line
    assert "max_rounds" in line
    assert "symmetricity 4 -> 4" in line
