import csv
import json
import math
import os

import numpy as np
import pytest

from core.errors import ScenarioError
from core.scenarios import Scenario, gen_satellite_ring
from core.simulator import run
from tests.shapes import regular_polygon
from utils.helpers import format_float, parse_formats, parse_overrides, thread_hint
from utils.trace_io import (
    METRICS_HEADER,
    POSITIONS_HEADER,
    load_trace,
    read_metrics,
    read_positions,
    write_trace,
)


@pytest.fixture
def gta_trace():
    scenario = Scenario(name="square", positions=regular_polygon(4, radius=0.45), protocol="gta",
                        max_rounds=2, near_gathering_threshold=0.1)
    return run(scenario)


def test_write_trace_files(gta_trace, tmp_path):
    written = write_trace(gta_trace, str(tmp_path))
    assert sorted(os.path.basename(p) for p in written) == ["metrics.csv", "positions.csv",
                                                           "trace.json"]
    with open(tmp_path / "positions.csv", newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == POSITIONS_HEADER
    assert len(rows) == 1 + 3 * 4
    metrics = read_metrics(str(tmp_path / "metrics.csv"))
    assert list(metrics[0]) == METRICS_HEADER
    assert [row["round"] for row in metrics] == ["0", "1", "2"]
    assert metrics[0]["connected"] == "1"
    assert metrics[0]["rotation_order"] == "4"
    envelope = json.loads((tmp_path / "trace.json").read_text())
    assert envelope["termination"] == "max_rounds"
    assert [entry["round"] for entry in envelope["audits"]] == [1, 2]
    assert envelope["start_audits"] == []


def test_csv_only(gta_trace, tmp_path):
    written = write_trace(gta_trace, str(tmp_path), ["csv"])
    assert len(written) == 2
    assert not (tmp_path / "trace.json").exists()


def test_reloaded_positions_are_exact(gta_trace, tmp_path):
    write_trace(gta_trace, str(tmp_path))
    loaded = load_trace(str(tmp_path))
    assert loaded.rounds == 2
    assert loaded.termination == "max_rounds"
    assert loaded.scenario.name == "square"
    for frame, record in zip(loaded.frames, gta_trace.records):
        np.testing.assert_array_equal(frame.positions.positions, record.positions.positions)


def test_roles_are_written_for_wave_runs(tmp_path):
    trace = run(Scenario(name="ring", positions=gen_satellite_ring(), audits=[]))
    write_trace(trace, str(tmp_path))
    frame = read_positions(str(tmp_path / "positions.csv"))[0]
    assert all(role.startswith("boundary:") for role in frame.roles[:8])
    assert all(role.startswith("wave-outer:") for role in frame.roles[8:])


def test_bad_positions_header(tmp_path):
    path = tmp_path / "positions.csv"
    path.write_text("t,i,x,y\n0,0,0.0,0.0\n")
    with pytest.raises(ScenarioError):
        read_positions(str(path))


def test_load_trace_without_positions(tmp_path):
    with pytest.raises(ScenarioError) as info:
        load_trace(str(tmp_path))
    assert info.value.field == "trace"


def test_format_float():
    assert format_float(0.1) == "0.1"
    assert float(format_float(1.0 / 3.0)) == 1.0 / 3.0
    assert format_float(math.nan) == "nan"
    assert format_float(True) == "1"
    assert format_float(7) == "7"
    assert format_float(None) == ""


def test_parse_overrides():
    assert parse_overrides(["epsilon=0.2", "max_rounds = 5", "epsilon=0.1"]) == {
        "epsilon": "0.1", "max_rounds": "5"}
    assert parse_overrides(None) == {}
    with pytest.raises(ScenarioError):
        parse_overrides(["epsilon"])


def test_parse_formats():
    assert parse_formats("csv, SVG") == ["csv", "svg"]
    with pytest.raises(ValueError):
        parse_formats("csv,pdf")


@pytest.mark.parametrize("raw, expected", [("4", 4), ("0", 1), ("many", 1)])
def test_thread_hint(monkeypatch, raw, expected):
    monkeypatch.setenv("SWARMWAVE_THREADS", raw)
    assert thread_hint() == expected
