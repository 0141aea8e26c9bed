import json
import os

import pytest

from core.application import SwarmWaveApp
from core.errors import TraceExportError
from core.scenarios import Scenario
from core.simulator import run
from tests.shapes import regular_polygon
from ui.config import DEFAULT_SETTINGS


def test_defaults_without_config_file(app):
    assert app.settings == DEFAULT_SETTINGS


def test_set_setting_persists(app):
    assert app.set_setting("theme", "dark")
    assert not app.set_setting("volume", 11)
    with open(SwarmWaveApp.CONFIG_FILE) as f:
        assert json.load(f)["theme"] == "dark"
    assert SwarmWaveApp().settings["theme"] == "dark"


def test_explicit_config_directory(tmp_path):
    app = SwarmWaveApp(config_directory=str(tmp_path / "elsewhere"))
    app.set_setting("frames_every", 5)
    assert os.path.exists(tmp_path / "elsewhere" / "config.json")


def test_run_scenario_uses_default_out_dir(app, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    scenario = Scenario(name="square", positions=regular_polygon(4, radius=0.45), protocol="gta",
                        max_rounds=1, near_gathering_threshold=0.1)
    trace = app.run_scenario(scenario)
    assert trace.rounds == 1
    assert (tmp_path / DEFAULT_SETTINGS["out_dir"] / "metrics.csv").exists()


def test_emit_scenario_failure_returns_none(app, tmp_path):
    assert app.emit_scenario("grid_polygon", str(tmp_path / "x.json"), {"shape": "circle"}) is None
    assert app.emit_scenario("grid_polygon", str(tmp_path / "x.json"), {"colour": 1}) is None


def test_render_missing_trace_returns_none(app, tmp_path):
    assert app.render(str(tmp_path / "nowhere"), str(tmp_path / "frames")) is None


def test_run_scenario_raises_when_export_fails(app, tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    scenario = Scenario(name="square", positions=regular_polygon(4, radius=0.45), protocol="gta",
                        max_rounds=1, near_gathering_threshold=0.1)
    with pytest.raises(TraceExportError) as info:
        app.run_scenario(scenario, out_dir=str(blocker))
    assert info.value.path == str(blocker)
    assert not app.export(run(scenario), str(blocker), ["csv"])
