import json

import numpy as np
import pytest

from core.errors import ScenarioError
from core.geometry import disc_graph, is_connected
from core.protocol_gta import GtaParams
from core.protocol_gtc import GtcParams
from core.protocol_wave import WaveParams
from core.scenarios import (
    DEFAULT_AUDITS,
    GENERATORS,
    Scenario,
    build_scenario,
    gen_figure1,
    gen_grid_polygon,
    gen_gtc_clusters,
    gen_m_fold,
    gen_satellite_ring,
    gen_split_clusters,
    known_audits,
)
from core.symmetry import symmetricity


def make(**fields):
    base = {"name": "pair", "positions": [[0.0, 0.0], [0.5, 0.0]]}
    base.update(fields)
    return Scenario(**base)


@pytest.mark.parametrize("fields, bad_field", [
    ({"name": ""}, "name"),
    ({"positions": []}, "positions"),
    ({"protocol": "flocking"}, "protocol"),
    ({"protocol": "wave", "epsilon": 0.7}, "epsilon"),
    ({"protocol": "gta", "epsilon": 1.5}, "epsilon"),
    ({"viewing_range": -1.0}, "viewing_range"),
    ({"max_rounds": -1}, "max_rounds"),
    ({"protocol": "gta", "audits": ["segments_disjoint"]}, "audits"),
])
def test_validation_names_the_field(fields, bad_field):
    with pytest.raises(ScenarioError) as info:
        make(**fields)
    assert info.value.field == bad_field


def test_resolved_defaults():
    wave = make()
    assert wave.resolved_viewing_range == pytest.approx(2.0 + np.sqrt(2.0))
    assert wave.resolved_threshold == wave.resolved_viewing_range
    assert wave.resolved_audits == DEFAULT_AUDITS["wave"]
    gta = make(protocol="gta", near_gathering_threshold=0.25)
    assert gta.resolved_viewing_range == 1.0
    assert gta.resolved_threshold == 0.25


def test_protocol_params_types():
    assert isinstance(make(protocol="gta").protocol_params(), GtaParams)
    assert isinstance(make(protocol="gtc").protocol_params(), GtcParams)
    params = make(epsilon=0.2).protocol_params()
    assert isinstance(params, WaveParams)
    assert params.epsilon == 0.2


def test_overrides_are_typed():
    scenario = make().with_overrides({"epsilon": "0.2", "max_rounds": "5",
                                      "audits": "symmetry_preserved, collision_free"})
    assert scenario.epsilon == 0.2
    assert scenario.max_rounds == 5
    assert scenario.audits == ["symmetry_preserved", "collision_free"]


@pytest.mark.parametrize("overrides, bad_field", [
    ({"colour": "red"}, "colour"),
    ({"max_rounds": "many"}, "max_rounds"),
    ({"epsilon": "0.7"}, "epsilon"),
])
def test_bad_overrides(overrides, bad_field):
    with pytest.raises(ScenarioError) as info:
        make().with_overrides(overrides)
    assert info.value.field == bad_field


def test_save_and_load(tmp_path):
    path = tmp_path / "scenario.json"
    original = make(positions=[[0.1, 0.2], [1.0 / 3.0, 0.7]], epsilon=0.25, seed=4)
    original.save(str(path))
    loaded = Scenario.load(str(path))
    assert loaded.to_dict() == original.to_dict()
    np.testing.assert_array_equal(loaded.positions.positions, original.positions.positions)


def test_load_errors(tmp_path):
    with pytest.raises(ScenarioError) as info:
        Scenario.load(str(tmp_path / "missing.json"))
    assert info.value.field == "scenario_path"

    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ScenarioError):
        Scenario.load(str(broken))

    extra = tmp_path / "extra.json"
    extra.write_text(json.dumps({"name": "x", "positions": [[0, 0]], "speed": 2}))
    with pytest.raises(ScenarioError) as info:
        Scenario.load(str(extra))
    assert info.value.field == "speed"


def test_from_dict_checks_types():
    with pytest.raises(ScenarioError) as info:
        Scenario.from_dict({"name": "x", "positions": [[0, 0]], "max_rounds": "10"})
    assert info.value.field == "max_rounds"
    with pytest.raises(ScenarioError) as info:
        Scenario.from_dict({"name": "x"})
    assert info.value.field == "positions"


@pytest.mark.parametrize("shape, side, count, symmetry", [
    ("square", 5, 25, 1),
    ("square", 4, 16, 4),
    ("triangle", 3, 6, 3),
    ("triangle", 4, 10, 1),
    ("hexagon", 3, 18, 6),
])
def test_grid_polygons(shape, side, count, symmetry):
    config = gen_grid_polygon(shape, side, 0.9)
    assert config.n == count
    assert symmetricity(config) == symmetry
    assert is_connected(disc_graph(config, 1.0))


def test_grid_polygon_rejects_bad_input():
    with pytest.raises(ScenarioError):
        gen_grid_polygon("circle", 3, 0.9)
    with pytest.raises(ScenarioError):
        gen_grid_polygon("square", 3, 1.0)
    with pytest.raises(ScenarioError):
        gen_grid_polygon("hexagon", 1, 0.9)


def test_m_fold():
    config = gen_m_fold(4, [(0.6, 0.2), (0.3, 0.5)])
    assert config.n == 8
    assert symmetricity(config) == 4
    with pytest.raises(ScenarioError):
        gen_m_fold(3, [(0.0, 0.0)])


def test_m_fold_jitter_is_seeded():
    a = gen_m_fold(3, [(0.6, 0.2)], jitter=0.01, seed=5)
    b = gen_m_fold(3, [(0.6, 0.2)], jitter=0.01, seed=5)
    np.testing.assert_array_equal(a.positions, b.positions)
    assert symmetricity(a) == 3


def test_satellite_ring():
    config = gen_satellite_ring()
    assert config.n == 16
    assert symmetricity(config) == 8
    with pytest.raises(ScenarioError):
        gen_satellite_ring(m=2)
    with pytest.raises(ScenarioError):
        gen_satellite_ring(inset=5.0)


def test_split_clusters():
    config = gen_split_clusters(side=2)
    assert config.n == 8
    assert is_connected(disc_graph(config, 1.0))
    with pytest.raises(ScenarioError):
        gen_split_clusters(gap=1.0)


def test_gtc_clusters():
    config = gen_gtc_clusters()
    assert config.n == 12
    assert symmetricity(config) == 3
    with pytest.raises(ScenarioError):
        gen_gtc_clusters(radius=1.2)


def test_figure1_layouts():
    b = build_scenario("figure1b")
    assert b.n == 800
    assert b.protocol == "gta"
    assert b.qualitative
    a = gen_figure1("a")
    assert a.protocol == "gta"
    assert a.resolved_viewing_range == pytest.approx(2.0 + np.sqrt(2.0))
    assert a.n > 0
    with pytest.raises(ScenarioError):
        gen_figure1("c")


def test_registry():
    assert set(GENERATORS) >= {"grid_polygon", "m_fold", "figure1a", "figure1b",
                               "satellite_ring", "gtc_clusters"}
    grid = build_scenario("grid_polygon")
    assert grid.n == 25
    assert grid.protocol == "wave"
    assert build_scenario("grid_polygon", side_count=3).n == 9
    with pytest.raises(ScenarioError):
        build_scenario("spiral")


def test_known_audits_include_optional_ones():
    assert "local_executability" in known_audits("wave")
    assert "invert_roundtrip" in known_audits("gta")
