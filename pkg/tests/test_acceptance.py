"""Property sweeps over many configurations; run with -m slow"""

import numpy as np
import pytest

from core.geometry import EPS_GEOM, Configuration, is_near_gathering
from core.local_view import verify_local_executability
from core.protocol_gta import (
    GtaParams,
    gershgorin_certify,
    gta_epsilon_bound,
    gta_invert,
    gta_jacobian,
    gta_step,
)
from core.protocol_wave import WaveParams, egtm_invert, egtm_step, invert_round, main_step
from core.scenarios import Scenario, build_scenario, gen_grid_polygon, gen_m_fold, known_audits
from core.simulator import Termination, run
from core.symmetry import check_equivariance, detect_symmetries, symmetricity
from tests.shapes import cycle_of, square_grid
from utils.trace_io import METRICS_FILE, write_trace

pytestmark = pytest.mark.slow

WAVE_GRIDS = (
    [pytest.param(side, id=f"square{side}") for side in range(5, 16)]
    + [pytest.param(-side, id=f"hexagon{side}") for side in range(3, 6)]
)


def wave_grid(size: int) -> Configuration:
    """Square grid of side size, or hexagon fill of side -size"""
    if size > 0:
        return square_grid(size, 0.9)
    return gen_grid_polygon("hexagon", -size, 0.9)


def random_config(rng, n):
    return Configuration(rng.uniform(0.0, 0.8 * np.sqrt(n), size=(n, 2)))


def test_jacobian_agrees_with_finite_differences(rng):
    h = 1e-6
    for trial in range(100):
        n = int(rng.integers(2, 11))
        config = random_config(rng, n)
        params = GtaParams(0.9 * gta_epsilon_bound(n), n)
        analytic = gta_jacobian(config, params).entries
        flat = config.positions.reshape(-1)
        for col in range(flat.size):
            up, down = flat.copy(), flat.copy()
            up[col] += h
            down[col] -= h
            diff = (gta_step(Configuration(up.reshape(-1, 2)), params).positions
                    - gta_step(Configuration(down.reshape(-1, 2)), params).positions)
            np.testing.assert_allclose(analytic[:, col], diff.reshape(-1) / (2 * h), atol=1e-5)


@pytest.mark.parametrize("n", range(2, 21))
def test_certified_regime_always_inverts(rng, n):
    params = GtaParams.default(n)
    for _ in range(50):
        config = random_config(rng, n)
        assert gershgorin_certify(gta_jacobian(config, params)).certified
        recovered = gta_invert(gta_step(config, params), params)
        np.testing.assert_allclose(recovered.positions, config.positions, atol=1e-8)


@pytest.mark.parametrize("m", [2, 3, 4, 6])
def test_gta_keeps_m_fold_symmetry(m):
    config = gen_m_fold(m, np.random.default_rng(m).uniform(0.3, 1.4, size=(5, 2)))
    params = GtaParams.default(config.n)
    assert symmetricity(config) == m
    for _ in range(200):
        config = gta_step(config, params)
        assert symmetricity(config) == m


@pytest.mark.parametrize("m", [2, 3, 4, 6])
@pytest.mark.parametrize("seed", range(10))
def test_gta_is_equivariant(m, seed):
    config = gen_m_fold(m, np.random.default_rng(seed).uniform(0.2, 1.2, size=(4, 2)))
    params = GtaParams.default(config.n)
    for elem in detect_symmetries(config).elements:
        assert check_equivariance(lambda c: gta_step(c, params), config, elem) <= 1e-9


@pytest.mark.parametrize("size", WAVE_GRIDS)
def test_wave_is_equivariant(size):
    config = wave_grid(size)
    for elem in detect_symmetries(config).elements:
        assert check_equivariance(main_step, config, elem) <= 1e-9


def test_egtm_inverts_on_random_cycles(rng):
    for m in (3, 4, 7, 20, 64, 200):
        cycle = cycle_of(rng.uniform(-5.0, 5.0, size=(m, 2)))
        for epsilon in (0.05, 0.3, 0.49):
            back = egtm_invert(egtm_step(cycle, epsilon), epsilon)
            np.testing.assert_allclose(back.positions, cycle.positions, atol=1e-9)


@pytest.mark.parametrize("size", WAVE_GRIDS)
def test_wave_rounds_invert_until_near_gathering(size):
    config = wave_grid(size)
    params = WaveParams()
    start_symmetry = symmetricity(config, center_rule=False)
    for _ in range(5000):
        if is_near_gathering(config, params.viewing_range):
            break
        nxt = main_step(config, params)
        np.testing.assert_allclose(invert_round(nxt, params).positions, config.positions,
                                   atol=1e-8)
        assert symmetricity(nxt, center_rule=False) == start_symmetry
        config = nxt
    assert is_near_gathering(config, params.viewing_range)


@pytest.mark.parametrize("size", WAVE_GRIDS)
def test_wave_audits_hold_every_round(size):
    names = known_audits("wave")
    assert {"local_executability", "invert_roundtrip", "fsync_reference"} <= set(names)
    scenario = Scenario(name="grid", positions=wave_grid(size), audits=names, max_rounds=5000)
    trace = run(scenario)
    assert trace.termination is Termination.NEAR_GATHERING
    assert trace.symmetricity_constant()
    failures = trace.audit_failures()
    assert set(failures) == set(names) - {"start_hole_free"}
    assert failures == {name: 0 for name in failures}
    # every transition was checked
    assert all(record.audit_results for record in trace.records[1:])


def test_short_viewing_range_is_detected():
    report = verify_local_executability(square_grid(5, 0.9), WaveParams(viewing_range=1.5))
    assert not report.all_agree


def test_figure1b_splits_symmetrically():
    scenario = build_scenario("figure1b", side=6).with_overrides({"max_rounds": "300", "audits": ""})
    trace = run(scenario)
    assert not trace.final.connected
    assert trace.symmetricity_constant()


def test_figure1a_gathers_under_averaging():
    scenario = build_scenario("figure1a").with_overrides(
        {"max_rounds": "20000", "audits": "symmetry_preserved,collision_free"})
    trace = run(scenario)
    assert trace.termination is Termination.NEAR_GATHERING
    assert trace.final.diameter <= scenario.resolved_viewing_range + EPS_GEOM
    assert trace.symmetricity_constant()
    assert trace.audit_failures()["symmetry_preserved"] == 0


def test_metric_files_are_byte_identical(tmp_path):
    scenario = Scenario(name="grid", positions=square_grid(4, 0.9))
    for name in ("first", "second"):
        write_trace(run(scenario), str(tmp_path / name), ["csv"])
    first = (tmp_path / "first" / METRICS_FILE).read_bytes()
    assert first == (tmp_path / "second" / METRICS_FILE).read_bytes()
