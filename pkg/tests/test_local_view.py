import numpy as np

from core.local_view import local_main_step, local_outcome, verify_local_executability
from core.protocol_wave import RoleKind, WaveParams, main_step
from core.scenarios import gen_satellite_ring


def test_satellite_ring_is_locally_executable():
    report = verify_local_executability(gen_satellite_ring())
    assert report.all_agree
    assert len(report.checks) == 16
    assert report.to_dict()["disagreements"] == []


def test_short_range_leaves_robots_undecided():
    config = gen_satellite_ring()
    params = WaveParams(viewing_range=1.5)
    outcome = local_outcome(config, 0, params)
    assert not outcome.decided
    report = verify_local_executability(config, params)
    assert not report.all_agree
    assert len(report.disagreements) == config.n


def test_local_round_matches_global_round():
    config = gen_satellite_ring()
    np.testing.assert_allclose(local_main_step(config).positions, main_step(config).positions,
                               atol=1e-9)


def test_corner_decides_it_is_on_the_boundary():
    outcome = local_outcome(gen_satellite_ring(), 0)
    assert outcome.decided
    assert outcome.role.kind is RoleKind.BOUNDARY
