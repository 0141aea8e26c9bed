import numpy as np
import pytest

from core.errors import ProtocolError
from core.protocol_gtc import GtcParams, gtc_step, perturb_off_rim, rim_robots, symmetry_gain_demo
from core.scenarios import gen_gtc_clusters


def test_params_validation():
    with pytest.raises(ProtocolError):
        GtcParams(viewing_range=0.0)


def test_free_robots_are_off_the_rim():
    config = gen_gtc_clusters()
    rim = rim_robots(config)
    assert rim == set(range(12)) - {3, 7, 11}


def test_only_free_robots_move():
    config = gen_gtc_clusters()
    perturbed, moved = perturb_off_rim(config, seed=7)
    assert moved == [3, 7, 11]
    shifted = np.hypot(*(perturbed.positions - config.positions).T)
    assert np.all(shifted[[0, 1, 2, 4, 5, 6, 8, 9, 10]] == 0.0)
    np.testing.assert_allclose(shifted[moved], 0.005)


def test_perturbation_needs_positive_jitter():
    with pytest.raises(ProtocolError):
        perturb_off_rim(gen_gtc_clusters(), jitter=0.0)


def test_step_maps_to_local_circle_centres():
    config = gen_gtc_clusters()
    nxt = gtc_step(config)
    # v and f see the same robots, so they land on the same centre
    np.testing.assert_allclose(nxt.positions[2], nxt.positions[3], atol=1e-12)


def test_round_gains_symmetry():
    report = symmetry_gain_demo(gen_gtc_clusters())
    assert report.symmetricity_start == 3
    assert report.symmetricity_perturbed == 1
    assert report.symmetricity_image == 3
    assert report.symmetricity_perturbed_image == 3
    assert report.images_coincide
    assert report.symmetry_gained
    assert report.to_dict()["moved"] == [3, 7, 11]
