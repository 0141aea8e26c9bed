import math

import numpy as np
import pytest

from core.errors import ProtocolError
from core.geometry import Configuration
from core.protocol_gta import (
    GtaParams,
    bump,
    gershgorin_certify,
    gta_bump_derivative,
    gta_epsilon_bound,
    gta_invert,
    gta_jacobian,
    gta_step,
    gta_target,
)
from core.symmetry import symmetricity
from tests.shapes import regular_polygon, square_grid


def test_bump_values():
    assert bump(0.0) == 1.0
    assert bump(0.5) == pytest.approx(math.exp(-0.25 / 0.75))
    assert bump(1.0) == 0.0
    np.testing.assert_array_equal(bump(np.array([1.0, 2.0])), [0.0, 0.0])
    with pytest.raises(ProtocolError):
        bump(-0.1)


def test_bump_derivative_matches_finite_difference():
    h = 1e-6
    for x in (0.1, 0.3, 0.7, 0.95):
        numeric = (bump(x + h) - bump(x - h)) / (2 * h)
        assert gta_bump_derivative(x) == pytest.approx(numeric, abs=1e-6)
    assert gta_bump_derivative(1.5) == 0.0


def test_epsilon_bound():
    assert gta_epsilon_bound(2) == pytest.approx(2.0 / 27.0)
    with pytest.raises(ProtocolError):
        gta_epsilon_bound(1)


def test_params_validation():
    with pytest.raises(ProtocolError):
        GtaParams(epsilon=1.0, n=3)
    with pytest.raises(ProtocolError):
        GtaParams(epsilon=0.01, n=3, viewing_range=0.0)
    assert GtaParams.default(1).epsilon == 0.5
    assert GtaParams.default(10).certified_regime
    assert not GtaParams(epsilon=0.5, n=10).certified_regime


def test_two_robot_round():
    config = Configuration([(0.0, 0.0), (0.5, 0.0)])
    nxt = gta_step(config, GtaParams(epsilon=0.1, n=2))
    expected = 0.025 * math.exp(-1.0 / 15.0)
    assert nxt.positions[0] == pytest.approx([expected, 0.0], abs=1e-15)
    assert nxt.positions[1] == pytest.approx([0.5 - expected, 0.0], abs=1e-15)


def test_single_robot_never_moves():
    config = Configuration([(2.0, -1.0)])
    np.testing.assert_array_equal(gta_step(config).positions, config.positions)


def test_step_agrees_with_per_robot_target(rng):
    config = Configuration(rng.uniform(0.0, 1.5, size=(8, 2)))
    params = GtaParams.default(8)
    nxt = gta_step(config, params)
    for i in range(config.n):
        expected = config.positions[i] + params.epsilon * gta_target(i, config)
        np.testing.assert_allclose(nxt.positions[i], expected, atol=1e-15)


def test_mismatched_params_raise():
    with pytest.raises(ProtocolError):
        gta_step(Configuration(regular_polygon(4)), GtaParams(epsilon=0.01, n=5))


def test_jacobian_matches_finite_differences(rng):
    config = Configuration(rng.uniform(0.0, 1.2, size=(6, 2)))
    params = GtaParams(epsilon=0.05, n=6)
    analytic = gta_jacobian(config, params).entries
    h = 1e-6
    flat = config.positions.reshape(-1)
    numeric = np.empty_like(analytic)
    for col in range(flat.size):
        up, down = flat.copy(), flat.copy()
        up[col] += h
        down[col] -= h
        f_up = gta_step(Configuration(up.reshape(-1, 2)), params).positions.reshape(-1)
        f_down = gta_step(Configuration(down.reshape(-1, 2)), params).positions.reshape(-1)
        numeric[:, col] = (f_up - f_down) / (2 * h)
    np.testing.assert_allclose(analytic, numeric, atol=1e-5)


def test_certified_round_inverts():
    config = square_grid(3, 0.6)
    params = GtaParams.default(config.n)
    certificate = gershgorin_certify(gta_jacobian(config, params))
    assert certificate.certified
    assert certificate.margin > 0
    recovered = gta_invert(gta_step(config, params), params)
    np.testing.assert_allclose(recovered.positions, config.positions, atol=1e-8)


def test_gershgorin_rejects_zero_row():
    assert not gershgorin_certify(np.zeros((2, 2))).certified
    with pytest.raises(ProtocolError):
        gershgorin_certify(np.zeros((2, 3)))


def test_m_fold_symmetry_kept_over_rounds():
    config = Configuration(regular_polygon(6, radius=0.8))
    params = GtaParams.default(config.n)
    for _ in range(5):
        config = gta_step(config, params)
        assert symmetricity(config) == 6
