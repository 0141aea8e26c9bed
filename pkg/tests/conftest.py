import os

import numpy as np
import pytest

from core.application import SwarmWaveApp


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def app(tmp_path, monkeypatch):
    """Application whose user config lives under tmp_path"""
    config_dir = tmp_path / "config"
    monkeypatch.setattr(SwarmWaveApp, "CONFIG_DIRECTORY", str(config_dir))
    monkeypatch.setattr(SwarmWaveApp, "CONFIG_FILE", os.path.join(str(config_dir), "config.json"))
    return SwarmWaveApp()
