import numpy as np
import pytest

from uavcov.config import FadingConfig, MobilityConfig, NetworkConfig


@pytest.fixture
def baseline_network() -> NetworkConfig:
    return NetworkConfig(radius=40.0, height=30.0, serving_altitude=10.0,
                         n_interferers=2, path_loss_exponent=2.0)


@pytest.fixture
def baseline_mobility() -> MobilityConfig:
    return MobilityConfig(speed_min=0.2, speed_max=10.0, dwell_min=2.0,
                          dwell_max=6.0, hop_range=10.0)


@pytest.fixture
def rayleigh_fading() -> FadingConfig:
    return FadingConfig(serving_m=1, interferer_m=1)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
