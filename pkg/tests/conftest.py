import numpy as np
import pytest

from irsmec import ScenarioConfig
from irsmec.channel import ChannelSet


def make_cfg(**overrides):
    """Scenario at defaults with overrides applied."""
    return ScenarioConfig(**overrides)


def tiny_cfg(num_elements=1, **overrides):
    """Smallest K=1 scenario: one BS with one antenna, one small IRS."""
    params = dict(num_wds=1, num_bs=1, antennas_per_bs=1, num_irs=1,
                  elements_per_irs=num_elements,
                  data_size_bits=(250_000,), complexity=(700.0,),
                  local_cpu=(4e8,))
    params.update(overrides)
    return ScenarioConfig(**params)


def manual_channels(direct, reflect, cascade):
    return ChannelSet(np.asarray(direct, dtype=complex),
                      np.asarray(reflect, dtype=complex),
                      np.asarray(cascade, dtype=complex))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
