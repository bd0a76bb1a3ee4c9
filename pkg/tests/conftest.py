"""Shared fixtures: tiny scenarios that keep the unit tests fast."""

import pytest

import cellsim as cs
from cellsim.config import MobilityConfig, NetworkConfig


@pytest.fixture
def default_cfg():
    return cs.default_config()


@pytest.fixture
def short_cfg():
    """Default scenario cut to a 10-step horizon."""
    return cs.default_config(horizon=10)


@pytest.fixture
def frozen_cfg():
    """A fully deterministic scenario: the five users sit still at one
    point, nothing fades, so every episode repeats the same numbers
    regardless of seed."""
    mobility = MobilityConfig(variant="limited", speed=0.0, init_radius=0.0,
                              waypoint_radius=0.0,
                              anchors=((100.0, 60.0),) * 5)
    return NetworkConfig(mobility=mobility, horizon=10)
