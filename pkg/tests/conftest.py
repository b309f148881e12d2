import dataclasses

import pytest

from fogsched.model import (ArcGroup, DestinationArea, NetworkConfig,
                            TaskClass, validate_config)
from fogsched.scenarios import load_scenario


def single_group_config(capacity=1, channels=1, mu=1.0, lam=1.0, eps=1.0,
                        idle=0.0, cloud_power=100.0, w=1, cloud_delay=5.0):
    """One class, one group, one area; the smallest legal network."""
    return validate_config(NetworkConfig(
        classes=(TaskClass(0, lam, cloud_power, {0: w}),),
        groups=(ArcGroup(0, 0, capacity, eps, idle),),
        areas=(DestinationArea(0, (0,), {0: channels}, {0: mu}),),
        cloud_delay=cloud_delay,
    ))


def two_group_config(mus=(1.0, 2.0), epss=(1.0, 5.0), lam=1.0,
                     capacity=1, channels=2, idle=(0.0, 0.0),
                     cloud_power=100.0, cloud_delay=5.0):
    """One class, two single-unit groups in separate areas (distinct rates)."""
    return validate_config(NetworkConfig(
        classes=(TaskClass(0, lam, cloud_power, {0: 1, 1: 1}),),
        groups=(ArcGroup(0, 0, capacity, epss[0], idle[0]),
                ArcGroup(1, 1, capacity, epss[1], idle[1])),
        areas=(DestinationArea(0, (0,), {0: channels}, {0: mus[0]}),
               DestinationArea(1, (1,), {0: channels}, {0: mus[1]})),
        cloud_delay=cloud_delay,
    ))


@pytest.fixture(scope="session")
def fig1_config():
    return load_scenario("fig1").config


@pytest.fixture
def fig1_scaled(fig1_config):
    def _at(h):
        return dataclasses.replace(fig1_config, scaling=h)
    return _at
