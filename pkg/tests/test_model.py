import dataclasses

import numpy as np
import pytest

from fogsched.model import (ArcGroup, CLOUD, ConfigError, DestinationArea,
                            EmptyArea, InvariantViolation, NetworkConfig,
                            NetworkState, NonPositiveParameter,
                            OverlappingAreas, PowerOrderingViolation,
                            TaskClass, apply_scaling, channel_occupancy,
                            cloud_effective_rate, feasible_destinations,
                            validate_config)

from conftest import single_group_config, two_group_config


def test_apply_scaling_multiplies_the_right_parameters(fig1_config):
    base = apply_scaling(fig1_config, 1)
    tripled = apply_scaling(fig1_config, 3)
    assert tripled.arrival_rate[0] == pytest.approx(3 * base.arrival_rate[0])
    assert tripled.capacity == tuple(3 * c for c in base.capacity)
    assert tripled.channels[0] == tuple(3 * c for c in base.channels[0])
    assert tripled.idle_power == tuple(3 * p for p in base.idle_power)


def test_apply_scaling_rejects_bad_h(fig1_config):
    with pytest.raises(ValueError):
        apply_scaling(fig1_config, 0)
    with pytest.raises(ValueError):
        apply_scaling(fig1_config, 1.5)


def test_cloud_effective_rate():
    cfg = single_group_config(mu=2.0, cloud_delay=5.0)
    # 1 / (1/2 + 5) = 2/11
    assert cloud_effective_rate(cfg, 0, 0) == pytest.approx(2.0 / 11.0)


def test_cloud_effective_rate_zero_delay():
    cfg = single_group_config(mu=2.0, cloud_delay=0.0)
    assert cloud_effective_rate(cfg, 0, 0) == pytest.approx(2.0)


def test_validate_rejects_nonpositive_rate():
    with pytest.raises(NonPositiveParameter):
        single_group_config(lam=0.0)


def test_validate_rejects_power_ordering():
    # edge power must be strictly below cloud power
    with pytest.raises(PowerOrderingViolation):
        single_group_config(eps=10.0, cloud_power=10.0)


def test_validate_rejects_overlapping_areas():
    cfg = two_group_config()
    areas = (
        DestinationArea(0, (0, 1), {0: 2}, {0: 1.0}),
        DestinationArea(1, (1,), {0: 2}, {0: 2.0}),
    )
    with pytest.raises(OverlappingAreas):
        validate_config(dataclasses.replace(cfg, areas=areas))


def test_validate_rejects_empty_area():
    cfg = two_group_config()
    groups = (dataclasses.replace(cfg.groups[0]),
              dataclasses.replace(cfg.groups[1], area=0))
    areas = (
        DestinationArea(0, (0, 1), {0: 2}, {0: 1.0}),
        DestinationArea(1, (), {0: 2}, {0: 2.0}),
    )
    with pytest.raises(EmptyArea):
        validate_config(dataclasses.replace(cfg, groups=groups, areas=areas))


def test_validate_rejects_out_of_order_ids():
    cfg = single_group_config()
    bad = dataclasses.replace(cfg, classes=(
        TaskClass(1, 1.0, 100.0, {0: 1}),))
    with pytest.raises(ConfigError):
        validate_config(bad)


def test_validate_rejects_unassigned_group():
    with pytest.raises(ConfigError):
        validate_config(NetworkConfig(
            classes=(TaskClass(0, 1.0, 100.0, {0: 1}),),
            groups=(ArcGroup(0, 0, 1, 1.0, 0.0), ArcGroup(1, 0, 1, 1.0, 0.0)),
            areas=(DestinationArea(0, (0,), {0: 1}, {0: 1.0}),),
            cloud_delay=1.0,
        ))


def test_admit_release_round_trip():
    cfg = single_group_config(capacity=2, channels=3)
    st = NetworkState(cfg)
    st.admit_edge(0, 0)
    st.admit_cloud(0, 0)
    assert st.X[0][0] == 1 and st.Z[0][0] == 1
    assert st.group_load[0] == 1
    assert channel_occupancy(st, 0, 0) == 2
    st.check_invariants()
    st.release_edge(0, 0)
    st.release_cloud(0, 0)
    assert st.total_in_flight(0) == 0
    assert st.group_load[0] == 0 and channel_occupancy(st, 0, 0) == 0


def test_admit_edge_capacity_guard():
    cfg = single_group_config(capacity=1, channels=5)
    st = NetworkState(cfg)
    st.admit_edge(0, 0)
    with pytest.raises(InvariantViolation):
        st.admit_edge(0, 0)


def test_admit_channel_guard_spans_edge_and_cloud():
    cfg = single_group_config(capacity=5, channels=1)
    st = NetworkState(cfg)
    st.admit_edge(0, 0)
    with pytest.raises(InvariantViolation):
        st.admit_cloud(0, 0)


def test_release_without_task_raises():
    st = NetworkState(single_group_config())
    with pytest.raises(InvariantViolation):
        st.release_edge(0, 0)
    with pytest.raises(InvariantViolation):
        st.release_cloud(0, 0)


def test_from_counts_and_copy(fig1_config):
    cfg = fig1_config
    X = [[0] * cfg.num_groups for _ in range(cfg.num_classes)]
    Z = [[0] * cfg.num_areas for _ in range(cfg.num_classes)]
    X[0][0] = 1
    Z[0][2] = 1
    st = NetworkState.from_counts(cfg, X, Z)
    st.check_invariants()
    other = st.copy()
    other.release_edge(0, 0)
    assert st.X[0][0] == 1 and other.X[0][0] == 0


def test_feasible_destinations_excludes_saturated(fig1_config):
    st = NetworkState(fig1_config)
    groups, areas = feasible_destinations(st, fig1_config, 0)
    assert groups == [0, 1, 2, 3, 4]
    assert areas == [0, 1, 2, 3, 4]
    st.admit_edge(0, 2)   # C = Gamma = 1 at h=1: area 2 is now full
    groups, areas = feasible_destinations(st, fig1_config, 0)
    assert groups == [0, 1, 3, 4]
    assert areas == [0, 1, 3, 4]


def test_inaccessible_group_never_feasible():
    cfg = two_group_config()
    cfg = dataclasses.replace(cfg, classes=(
        TaskClass(0, 1.0, 100.0, {0: 1}),))  # group 1 missing from the map
    cfg = validate_config(cfg)
    st = NetworkState(cfg)
    groups, _ = feasible_destinations(st, cfg, 0)
    assert groups == [0]


def test_random_walk_keeps_invariants(fig1_scaled):
    """Random admits and releases must never corrupt the cached counters."""
    cfg = fig1_scaled(2)
    st = NetworkState(cfg)
    rng = np.random.default_rng(42)
    active = []
    for _ in range(500):
        if active and rng.random() < 0.4:
            kind, j, loc = active.pop(rng.integers(len(active)))
            if kind == "edge":
                st.release_edge(j, loc)
            else:
                st.release_cloud(j, loc)
        else:
            j = int(rng.integers(cfg.num_classes))
            groups, areas = feasible_destinations(st, cfg, j)
            options = [("edge", j, k) for k in groups]
            options += [("cloud", j, l) for l in areas]
            if not options:
                continue
            kind, j, loc = options[rng.integers(len(options))]
            if kind == "edge":
                st.admit_edge(j, loc)
            else:
                st.admit_cloud(j, loc)
            active.append((kind, j, loc))
        st.check_invariants()
