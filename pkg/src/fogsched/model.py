"""Network model: configuration, scaling, dynamic state and feasibility.

The system consists of J task classes, K edge resource groups (pools of
"ARC" units) partitioned into L destination areas, and an infinite-capacity
cloud reachable through any area's wireless channels.  A class-j task served
at group k occupies w_{j,k} ARC units and one (j, area(k))-channel for its
whole duration; a task sent to the cloud through area l occupies one
(j, l)-channel only.
"""

from dataclasses import dataclass, field, replace
from typing import Dict, List, Mapping, Optional, Tuple

CLOUD = "cloud"  # destination tag for the infinite-capacity remote pool


class ConfigError(ValueError):
    """A network configuration violates a structural invariant."""


class NonPositiveParameter(ConfigError):
    pass


class PowerOrderingViolation(ConfigError):
    """Serving at the edge must cost less power than serving in the cloud."""


class OverlappingAreas(ConfigError):
    pass


class EmptyArea(ConfigError):
    pass


class InvariantViolation(RuntimeError):
    """A state update broke a capacity or channel constraint (a bug)."""


@dataclass(frozen=True)
class TaskClass:
    """One class of offloaded tasks.

    ``resource_req`` maps group id -> ARC units needed; a group absent from
    the map is inaccessible to this class (the "infinite requirement" case).
    """

    id: int
    base_arrival_rate: float          # unscaled Poisson rate
    cloud_power: float                # power rate while served in the cloud
    resource_req: Mapping[int, int]

    def accessible(self, group_id: int) -> bool:
        return group_id in self.resource_req


@dataclass(frozen=True)
class ArcGroup:
    id: int
    area: int                         # id of the destination area holding it
    base_capacity: int                # unscaled ARC units
    op_power_per_unit: float          # power per occupied unit
    base_idle_power: float            # unscaled power while any unit is busy


@dataclass(frozen=True)
class DestinationArea:
    id: int
    groups: Tuple[int, ...]           # edge groups located in this area
    base_channels: Mapping[int, int]  # class id -> unscaled channel count
    mean_rate: Mapping[int, float]    # class id -> 1 / mean edge duration


@dataclass(frozen=True)
class NetworkConfig:
    """Immutable description of the whole network.

    ``scaling`` is the integer size parameter h: arrival rates, capacities,
    channel counts and idle powers all grow proportionally with it, while
    service rates, per-unit powers and the cloud delay stay fixed.
    """

    classes: Tuple[TaskClass, ...]
    groups: Tuple[ArcGroup, ...]
    areas: Tuple[DestinationArea, ...]
    cloud_delay: float
    scaling: int = 1
    duration_family: str = "exponential"   # exponential | deterministic | pareto
    pareto_shape: Optional[float] = None
    cloud_duration_mode: str = "effective_rate"  # or "edge_plus_delay"

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    @property
    def num_groups(self) -> int:
        return len(self.groups)

    @property
    def num_areas(self) -> int:
        return len(self.areas)

    def area_of(self, group_id: int) -> int:
        return self.groups[group_id].area

    def with_scaling(self, h: int) -> "NetworkConfig":
        return replace(self, scaling=h)


@dataclass(frozen=True)
class ScaledParams:
    """Parameter view after applying the size parameter h."""

    h: int
    arrival_rate: Tuple[float, ...]              # per class
    capacity: Tuple[int, ...]                    # per group
    channels: Tuple[Tuple[int, ...], ...]        # [class][area]
    idle_power: Tuple[float, ...]                # per group


def apply_scaling(config: NetworkConfig, h: int) -> ScaledParams:
    """Scale arrivals, capacities, channels and idle power by h."""
    if h < 1 or int(h) != h:
        raise ValueError(f"scaling parameter must be a positive integer, got {h}")
    h = int(h)
    lam = tuple(h * c.base_arrival_rate for c in config.classes)
    cap = tuple(h * g.base_capacity for g in config.groups)
    chan = tuple(
        tuple(h * a.base_channels.get(j, 0) for a in config.areas)
        for j in range(config.num_classes)
    )
    idle = tuple(h * g.base_idle_power for g in config.groups)
    return ScaledParams(h=h, arrival_rate=lam, capacity=cap, channels=chan, idle_power=idle)


def validate_config(config: NetworkConfig) -> NetworkConfig:
    """Check all structural invariants; return the config unchanged if valid."""
    J, K, L = config.num_classes, config.num_groups, config.num_areas
    if J == 0 or K == 0 or L == 0:
        raise ConfigError("need at least one class, group and area")
    for i, c in enumerate(config.classes):
        if c.id != i:
            raise ConfigError(f"class ids must be 0..J-1 in order, got {c.id} at {i}")
        if c.base_arrival_rate <= 0:
            raise NonPositiveParameter(f"class {i}: base_arrival_rate must be > 0")
        if c.cloud_power <= 0:
            raise NonPositiveParameter(f"class {i}: cloud_power must be > 0")
        for k, w in c.resource_req.items():
            if not (0 <= k < K):
                raise ConfigError(f"class {i}: unknown group {k} in resource_req")
            if w < 1 or int(w) != w:
                raise NonPositiveParameter(
                    f"class {i}: resource requirement for group {k} must be a positive integer"
                )
    for i, g in enumerate(config.groups):
        if g.id != i:
            raise ConfigError(f"group ids must be 0..K-1 in order, got {g.id} at {i}")
        if g.base_capacity < 1:
            raise NonPositiveParameter(f"group {i}: base_capacity must be >= 1")
        if g.op_power_per_unit <= 0:
            raise NonPositiveParameter(f"group {i}: op_power_per_unit must be > 0")
        if g.base_idle_power < 0:
            raise NonPositiveParameter(f"group {i}: base_idle_power must be >= 0")
        if not (0 <= g.area < L):
            raise ConfigError(f"group {i}: unknown area {g.area}")
    seen: Dict[int, int] = {}
    for a in config.areas:
        for k in a.groups:
            if k in seen:
                raise OverlappingAreas(f"group {k} listed in areas {seen[k]} and {a.id}")
            seen[k] = a.id
    for i, a in enumerate(config.areas):
        if a.id != i:
            raise ConfigError(f"area ids must be 0..L-1 in order, got {a.id} at {i}")
        if not a.groups:
            raise EmptyArea(f"area {i} has no groups")
        for k in a.groups:
            if not (0 <= k < K):
                raise ConfigError(f"area {i}: unknown group {k}")
            if config.groups[k].area != i:
                raise ConfigError(f"group {k} claims area {config.groups[k].area}, listed in {i}")
        for j in range(J):
            if a.base_channels.get(j, 0) < 1:
                raise NonPositiveParameter(f"area {i}: base_channels for class {j} must be >= 1")
            if a.mean_rate.get(j, 0.0) <= 0:
                raise NonPositiveParameter(f"area {i}: mean_rate for class {j} must be > 0")
    if set(seen) != set(range(K)):
        missing = sorted(set(range(K)) - set(seen))
        raise ConfigError(f"groups {missing} not assigned to any area")
    for c in config.classes:
        for k, w in c.resource_req.items():
            g = config.groups[k]
            if w * g.op_power_per_unit >= c.cloud_power:
                raise PowerOrderingViolation(
                    f"class {c.id}, group {k}: w*eps = {w * g.op_power_per_unit} "
                    f"must be < cloud power {c.cloud_power}"
                )
    if config.cloud_delay < 0:
        raise NonPositiveParameter("cloud_delay must be >= 0")
    if config.duration_family not in ("exponential", "deterministic", "pareto"):
        raise ConfigError(f"unknown duration family {config.duration_family!r}")
    if config.duration_family == "pareto":
        if config.pareto_shape is None or config.pareto_shape <= 1:
            raise ConfigError("pareto duration family needs shape > 1")
    if config.scaling < 1 or int(config.scaling) != config.scaling:
        raise NonPositiveParameter("scaling must be a positive integer")
    return config


def cloud_effective_rate(config: NetworkConfig, j: int, area: int) -> float:
    """Service rate of a cloud-bound class-j task routed through ``area``.

    The wired edge-to-cloud delay adds to the mean transmission time, so the
    effective rate is 1 / (1/mu + D0).
    """
    mu = config.areas[area].mean_rate[j]
    return 1.0 / (1.0 / mu + config.cloud_delay)


class NetworkState:
    """Counts of in-service tasks, with cached group loads and channel use.

    ``X[j][k]`` counts class-j tasks served at edge group k; ``Z[j][l]``
    counts class-j tasks in the cloud holding a (j, l)-channel.
    """

    __slots__ = ("config", "scaled", "X", "Z", "group_load", "channel_use")

    def __init__(self, config: NetworkConfig, scaled: Optional[ScaledParams] = None):
        self.config = config
        self.scaled = scaled if scaled is not None else apply_scaling(config, config.scaling)
        J, K, L = config.num_classes, config.num_groups, config.num_areas
        self.X = [[0] * K for _ in range(J)]
        self.Z = [[0] * L for _ in range(J)]
        self.group_load = [0] * K          # occupied ARC units per group
        self.channel_use = [[0] * L for _ in range(J)]  # Y[j][l]

    @classmethod
    def from_counts(cls, config: NetworkConfig, X, Z,
                    scaled: Optional[ScaledParams] = None) -> "NetworkState":
        state = cls(config, scaled)
        for j, row in enumerate(X):
            for k, n in enumerate(row):
                for _ in range(n):
                    state.admit_edge(j, k)
        for j, row in enumerate(Z):
            for l, n in enumerate(row):
                for _ in range(n):
                    state.admit_cloud(j, l)
        return state

    def copy(self) -> "NetworkState":
        other = NetworkState.__new__(NetworkState)
        other.config = self.config
        other.scaled = self.scaled
        other.X = [row[:] for row in self.X]
        other.Z = [row[:] for row in self.Z]
        other.group_load = self.group_load[:]
        other.channel_use = [row[:] for row in self.channel_use]
        return other

    def admit_edge(self, j: int, k: int) -> None:
        w = self.config.classes[j].resource_req.get(k)
        if w is None:
            raise InvariantViolation(f"class {j} cannot be served at group {k}")
        area = self.config.groups[k].area
        if self.group_load[k] + w > self.scaled.capacity[k]:
            raise InvariantViolation(f"group {k} capacity exceeded")
        if self.channel_use[j][area] + 1 > self.scaled.channels[j][area]:
            raise InvariantViolation(f"({j},{area})-channels exceeded")
        self.X[j][k] += 1
        self.group_load[k] += w
        self.channel_use[j][area] += 1

    def release_edge(self, j: int, k: int) -> None:
        if self.X[j][k] <= 0:
            raise InvariantViolation(f"no class-{j} task at group {k} to release")
        w = self.config.classes[j].resource_req[k]
        area = self.config.groups[k].area
        self.X[j][k] -= 1
        self.group_load[k] -= w
        self.channel_use[j][area] -= 1

    def admit_cloud(self, j: int, area: int) -> None:
        if self.channel_use[j][area] + 1 > self.scaled.channels[j][area]:
            raise InvariantViolation(f"({j},{area})-channels exceeded")
        self.Z[j][area] += 1
        self.channel_use[j][area] += 1

    def release_cloud(self, j: int, area: int) -> None:
        if self.Z[j][area] <= 0:
            raise InvariantViolation(f"no class-{j} cloud task via area {area} to release")
        self.Z[j][area] -= 1
        self.channel_use[j][area] -= 1

    def total_in_flight(self, j: int) -> int:
        return sum(self.X[j]) + sum(self.Z[j])

    def check_invariants(self) -> None:
        """Recompute every constraint from scratch; raise on any violation."""
        cfg, sc = self.config, self.scaled
        for k in range(cfg.num_groups):
            load = sum(
                cfg.classes[j].resource_req.get(k, 0) * self.X[j][k]
                for j in range(cfg.num_classes)
            )
            if load != self.group_load[k]:
                raise InvariantViolation(f"group {k}: cached load {self.group_load[k]} != {load}")
            if load > sc.capacity[k]:
                raise InvariantViolation(f"group {k}: load {load} > capacity {sc.capacity[k]}")
        for j in range(cfg.num_classes):
            for l, a in enumerate(cfg.areas):
                y = self.Z[j][l] + sum(self.X[j][k] for k in a.groups)
                if y != self.channel_use[j][l]:
                    raise InvariantViolation(f"({j},{l}): cached Y {self.channel_use[j][l]} != {y}")
                if y > sc.channels[j][l]:
                    raise InvariantViolation(f"({j},{l}): Y {y} > {sc.channels[j][l]}")
            total = sum(self.X[j]) + sum(self.Z[j])
            if total > sum(sc.channels[j]):
                raise InvariantViolation(f"class {j}: total {total} exceeds total channels")


def channel_occupancy(state: NetworkState, j: int, area: int) -> int:
    """Number of occupied (j, area)-channels (edge plus cloud-bound)."""
    return state.channel_use[j][area]


def feasible_destinations(state: NetworkState, config: NetworkConfig,
                          j: int) -> Tuple[List[int], List[int]]:
    """Edge groups and cloud-routing areas that can accept a class-j task now.

    A group qualifies if it is accessible, has w_{j,k} free units and its
    area has a free (j, .)-channel; an area qualifies for cloud routing if it
    has a free (j, .)-channel.  Empty results mean the task must be blocked.
    """
    sc = state.scaled
    req = config.classes[j].resource_req
    groups = [
        k for k, w in req.items()
        if state.group_load[k] + w <= sc.capacity[k]
        and state.channel_use[j][config.groups[k].area] < sc.channels[j][config.groups[k].area]
    ]
    groups.sort()
    areas = [
        l for l in range(config.num_areas)
        if state.channel_use[j][l] < sc.channels[j][l]
    ]
    return groups, areas
