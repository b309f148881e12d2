"""Admission policies: the PIER index rule and the PTR / PLPC benchmarks.

Each policy maps (state, config, arriving class) to a Decision.  All three
share the same feasibility filter and the same deterministic tie-break:
smaller group id first, cloud ordered after every edge group.
"""

from dataclasses import dataclass
from typing import Callable, Optional

from .model import (CLOUD, NetworkConfig, NetworkState, cloud_effective_rate,
                    feasible_destinations)


class InaccessiblePair(ValueError):
    """The class cannot be served at the requested group."""


@dataclass(frozen=True)
class Decision:
    kind: str                      # "edge" | "cloud" | "block"
    group: Optional[int] = None    # edge destination
    area: Optional[int] = None     # area whose channel a cloud task holds

    @staticmethod
    def edge(group: int) -> "Decision":
        return Decision("edge", group=group)

    @staticmethod
    def cloud(area: int) -> "Decision":
        return Decision("cloud", area=area)

    @staticmethod
    def block() -> "Decision":
        return Decision("block")


def incremental_power_rate(state: NetworkState, config: NetworkConfig,
                           j: int, destination) -> float:
    """Instantaneous power increase if the arriving task goes to ``destination``.

    ``destination`` is an edge group id or the CLOUD tag.  Placing a task in
    an idle group additionally pays that group's (scaled) idle power.
    """
    if destination == CLOUD:
        return config.classes[j].cloud_power
    k = destination
    w = config.classes[j].resource_req.get(k)
    if w is None:
        raise InaccessiblePair(f"class {j} cannot be served at group {k}")
    rate = w * config.groups[k].op_power_per_unit
    if state.group_load[k] == 0:
        rate += state.scaled.idle_power[k]
    return rate


def best_cloud_area(state: NetworkState, config: NetworkConfig, j: int) -> Optional[int]:
    """Feasible area with the fastest (j, .)-channels, smallest id on ties."""
    _, areas = feasible_destinations(state, config, j)
    if not areas:
        return None
    return max(areas, key=lambda l: (config.areas[l].mean_rate[j], -l))


def pier_index(state: NetworkState, config: NetworkConfig, j: int, destination) -> float:
    """Service rate per unit of incremental power for the given destination.

    For the cloud the service rate is the effective rate through the fastest
    feasible area (the wired delay included).
    """
    if destination == CLOUD:
        l = best_cloud_area(state, config, j)
        if l is None:
            raise ValueError("cloud not feasible in this state")
        return cloud_effective_rate(config, j, l) / config.classes[j].cloud_power
    k = destination
    mu = config.areas[config.groups[k].area].mean_rate[j]
    return mu / incremental_power_rate(state, config, j, k)


def _choose(state: NetworkState, config: NetworkConfig, j: int,
            edge_score: Callable[[int], float],
            cloud_score: Callable[[int], float],
            maximize: bool) -> Decision:
    """Pick the best feasible destination; ties go to the smallest group id,
    with the cloud ordered after all edge groups."""
    groups, areas = feasible_destinations(state, config, j)
    sign = 1.0 if maximize else -1.0
    best_key = None
    best_dec = None
    for k in groups:
        key = (sign * edge_score(k), 0, -k)  # score, edge-before-cloud, id
        if best_key is None or key > best_key:
            best_key, best_dec = key, Decision.edge(k)
    if areas:
        l = max(areas, key=lambda a: (config.areas[a].mean_rate[j], -a))
        key = (sign * cloud_score(l), -1, 0)
        if best_key is None or key > best_key:
            best_key, best_dec = key, Decision.cloud(l)
    return best_dec if best_dec is not None else Decision.block()


def pier_decide(state: NetworkState, config: NetworkConfig, j: int) -> Decision:
    """Highest service-rate-to-incremental-power ratio wins."""
    return _choose(
        state, config, j,
        edge_score=lambda k: (config.areas[config.groups[k].area].mean_rate[j]
                              / incremental_power_rate(state, config, j, k)),
        cloud_score=lambda l: (cloud_effective_rate(config, j, l)
                               / config.classes[j].cloud_power),
        maximize=True,
    )


def ptr_decide(state: NetworkState, config: NetworkConfig, j: int) -> Decision:
    """Fastest feasible destination wins, power ignored."""
    return _choose(
        state, config, j,
        edge_score=lambda k: config.areas[config.groups[k].area].mean_rate[j],
        cloud_score=lambda l: cloud_effective_rate(config, j, l),
        maximize=True,
    )


def plpc_decide(state: NetworkState, config: NetworkConfig, j: int) -> Decision:
    """Least incremental power wins, service rate ignored."""
    return _choose(
        state, config, j,
        edge_score=lambda k: incremental_power_rate(state, config, j, k),
        cloud_score=lambda l: config.classes[j].cloud_power,
        maximize=False,
    )


POLICIES = {
    "pier": pier_decide,
    "ptr": ptr_decide,
    "plpc": plpc_decide,
}
