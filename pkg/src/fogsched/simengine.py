"""Event-driven simulation of the offloading system under a policy.

Poisson arrivals per class, general task durations, and time-weighted
accumulation of the throughput and power integrands whose ratio is the
energy-efficiency objective.  One replication is strictly sequential and
deterministic given its seed; replications use independent substreams.
"""

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats

from .model import (NetworkConfig, NetworkState, apply_scaling,
                    cloud_effective_rate)
from .policies import Decision

Policy = Callable[[NetworkState, NetworkConfig, int], Decision]


class DegenerateRun(RuntimeError):
    """A run produced zero throughput; the efficiency ratio is undefined."""


@dataclass(frozen=True)
class DurationDistribution:
    """Task-duration family with a given mean.

    Pareto uses the scale x_m = mean*(shape-1)/shape so the distribution
    mean equals ``mean``; shape must exceed 1 for the mean to exist.
    """

    family: str                 # exponential | deterministic | pareto
    mean: float
    shape: Optional[float] = None

    def __post_init__(self):
        if self.mean <= 0:
            raise ValueError("mean must be positive")
        if self.family == "pareto":
            if self.shape is None or self.shape <= 1:
                raise ValueError("pareto needs shape > 1 (mean undefined otherwise)")
        elif self.family not in ("exponential", "deterministic"):
            raise ValueError(f"unknown duration family {self.family!r}")


def sample_duration(dist: DurationDistribution, rng: np.random.Generator) -> float:
    """Draw one strictly positive task duration.

    Every family consumes exactly one uniform via its inverse CDF (the
    deterministic family burns it unused) so that runs differing only in
    the duration family stay on common random numbers.
    """
    u = 1.0 - rng.random()  # in (0, 1]
    if dist.family == "exponential":
        return -dist.mean * math.log(u)
    if dist.family == "deterministic":
        return dist.mean
    xm = dist.mean * (dist.shape - 1.0) / dist.shape
    return xm * u ** (-1.0 / dist.shape)


@dataclass
class Metrics:
    """Time-weighted integrals and event counts from one replication.

    ``horizon`` is the observed time span after warm-up.  The counters are
    restricted to the post-warm-up window; ``in_flight_end`` and
    ``in_flight_start`` close the per-class conservation balance
    arrivals + in_flight_start = completions + blocked + in_flight_end.
    """

    horizon: float
    throughput_integral: float
    power_integral: float
    arrivals: List[int]
    blocked: List[int]
    completions_edge: List[int]
    completions_cloud: List[int]
    in_flight_start: List[int]
    in_flight_end: List[int]

    @property
    def total_completions(self) -> int:
        return sum(self.completions_edge) + sum(self.completions_cloud)

    @property
    def blocked_fraction(self) -> float:
        arr = sum(self.arrivals)
        return sum(self.blocked) / arr if arr else 0.0


def energy_efficiency(metrics: Metrics) -> float:
    """Average power divided by average throughput (time factors cancel)."""
    if metrics.throughput_integral <= 0.0:
        raise DegenerateRun("zero throughput; efficiency ratio undefined")
    return metrics.power_integral / metrics.throughput_integral


def throughput_count_rate(metrics: Metrics) -> float:
    """Completed tasks per unit time; cross-check of the rate integral."""
    if metrics.horizon <= 0:
        raise ValueError("horizon must be positive")
    return metrics.total_completions / metrics.horizon


def _duration_dist(config: NetworkConfig, mean: float) -> DurationDistribution:
    return DurationDistribution(config.duration_family, mean, config.pareto_shape)


def run_simulation(config: NetworkConfig, policy: Policy, horizon: float,
                   warmup: float = 0.0,
                   seed: Union[int, np.random.SeedSequence] = 0,
                   debug_check: bool = False) -> Metrics:
    """Simulate one replication and return its metrics.

    Arrival and duration draws use separate deterministic substreams of
    ``seed``.  With ``debug_check`` every event re-validates the state
    invariants (slow; for tests).
    """
    if not (horizon > warmup >= 0.0):
        raise ValueError("need horizon > warmup >= 0")
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    arr_rng, dur_rng = (np.random.default_rng(s) for s in ss.spawn(2))

    scaled = apply_scaling(config, config.scaling)
    state = NetworkState(config, scaled)
    J = config.num_classes
    lam = scaled.arrival_rate
    mu_edge = [[config.areas[a.area].mean_rate[j] for a in config.groups] for j in range(J)]
    mu_cloud = [[cloud_effective_rate(config, j, l) for l in range(config.num_areas)]
                for j in range(J)]
    eps = [g.op_power_per_unit for g in config.groups]
    idle = scaled.idle_power
    cloud_eps = [c.cloud_power for c in config.classes]
    req = [dict(c.resource_req) for c in config.classes]

    # event heap entries: (time, priority, seq, kind, j, dest, area)
    # priority 0 = completion, 1 = arrival: completions first on (measure-zero) ties
    heap: List[tuple] = []
    seq = 0
    for j in range(J):
        if lam[j] > 0:
            heapq.heappush(heap, (arr_rng.exponential(1.0 / lam[j]), 1, seq, j, None, None))
            seq += 1

    thr_rate = 0.0     # current throughput integrand
    pwr_rate = 0.0     # current power integrand
    thr_int = 0.0
    pwr_int = 0.0
    t = 0.0
    warm_counts_started = warmup == 0.0
    arrivals = [0] * J
    blocked = [0] * J
    comp_edge = [0] * J
    comp_cloud = [0] * J
    in_flight_start = [0] * J

    while heap:
        ev_time, prio, _, j, dest, area = heapq.heappop(heap)
        upper = min(ev_time, horizon)
        lower = max(t, warmup)
        if upper > lower:
            thr_int += thr_rate * (upper - lower)
            pwr_int += pwr_rate * (upper - lower)
        if not warm_counts_started and ev_time >= warmup:
            in_flight_start = [state.total_in_flight(jj) for jj in range(J)]
            warm_counts_started = True
        t = ev_time
        if t >= horizon:
            break
        if prio == 1:  # arrival of class j
            if t >= warmup:
                arrivals[j] += 1
            decision = policy(state, config, j)
            if decision.kind == "edge":
                k = decision.group
                was_idle = state.group_load[k] == 0
                state.admit_edge(j, k)
                if was_idle:
                    pwr_rate += idle[k]
                pwr_rate += req[j][k] * eps[k]
                thr_rate += mu_edge[j][k]
                d = sample_duration(_duration_dist(config, 1.0 / mu_edge[j][k]), dur_rng)
                heapq.heappush(heap, (t + d, 0, seq, j, "edge", k))
                seq += 1
            elif decision.kind == "cloud":
                l = decision.area
                state.admit_cloud(j, l)
                pwr_rate += cloud_eps[j]
                thr_rate += mu_cloud[j][l]
                if config.cloud_duration_mode == "edge_plus_delay":
                    d = sample_duration(
                        _duration_dist(config, 1.0 / config.areas[l].mean_rate[j]), dur_rng
                    ) + config.cloud_delay
                else:
                    d = sample_duration(_duration_dist(config, 1.0 / mu_cloud[j][l]), dur_rng)
                heapq.heappush(heap, (t + d, 0, seq, j, "cloud", l))
                seq += 1
            else:
                if t >= warmup:
                    blocked[j] += 1
            heapq.heappush(heap, (t + arr_rng.exponential(1.0 / lam[j]), 1, seq, j, None, None))
            seq += 1
        else:  # completion
            if dest == "edge":
                k = area
                state.release_edge(j, k)
                pwr_rate -= req[j][k] * eps[k]
                if state.group_load[k] == 0:
                    pwr_rate -= idle[k]
                thr_rate -= mu_edge[j][k]
                if t >= warmup:
                    comp_edge[j] += 1
            else:
                l = area
                state.release_cloud(j, l)
                pwr_rate -= cloud_eps[j]
                thr_rate -= mu_cloud[j][l]
                if t >= warmup:
                    comp_cloud[j] += 1
        if debug_check:
            state.check_invariants()
            ref_thr, ref_pwr = instantaneous_rates(state, config)
            if not (math.isclose(ref_thr, thr_rate, rel_tol=1e-9, abs_tol=1e-9)
                    and math.isclose(ref_pwr, pwr_rate, rel_tol=1e-9, abs_tol=1e-9)):
                raise AssertionError("incremental rate bookkeeping drifted")

    if not warm_counts_started:
        in_flight_start = [state.total_in_flight(jj) for jj in range(J)]
    return Metrics(
        horizon=horizon - warmup,
        throughput_integral=thr_int,
        power_integral=pwr_int,
        arrivals=arrivals,
        blocked=blocked,
        completions_edge=comp_edge,
        completions_cloud=comp_cloud,
        in_flight_start=in_flight_start,
        in_flight_end=[state.total_in_flight(jj) for jj in range(J)],
    )


def instantaneous_rates(state: NetworkState, config: NetworkConfig) -> Tuple[float, float]:
    """Throughput and power integrands recomputed from scratch for a state."""
    thr = 0.0
    pwr = 0.0
    for j in range(config.num_classes):
        for k, g in enumerate(config.groups):
            x = state.X[j][k]
            if x:
                mu = config.areas[g.area].mean_rate[j]
                thr += mu * x
                pwr += g.op_power_per_unit * config.classes[j].resource_req[k] * x
        for l in range(config.num_areas):
            z = state.Z[j][l]
            if z:
                thr += cloud_effective_rate(config, j, l) * z
                pwr += config.classes[j].cloud_power * z
    for k in range(config.num_groups):
        if state.group_load[k] > 0:
            pwr += state.scaled.idle_power[k]
    return thr, pwr


@dataclass
class ReplicationSummary:
    """Across-replication mean and Student-t confidence half-width."""

    ratios: Tuple[float, ...]
    mean: float
    half_width: float
    blocked_fraction: float
    throughput_rate: float

    @property
    def ci_ok(self) -> bool:
        """Whether the 95% half-width is within 5% of the mean."""
        return self.half_width <= 0.05 * abs(self.mean)


def summarize_ratios(ratios: Sequence[float], blocked_fraction: float = 0.0,
                     throughput_rate: float = 0.0) -> ReplicationSummary:
    """Student-t 95% summary of per-replication ratios."""
    n = len(ratios)
    if n < 2:
        raise ValueError("need at least 2 replications")
    mean = float(np.mean(ratios))
    sd = float(np.std(ratios, ddof=1))
    hw = float(stats.t.ppf(0.975, n - 1)) * sd / math.sqrt(n)
    return ReplicationSummary(tuple(ratios), mean, hw, blocked_fraction, throughput_rate)


def replicate(config: NetworkConfig, policy: Policy, n: int, horizon: float,
              warmup: float = 0.0,
              seed: Union[int, np.random.SeedSequence] = 0) -> ReplicationSummary:
    """Run n independent replications and summarize the efficiency ratios."""
    if n < 2:
        raise ValueError("need at least 2 replications")
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    ratios = []
    blocked = 0
    arrivals = 0
    completions = 0
    span = 0.0
    for child in ss.spawn(n):
        m = run_simulation(config, policy, horizon, warmup, seed=child)
        ratios.append(energy_efficiency(m))
        blocked += sum(m.blocked)
        arrivals += sum(m.arrivals)
        completions += m.total_completions
        span += m.horizon
    return summarize_ratios(
        ratios,
        blocked_fraction=blocked / arrivals if arrivals else 0.0,
        throughput_rate=completions / span if span else 0.0,
    )


def default_horizon(config: NetworkConfig) -> float:
    """About 1e4 mean service times, using the average mean duration."""
    means = [
        1.0 / a.mean_rate[j]
        for a in config.areas
        for j in range(config.num_classes)
    ]
    return 1e4 * float(np.mean(means))
