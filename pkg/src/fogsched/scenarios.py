"""Scenario files, the random-scenario generator and batch experiments.

A scenario is either a fixed network configuration or a family of randomly
generated ones, plus an experiment block (policies, size parameters,
duration distributions, replication settings).  Experiments produce CSV
rows with a frozen column schema.
"""

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .model import (ArcGroup, DestinationArea, NetworkConfig, TaskClass,
                    validate_config)
from .oracle import (StateSpaceTooLarge, build_exact_model,
                     evaluate_policy_exact, normalized_deviation,
                     solve_optimal)
from .policies import POLICIES
from .simengine import default_horizon, replicate

PRESETS = ("fig1", "fig2", "fig3")

CSV_COLUMNS = [
    "scenario", "policy", "h", "distribution",
    "mean_ratio", "ci_half_width", "blocked_fraction", "throughput_rate",
    "optimal_ratio", "normalized_deviation", "ci_ok",
]


class ParseError(ValueError):
    pass


def parse_distribution(spec: str) -> Tuple[str, Optional[float]]:
    """Parse a distribution tag: exp | det | pareto:SHAPE."""
    s = spec.strip().lower()
    if s in ("exp", "exponential"):
        return "exponential", None
    if s in ("det", "deterministic"):
        return "deterministic", None
    if s.startswith("pareto:"):
        try:
            shape = float(s.split(":", 1)[1])
        except ValueError:
            raise ParseError(f"bad pareto shape in {spec!r}")
        return "pareto", shape
    raise ParseError(f"unknown distribution {spec!r}")


def distribution_tag(family: str, shape: Optional[float]) -> str:
    if family == "exponential":
        return "exp"
    if family == "deterministic":
        return "det"
    return f"pareto:{shape:g}"


# ---------------------------------------------------------------------------
# config (de)serialization

def config_to_dict(config: NetworkConfig) -> dict:
    return {
        "cloud_delay": config.cloud_delay,
        "scaling": config.scaling,
        "duration": distribution_tag(config.duration_family, config.pareto_shape),
        "cloud_duration_mode": config.cloud_duration_mode,
        "classes": [
            {
                "id": c.id,
                "base_arrival_rate": c.base_arrival_rate,
                "cloud_power": c.cloud_power,
                "resource_req": {str(k): w for k, w in sorted(c.resource_req.items())},
            }
            for c in config.classes
        ],
        "groups": [
            {
                "id": g.id,
                "area": g.area,
                "base_capacity": g.base_capacity,
                "op_power_per_unit": g.op_power_per_unit,
                "base_idle_power": g.base_idle_power,
            }
            for g in config.groups
        ],
        "areas": [
            {
                "id": a.id,
                "groups": list(a.groups),
                "base_channels": {str(j): n for j, n in sorted(a.base_channels.items())},
                "mean_rate": {str(j): r for j, r in sorted(a.mean_rate.items())},
            }
            for a in config.areas
        ],
    }


def config_from_dict(data: dict) -> NetworkConfig:
    try:
        family, shape = parse_distribution(data.get("duration", "exp"))
        classes = tuple(
            TaskClass(
                id=c["id"],
                base_arrival_rate=c["base_arrival_rate"],
                cloud_power=c["cloud_power"],
                resource_req={int(k): int(w) for k, w in c["resource_req"].items()},
            )
            for c in data["classes"]
        )
        groups = tuple(
            ArcGroup(
                id=g["id"], area=g["area"], base_capacity=int(g["base_capacity"]),
                op_power_per_unit=g["op_power_per_unit"],
                base_idle_power=g.get("base_idle_power", 0.0),
            )
            for g in data["groups"]
        )
        areas = tuple(
            DestinationArea(
                id=a["id"], groups=tuple(a["groups"]),
                base_channels={int(j): int(n) for j, n in a["base_channels"].items()},
                mean_rate={int(j): float(r) for j, r in a["mean_rate"].items()},
            )
            for a in data["areas"]
        )
        config = NetworkConfig(
            classes=classes, groups=groups, areas=areas,
            cloud_delay=data["cloud_delay"], scaling=int(data.get("scaling", 1)),
            duration_family=family, pareto_shape=shape,
            cloud_duration_mode=data.get("cloud_duration_mode", "effective_rate"),
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed config: {exc}")
    return validate_config(config)


# ---------------------------------------------------------------------------
# scenario files

@dataclass
class GeneratorSpec:
    num_scenarios: int = 500
    seed: int = 0
    ranges: Optional[dict] = None


@dataclass
class ExperimentSpec:
    policies: Tuple[str, ...] = ("pier", "ptr", "plpc")
    h: Tuple[int, ...] = (1,)
    distributions: Tuple[str, ...] = ("exp",)
    replications: int = 30
    horizon: Optional[float] = None     # None: 1e4 mean service times
    warmup: Optional[float] = None      # None: 10% of horizon
    seed: int = 0
    oracle: bool = False
    output: Optional[str] = None
    ci_growth: int = 2                  # horizon doublings allowed to meet the CI rule
    workers: int = 1


@dataclass
class Scenario:
    kind: str                            # "fixed" | "random"
    name: str = "scenario"
    config: Optional[NetworkConfig] = None
    generator: Optional[GeneratorSpec] = None
    experiment: ExperimentSpec = field(default_factory=ExperimentSpec)


def scenario_to_dict(scenario: Scenario) -> dict:
    out = {"kind": scenario.kind, "name": scenario.name}
    if scenario.config is not None:
        out["config"] = config_to_dict(scenario.config)
    if scenario.generator is not None:
        out["generator"] = asdict(scenario.generator)
    exp = asdict(scenario.experiment)
    exp["policies"] = list(exp["policies"])
    exp["h"] = list(exp["h"])
    exp["distributions"] = list(exp["distributions"])
    out["experiment"] = exp
    return out


def scenario_from_dict(data: dict, name: str = "scenario") -> Scenario:
    kind = data.get("kind")
    if kind not in ("fixed", "random"):
        raise ParseError(f"kind must be 'fixed' or 'random', got {kind!r}")
    config = None
    generator = None
    if kind == "fixed":
        if "config" not in data:
            raise ParseError("fixed scenario needs a 'config' block")
        config = config_from_dict(data["config"])
    else:
        gen = data.get("generator", {})
        generator = GeneratorSpec(
            num_scenarios=int(gen.get("num_scenarios", 500)),
            seed=int(gen.get("seed", 0)),
            ranges=gen.get("ranges"),
        )
    exp_data = data.get("experiment", {})
    defaults = ExperimentSpec()
    for key in exp_data:
        if key not in asdict(defaults):
            raise ParseError(f"unknown experiment field {key!r}")
    experiment = ExperimentSpec(
        policies=tuple(exp_data.get("policies", defaults.policies)),
        h=tuple(int(v) for v in exp_data.get("h", defaults.h)),
        distributions=tuple(exp_data.get("distributions", defaults.distributions)),
        replications=int(exp_data.get("replications", defaults.replications)),
        horizon=exp_data.get("horizon"),
        warmup=exp_data.get("warmup"),
        seed=int(exp_data.get("seed", defaults.seed)),
        oracle=bool(exp_data.get("oracle", defaults.oracle)),
        output=exp_data.get("output"),
        ci_growth=int(exp_data.get("ci_growth", defaults.ci_growth)),
        workers=int(exp_data.get("workers", defaults.workers)),
    )
    for p in experiment.policies:
        if p not in POLICIES:
            raise ParseError(f"unknown policy {p!r}")
    for d in experiment.distributions:
        parse_distribution(d)
    return Scenario(kind=kind, name=data.get("name", name), config=config,
                    generator=generator, experiment=experiment)


def load_scenario(path_or_preset: str) -> Scenario:
    """Load a scenario from a JSON file or a shipped preset name."""
    if path_or_preset in PRESETS:
        text = resources.files("fogsched").joinpath(
            f"presets/{path_or_preset}.json").read_text()
        return scenario_from_dict(json.loads(text), name=path_or_preset)
    try:
        with open(path_or_preset) as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ParseError(f"no such scenario file or preset: {path_or_preset}")
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path_or_preset}: {exc}")
    return scenario_from_dict(data, name=path_or_preset)


def save_scenario(scenario: Scenario, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(scenario_to_dict(scenario), fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# random scenarios

DEFAULT_RANGES = {
    "num_classes": 2,
    "num_groups": 5,
    "num_areas": 4,
    "cloud_delay": 5.0,
    "resource_req_choices": [1, 2],
    "channel_choices": [6, 7, 8],
    "capacity_choices": [5, 6, 7],
    "op_power_range": [0.1, 20.0],
    "idle_power_factor": 0.4,
    "mean_duration_range": [1.0, 3.0],
    "arrival_rate_range": [1.2, 1.8],
    "cloud_power_margin": 1.0,
    # the cloud draw must dominate waking an idle group even at large h,
    # otherwise every index policy degenerates to cloud-only routing
    "cloud_power_min": 150.0,
    "cloud_power_max": 300.0,
}


def generate_random_scenario(seed, ranges: Optional[dict] = None) -> NetworkConfig:
    """Draw one random network configuration from the benchmark family."""
    r = dict(DEFAULT_RANGES)
    if ranges:
        r.update(ranges)
    rng = np.random.default_rng(seed)
    J, K, L = r["num_classes"], r["num_groups"], r["num_areas"]
    if K < L:
        raise ValueError("need at least as many groups as areas")

    # every area non-empty; extras assigned uniformly
    perm = rng.permutation(K)
    area_of = {int(perm[l]): l for l in range(L)}
    for g in perm[L:]:
        area_of[int(g)] = int(rng.integers(L))

    w = [[int(rng.choice(r["resource_req_choices"])) for _ in range(K)] for _ in range(J)]
    channels = [[int(rng.choice(r["channel_choices"])) for _ in range(L)] for _ in range(J)]
    caps = [int(rng.choice(r["capacity_choices"])) for _ in range(K)]
    lo, hi = r["op_power_range"]
    eps = [float(rng.uniform(lo, hi)) for _ in range(K)]
    dlo, dhi = r["mean_duration_range"]
    durations = [[float(rng.uniform(dlo, dhi)) for _ in range(L)] for _ in range(J)]
    alo, ahi = r["arrival_rate_range"]
    lam = [float(rng.uniform(alo, ahi)) for _ in range(J)]
    cloud_power = []
    for j in range(J):
        floor = max(w[j][k] * eps[k] for k in range(K)) + r["cloud_power_margin"]
        lo = max(r["cloud_power_min"], floor)
        top = max(r["cloud_power_max"], lo + 10.0)
        cloud_power.append(float(rng.uniform(lo, top)))

    classes = tuple(
        TaskClass(id=j, base_arrival_rate=lam[j], cloud_power=cloud_power[j],
                  resource_req={k: w[j][k] for k in range(K)})
        for j in range(J)
    )
    groups = tuple(
        ArcGroup(id=k, area=area_of[k], base_capacity=caps[k],
                 op_power_per_unit=eps[k],
                 base_idle_power=r["idle_power_factor"] * eps[k] * caps[k])
        for k in range(K)
    )
    areas = tuple(
        DestinationArea(
            id=l,
            groups=tuple(k for k in range(K) if area_of[k] == l),
            base_channels={j: channels[j][l] for j in range(J)},
            mean_rate={j: 1.0 / durations[j][l] for j in range(J)},
        )
        for l in range(L)
    )
    return validate_config(NetworkConfig(
        classes=classes, groups=groups, areas=areas,
        cloud_delay=r["cloud_delay"],
    ))


# ---------------------------------------------------------------------------
# batch execution

@dataclass
class ResultRow:
    scenario: str
    policy: str
    h: int
    distribution: str
    mean_ratio: float
    ci_half_width: float
    blocked_fraction: float
    throughput_rate: float
    optimal_ratio: Optional[float] = None
    normalized_deviation: Optional[float] = None
    ci_ok: bool = True

    def as_csv(self) -> List[str]:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, bool):
                return "1" if v else "0"
            if isinstance(v, float):
                return repr(v)
            return str(v)
        return [fmt(getattr(self, c)) for c in CSV_COLUMNS]


@dataclass(frozen=True)
class _Cell:
    scenario_id: str
    config: NetworkConfig
    policy: str
    h: int
    dist: str
    replications: int
    horizon: Optional[float]
    warmup: Optional[float]
    seed_entropy: Tuple[int, ...]
    ci_growth: int


def _run_cell(cell: _Cell) -> ResultRow:
    family, shape = parse_distribution(cell.dist)
    config = replace(cell.config, scaling=cell.h,
                     duration_family=family, pareto_shape=shape)
    horizon = cell.horizon if cell.horizon is not None else default_horizon(config)
    warmup = cell.warmup if cell.warmup is not None else 0.1 * horizon
    seed = np.random.SeedSequence(cell.seed_entropy)
    summary = replicate(config, POLICIES[cell.policy], cell.replications,
                        horizon, warmup, seed=seed)
    grow = cell.ci_growth
    while not summary.ci_ok and grow > 0:
        horizon *= 2.0
        warmup *= 2.0
        summary = replicate(config, POLICIES[cell.policy], cell.replications,
                            horizon, warmup, seed=seed)
        grow -= 1
    return ResultRow(
        scenario=cell.scenario_id, policy=cell.policy, h=cell.h,
        distribution=cell.dist, mean_ratio=summary.mean,
        ci_half_width=summary.half_width,
        blocked_fraction=summary.blocked_fraction,
        throughput_rate=summary.throughput_rate,
        ci_ok=summary.ci_ok,
    )


def _scenario_cells(scenario: Scenario) -> List[_Cell]:
    exp = scenario.experiment
    cells = []
    if scenario.kind == "fixed":
        members = [(scenario.name, 0, scenario.config)]
        per_h_members = {h: members for h in exp.h}
    else:
        gen = scenario.generator
        per_h_members = {}
        for h in exp.h:
            per_h_members[h] = [
                (f"{scenario.name}-h{h}-s{i:04d}", i,
                 generate_random_scenario(np.random.SeedSequence((gen.seed, h, i)),
                                          gen.ranges))
                for i in range(gen.num_scenarios)
            ]
    for h in exp.h:
        for sid, sidx, config in per_h_members[h]:
            for p_idx, policy in enumerate(exp.policies):
                for dist in exp.distributions:
                    # seed excludes the distribution so arrival streams are
                    # shared across distribution variants of the same cell
                    cells.append(_Cell(
                        scenario_id=sid, config=config, policy=policy, h=h,
                        dist=dist, replications=exp.replications,
                        horizon=exp.horizon, warmup=exp.warmup,
                        seed_entropy=(exp.seed, sidx, p_idx, h),
                        ci_growth=exp.ci_growth,
                    ))
    return cells


def run_experiment(scenario: Scenario, output: Optional[str] = None,
                   workers: Optional[int] = None) -> List[ResultRow]:
    """Execute every (scenario member, policy, h, distribution) cell.

    Rows come back in deterministic cell order regardless of worker count.
    The optimal-policy columns are filled for fixed scenarios with
    ``oracle: true`` on exponential-duration cells where enumeration fits.
    """
    exp = scenario.experiment
    cells = _scenario_cells(scenario)
    workers = workers if workers is not None else exp.workers
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_cell, cells, chunksize=1))
    else:
        rows = [_run_cell(c) for c in cells]

    if exp.oracle and scenario.kind == "fixed":
        optimal: Dict[int, Optional[float]] = {}
        for h in exp.h:
            try:
                model = build_exact_model(scenario.config.with_scaling(h))
                optimal[h] = solve_optimal(model, tolerance=1e-8).optimal_ratio
            except StateSpaceTooLarge:
                optimal[h] = None
        for row in rows:
            opt = optimal.get(row.h)
            if opt is not None and row.distribution == "exp":
                row.optimal_ratio = opt
                row.normalized_deviation = normalized_deviation(row.mean_ratio, opt)

    out_path = output if output is not None else exp.output
    if out_path:
        write_csv(rows, out_path)
    return rows


def write_csv(rows: Sequence[ResultRow], path: str) -> None:
    """Frozen-schema CSV: one header row, UTF-8, LF line endings."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow(row.as_csv())


@dataclass
class CdfSummary:
    win_fraction: float
    points: Tuple[float, ...]        # sorted ratio values
    cdf: Tuple[float, ...]           # empirical CDF at each point


def summarize_cdf(ratio_pairs: Sequence[float]) -> CdfSummary:
    """Empirical CDF of policy-ratio quotients; < 1 counts as a win."""
    if not len(ratio_pairs):
        raise ValueError("need at least one ratio")
    xs = np.sort(np.asarray(ratio_pairs, dtype=float))
    cdf = np.arange(1, xs.size + 1) / xs.size
    return CdfSummary(
        win_fraction=float(np.mean(xs < 1.0)),
        points=tuple(xs),
        cdf=tuple(cdf),
    )


def ratio_quotients(rows: Sequence[ResultRow], policy_a: str, policy_b: str,
                    dist: Optional[str] = None) -> List[float]:
    """Per-scenario mean-ratio quotients policy_a / policy_b."""
    key = lambda r: (r.scenario, r.h, r.distribution)
    a = {key(r): r.mean_ratio for r in rows if r.policy == policy_a
         and (dist is None or r.distribution == dist)}
    b = {key(r): r.mean_ratio for r in rows if r.policy == policy_b
         and (dist is None or r.distribution == dist)}
    return [a[k] / b[k] for k in sorted(a) if k in b]


def distribution_differences(rows: Sequence[ResultRow], policy: str = "pier",
                             baseline: str = "exp") -> Dict[str, List[float]]:
    """Per-scenario relative efficiency differences of each distribution
    against the baseline, under one policy."""
    base = {(r.scenario, r.h): r.mean_ratio for r in rows
            if r.policy == policy and r.distribution == baseline}
    out: Dict[str, List[float]] = {}
    for r in rows:
        if r.policy != policy or r.distribution == baseline:
            continue
        b = base.get((r.scenario, r.h))
        if b:
            out.setdefault(r.distribution, []).append(r.mean_ratio / b - 1.0)
    return out
