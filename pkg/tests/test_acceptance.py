"""End-to-end acceptance checks.

Every test prints one [PASS]/[FAIL] line with the observed numbers (run
pytest with -s to see the lines for passing tests too).  The module is
slow: the exact solves behind criterion 2 take a few minutes at h=4 and
the scenario sweeps behind criteria 3 and 4 run thousands of
simulations, roughly an hour in total on one core.

Criterion 2a is expected to fail.  On the reference five-group scenario
the index policy and the least-power benchmark coincide exactly (zero
idle power makes their orderings identical), and the fastest-first
benchmark has a strictly smaller deviation at every tractable scale
because the per-destination energy rates are nearly equal while the
service rates are not.  The failure is genuine model behavior, not a
solver artifact; the exact evaluations agree with independent dense
computations and with simulation elsewhere in the suite.
"""

import dataclasses

import numpy as np
import pytest

from fogsched.model import apply_scaling
from fogsched.oracle import (build_exact_model, erlang_b,
                             evaluate_policy_exact, normalized_deviation,
                             solve_optimal, stationary_distribution)
from fogsched.policies import POLICIES
from fogsched.scenarios import (ExperimentSpec, GeneratorSpec, Scenario,
                                distribution_differences,
                                generate_random_scenario, load_scenario,
                                ratio_quotients, run_experiment, save_scenario)
from fogsched.simengine import default_horizon, energy_efficiency, run_simulation

from conftest import single_group_config

POLICY_NAMES = ("pier", "ptr", "plpc")


def _verdict(ok, label):
    print(f"\n[{'PASS' if ok else 'FAIL'}] {label}", flush=True)
    assert ok, label


# --- criterion 1: exact-oracle dominance on random small instances ----------

SMALL_RANGES = {
    "num_groups": 3,
    "num_areas": 2,
    "channel_choices": [1, 2, 3],
    "capacity_choices": [1, 2],
    "resource_req_choices": [1, 2],
}


def test_criterion_1_oracle_dominance():
    n, worst_gap = 100, -np.inf
    for i in range(n):
        cfg = generate_random_scenario(np.random.SeedSequence((404, i)),
                                       SMALL_RANGES)
        model = build_exact_model(cfg)
        assert model.n_states <= 10_000
        opt = solve_optimal(model, tolerance=1e-9).optimal_ratio
        for name in POLICY_NAMES:
            gap = opt - evaluate_policy_exact(model, POLICIES[name])
            worst_gap = max(worst_gap, gap)
    _verdict(worst_gap <= 1e-6,
             f"criterion 1: optimal <= policy ratio on {n} instances "
             f"(worst optimal-minus-policy gap {worst_gap:.2e})")


# --- criterion 2: reference-scenario deviations across h --------------------

@pytest.fixture(scope="module")
def reference_deviations():
    """Exact normalized deviations of each policy at h = 1..4."""
    base = load_scenario("fig1").config
    devs = {name: [] for name in POLICY_NAMES}
    for h in (1, 2, 3, 4):
        model = build_exact_model(dataclasses.replace(base, scaling=h))
        opt = solve_optimal(model, tolerance=1e-7).optimal_ratio
        for name in POLICY_NAMES:
            ratio = evaluate_policy_exact(model, POLICIES[name])
            devs[name].append(normalized_deviation(ratio, opt))
    return devs


def test_criterion_2a_index_policy_beats_benchmarks(reference_deviations):
    devs = reference_deviations
    ok = all(devs["pier"][i] < devs["ptr"][i] and
             devs["pier"][i] < devs["plpc"][i] for i in range(4))
    summary = ", ".join(
        f"h={h}: pier {devs['pier'][i]:.4%} ptr {devs['ptr'][i]:.4%} "
        f"plpc {devs['plpc'][i]:.4%}" for i, h in enumerate((1, 2, 3, 4)))
    _verdict(ok, "criterion 2a: index-policy deviation strictly smallest "
             f"at every h ({summary})")


def test_criterion_2b_deviation_non_increasing(reference_deviations):
    pier = reference_deviations["pier"]
    ok = all(pier[i + 1] <= pier[i] + 1e-9 for i in range(3))
    _verdict(ok, "criterion 2b: index-policy deviation non-increasing in h "
             f"({', '.join(f'{d:.4%}' for d in pier)})")


# --- criterion 3: win fractions over the random scenario family ------------

def test_criterion_3_win_fractions():
    results = {}
    for h, horizon in ((1, 1200.0), (10, 250.0)):
        sc = Scenario(kind="random", name="fam",
                      generator=GeneratorSpec(num_scenarios=200, seed=11),
                      experiment=ExperimentSpec(
                          policies=POLICY_NAMES, h=(h,), replications=2,
                          horizon=horizon, warmup=horizon * 0.1, seed=907,
                          ci_growth=0))
        rows = run_experiment(sc)
        for other in ("ptr", "plpc"):
            quot = ratio_quotients(rows, "pier", other)
            results[(h, other)] = sum(q < 1.0 for q in quot) / len(quot)
    ok = all(results[(h, "ptr")] >= 0.75 and results[(h, "plpc")] >= 0.60
             for h in (1, 10))
    summary = ", ".join(f"h={h} vs {o}: {results[(h, o)]:.3f}"
                        for h in (1, 10) for o in ("ptr", "plpc"))
    _verdict(ok, "criterion 3: win fraction >= 0.75 vs fastest-first and "
             f">= 0.60 vs least-power ({summary})")


# --- criterion 4: duration-distribution robustness --------------------------

def test_criterion_4_distribution_robustness():
    sc = Scenario(kind="random", name="robust",
                  generator=GeneratorSpec(num_scenarios=200, seed=53),
                  experiment=ExperimentSpec(
                      policies=("pier",), h=(1,),
                      distributions=("exp", "det", "pareto:2.002",
                                     "pareto:1.981"),
                      replications=25, horizon=1500.0, warmup=300.0,
                      seed=2002, ci_growth=0))
    diffs = distribution_differences(run_experiment(sc))
    stats = {d: (float(np.mean(v)), float(np.max(np.abs(v))))
             for d, v in diffs.items()}
    ok = all(abs(m) <= 0.04 and w <= 0.08 for m, w in stats.values())
    summary = ", ".join(f"{d}: mean {m:+.2%} worst {w:.2%}"
                        for d, (m, w) in sorted(stats.items()))
    _verdict(ok, "criterion 4: relative difference to exponential within "
             f"4% mean / 8% per scenario over 200 scenarios ({summary})")


# --- criterion 5: Erlang loss blocking ---------------------------------------

def test_criterion_5_erlang_blocking():
    worst_exact, worst_z = 0.0, -np.inf
    for c in (1, 2, 5):
        for a in (0.5, 1.0, 2.0):
            cfg = single_group_config(capacity=c, channels=c, mu=1.0, lam=a,
                                      eps=0.5, cloud_power=500.0)
            target = erlang_b(c, a)

            model = build_exact_model(cfg)
            pi = stationary_distribution(model, POLICIES["pier"])
            full = np.array([model.state_obj(i).group_load[0] == c
                             for i in range(model.n_states)])
            worst_exact = max(worst_exact, abs(float(pi[full].sum()) - target))

            fracs = []
            for rep in range(8):
                m = run_simulation(cfg, POLICIES["pier"], 20000.0, 1000.0,
                                   seed=np.random.SeedSequence((31, c, int(2 * a), rep)))
                fracs.append(sum(m.blocked) / sum(m.arrivals))
            mean, sd = float(np.mean(fracs)), float(np.std(fracs, ddof=1))
            hw = 2.36462425 * sd / np.sqrt(8)      # t(7), 95%
            worst_z = max(worst_z, abs(mean - target) - hw)
    ok = worst_exact <= 1e-10 and worst_z <= 0.0
    _verdict(ok, "criterion 5: blocking matches the Erlang B formula "
             f"(worst exact error {worst_exact:.1e}, worst CI excess "
             f"{worst_z:.1e})")


# --- criterion 6: infinite-server ratio --------------------------------------

def test_criterion_6_infinite_server_ratio():
    cfg = single_group_config(capacity=1000, channels=1000, mu=1.0, lam=2.0,
                              eps=3.0, cloud_power=500.0)
    horizon = default_horizon(cfg)
    m = run_simulation(cfg, POLICIES["pier"], horizon, horizon * 0.1, seed=5)
    ratio = energy_efficiency(m)
    err = abs(ratio / 3.0 - 1.0)
    _verdict(err <= 0.01, "criterion 6: no-blocking ratio within 1% of "
             f"eps*w/mu (got {ratio:.4f}, expected 3, error {err:.2%})")


# --- criterion 7: confidence-interval discipline -----------------------------

def test_criterion_7_ci_discipline(tmp_path):
    from fogsched.cli import main

    cfg = single_group_config(capacity=1, channels=2, mu=1.0, lam=3.0,
                              eps=2.0, cloud_power=30.0, cloud_delay=1.0)
    sc = Scenario(kind="fixed", name="cells", config=cfg,
                  experiment=ExperimentSpec(policies=("pier",), h=(1,),
                                            replications=6, horizon=2000.0,
                                            warmup=200.0, seed=3, ci_growth=2))
    rows = run_experiment(sc)
    reported_ok = all(r.ci_ok and r.ci_half_width <= 0.05 * r.mean_ratio
                      for r in rows)

    path = tmp_path / "cells.json"
    save_scenario(dataclasses.replace(sc, experiment=dataclasses.replace(
        sc.experiment, replications=2, horizon=30.0, warmup=3.0,
        ci_growth=0)), str(path))
    exit2 = main(["--scenario", str(path)]) == 2
    _verdict(reported_ok and exit2,
             "criterion 7: reported cells meet the 5% half-width rule and a "
             f"CI miss exits with status 2 (cells ok: {reported_ok}, "
             f"exit code 2: {exit2})")


# --- criterion 8: seed determinism -------------------------------------------

def test_criterion_8_determinism(tmp_path):
    from fogsched.cli import main

    data = Scenario(kind="random", name="det",
                    generator=GeneratorSpec(num_scenarios=3, seed=8),
                    experiment=ExperimentSpec(policies=("pier", "ptr"), h=(1,),
                                              replications=2, horizon=200.0,
                                              warmup=20.0, seed=60,
                                              ci_growth=0))
    path = tmp_path / "det.json"
    save_scenario(data, str(path))
    a, b, c = (tmp_path / n for n in ("a.csv", "b.csv", "c.csv"))
    main(["--scenario", str(path), "--output", str(a)])
    main(["--scenario", str(path), "--output", str(b)])
    main(["--scenario", str(path), "--seed", "61", "--output", str(c)])
    same = a.read_bytes() == b.read_bytes()
    differ = a.read_bytes() != c.read_bytes()
    _verdict(same and differ,
             "criterion 8: identical seeds give byte-identical CSVs and a "
             f"changed seed does not (identical: {same}, changed: {differ})")
