"""Command-line entry point for batch experiments.

Exit status: 0 on success, 2 if any reported cell missed the confidence
criterion (95% half-width within 5% of the mean), 1 on errors.
"""

import argparse
import sys
from dataclasses import replace

from .model import ConfigError
from .scenarios import (ParseError, distribution_differences, load_scenario,
                        ratio_quotients, run_experiment, summarize_cdf)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simulate",
        description="Run energy-efficiency offloading experiments from a "
                    "scenario file or preset (fig1, fig2, fig3).",
    )
    parser.add_argument("--scenario", required=True,
                        help="path to a scenario JSON file, or a preset name")
    parser.add_argument("--policy", default=None,
                        help="pier | ptr | plpc | all (default: scenario setting)")
    parser.add_argument("--h", default=None,
                        help="comma-separated list of scaling parameters")
    parser.add_argument("--dist", default=None,
                        help="comma-separated distributions: exp | det | pareto:SHAPE")
    parser.add_argument("--replications", type=int, default=None)
    parser.add_argument("--horizon", type=float, default=None)
    parser.add_argument("--warmup", type=float, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--oracle", action="store_true", default=None,
                        help="also compute the exact optimal policy where tractable")
    parser.add_argument("--output", default=None, help="CSV output path")
    parser.add_argument("--workers", type=int, default=None,
                        help="parallel worker processes (default: scenario setting)")
    parser.add_argument("--num-scenarios", type=int, default=None,
                        help="override the member count of a random scenario family")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario = load_scenario(args.scenario)
    except (ParseError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    exp = scenario.experiment
    overrides = {}
    if args.policy is not None:
        overrides["policies"] = (("pier", "ptr", "plpc") if args.policy == "all"
                                 else tuple(args.policy.split(",")))
    if args.h is not None:
        overrides["h"] = tuple(int(v) for v in args.h.split(","))
    if args.dist is not None:
        overrides["distributions"] = tuple(args.dist.split(","))
    if args.replications is not None:
        overrides["replications"] = args.replications
    if args.horizon is not None:
        overrides["horizon"] = args.horizon
    if args.warmup is not None:
        overrides["warmup"] = args.warmup
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.oracle:
        overrides["oracle"] = True
    if args.output is not None:
        overrides["output"] = args.output
    if args.workers is not None:
        overrides["workers"] = args.workers
    scenario = replace(scenario, experiment=replace(exp, **overrides))
    if args.num_scenarios is not None and scenario.generator is not None:
        scenario = replace(scenario, generator=replace(
            scenario.generator, num_scenarios=args.num_scenarios))

    try:
        rows = run_experiment(scenario)
    except (ParseError, ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    for row in rows[: 20 if len(rows) > 25 else len(rows)]:
        dev = ("" if row.normalized_deviation is None
               else f"  deviation={row.normalized_deviation:.4f}")
        print(f"{row.scenario} {row.policy} h={row.h} {row.distribution}: "
              f"ratio={row.mean_ratio:.6g} ±{row.ci_half_width:.2g}"
              f"{'' if row.ci_ok else '  [CI FAILED]'}{dev}")
    if len(rows) > 25:
        print(f"... {len(rows) - 20} more rows")

    policies = {r.policy for r in rows}
    if "pier" in policies:
        for other in sorted(policies - {"pier"}):
            for h in sorted({r.h for r in rows}):
                pairs = ratio_quotients(
                    [r for r in rows if r.h == h], "pier", other)
                if len(pairs) > 1:
                    s = summarize_cdf(pairs)
                    print(f"h={h}: PIER beats {other.upper()} in "
                          f"{100 * s.win_fraction:.1f}% of {len(pairs)} runs")
    diffs = distribution_differences(rows)
    for dist, values in sorted(diffs.items()):
        mean = sum(values) / len(values)
        print(f"PIER {dist} vs exp: mean relative difference {100 * mean:+.2f}% "
              f"over {len(values)} runs")

    if any(not r.ci_ok for r in rows):
        print("confidence criterion not met for at least one cell", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
