"""Head-to-head win fractions of PIER over the random benchmark family.

Draws a few dozen random scenarios, simulates all three policies on each,
and prints the fraction of scenarios where PIER attains a strictly better
power-to-throughput ratio, plus a coarse text rendering of the empirical
CDF of the ratio quotients.  Runs in roughly a minute.
"""

from fogsched.scenarios import (ExperimentSpec, GeneratorSpec, Scenario,
                                ratio_quotients, run_experiment,
                                summarize_cdf)

NUM_SCENARIOS = 40

scenario = Scenario(
    kind="random",
    name="family",
    generator=GeneratorSpec(num_scenarios=NUM_SCENARIOS, seed=2718),
    experiment=ExperimentSpec(
        policies=("pier", "ptr", "plpc"),
        h=(1,),
        replications=3,
        horizon=1000.0,
        warmup=100.0,
        seed=31415,
    ),
)

rows = run_experiment(scenario)

for other in ("ptr", "plpc"):
    quotients = ratio_quotients(rows, "pier", other)
    s = summarize_cdf(quotients)
    print(f"PIER vs {other.upper()}: wins {100 * s.win_fraction:.1f}% "
          f"of {len(quotients)} scenarios")
    # text CDF, one row per decile of the quotient range
    lo, hi = min(s.points), max(s.points)
    for i in range(10):
        x = lo + (hi - lo) * (i + 1) / 10
        frac = sum(p <= x for p in s.points) / len(s.points)
        bar = "#" * int(40 * frac)
        print(f"  q <= {x:5.2f}  {bar} {100 * frac:.0f}%")
    print()
