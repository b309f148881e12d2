"""Energy-efficiency simulator and exact small-instance solver for
computation offloading at the network edge."""

from .model import (ArcGroup, DestinationArea, NetworkConfig, NetworkState,
                    ScaledParams, TaskClass, apply_scaling, channel_occupancy,
                    cloud_effective_rate, feasible_destinations,
                    validate_config)
from .policies import (Decision, POLICIES, incremental_power_rate, pier_decide,
                       pier_index, plpc_decide, ptr_decide)
from .simengine import (DurationDistribution, Metrics, ReplicationSummary,
                        energy_efficiency, replicate, run_simulation,
                        sample_duration, throughput_count_rate)
from .oracle import (ExactModel, SolverResult, build_exact_model,
                     enumerate_states, erlang_b, evaluate_policy_exact,
                     normalized_deviation, solve_optimal)
from .scenarios import (Scenario, generate_random_scenario, load_scenario,
                        run_experiment, summarize_cdf)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
