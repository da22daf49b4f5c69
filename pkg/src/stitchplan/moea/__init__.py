from .jade import JadeState, jade_trial, update_jade_state
from .pareto import (
    aggregate_pareto,
    crowding_distance,
    dominates,
    fast_nondominated_sort,
    select_next_generation,
)
from .runner import RunConfig, RunResult, initial_population, run, run_jade_single, run_nsga2, run_nsjade

__all__ = [
    "JadeState",
    "RunConfig",
    "RunResult",
    "aggregate_pareto",
    "crowding_distance",
    "dominates",
    "fast_nondominated_sort",
    "initial_population",
    "jade_trial",
    "run",
    "run_jade_single",
    "run_nsga2",
    "run_nsjade",
    "select_next_generation",
    "update_jade_state",
]
