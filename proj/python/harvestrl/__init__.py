"""Q-learning energy management simulator for energy-harvesting sensor nodes."""

from ._harvestrl import (
    Config,
    ConfigError,
    ConfigParseError,
    ContractViolation,
    HarvestError,
    IngestionError,
    IoError,
    Record,
    RewardContext,
    RewardError,
    RunSummary,
    ScenarioResult,
    compute_alpha,
    compute_epsilon,
    evaluate_reward,
    load_config,
    parse_config,
    policy_stability_time,
    run,
    run_scenario,
    summarize,
    sweep_seeds,
)

__all__ = [name for name in dir() if not name.startswith("_")]
