"""Highway-merging simulator with level-k and dynamic level-k DQN drivers."""

from ._core import (
    ACTION_SLOTS,
    OBSERVATION_SIZE,
    CheckpointError,
    Config,
    ConfigError,
    ContractViolation,
    MergeEnv,
    MissingPrerequisite,
    ParseError,
    QNetwork,
    action_for_slot,
    normalize_counts,
    trajectory_stats,
)

__all__ = [
    "ACTION_SLOTS",
    "OBSERVATION_SIZE",
    "CheckpointError",
    "Config",
    "ConfigError",
    "ContractViolation",
    "MergeEnv",
    "MissingPrerequisite",
    "ParseError",
    "QNetwork",
    "action_for_slot",
    "normalize_counts",
    "trajectory_stats",
]
