"""Tool-use environment forge and feedback gym.

Construct self-contained tool-use environments, run multi-turn episodes
against them, and score trajectories with verifiable step-level rewards.
"""

from .engine import Budgets, EpisodeState, ParsedTurn, parse_assistant_message, run_episode, step
from .graph import DependencyGraph, ScenarioKind, classify, solvable_frontier
from .model import (
    EnvironmentBundle,
    ParameterSpec,
    SubQuestion,
    ToolBehavior,
    ToolDocument,
    ToolEntry,
    TypeSpec,
    ValidationReport,
    load_bundle,
    save_bundle,
    validate_bundle,
    validate_document,
)
from .pipeline import (
    MergePlan,
    ScalingConfig,
    ScenarioSeed,
    build_environment,
    deploy,
    generate_documents,
    integrate_functions,
    preset_seed,
    scale_complexity,
)
from .rewards import (
    RewardVariant,
    TurnKind,
    TurnStats,
    answer_correctness,
    pass_hat_1,
    solve_scores,
    ts_pi_cf,
    turn_reward,
)
from .runtime import ToolCall, ToolResponse, invoke, validate_args
from .store import Trajectory, TrajectoryStore, resample_manifest

__version__ = "0.1.0"

__all__ = [
    "Budgets",
    "DependencyGraph",
    "EnvironmentBundle",
    "EpisodeState",
    "MergePlan",
    "ParameterSpec",
    "ParsedTurn",
    "RewardVariant",
    "ScalingConfig",
    "ScenarioKind",
    "ScenarioSeed",
    "SubQuestion",
    "ToolBehavior",
    "ToolCall",
    "ToolDocument",
    "ToolEntry",
    "ToolResponse",
    "Trajectory",
    "TrajectoryStore",
    "TurnKind",
    "TurnStats",
    "TypeSpec",
    "ValidationReport",
    "answer_correctness",
    "build_environment",
    "classify",
    "deploy",
    "generate_documents",
    "integrate_functions",
    "invoke",
    "load_bundle",
    "parse_assistant_message",
    "pass_hat_1",
    "preset_seed",
    "run_episode",
    "save_bundle",
    "scale_complexity",
    "solvable_frontier",
    "solve_scores",
    "step",
    "resample_manifest",
    "ts_pi_cf",
    "turn_reward",
    "validate_args",
    "validate_bundle",
    "validate_document",
]
