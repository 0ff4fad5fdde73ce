"""Desk-scale simulation: synthetic repositories, paired regime runs, alignment timing."""

from .bench import BenchRow, bench_align, slopes
from .regimes import (
    AUGMENTED,
    LEX,
    CostReport,
    RecallUtility,
    RunTrace,
    ScriptedPolicy,
    StepRecord,
    UtilityFunction,
    discovery_gap,
    resolve_targets,
    run_regimes,
    steps_to_recall,
    token_cost_check,
)
from .runner import RECALL_LEVELS, RunResult, random_spec, simulate
from .synthetic import PlantedRepo, SyntheticRepoSpec, apply_edit_script, generate_repo

__all__ = [
    "BenchRow",
    "CostReport",
    "AUGMENTED",
    "LEX",
    "PlantedRepo",
    "RECALL_LEVELS",
    "RecallUtility",
    "RunResult",
    "RunTrace",
    "ScriptedPolicy",
    "StepRecord",
    "SyntheticRepoSpec",
    "UtilityFunction",
    "apply_edit_script",
    "bench_align",
    "discovery_gap",
    "generate_repo",
    "random_spec",
    "resolve_targets",
    "run_regimes",
    "simulate",
    "slopes",
    "steps_to_recall",
    "token_cost_check",
]
