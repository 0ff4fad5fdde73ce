"""End-to-end seeded runs: generate, index, run both regimes, summarize."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path

from ..communities import compute_communities
from ..expansion import ExpansionConfig
from ..extractors import build_graph
from .regimes import (
    CostReport,
    RunTrace,
    ScriptedPolicy,
    discovery_gap,
    resolve_targets,
    run_regimes,
    steps_to_recall,
    token_cost_check,
)
from .synthetic import PlantedRepo, SyntheticRepoSpec, generate_repo

RECALL_LEVELS = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))


@dataclass
class RunResult:
    seed: int
    spec: SyntheticRepoSpec
    plant: PlantedRepo
    y_size: int
    lex: RunTrace
    augmented: RunTrace
    hidden_found: int
    cost: CostReport

    @property
    def recall_gap(self) -> Fraction:
        return self.augmented.final.recall - self.lex.final.recall

    def to_json(self) -> dict:
        def num(x):
            return None if math.isinf(x) else x

        return {
            "seed": self.seed,
            "spec": self.spec.to_json(),
            "y": [f"{p}:{q}" for p, q in self.plant.y],
            "hidden": [f"{p}:{q}" for p, q in self.plant.hidden],
            "h_t_size": self.hidden_found,
            "recall_lex": str(self.lex.final.recall),
            "recall_augmented": str(self.augmented.final.recall),
            "steps_to_recall": {
                str(r): {"lex": num(steps_to_recall(self.lex, r)), "augmented": num(steps_to_recall(self.augmented, r))}
                for r in RECALL_LEVELS
            },
            "cost": self.cost.to_json(),
            "traces": [self.lex.to_json(), self.augmented.to_json()],
        }


def random_spec(seed: int, visibility: tuple[float, float] = (0.2, 1.0), files: tuple[int, int] = (15, 60)) -> SyntheticRepoSpec:
    rng = random.Random(seed)
    return SyntheticRepoSpec(
        file_count=rng.randint(*files),
        symbols_per_file=(1, rng.randint(2, 6)),
        density={
            "invokes": rng.uniform(0.5, 2.5),
            "imports": rng.uniform(0.0, 1.0),
            "inherits": rng.uniform(0.0, 0.5),
            "fuzzy": rng.uniform(0.0, 0.8),
        },
        y_size=rng.randint(2, 8),
        visibility=rng.uniform(*visibility),
        seed=seed,
        tests=rng.choice((0.0, 0.3)),
        docs=rng.random() < 0.3,
    )


def simulate(
    spec: SyntheticRepoSpec,
    workdir: str | Path,
    cfg: ExpansionConfig | None = None,
    decoys: int = 3,
) -> RunResult:
    cfg = cfg or ExpansionConfig()
    plant = generate_repo(spec, Path(workdir))
    g, _ = build_graph(plant.root)
    g = compute_communities(g)
    y = resolve_targets(g, plant.y)
    policy = ScriptedPolicy(tuple(plant.queries(decoys=decoys)))
    lex, augmented = run_regimes(g, plant.root, y, policy, cfg)
    c_step = max((s.units_used for s in lex.steps), default=0)
    cost = token_cost_check(lex, augmented, c_step, cfg.delta_cap)
    found = len(discovery_gap(lex, augmented, y))
    return RunResult(spec.seed, spec, plant, len(y), lex, augmented, found, cost)


def with_seed(spec: SyntheticRepoSpec, seed: int) -> SyntheticRepoSpec:
    return replace(spec, seed=seed)
