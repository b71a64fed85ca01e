"""L9(3^3) orthogonal-array tuning of the SSO branch probabilities.

Runs the nine-try design over (c_g, c_p, c_w) levels, averages stage-boundary
best fitness by factor level, picks the winning level per factor per stage,
and emits the derived stage schedule (the tenth, tuned try).
"""

from __future__ import annotations

import io
import csv
from dataclasses import dataclass, field

from . import bat, grrap, swarm
from .swarm import SolverSpec, StageSchedule, TrySetting

FACTORS = ("c_g", "c_p", "c_w")

# L9(3^3): each pair of columns covers all nine level pairs exactly once.
L9_MATRIX = (
    (1, 1, 1), (1, 2, 2), (1, 3, 3),
    (2, 1, 2), (2, 2, 3), (2, 3, 1),
    (3, 1, 3), (3, 2, 1), (3, 3, 2),
)
# Level -> probability per factor (levels are 1-based: large, medium, low).
L9_LEVELS = {
    "c_g": (0.6, 0.4, 0.2),
    "c_p": (0.30, 0.25, 0.0),
    "c_w": (0.30, 0.20, 0.0),
}


@dataclass(frozen=True)
class OADesign:
    matrix: tuple = L9_MATRIX
    levels: dict = field(default_factory=lambda: dict(L9_LEVELS))

    def __post_init__(self):
        n_levels = len(next(iter(self.levels.values())))
        for col in range(len(FACTORS)):
            column = [row[col] for row in self.matrix]
            for lvl in range(1, n_levels + 1):
                if column.count(lvl) * n_levels != len(self.matrix):
                    raise ValueError(
                        f"column {col} is not balanced: level {lvl} appears "
                        f"{column.count(lvl)} times")

    @property
    def n_tries(self) -> int:
        return len(self.matrix)

    def try_values(self, try_index: int) -> tuple[float, float, float]:
        row = self.matrix[try_index]
        return tuple(self.levels[f][row[i] - 1] for i, f in enumerate(FACTORS))


@dataclass(frozen=True)
class TuningReport:
    """Raw per-run fitness plus the derived averages and schedule.

    rows: (try, problem, seed, stage, best_rs, best_rp) tuples.
    try_fitness[stage][try] is the per-try aggregate; level_averages[stage]
    maps each factor to its three level means.
    """

    rows: tuple
    try_fitness: tuple
    level_averages: tuple
    schedule: StageSchedule

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["try", "problem", "seed", "stage", "best_rs", "best_rp"])
        for row in self.rows:
            writer.writerow(row)
        return buf.getvalue()


def derive_try_table(design: OADesign) -> list[TrySetting]:
    """The nine TrySettings of the design, in try order."""
    return [TrySetting(*design.try_values(i)) for i in range(design.n_tries)]


def average_by_level(fitness, design: OADesign) -> dict:
    """Mean fitness per factor level: factor -> (avg level 1, 2, 3).

    ``fitness`` holds one value per try (already averaged over problems and
    runs)."""
    if len(fitness) != design.n_tries or any(f is None for f in fitness):
        raise ValueError(f"need one fitness value for each of the "
                         f"{design.n_tries} tries")
    n_levels = len(next(iter(design.levels.values())))
    out = {}
    for col, factor in enumerate(FACTORS):
        means = []
        for lvl in range(1, n_levels + 1):
            values = [fitness[t] for t in range(design.n_tries)
                      if design.matrix[t][col] == lvl]
            means.append(sum(values) / len(values))
        out[factor] = tuple(means)
    return out


def select_schedule(stage_averages, design: OADesign = None) -> StageSchedule:
    """Pick the best level per factor independently for each stage.

    ``stage_averages`` is one average_by_level() mapping per stage.  Exact
    ties go to the lower level index (deterministic).  Levels map to
    probabilities through the design's level table.
    """
    design = design or OADesign()
    stages = []
    for averages in stage_averages:
        values = []
        for factor in FACTORS:
            means = averages[factor]
            best_level = max(range(len(means)), key=lambda i: (means[i], -i))
            values.append(design.levels[factor][best_level])
        stages.append(TrySetting(*values))
    if len(stages) != 4:
        raise ValueError("expected averages for exactly 4 stages")
    return StageSchedule(stages=tuple(stages))


def run_tuning(problems, design: OADesign = None, runs_per_problem: int = 5,
               template: SolverSpec = SolverSpec(), base_seed: int = 0,
               stage_gens=None, aggregate: str = "best") -> TuningReport:
    """Execute the full design: tries x problems x seeded runs of the solver.

    ``problems`` is a sequence of (name, ProblemInstance, ConnectedVectorSet).
    Seeds are base_seed + run_index, shared across tries and problems.
    ``aggregate`` selects what feeds the level averages: the stage-boundary
    gBest fitness ("best") or the population-mean pBest fitness ("average").
    """
    design = design or OADesign()
    if aggregate not in ("best", "average"):
        raise ValueError("aggregate must be 'best' or 'average'")
    tries = derive_try_table(design)
    if stage_gens is None:
        stage_gens = swarm.default_stage_gens(template.n_gen)
    n_stages = len(stage_gens)
    rows = []
    # fitness[try][stage] accumulates per-problem means
    per_try_stage = [[[] for _ in range(n_stages)] for _ in tries]
    for try_idx, setting in enumerate(tries):
        for name, inst, cvs in problems:
            per_run = [[] for _ in range(n_stages)]
            for run in range(runs_per_problem):
                seed = base_seed + run
                spec = SolverSpec(algorithm=template.algorithm, setting=setting,
                                  n_sol=template.n_sol, n_gen=template.n_gen,
                                  seed=seed)
                try:
                    result = swarm.run_solver(spec, inst, cvs, stage_gens=stage_gens)
                except ValueError as exc:
                    raise ValueError(
                        f"solver failed for try {try_idx}, problem {name!r}, "
                        f"seed {seed}: {exc}") from exc
                for row in result.stage_rows:
                    rows.append((try_idx, name, seed, row.stage,
                                 row.best.r_s, row.best.r_p))
                    value = row.best.r_p if aggregate == "best" else row.mean_pbest_rp
                    per_run[row.stage].append(value)
            for stage in range(n_stages):
                per_try_stage[try_idx][stage].append(
                    sum(per_run[stage]) / len(per_run[stage]))
    try_fitness = tuple(
        tuple(sum(per_try_stage[t][s]) / len(per_try_stage[t][s])
              for t in range(len(tries)))
        for s in range(n_stages))
    level_averages = tuple(average_by_level(try_fitness[s], design)
                           for s in range(n_stages))
    # select over 4 stages; tiny budgets with fewer snapshots repeat the last
    padded = list(level_averages)
    while len(padded) < 4:
        padded.append(padded[-1])
    schedule = select_schedule(padded[:4], design)
    return TuningReport(rows=tuple(rows), try_fitness=try_fitness,
                        level_averages=level_averages, schedule=schedule)
