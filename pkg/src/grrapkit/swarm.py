"""Swarm solvers over GRRAP evaluations.

Implements the simplified-swarm-optimization update rule (UM0), the
perturbed variants (UM1/UM3), the gBest boundary update (UM2) and random
boundary perturbation (UM4), the PSO velocity update (UM5), and the seven
solver configurations that combine them.

One solver run is strictly sequential: the global best is replaced inside
the per-solution loop, so later solutions in the same generation see the
newer gBest.  Randomness comes from one ``random.Random`` stream per run
(Mersenne Twister), seeded from the solver configuration; identical seeds give bit-identical
trajectories.  Parallelism is safe only across independent runs.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_left
from dataclasses import dataclass, field

from . import bat, grrap
from .grrap import Evaluation, ProblemInstance

ALGORITHMS = ("ssoa3", "sso", "bso", "nsso", "ifsso", "psso", "pso")


class NoBudgetError(RuntimeError):
    """The cost budget left for one coordinate is not positive."""


@dataclass(frozen=True)
class TrySetting:
    """SSO branch probabilities (c_g, c_p, c_w); the remainder c_r draws a
    fresh random value.  Cumulative thresholds may exceed 1, which disables
    the random branch."""

    c_g: float
    c_p: float
    c_w: float

    def __post_init__(self):
        if min(self.c_g, self.c_p, self.c_w) < 0:
            raise ValueError("branch probabilities must be non-negative")

    @property
    def cum_g(self) -> float:
        return self.c_g

    @property
    def cum_p(self) -> float:
        return self.c_g + self.c_p

    @property
    def cum_w(self) -> float:
        return self.c_g + self.c_p + self.c_w

    @property
    def c_r(self) -> float:
        return max(0.0, 1.0 - self.cum_w)


@dataclass(frozen=True)
class StageSchedule:
    """One TrySetting per quarter of the generation budget (4 stages)."""

    stages: tuple[TrySetting, TrySetting, TrySetting, TrySetting]

    def __post_init__(self):
        if len(self.stages) != 4:
            raise ValueError("a stage schedule has exactly 4 stages")


# Final tuned per-stage thresholds: (0.40,0.65,0.95), (0.40,0.65,0.65),
# then (0.40,0.75,0.75) for the last two stages.
DEFAULT_SCHEDULE = StageSchedule(stages=(
    TrySetting(0.4, 0.25, 0.30),
    TrySetting(0.4, 0.25, 0.0),
    TrySetting(0.4, 0.35, 0.0),
    TrySetting(0.4, 0.35, 0.0),
))


@dataclass(frozen=True)
class SolverSpec:
    """Configuration of one solver run."""

    algorithm: str = "ssoa3"
    setting: TrySetting | StageSchedule = DEFAULT_SCHEDULE
    n_sol: int = 100
    n_gen: int = 1000
    seed: int = 0
    # PSO constants; velocity bounds are +/- pso_vel_frac * coordinate range
    pso_w: float = 0.9
    pso_c1: float = 2.0
    pso_c2: float = 2.0
    pso_vel_frac: float = 0.25

    def validate(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; "
                             f"expected one of {ALGORITHMS}")
        if self.n_sol < 1 or self.n_gen < 0:
            raise ValueError("need n_sol >= 1 and n_gen >= 0")
        if not isinstance(self.setting, (TrySetting, StageSchedule)):
            raise ValueError("setting must be a TrySetting or StageSchedule")


@dataclass(frozen=True)
class StageRow:
    stage: int
    generation: int
    best: Evaluation
    mean_pbest_rp: float


@dataclass(frozen=True)
class RunResult:
    algorithm: str
    seed: int
    best_x: tuple
    best: Evaluation
    stage_rows: tuple[StageRow, ...]
    gbest_rp: tuple  # r_p of gBest after init and after each generation
    n_evals: int


class Evaluator:
    """Counting fitness evaluator over one (instance, connected-set) pair.

    Precomputes the reliability polynomial and per-redundancy exponentials;
    agrees with grrap.penalized_reliability to round-off (tested).  Not
    thread-safe because of the call counter; use one per run.
    """

    def __init__(self, inst: ProblemInstance, cvs: bat.ConnectedVectorSet):
        if cvs.key != bat.network_key(inst.network):
            raise ValueError("connected-vector set does not match the instance network")
        self.inst = inst
        self.terms = bat.multilinear_terms(cvs)
        self.count = 0
        self._exp = [math.exp(k / 4.0) for k in range(inst.n_max + 1)]
        self._alpha = [p.alpha for p in inst.params]
        self._beta = [p.beta for p in inst.params]
        self._wv2 = [p.wv2 for p in inst.params]
        self._w = [p.w for p in inst.params]

    def evaluate(self, x) -> Evaluation:
        self.count += 1
        inst = self.inst
        n_min, n_max = inst.n_min, inst.n_max
        r_min, r_max = inst.r_min, inst.r_max
        log = math.log
        g_v = g_c = g_w = 0.0
        p = []
        for i, xi in enumerate(x):
            ni = math.floor(xi)
            ri = xi - ni
            if ni < n_min:
                ni = n_min
            elif ni > n_max:
                ni = n_max
            if ri < r_min:
                ri = r_min
            elif ri > r_max:
                ri = r_max
            e = self._exp[ni]
            g_v += self._wv2[i] * ni * ni
            g_w += self._w[i] * ni * e
            g_c += self._alpha[i] * (-1000.0 / log(ri)) ** self._beta[i] * (ni + e)
            p.append(1.0 - (1.0 - ri) ** ni)
        r_s = 0.0
        for coeff, idx in self.terms:
            for i in idx:
                coeff *= p[i]
            r_s += coeff
        if 1.0 < r_s <= 1.0 + 1e-12:
            r_s = 1.0
        feasible = g_v <= inst.v_ub and g_c <= inst.c_ub and g_w <= inst.w_ub
        r_p = r_s if feasible else (
            r_s * min(inst.v_ub / g_v, inst.c_ub / g_c, inst.w_ub / g_w) ** 3)
        return Evaluation(r_s=r_s, r_p=r_p, g_v=g_v, g_c=g_c, g_w=g_w,
                          feasible=feasible)


def random_affixed(inst: ProblemInstance, rng: random.Random) -> float:
    """Fresh packed coordinate: uniform integer redundancy plus uniform
    reliability fraction."""
    return rng.randint(inst.n_min, inst.n_max) + rng.uniform(inst.r_min, inst.r_max)


def um0_update(x_j, g_j, p_j, setting: TrySetting, rng: random.Random,
               inst: ProblemInstance):
    """One-coordinate SSO update: gBest / pBest / keep / fresh random."""
    rho = rng.random()
    if rho < setting.cum_g:
        return g_j
    if rho < setting.cum_p:
        return p_j
    if rho < setting.cum_w:
        return x_j
    return random_affixed(inst, rng)


def _perturb_fraction(value, l, inst):
    """Add a perturbation to the fractional part of a packed coordinate."""
    base = math.floor(value)
    frac = value - base + l
    if frac < inst.r_min:
        frac = inst.r_min
    elif frac > inst.r_max:
        frac = inst.r_max
    return base + frac


def um1_update(x_j, g_j, p_j, setting, gen, gen_best, rng, inst):
    """UM0 branch plus a shrinking perturbation of the reliability fraction.

    The perturbation scale is 0.0005 * rho[-0.5,0.5] * gen/gen_best, where
    gen_best is the generation of the last gBest improvement (floored at 1).
    The fresh-random branch is never perturbed.
    """
    rho = rng.random()
    if rho >= setting.cum_w and setting.c_r > 0.0:
        return random_affixed(inst, rng)
    if rho < setting.cum_g:
        value = g_j
    elif rho < setting.cum_p:
        value = p_j
    else:
        value = x_j
    l = 0.0005 * (rng.random() - 0.5) * gen / max(gen_best, 1)
    return _perturb_fraction(value, l, inst)


def um3_update(x_j, g_j, p_j, setting, gen, n_gen, rng, inst):
    """Like um1_update with perturbation rho[0,1] * exp(-100 * gen / N_gen)."""
    rho = rng.random()
    if rho >= setting.cum_w and setting.c_r > 0.0:
        return random_affixed(inst, rng)
    if rho < setting.cum_g:
        value = g_j
    elif rho < setting.cum_p:
        value = p_j
    else:
        value = x_j
    l = rng.random() * math.exp(-100.0 * gen / n_gen)
    return _perturb_fraction(value, l, inst)


def boundary_reset_r(inst: ProblemInstance, n, r, j: int):
    """Reliability of arc j that makes the cost constraint bind exactly.

    With every other coordinate fixed, solves g_cost = C_ub for r_j:
    r_j = exp(-1000 * (alpha_j * (n_j + e^{n_j/4}) / B)^{1/beta_j}) where B
    is the cost budget left by the other arcs.  Returns (r_j, clamped);
    a clamped result means the constraint does not bind at the returned
    value.  Raises NoBudgetError when B <= 0.
    """
    others_n = [ni for i, ni in enumerate(n) if i != j]
    others_r = [ri for i, ri in enumerate(r) if i != j]
    others_p = tuple(p for i, p in enumerate(inst.params) if i != j)
    spent = 0.0
    for p, ni, ri in zip(others_p, others_n, others_r):
        spent += p.alpha * (-1000.0 / math.log(ri)) ** p.beta * (ni + math.exp(ni / 4.0))
    budget = inst.c_ub - spent
    if budget <= 0.0:
        raise NoBudgetError(f"no cost budget left for coordinate {j}: {budget}")
    pj = inst.params[j]
    k = pj.alpha * (n[j] + math.exp(n[j] / 4.0))
    r_j = math.exp(-1000.0 * (k / budget) ** (1.0 / pj.beta))
    clamped = False
    if r_j < inst.r_min:
        r_j, clamped = inst.r_min, True
    elif r_j > inst.r_max:
        r_j, clamped = inst.r_max, True
    return r_j, clamped


def boundary_candidate(inst: ProblemInstance, x, gen: int):
    """Apply the boundary reset at coordinate (gen mod N_var); None if the
    budget is exhausted there."""
    n, r = grrap.decode(inst, x)
    j = gen % inst.n_arcs
    try:
        r_j, _ = boundary_reset_r(inst, n, r, j)
    except NoBudgetError:
        return None
    cand = list(x)
    cand[j] = n[j] + r_j
    return cand


def boundary_update(x, gen: int, inst: ProblemInstance,
                    cvs: bat.ConnectedVectorSet):
    """gBest boundary update: reset one reliability coordinate to the
    cost-binding value and keep the result only if r_p strictly improves."""
    cand = boundary_candidate(inst, x, gen)
    if cand is None:
        return tuple(x)
    if (grrap.penalized_reliability(inst, cvs, cand).r_p
            > grrap.penalized_reliability(inst, cvs, x).r_p):
        return tuple(cand)
    return tuple(x)


def um4_gbest_update(x, inst: ProblemInstance, rng: random.Random):
    """Random gBest perturbation: redraw two reliability fractions, then
    reset one random coordinate to the cost-binding value.

    Returns the candidate; the caller accepts it only on r_p improvement so
    gBest stays monotone (matching the other variants).
    """
    cand = list(x)
    n_var = inst.n_arcs
    for j in rng.sample(range(n_var), min(2, n_var)):
        cand[j] = math.floor(cand[j]) + rng.uniform(inst.r_min, inst.r_max)
    j = rng.randrange(n_var)
    n, r = grrap.decode(inst, cand)
    try:
        r_j, _ = boundary_reset_r(inst, n, r, j)
        cand[j] = n[j] + r_j
    except NoBudgetError:
        pass
    return cand


def um5_pso_update(x, v, p, g, rng: random.Random, w, c1, c2,
                   x_lb, x_ub, v_lb, v_ub):
    """PSO velocity/position update with per-coordinate clamping.

    Each attraction term uses an independent uniform draw per coordinate.
    Returns (new_x, new_v) as lists.
    """
    new_x = []
    new_v = []
    for j in range(len(x)):
        vj = w * v[j] + c1 * rng.random() * (p[j] - x[j]) \
            + c2 * rng.random() * (g[j] - x[j])
        if vj > v_ub:
            vj = v_ub
        elif vj < v_lb:
            vj = v_lb
        xj = x[j] + vj
        if xj > x_ub:
            xj = x_ub
        elif xj < x_lb:
            xj = x_lb
        new_x.append(xj)
        new_v.append(vj)
    return new_x, new_v


def default_stage_gens(n_gen: int) -> tuple[int, ...]:
    """Quarter-point generations (deduplicated for tiny budgets)."""
    if n_gen <= 0:
        return ()
    gens = sorted({max(1, round(n_gen * (k + 1) / 4)) for k in range(4)})
    gens[-1] = n_gen
    return tuple(dict.fromkeys(gens))


def _setting_at(spec: SolverSpec, gen: int, stage_gens) -> TrySetting:
    if isinstance(spec.setting, TrySetting):
        return spec.setting
    stage = bisect_left(stage_gens, gen) if stage_gens else 0
    return spec.setting.stages[min(stage, len(spec.setting.stages) - 1)]


def run_solver(spec: SolverSpec, inst: ProblemInstance,
               cvs: bat.ConnectedVectorSet, stage_gens=None) -> RunResult:
    """Run one seeded solver to completion.

    Every algorithm evaluates fitness exactly n_sol * (n_gen + 1) times
    (the fair-comparison contract): once per solution at initialization and
    once per solution per generation, with gBest-perturbation candidates
    consuming that solution's evaluation.
    """
    spec.validate()
    if stage_gens is None:
        stage_gens = default_stage_gens(spec.n_gen)
    else:
        stage_gens = tuple(stage_gens)
        if any(b <= 0 for b in stage_gens) or list(stage_gens) != sorted(set(stage_gens)):
            raise ValueError("stage generations must be strictly increasing and positive")
        if stage_gens and stage_gens[-1] != spec.n_gen:
            raise ValueError("last stage generation must equal n_gen")
    ev = Evaluator(inst, cvs)
    rng = random.Random(spec.seed)
    n_var = inst.n_arcs
    algo = spec.algorithm

    xs = [[random_affixed(inst, rng) for _ in range(n_var)]
          for _ in range(spec.n_sol)]
    pbest = [list(x) for x in xs]
    pbest_rp = []
    g_eval = None
    g = None
    g_idx = 0
    for k, x in enumerate(xs):
        e = ev.evaluate(x)
        pbest_rp.append(e.r_p)
        if g_eval is None or e.r_p > g_eval.r_p:
            g_eval = e
            g = list(x)
            g_idx = k
    gen_best = 1

    velocities = None
    if algo in ("pso", "psso"):
        velocities = [[0.0] * n_var for _ in range(spec.n_sol)]
    x_lb = inst.n_min + inst.r_min
    x_ub = inst.n_max + inst.r_max
    v_ub = spec.pso_vel_frac * (x_ub - x_lb)
    fr_v_ub = spec.pso_vel_frac * (inst.r_max - inst.r_min)

    history = [g_eval.r_p]
    stage_rows = []
    stage_set = set(stage_gens)

    for t in range(1, spec.n_gen + 1):
        setting = _setting_at(spec, t, stage_gens)
        for k in range(spec.n_sol):
            x = xs[k]
            if algo in ("ssoa3", "bso") and k == g_idx:
                # gBest particle: perturbation candidate, accept if better
                if algo == "ssoa3":
                    cand = boundary_candidate(inst, g, t)
                else:
                    cand = um4_gbest_update(g, inst, rng)
                if cand is None:
                    cand = g
                e = ev.evaluate(cand)
                if e.r_p > g_eval.r_p:
                    xs[k] = list(cand)
                    pbest[k] = list(cand)
                    pbest_rp[k] = e.r_p
                    g = list(cand)
                    g_eval = e
                    gen_best = t
                continue
            if algo in ("ssoa3", "sso", "bso"):
                for j in range(n_var):
                    x[j] = um0_update(x[j], g[j], pbest[k][j], setting, rng, inst)
            elif algo == "nsso":
                for j in range(n_var):
                    x[j] = um1_update(x[j], g[j], pbest[k][j], setting, t,
                                      gen_best, rng, inst)
            elif algo == "ifsso":
                for j in range(n_var):
                    x[j] = um3_update(x[j], g[j], pbest[k][j], setting, t,
                                      spec.n_gen, rng, inst)
            elif algo == "psso":
                v = velocities[k]
                for j in range(n_var):
                    base = math.floor(x[j])
                    frac = x[j] - base
                    rho = rng.random()
                    if rho < setting.cum_g:
                        base = math.floor(g[j])
                    elif rho < setting.cum_p:
                        base = math.floor(pbest[k][j])
                    elif rho >= setting.cum_w:
                        base = rng.randint(inst.n_min, inst.n_max)
                    vj = spec.pso_w * v[j] \
                        + spec.pso_c1 * rng.random() * ((pbest[k][j] - math.floor(pbest[k][j])) - frac) \
                        + spec.pso_c2 * rng.random() * ((g[j] - math.floor(g[j])) - frac)
                    if vj > fr_v_ub:
                        vj = fr_v_ub
                    elif vj < -fr_v_ub:
                        vj = -fr_v_ub
                    frac += vj
                    if frac > inst.r_max:
                        frac = inst.r_max
                    elif frac < inst.r_min:
                        frac = inst.r_min
                    v[j] = vj
                    x[j] = base + frac
            elif algo == "pso":
                new_x, new_v = um5_pso_update(
                    x, velocities[k], pbest[k], g, rng, spec.pso_w,
                    spec.pso_c1, spec.pso_c2, x_lb, x_ub, -v_ub, v_ub)
                xs[k] = x = new_x
                velocities[k] = new_v
            e = ev.evaluate(x)
            if e.r_p > pbest_rp[k]:
                pbest[k] = list(x)
                pbest_rp[k] = e.r_p
                if e.r_p > g_eval.r_p:
                    g = list(x)
                    g_eval = e
                    g_idx = k
                    gen_best = t
        history.append(g_eval.r_p)
        if t in stage_set:
            stage_rows.append(StageRow(
                stage=stage_gens.index(t), generation=t, best=g_eval,
                mean_pbest_rp=sum(pbest_rp) / len(pbest_rp)))

    return RunResult(algorithm=algo, seed=spec.seed, best_x=tuple(g),
                     best=g_eval, stage_rows=tuple(stage_rows),
                     gbest_rp=tuple(history), n_evals=ev.count)


def write_schedule(schedule: StageSchedule) -> str:
    """Serialize a stage schedule to the schedule file format."""
    lines = ["# stage schedule: stage <index> <c_g> <c_p> <c_w>"]
    for s, t in enumerate(schedule.stages):
        lines.append(f"stage {s} {t.c_g:.12g} {t.c_p:.12g} {t.c_w:.12g}")
    return "\n".join(lines) + "\n"


def read_schedule(text: str) -> StageSchedule:
    """Parse the schedule file format (4 'stage' lines, # comments)."""
    stages = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if fields[0].lower() != "stage" or len(fields) != 5:
            raise ValueError(f"line {lineno}: expected 'stage <s> <c_g> <c_p> <c_w>'")
        stages[int(fields[1])] = TrySetting(*(float(v) for v in fields[2:5]))
    if set(stages) != {0, 1, 2, 3}:
        raise ValueError("schedule file must define stages 0..3 exactly once each")
    return StageSchedule(stages=tuple(stages[s] for s in range(4)))
