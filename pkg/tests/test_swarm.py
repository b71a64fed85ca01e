import math
import random

import pytest

from grrapkit import bat, grrap, swarm
from grrapkit.swarm import (DEFAULT_SCHEDULE, NoBudgetError, SolverSpec,
                            StageSchedule, TrySetting)

EX_N = (3, 2, 2, 3, 3)
EX_R = (0.77946645, 0.87173278, 0.90284951, 0.71148780, 0.78781644)


class ScriptedRandom(random.Random):
    """random.Random whose random() pops from a fixed script first."""

    def __new__(cls, script, seed=0):
        return super().__new__(cls, seed)

    def __init__(self, script, seed=0):
        super().__init__(seed)
        self.script = list(script)

    def random(self):
        if self.script:
            return self.script.pop(0)
        return super().random()


def test_try_setting_thresholds():
    t = TrySetting(0.4, 0.30, 0.20)
    assert (t.cum_g, t.cum_p, t.cum_w) == pytest.approx((0.4, 0.70, 0.90))
    assert t.c_r == pytest.approx(0.10)
    t = TrySetting(0.6, 0.30, 0.30)  # cumulative 1.20 disables random branch
    assert t.cum_w == pytest.approx(1.20)
    assert t.c_r == 0.0
    with pytest.raises(ValueError):
        TrySetting(0.4, -0.1, 0.2)


def test_stage_schedule_needs_four_stages():
    with pytest.raises(ValueError):
        StageSchedule(stages=(TrySetting(0.4, 0.25, 0.3),) * 3)


def test_default_schedule_thresholds():
    cums = [(t.cum_g, t.cum_p, t.cum_w) for t in DEFAULT_SCHEDULE.stages]
    assert cums[0] == pytest.approx((0.40, 0.65, 0.95))
    assert cums[1] == pytest.approx((0.40, 0.65, 0.65))
    assert cums[2] == pytest.approx((0.40, 0.75, 0.75))
    assert cums[3] == pytest.approx((0.40, 0.75, 0.75))


def test_um0_branches(bridge_inst):
    setting = TrySetting(0.4, 0.25, 0.30)  # thresholds 0.40/0.65/0.95
    rng = ScriptedRandom([0.1])
    assert swarm.um0_update(3.7, 2.9, 1.8, setting, rng, bridge_inst) == 2.9
    rng = ScriptedRandom([0.5])
    assert swarm.um0_update(3.7, 2.9, 1.8, setting, rng, bridge_inst) == 1.8
    rng = ScriptedRandom([0.8])
    assert swarm.um0_update(3.7, 2.9, 1.8, setting, rng, bridge_inst) == 3.7
    rng = ScriptedRandom([0.99])
    fresh = swarm.um0_update(3.7, 2.9, 1.8, setting, rng, bridge_inst)
    assert fresh not in (3.7, 2.9, 1.8)
    n, r = grrap.decode(bridge_inst, (fresh,))
    assert bridge_inst.n_min <= n[0] <= bridge_inst.n_max
    assert bridge_inst.r_min <= r[0] <= bridge_inst.r_max


def test_um0_disabled_random_branch(bridge_inst):
    setting = TrySetting(0.6, 0.25, 0.20)  # cum_w = 1.05, c_r = 0
    rng = ScriptedRandom([0.99])
    assert swarm.um0_update(3.7, 2.9, 1.8, setting, rng, bridge_inst) == 3.7


def test_um0_random_branch_rate(bridge_inst):
    # c_r = 0.1: over 10^4 updates the fresh-random branch should fire
    # within 3 sigma of the binomial expectation
    setting = TrySetting(0.4, 0.25, 0.25)
    rng = random.Random(99)
    fires = 0
    for _ in range(10_000):
        out = swarm.um0_update(0.0, 0.0, 0.0, setting, rng, bridge_inst)
        if out != 0.0:
            fires += 1
    expected = 1000
    sigma = math.sqrt(10_000 * 0.1 * 0.9)
    assert abs(fires - expected) <= 3 * sigma


def test_um1_perturbation_bound(bridge_inst):
    setting = TrySetting(1.0, 0.0, 0.0)  # always take the gBest branch
    rng = random.Random(1)
    for gen in (1, 7, 50):
        out = swarm.um1_update(3.7, 3.7, 3.7, setting, gen, gen, rng,
                               bridge_inst)
        assert abs(out - 3.7) <= 0.00025 + 1e-15


def test_um1_fresh_random_not_perturbed(bridge_inst):
    setting = TrySetting(0.1, 0.1, 0.1)  # c_r = 0.7
    rng = ScriptedRandom([0.9, 0.0, 0.0])  # branch draw, then randint/uniform
    out = swarm.um1_update(3.7, 2.9, 1.8, setting, 5, 1, rng, bridge_inst)
    n, r = grrap.decode(bridge_inst, (out,))
    assert bridge_inst.n_min <= n[0] <= bridge_inst.n_max


def test_um3_vanishes_at_horizon(bridge_inst):
    setting = TrySetting(1.0, 0.0, 0.0)
    rng = random.Random(2)
    out = swarm.um3_update(3.7, 3.7, 3.7, setting, 1000, 1000, rng,
                           bridge_inst)
    assert abs(out - 3.7) <= math.exp(-100.0) + 1e-30  # ~3.7e-44


def test_um3_early_perturbation_positive(bridge_inst):
    setting = TrySetting(1.0, 0.0, 0.0)
    rng = ScriptedRandom([0.0, 0.2])  # branch draw, perturbation draw
    out = swarm.um3_update(3.7, 3.7, 3.7, setting, 0, 1000, rng, bridge_inst)
    assert out == pytest.approx(3.9, abs=1e-12)
    # oversized perturbations clamp at the reliability ceiling
    rng = ScriptedRandom([0.0, 0.9])
    out = swarm.um3_update(3.7, 3.7, 3.7, setting, 0, 1000, rng, bridge_inst)
    assert out == pytest.approx(3.0 + bridge_inst.r_max, abs=1e-12)


def test_boundary_reset_binding(bridge_inst):
    r5, clamped = swarm.boundary_reset_r(bridge_inst, EX_N, EX_R, 4)
    assert not clamped
    assert r5 == pytest.approx(0.7878166669244415, abs=1e-12)
    r_new = EX_R[:4] + (r5,)
    assert grrap.g_cost(bridge_inst, EX_N, r_new) == \
        pytest.approx(bridge_inst.c_ub, abs=1e-9)


def test_boundary_reset_matches_bisection(bridge_inst):
    rng = random.Random(8)
    inst = bridge_inst
    for _ in range(20):
        n = tuple(rng.randint(1, 4) for _ in range(5))
        r = tuple(rng.uniform(0.55, 0.8) for _ in range(5))
        j = rng.randrange(5)
        try:
            got, clamped = swarm.boundary_reset_r(inst, n, r, j)
        except NoBudgetError:
            continue
        if clamped:
            continue
        lo, hi = 1e-9, 1.0 - 1e-12
        for _ in range(200):
            mid = (lo + hi) / 2
            trial = r[:j] + (mid,) + r[j + 1:]
            if grrap.g_cost(inst, n, trial) < inst.c_ub:
                lo = mid
            else:
                hi = mid
        assert got == pytest.approx(lo, abs=1e-12)


def test_boundary_reset_no_budget(bridge_inst):
    # near-perfect reliabilities blow the cost budget on the other arcs
    r = (0.99999,) * 5
    with pytest.raises(NoBudgetError):
        swarm.boundary_reset_r(bridge_inst, (5, 5, 5, 5, 5), r, 0)


def test_boundary_reset_clamps(bridge_inst):
    # huge budget: the binding value exceeds r_max and is clamped
    big = grrap.ProblemInstance(
        network=bridge_inst.network, params=bridge_inst.params,
        v_ub=110.0, c_ub=1e15, w_ub=200.0)
    r_j, clamped = swarm.boundary_reset_r(big, (1, 1, 1, 1, 1), (0.6,) * 5, 0)
    assert clamped
    assert r_j == big.r_max


def test_boundary_update_improves_or_keeps(bridge_inst, bridge_cvs):
    rng = random.Random(12)
    inst = bridge_inst
    for gen in range(40):
        x = tuple(rng.randint(1, 6) + rng.uniform(inst.r_min, 0.95)
                  for _ in range(5))
        before = grrap.penalized_reliability(inst, bridge_cvs, x).r_p
        out = swarm.boundary_update(x, gen, inst, bridge_cvs)
        after = grrap.penalized_reliability(inst, bridge_cvs, out).r_p
        assert after >= before


def test_boundary_update_fixed_point(bridge_inst, bridge_cvs):
    # applying the reset twice at the same coordinate cannot improve again
    x = grrap.encode(bridge_inst, EX_N, EX_R)
    once = swarm.boundary_update(x, 4, bridge_inst, bridge_cvs)
    assert once != tuple(x)
    twice = swarm.boundary_update(once, 4, bridge_inst, bridge_cvs)
    assert twice == once


def test_boundary_update_no_budget_keeps(bridge_inst, bridge_cvs):
    x = grrap.encode(bridge_inst, (5, 5, 5, 5, 5), (0.99999,) * 5)
    assert swarm.boundary_update(x, 0, bridge_inst, bridge_cvs) == tuple(x)


def test_um4_candidate_shape(bridge_inst):
    rng = random.Random(21)
    x = grrap.encode(bridge_inst, EX_N, EX_R)
    for _ in range(50):
        cand = swarm.um4_gbest_update(x, bridge_inst, rng)
        assert len(cand) == 5
        n, r = grrap.decode(bridge_inst, cand)
        assert all(bridge_inst.n_min <= ni <= bridge_inst.n_max for ni in n)
        assert all(bridge_inst.r_min <= ri <= bridge_inst.r_max for ri in r)
        assert n == EX_N  # integer parts untouched


def test_um4_single_coordinate_network():
    from grrapkit.network import parse_network
    net = parse_network("nodes 2\nsource 1\nsink 2\narc 1 1 2\n")
    inst = grrap.synthesize_instance(net)
    rng = random.Random(22)
    cand = swarm.um4_gbest_update((3.7,), inst, rng)
    assert len(cand) == 1


def test_um5_drift_only():
    rng = random.Random(0)
    x = [3.7, 2.9]
    v = [0.1, -0.2]
    new_x, new_v = swarm.um5_pso_update(x, v, x, x, rng, 0.9, 2.0, 2.0,
                                        1.5, 10.999999, -2.0, 2.0)
    assert new_v == pytest.approx([0.09, -0.18])
    assert new_x == pytest.approx([3.79, 2.72])


def test_um5_clamping():
    rng = ScriptedRandom([1.0, 1.0])
    # huge attraction forces the velocity to its cap, then x to its cap
    new_x, new_v = swarm.um5_pso_update([10.9], [0.0], [10.999999],
                                        [10.999999], rng, 0.9, 2.0, 2.0,
                                        1.5, 10.999999, -0.05, 0.05)
    assert new_v == [0.05]
    assert new_x == pytest.approx([10.95])
    rng = ScriptedRandom([1.0, 1.0])
    new_x, _ = swarm.um5_pso_update([10.9], [0.0], [10.999999], [10.999999],
                                    rng, 0.9, 2.0, 2.0, 1.5, 10.999999,
                                    -5.0, 5.0)
    assert new_x == [10.999999]


def test_default_stage_gens():
    assert swarm.default_stage_gens(1000) == (250, 500, 750, 1000)
    assert swarm.default_stage_gens(10) == (2, 5, 8, 10)
    assert swarm.default_stage_gens(2) == (1, 2)
    assert swarm.default_stage_gens(0) == ()


def test_spec_validation(bridge_inst, bridge_cvs):
    with pytest.raises(ValueError):
        swarm.run_solver(SolverSpec(algorithm="genetic"), bridge_inst,
                         bridge_cvs)
    with pytest.raises(ValueError):
        swarm.run_solver(SolverSpec(n_sol=0), bridge_inst, bridge_cvs)
    with pytest.raises(ValueError):
        swarm.run_solver(SolverSpec(n_gen=10), bridge_inst, bridge_cvs,
                         stage_gens=(5, 3, 10))
    with pytest.raises(ValueError):
        swarm.run_solver(SolverSpec(n_gen=10), bridge_inst, bridge_cvs,
                         stage_gens=(5, 8))


def test_evaluator_agrees_with_reference(bridge_inst, bridge_cvs):
    ev = swarm.Evaluator(bridge_inst, bridge_cvs)
    rng = random.Random(33)
    for _ in range(200):
        x = [rng.randint(1, 10) + rng.uniform(0.5, 0.999999)
             for _ in range(5)]
        fast = ev.evaluate(x)
        ref = grrap.penalized_reliability(bridge_inst, bridge_cvs, x)
        assert fast.r_s == pytest.approx(ref.r_s, abs=1e-12)
        assert fast.r_p == pytest.approx(ref.r_p, abs=1e-12)
        assert fast.g_v == pytest.approx(ref.g_v, rel=1e-12)
        assert fast.g_c == pytest.approx(ref.g_c, rel=1e-12)
        assert fast.g_w == pytest.approx(ref.g_w, rel=1e-12)
        assert fast.feasible == ref.feasible
    assert ev.count == 200


def test_evaluator_rejects_mismatched_set(bridge_inst):
    from grrapkit.network import parse_network
    other = parse_network("nodes 2\nsource 1\nsink 2\narc 1 1 2\n")
    other_cvs = bat.enumerate_connected(other)
    with pytest.raises(ValueError):
        swarm.Evaluator(bridge_inst, other_cvs)


@pytest.mark.parametrize("algo", swarm.ALGORITHMS)
def test_run_solver_small(algo, bridge_inst, bridge_cvs):
    spec = SolverSpec(algorithm=algo, n_sol=8, n_gen=40, seed=3)
    result = swarm.run_solver(spec, bridge_inst, bridge_cvs)
    # gBest trajectory is monotone non-decreasing
    assert list(result.gbest_rp) == sorted(result.gbest_rp)
    assert len(result.gbest_rp) == 41
    # fair-comparison contract on evaluation count
    assert result.n_evals == 8 * 41
    # final solution decodes into range
    n, r = grrap.decode(bridge_inst, result.best_x)
    assert all(1 <= ni <= 10 for ni in n)
    assert all(bridge_inst.r_min <= ri <= bridge_inst.r_max for ri in r)
    # stage rows are consistent with the trajectory and monotone
    assert len(result.stage_rows) == 4
    rps = [row.best.r_p for row in result.stage_rows]
    assert rps == sorted(rps)
    for row in result.stage_rows:
        assert row.best.r_p == result.gbest_rp[row.generation]


def test_run_solver_deterministic(bridge_inst, bridge_cvs):
    for algo in swarm.ALGORITHMS:
        spec = SolverSpec(algorithm=algo, n_sol=6, n_gen=25, seed=11)
        a = swarm.run_solver(spec, bridge_inst, bridge_cvs)
        b = swarm.run_solver(spec, bridge_inst, bridge_cvs)
        assert a.best_x == b.best_x
        assert a.gbest_rp == b.gbest_rp


def test_run_solver_seed_changes_trajectory(bridge_inst, bridge_cvs):
    a = swarm.run_solver(SolverSpec(n_sol=6, n_gen=25, seed=1),
                         bridge_inst, bridge_cvs)
    b = swarm.run_solver(SolverSpec(n_sol=6, n_gen=25, seed=2),
                         bridge_inst, bridge_cvs)
    assert a.gbest_rp != b.gbest_rp


def test_run_solver_zero_generations(bridge_inst, bridge_cvs):
    result = swarm.run_solver(SolverSpec(n_sol=10, n_gen=0, seed=4),
                              bridge_inst, bridge_cvs)
    assert result.n_evals == 10
    assert len(result.gbest_rp) == 1
    assert result.stage_rows == ()


def test_run_solver_fixed_setting(bridge_inst, bridge_cvs):
    spec = SolverSpec(setting=TrySetting(0.4, 0.25, 0.30), n_sol=6,
                      n_gen=20, seed=5)
    result = swarm.run_solver(spec, bridge_inst, bridge_cvs)
    assert result.n_evals == 6 * 21


def test_schedule_round_trip():
    text = swarm.write_schedule(DEFAULT_SCHEDULE)
    assert swarm.read_schedule(text) == DEFAULT_SCHEDULE


def test_read_schedule_errors():
    with pytest.raises(ValueError):
        swarm.read_schedule("stage 0 0.4 0.25 0.3\n")
    with pytest.raises(ValueError):
        swarm.read_schedule("phase 0 0.4 0.25 0.3\n")
