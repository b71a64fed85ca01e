"""Race the seven swarm variants on the bridge allocation problem.

Every algorithm gets the same evaluation budget (N_sol * (N_gen + 1)
fitness calls) and the same seeds, so differences in the final best
solution reflect the update mechanisms, not the budget.
"""

import statistics

from grrapkit import bat, grrap, swarm
from grrapkit.network import parse_network

from bridge_reliability import BRIDGE

N_SOL = 50
N_GEN = 200
SEEDS = range(5)


def main():
    net = parse_network(BRIDGE)
    inst = grrap.synthesize_instance(net)
    cvs = bat.enumerate_connected(net)

    print(f"bridge instance, N_sol={N_SOL}, N_gen={N_GEN}, "
          f"{len(SEEDS)} seeds per algorithm\n")
    print(f"{'algorithm':>10} {'median r_s':>12} {'worst r_s':>12} "
          f"{'feasible':>9} {'evals':>7}")
    for algo in swarm.ALGORITHMS:
        finals = []
        evals = None
        for seed in SEEDS:
            spec = swarm.SolverSpec(algorithm=algo, n_sol=N_SOL,
                                    n_gen=N_GEN, seed=seed)
            result = swarm.run_solver(spec, inst, cvs)
            finals.append(result.best)
            evals = result.n_evals
        med = statistics.median(e.r_s for e in finals)
        worst = min(e.r_s for e in finals)
        feas = sum(e.feasible for e in finals)
        print(f"{algo:>10} {med:12.7f} {worst:12.7f} "
              f"{feas:>6}/{len(finals)} {evals:>7}")

    # one detailed run: show the staged convergence of the default solver
    spec = swarm.SolverSpec(n_sol=N_SOL, n_gen=N_GEN, seed=0)
    result = swarm.run_solver(spec, inst, cvs)
    print("\nstage snapshots of one ssoa3 run (seed 0):")
    for row in result.stage_rows:
        print(f"  stage {row.stage} (gen {row.generation:>4}): "
              f"best r_p={row.best.r_p:.7f}, "
              f"population mean pbest={row.mean_pbest_rp:.7f}")
    n, r = grrap.decode(inst, result.best_x)
    print(f"final allocation: n={list(n)}")
    print(f"                  r={[round(ri, 6) for ri in r]}")


if __name__ == "__main__":
    main()
