"""Tune the SSO branch probabilities with the L9(3^3) orthogonal array.

Runs all nine (c_g, c_p, c_w) level combinations over seeded solver
runs, averages stage-boundary fitness by factor level, and derives a
per-stage schedule: exploratory settings early, exploitative late.
A small budget keeps the demo fast; scale N_sol/N_gen up for real use.
"""

from grrapkit import bat, grrap, ss3oa, swarm
from grrapkit.network import parse_network

from bridge_reliability import BRIDGE


def main():
    net = parse_network(BRIDGE)
    inst = grrap.synthesize_instance(net)
    cvs = bat.enumerate_connected(net)

    design = ss3oa.OADesign()
    print("the nine tries (cumulative thresholds C_g <= C_p <= C_w):")
    for i, t in enumerate(ss3oa.derive_try_table(design)):
        print(f"  try {i}: c=({t.c_g:.2f}, {t.c_p:.2f}, {t.c_w:.2f}) "
              f"-> C=({t.cum_g:.2f}, {t.cum_p:.2f}, {t.cum_w:.2f}), "
              f"c_r={t.c_r:.2f}")

    report = ss3oa.run_tuning(
        [("bridge", inst, cvs)],
        design=design,
        runs_per_problem=3,
        template=swarm.SolverSpec(n_sol=20, n_gen=80),
        base_seed=0,
    )

    print("\nper-try fitness at the final stage:")
    final = report.try_fitness[-1]
    for i, f in enumerate(final):
        print(f"  try {i}: {f:.7f}")

    print("\nfactor-level averages at the final stage:")
    for factor, means in report.level_averages[-1].items():
        formatted = ", ".join(f"{m:.7f}" for m in means)
        print(f"  {factor}: {formatted}")

    print("\nderived stage schedule:")
    print(swarm.write_schedule(report.schedule))

    spec = swarm.SolverSpec(setting=report.schedule, n_sol=20, n_gen=80,
                            seed=100)
    result = swarm.run_solver(spec, inst, cvs)
    print(f"solver run with the tuned schedule: best r_p="
          f"{result.best.r_p:.7f}, feasible={result.best.feasible}")


if __name__ == "__main__":
    main()
