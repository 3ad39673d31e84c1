"""Land the planar vehicle with VOMCPOW against the proportional baseline.

Shows the episode outcomes (landed / crashed), the -1000 crash penalty, and
the bounded episode length. The baseline flies the proportional controller
directly; the solver plans over it as a rollout policy.

Run:  python demos/lander_smoke.py [episodes]
"""

import sys

from voroplan.harness import ExperimentSpec, run_experiment

episodes = int(sys.argv[1]) if len(sys.argv) > 1 else 5

for solver, budget in (("rollout-only", ("queries", 1)), ("vomcpow", ("queries", 150))):
    print(f"--- {solver}")
    spec = ExperimentSpec(
        env="lander",
        solver=solver,
        budgets=(budget,),
        episodes=episodes,
        base_seed=0,
        out_dir=f"results/lander_demo/{solver}",
        filter_particles=2000,
        threads=1,
    )
    _, results = run_experiment(spec)
    for r in results:
        print(f"episode {r.episode}: reward {r.total_reward:9.2f} "
              f"steps {r.steps:3d} outcome {r.termination}")
