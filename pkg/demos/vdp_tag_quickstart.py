"""Chase the Van der Pol target with VOMCPOW under a small time budget.

The hybrid action space (heading angle x look bit) is handled natively by the
action metric: wrapped angular distance plus a label penalty. Episodes print
their rewards and whether the target was tagged.

Run:  python demos/vdp_tag_quickstart.py [episodes]
"""

import sys

from voroplan.harness import ExperimentSpec, run_experiment

episodes = int(sys.argv[1]) if len(sys.argv) > 1 else 5

spec = ExperimentSpec(
    env="vdp",
    solver="vomcpow",
    budgets=(("seconds", 0.05),),
    episodes=episodes,
    base_seed=0,
    out_dir="results/vdp_demo",
    filter_particles=2000,
    threads=1,
)
csv_path, results = run_experiment(spec)
for r in results:
    print(f"episode {r.episode}: reward {r.total_reward:8.2f} "
          f"steps {r.steps:2d} outcome {r.termination}")
print(f"rows -> {csv_path}")
