"""Cross-entropy search, from a toy objective to solver hyperparameters.

Part 1 fits a 1-D quadratic to show the mechanics (elites, smoothing, the
monotone elite mean). Part 2 runs a miniature two-phase solver tune on LQG:
the plain-widening baseline first, then the Voronoi solver initialized from
the baseline's optimum, mirroring the benchmark protocol.

Run:  python demos/cem_tuning_demo.py
"""

import numpy as np

from voroplan.cem import CemParam, CemSpec, cem_optimize
from voroplan.harness import run_tuning
from voroplan.rng import stream

print("--- part 1: quadratic toy")
spec = CemSpec(
    params=[CemParam("x", 0.0, 1.0)],
    objective=lambda p, rng: -((p["x"] - 0.7) ** 2),
    population=40,
    elite_frac=0.25,
    iterations=12,
)
best, history = cem_optimize(spec, stream(0))
for h in history[::3]:
    print(f"iter {h['iteration']:2d}: elite mean {h['elite_mean']:.5f} "
          f"best {h['best']:.5f} mean x {h['mean'][0]:.3f}")
print(f"best x = {best['x']:.4f} (target 0.7)\n")

print("--- part 2: miniature two-phase solver tune on LQG")
base_recipe = {
    "env": "lqg", "solver": "pomcpow", "queries": 100, "episodes_per_eval": 3,
    "iterations": 2, "population": 6, "elite_frac": 0.34, "seed": 0,
    "filter_particles": 500,
    "params": [
        {"name": "c", "low": 5.0, "high": 200.0, "log_scale": True},
        {"name": "k_a", "low": 5.0, "high": 60.0},
    ],
}
best_pom, _, _ = run_tuning(base_recipe, out_dir="results/cem_demo/pomcpow")
print(f"baseline optimum: {np.round(list(best_pom.values()), 2)}")

voronoi_recipe = dict(base_recipe, solver="vomcpow", init_from_preset="lqg-pomcpow")
voronoi_recipe["params"] = base_recipe["params"] + [
    {"name": "omega", "low": 0.5, "high": 1.0},
]
best_vom, _, _ = run_tuning(voronoi_recipe, out_dir="results/cem_demo/vomcpow")
print(f"voronoi-solver optimum: { {k: round(v, 3) for k, v in best_vom.items()} }")
