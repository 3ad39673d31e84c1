"""Compare first-action quality of POMCPOW and VOMCPOW on the LQG benchmark.

The two-step LQG problem has the analytic optimum u0 = -0.6 * x0_mean =
[6, -6]; the stationary Riccati rollout policy instead suggests roughly
[6.18, -6.18]. Planning with shared seeds shows how far each solver's chosen
first action lands from the analytic optimum.

Run:  python demos/lqg_first_actions.py [episodes]
"""

import sys

import numpy as np

from voroplan import init_root_belief, pomcpow_plan, vomcpow_plan
from voroplan.envs import lqg
from voroplan.presets import mcts_preset
from voroplan.rng import stream

episodes = int(sys.argv[1]) if len(sys.argv) > 1 else 40
queries = 1000
optimum = np.array([6.0, -6.0])

problem = lqg.make_problem()
policy = lqg.RiccatiPolicy()

print(f"{episodes} paired episodes, {queries} queries per plan")
print(f"analytic optimum {optimum}, Riccati point "
      f"{np.round(10 * lqg.RICCATI_GAIN * np.array([1.0, -1.0]), 3)}")

results = {}
for name, plan in (("lqg-pomcpow", pomcpow_plan), ("lqg-vomcpow", vomcpow_plan)):
    cfg = mcts_preset(name, budget_queries=queries, rollout_policy=policy)
    dists = []
    for seed in range(episodes):
        belief = init_root_belief(problem, 1000, stream(seed, 1))
        action = plan(belief, problem, cfg, stream(seed, 0))
        dists.append(float(np.linalg.norm(action - optimum)))
    results[name] = np.asarray(dists)
    se = results[name].std(ddof=1) / np.sqrt(episodes)
    print(f"{name:14s} mean distance {results[name].mean():.3f} +/- {se:.3f}")

diff = results["lqg-pomcpow"] - results["lqg-vomcpow"]
se = diff.std(ddof=1) / np.sqrt(episodes)
print(f"paired difference (pomcpow - vomcpow): {diff.mean():.4f} +/- {se:.4f}")
