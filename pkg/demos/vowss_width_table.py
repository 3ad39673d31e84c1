"""VOWSS width study on LQG: first-action distance vs (C_s, C_a).

Reproduces the width-table layout at desk scale: growing either the state
width (particles per belief) or the action width (VOO selections per node)
tightens the planned first action around the analytic optimum [6, -6].
Full-scale runs go through `voroplan sweep-vowss`.

Run:  python demos/vowss_width_table.py [episodes]
"""

import sys

from voroplan.harness import vowss_width_sweep

episodes = int(sys.argv[1]) if len(sys.argv) > 1 else 10

path, rows = vowss_width_sweep(
    state_widths=[2, 5],
    action_widths=[20, 60],
    episodes=episodes,
    base_seed=0,
    out_dir="results/vowss_demo",
    threads=2,
)
print(f"\nsummary rows written to {path}")
