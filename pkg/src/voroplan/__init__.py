"""Online planning for continuous-space MDPs and POMDPs.

Voronoi progressive widening (VPW) action selection inside sparse-sampling
value estimators (VOWSS, VOSS) and anytime tree search (POMCPOW, VOMCPOW),
with benchmark environments and an experiment harness.
"""

from .problems import (
    ActionSpace,
    DegenerateBeliefError,
    DistanceMetric,
    GenerativeProblem,
    WeightedParticleBelief,
    init_root_belief,
    mdp_as_pomdp,
    reweight_next_belief,
    uniform_action,
    weighted_mean_value,
)
from .voo import (
    VooConfig,
    VoronoiCenterSet,
    VpwConfig,
    best_voronoi_cell,
    pw_select,
    ucb_select,
    voo_sample,
    vpw_select,
)
from .sparse import (
    EmptyPlanError,
    VossConfig,
    VowssConfig,
    default_sparse_vpw,
    effective_action_width,
    voss_estimate_q,
    voss_estimate_v,
    voss_plan,
    vowss_estimate_q,
    vowss_estimate_v,
    vowss_plan,
)
from .mcts import (
    ActionNode,
    BeliefNode,
    EmptyTreeError,
    MctsConfig,
    first_action_hook,
    mcts_plan,
    pomcpow_plan,
    rollout,
    simulate,
    vomcpow_plan,
)
from .cem import CemParam, CemSpec, cem_optimize
from . import envs, presets, rng

__all__ = [
    "ActionSpace",
    "DistanceMetric",
    "GenerativeProblem",
    "WeightedParticleBelief",
    "DegenerateBeliefError",
    "init_root_belief",
    "reweight_next_belief",
    "weighted_mean_value",
    "uniform_action",
    "mdp_as_pomdp",
    "VooConfig",
    "VpwConfig",
    "VoronoiCenterSet",
    "voo_sample",
    "best_voronoi_cell",
    "ucb_select",
    "vpw_select",
    "pw_select",
    "VowssConfig",
    "VossConfig",
    "default_sparse_vpw",
    "effective_action_width",
    "vowss_estimate_v",
    "vowss_estimate_q",
    "vowss_plan",
    "voss_estimate_v",
    "voss_estimate_q",
    "voss_plan",
    "EmptyPlanError",
    "MctsConfig",
    "BeliefNode",
    "ActionNode",
    "mcts_plan",
    "pomcpow_plan",
    "vomcpow_plan",
    "simulate",
    "rollout",
    "first_action_hook",
    "EmptyTreeError",
    "CemParam",
    "CemSpec",
    "cem_optimize",
    "envs",
    "presets",
    "rng",
]
