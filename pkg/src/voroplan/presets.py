"""Tuned hyperparameter presets for the benchmark problems.

Preset names pair an environment with a solver (e.g. ``lqg-vomcpow``). The
table entries for the Gaussian proposal covariance are variances (diag Sigma),
so VooConfig receives their square roots as per-dimension standard deviations.
POMCPOW rows force omega = 1, which makes the proposal scale irrelevant.
"""

from __future__ import annotations

import numpy as np

from .mcts import MctsConfig
from .sparse import VowssConfig, default_sparse_vpw
from .voo import VooConfig, VpwConfig

_MCTS_TABLE = {
    # name: (c, k_a, alpha_a, k_o, alpha_o, omega, sigma_sq, tree depth)
    "lqg-pomcpow": (65.0, 30.0, 1 / 2.5, 30.0, 1 / 4, 1.0, (0.5, 0.5), 3),
    "lqg-vomcpow": (60.0, 25.0, 1 / 5.5, 25.0, 1 / 2.5, 0.8, (0.5, 0.5), 3),
    "vdp-pomcpow": (110.0, 30.0, 1 / 30, 5.0, 1 / 100, 1.0, (0.1,), 10),
    "vdp-vomcpow": (85.0, 30.0, 1 / 30, 2.5, 1 / 100, 0.7, (0.1,), 10),
    "lander-pomcpow": (10.0, 3.0, 1 / 4, 2.0, 1 / 10, 1.0, (0.2, 0.5, 0.05), 250),
    "lander-vomcpow": (30.0, 4.0, 1 / 4, 1.5, 1 / 5, 0.9, (0.2, 0.5, 0.05), 250),
}

# VOWSS on LQG: state width 10, action width 200 decaying by 0.4 per depth
# over the two-step horizon, VOO with omega 0.8 and the same proposal scale.
_VOWSS_TABLE = {
    "lqg-vowss": (10, 200, 0.4, 2, 0.8, (0.5, 0.5)),
}

PRESET_NAMES = tuple(_MCTS_TABLE) + tuple(_VOWSS_TABLE)


def mcts_preset(name: str, budget_queries: int = None, budget_seconds: float = None,
                rollout_policy=None, overrides: dict = None) -> MctsConfig:
    """MctsConfig for a named preset, with optional scalar overrides."""
    if name not in _MCTS_TABLE:
        raise KeyError(f"unknown MCTS preset {name!r}")
    c, k_a, alpha_a, k_o, alpha_o, omega, sigma_sq, depth = _MCTS_TABLE[name]
    knobs = {
        "c": c, "k_a": k_a, "alpha_a": alpha_a, "k_o": k_o, "alpha_o": alpha_o,
        "omega": omega, "max_depth": depth,
    }
    if overrides:
        unknown = set(overrides) - set(knobs)
        if unknown:
            raise KeyError(f"unknown hyperparameters {sorted(unknown)}")
        knobs.update(overrides)
    sigma = np.sqrt(np.asarray(sigma_sq, dtype=float))
    vpw = VpwConfig(
        k_a=knobs["k_a"], alpha_a=knobs["alpha_a"], c=knobs["c"],
        voo=VooConfig(omega=knobs["omega"], sigma=sigma),
    )
    if budget_queries is None and budget_seconds is None:
        budget_queries = 1000
    return MctsConfig(
        vpw=vpw, k_o=knobs["k_o"], alpha_o=knobs["alpha_o"],
        max_depth=int(knobs["max_depth"]),
        num_queries=budget_queries, time_budget=budget_seconds,
        rollout_policy=rollout_policy,
    )


def vowss_preset(name: str = "lqg-vowss", overrides: dict = None) -> VowssConfig:
    """VowssConfig for a named preset."""
    if name not in _VOWSS_TABLE:
        raise KeyError(f"unknown VOWSS preset {name!r}")
    c_s, c_a, decay, depth, omega, sigma_sq = _VOWSS_TABLE[name]
    knobs = {"state_width": c_s, "action_width": c_a, "action_width_decay": decay,
             "depth": depth, "omega": omega}
    if overrides:
        unknown = set(overrides) - set(knobs)
        if unknown:
            raise KeyError(f"unknown hyperparameters {sorted(unknown)}")
        knobs.update(overrides)
    sigma = np.sqrt(np.asarray(sigma_sq, dtype=float))
    return VowssConfig(
        state_width=int(knobs["state_width"]),
        action_width=int(knobs["action_width"]),
        depth=int(knobs["depth"]),
        vpw=default_sparse_vpw(omega=knobs["omega"], sigma=sigma),
        action_width_decay=float(knobs["action_width_decay"]),
    )
