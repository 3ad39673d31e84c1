"""Full-width sparse-sampling value estimators with VPW action selection.

VOWSS estimates POMDP values on weighted particle beliefs: every particle is
propagated through the generative model, every generated observation spawns a
child belief holding all next states reweighted by the observation density,
and Q-values are the weight-normalized averages of reward plus discounted
child values. VOSS is the MDP analogue with plain arithmetic averaging. Both
expand the sampled tree fully, so they are oracles for small problems rather
than anytime planners.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .problems import (
    GenerativeProblem,
    WeightedParticleBelief,
    batch_generate,
    reweight_next_belief,
    weighted_mean_value,
)
from .voo import VooConfig, VoronoiCenterSet, VpwConfig, _vpw_decision, voo_sample


class EmptyPlanError(RuntimeError):
    """Planning horizon is zero; no action exists."""


def default_sparse_vpw(omega: float, sigma, k_a: float = 1.0, alpha_a: float = 0.5,
                       c: float = 0.0) -> VpwConfig:
    """VPW configuration in the sparse-sampling regime: widening unbounded,
    i.e. every selection is a fresh VOO sample."""
    return VpwConfig(k_a=k_a, alpha_a=alpha_a, c=c,
                     voo=VooConfig(omega=omega, sigma=sigma),
                     widen_unbounded=True)


@dataclass(frozen=True, eq=False)
class VowssConfig:
    state_width: int  # particles per belief (C_s)
    action_width: int  # VPW selections per belief node (C_a)
    depth: int  # planning horizon D
    vpw: VpwConfig
    action_width_decay: float = 1.0  # per-depth multiplier on C_a

    def __post_init__(self):
        if self.state_width < 1 or self.action_width < 1 or self.depth < 0:
            raise ValueError("widths must be >= 1 and depth >= 0")
        if not (0.0 < self.action_width_decay <= 1.0):
            raise ValueError("action_width_decay must lie in (0, 1]")


@dataclass(frozen=True, eq=False)
class VossConfig:
    state_width: int
    action_width: int
    depth: int
    vpw: VpwConfig
    action_width_decay: float = 1.0

    def __post_init__(self):
        if self.state_width < 1 or self.action_width < 1 or self.depth < 0:
            raise ValueError("widths must be >= 1 and depth >= 0")
        if not (0.0 < self.action_width_decay <= 1.0):
            raise ValueError("action_width_decay must lie in (0, 1]")


def effective_action_width(base: int, decay: float, depth: int) -> int:
    """Per-depth selection budget max(1, round(C_a * decay**depth))."""
    return max(1, round(base * decay**depth))


def _run_vpw_sweep(width, space, vpw, rng, evaluate_q):
    """Sequential VPW selections with running-average Q feedback.

    Returns the populated center set. Re-selecting an existing action (UCB
    branch when widening is bounded) re-evaluates it and averages the result
    into its Q estimate; the visit count is the number of selections so far.
    """
    centers = VoronoiCenterSet()
    counts = []
    if vpw.widen_unbounded:  # every selection is a fresh VOO sample
        voo = vpw.voo
        for _ in range(width):
            action = voo_sample(centers, space, voo, rng)
            centers.add(action, evaluate_q(action))
        return centers
    for i in range(width):
        action, is_new, idx = _vpw_decision(centers, counts, i, space, vpw, rng)
        q = evaluate_q(action)
        if is_new:
            centers.add(action, q)
            counts.append(1)
        else:
            counts[idx] += 1
            centers.values[idx] += (q - centers.values[idx]) / counts[idx]
    return centers


def vowss_estimate_v(belief: WeightedParticleBelief, depth: int,
                     problem: GenerativeProblem, cfg: VowssConfig, rng):
    """(value, best_action) at this belief; (0.0, None) at the horizon."""
    if depth >= cfg.depth:
        return 0.0, None
    width = effective_action_width(cfg.action_width, cfg.action_width_decay, depth)
    centers = _run_vpw_sweep(
        width, problem.action_space, cfg.vpw, rng,
        lambda a: vowss_estimate_q(belief, a, depth, problem, cfg, rng),
    )
    best = centers.argmax()
    return centers.values[best], centers.centers[best]


def vowss_estimate_q(belief: WeightedParticleBelief, action, depth: int,
                     problem: GenerativeProblem, cfg: VowssConfig, rng) -> float:
    """Weight-normalized average of r_i + gamma * EstimateV(child_i, depth+1).

    Each particle is propagated once; the i-th child belief pairs observation
    o_i with all C_s next states reweighted by Z(o_i | a, s'). At the last
    decision depth the child values are identically zero, so the children are
    not materialized (the returned Q is unchanged and no rng is consumed by
    reweighting).
    """
    next_states, observations, rewards = batch_generate(
        problem, belief.particles, action, rng
    )
    if depth + 1 >= cfg.depth:
        return weighted_mean_value(rewards, belief.weights)
    values = np.empty(len(belief))
    for i in range(len(belief)):
        child = reweight_next_belief(belief, next_states, observations[i], action, problem)
        v_child, _ = vowss_estimate_v(child, depth + 1, problem, cfg, rng)
        values[i] = rewards[i] + problem.discount * v_child
    return weighted_mean_value(values, belief.weights)


def vowss_plan(root_belief: WeightedParticleBelief, problem: GenerativeProblem,
               cfg: VowssConfig, rng):
    """Best root action from EstimateV at depth 0."""
    _, action = vowss_estimate_v(root_belief, 0, problem, cfg, rng)
    if action is None:
        raise EmptyPlanError("horizon is zero: no action was evaluated")
    return action


# ---------------------------------------------------------------------------
# VOSS: the stochastic-MDP analogue.


def voss_estimate_v(state, depth: int, problem: GenerativeProblem,
                    cfg: VossConfig, rng):
    """(value, best_action) at this state; (0.0, None) at the horizon."""
    if depth >= cfg.depth:
        return 0.0, None
    width = effective_action_width(cfg.action_width, cfg.action_width_decay, depth)
    centers = _run_vpw_sweep(
        width, problem.action_space, cfg.vpw, rng,
        lambda a: voss_estimate_q(state, a, depth, problem, cfg, rng),
    )
    best = centers.argmax()
    return centers.values[best], centers.centers[best]


def voss_estimate_q(state, action, depth: int, problem: GenerativeProblem,
                    cfg: VossConfig, rng) -> float:
    """r + gamma * mean of EstimateV over C_s sampled next states.

    The generator is drawn C_s times from the same (state, action); the reward
    term is the mean of the drawn rewards, which equals any single draw when
    the reward depends only on (s, a), as in all shipped MDPs.
    """
    if not problem.is_mdp:
        raise ValueError("voss estimators require an MDP")
    stack = np.broadcast_to(np.asarray(state), (cfg.state_width,) + np.shape(state))
    next_states, _, rewards = batch_generate(problem, stack, action, rng)
    r = float(np.mean(rewards))
    if depth + 1 >= cfg.depth:
        return r
    values = [
        voss_estimate_v(next_states[i], depth + 1, problem, cfg, rng)[0]
        for i in range(cfg.state_width)
    ]
    return r + problem.discount * float(np.mean(values))


def voss_plan(state, problem: GenerativeProblem, cfg: VossConfig, rng):
    """Best first action from EstimateV at depth 0."""
    _, action = voss_estimate_v(state, 0, problem, cfg, rng)
    if action is None:
        raise EmptyPlanError("horizon is zero: no action was evaluated")
    return action
