"""Tiny problems with brute-force-checkable optima.

OneStepGaussianPomdp: scalar state ~ N(0,1), action on [-2,2], reward
-(s-a)^2, one noisy observation of the (static) state, horizon 1. Its value
is computable by deterministic quadrature. QuadraticMdp: deterministic 1-D
MDP s' = s + a with reward -(a - 0.3)^2 over two steps, solvable by grid
search. Both run in well under a second at full oracle resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..problems import ActionSpace, GenerativeProblem


@dataclass(frozen=True, eq=False)
class OneStepGaussianParams:
    prior_sigma: float = 1.0
    obs_var: float = 0.25  # observation noise variance (sigma = 0.5)
    action_bound: float = 2.0


def make_one_step_gaussian(params: OneStepGaussianParams = OneStepGaussianParams()) -> GenerativeProblem:
    sig_o = math.sqrt(params.obs_var)
    b = params.action_bound
    space = ActionSpace(lower=[-b], upper=[b])
    log_norm = -0.5 * math.log(2.0 * math.pi * params.obs_var)

    def generate(state, action, rng):
        s = float(state[0])
        a = float(action[0])
        obs = np.array([s + rng.normal(0.0, sig_o)])
        return np.array([s]), obs, -((s - a) ** 2)

    def generate_batch(states, action, rng):
        s = np.asarray(states, dtype=float)[:, 0]
        a = float(action[0])
        obs = s + rng.normal(size=s.shape) * sig_o
        return s[:, None].copy(), obs[:, None], -((s - a) ** 2)

    def obs_density(obs, action, next_state):
        d = float(obs[0]) - float(next_state[0])
        return math.exp(log_norm - d * d / (2.0 * params.obs_var))

    def obs_density_batch(obs, action, next_states):
        d = float(obs[0]) - np.asarray(next_states)[:, 0]
        return np.exp(log_norm - d * d / (2.0 * params.obs_var))

    return GenerativeProblem(
        generate=generate,
        obs_density=obs_density,
        initial_belief_sampler=lambda rng: np.array([rng.normal(0.0, params.prior_sigma)]),
        discount=1.0,
        action_space=space,
        horizon=1,
        generate_batch=generate_batch,
        obs_density_batch=obs_density_batch,
    )


def one_step_q_oracle(action: float, params: OneStepGaussianParams = OneStepGaussianParams(),
                      n_grid: int = 20001) -> float:
    """Q*(b0, a) by deterministic quadrature over the state prior.

    The horizon-1 Bellman backup is E_b[R(s, a)] + gamma * E_o[V*_1], and the
    next-depth value is identically zero, so the observation integral
    contributes nothing; the state integral is evaluated on a trapezoid grid.
    """
    s = np.linspace(-8.0 * params.prior_sigma, 8.0 * params.prior_sigma, n_grid)
    prior = np.exp(-0.5 * (s / params.prior_sigma) ** 2) / (
        params.prior_sigma * math.sqrt(2.0 * math.pi)
    )
    return float(np.trapezoid(prior * -((s - action) ** 2), s))


def one_step_value_oracle(params: OneStepGaussianParams = OneStepGaussianParams(),
                          n_actions: int = 4001) -> float:
    """V*_0(b0) = max_a Q*(b0, a) over a fine action grid."""
    actions = np.linspace(-params.action_bound, params.action_bound, n_actions)
    s = np.linspace(-8.0 * params.prior_sigma, 8.0 * params.prior_sigma, 20001)
    prior = np.exp(-0.5 * (s / params.prior_sigma) ** 2) / (
        params.prior_sigma * math.sqrt(2.0 * math.pi)
    )
    q = np.trapezoid(prior[None, :] * -((s[None, :] - actions[:, None]) ** 2), s, axis=1)
    return float(np.max(q))


@dataclass(frozen=True, eq=False)
class QuadraticMdpParams:
    target: float = 0.3
    action_bound: float = 1.0
    horizon: int = 2
    noise_sigma: float = 0.0  # transition noise std on s' = s + a
    state_bonus: float = 0.0  # adds state_bonus * s to the reward


def make_quadratic_mdp(params: QuadraticMdpParams = QuadraticMdpParams()) -> GenerativeProblem:
    b = params.action_bound
    space = ActionSpace(lower=[-b], upper=[b])

    def generate(state, action, rng):
        s = float(state[0])
        a = float(action[0])
        s2 = s + a
        if params.noise_sigma > 0:
            s2 += rng.normal(0.0, params.noise_sigma)
        r = -((a - params.target) ** 2) + params.state_bonus * s
        nxt = np.array([s2])
        return nxt, nxt, r

    def generate_batch(states, action, rng):
        s = np.asarray(states, dtype=float)[:, 0]
        a = float(action[0])
        s2 = s + a
        if params.noise_sigma > 0:
            s2 = s2 + rng.normal(size=s.shape) * params.noise_sigma
        r = -((a - params.target) ** 2) + params.state_bonus * s  # array via s
        nxt = s2[:, None]
        return nxt, nxt, r

    return GenerativeProblem(
        generate=generate,
        obs_density=lambda o, a, s2: 1.0,
        initial_belief_sampler=lambda rng: np.array([0.0]),
        discount=1.0,
        action_space=space,
        horizon=params.horizon,
        is_mdp=True,
        generate_batch=generate_batch,
        obs_density_batch=lambda o, a, nxt: np.ones(len(nxt)),
    )


def quadratic_mdp_grid_optimum(params: QuadraticMdpParams = QuadraticMdpParams(),
                               resolution: float = 1e-3):
    """(optimal value, optimal first action) by exhaustive grid search.

    The reward depends only on the action, so the per-depth grid maxima give
    the exact deterministic optimum over the grid.
    """
    if params.noise_sigma or params.state_bonus:
        raise ValueError("grid oracle covers the deterministic action-only reward")
    grid = np.arange(-params.action_bound, params.action_bound + resolution / 2, resolution)
    stage = -((grid - params.target) ** 2)
    value = 0.0
    first = 0.0
    for depth in range(params.horizon - 1, -1, -1):
        totals = stage + value
        best = int(np.argmax(totals))
        value = float(totals[best])
        first = float(grid[best])
    return value, first
