"""Two-dimensional linear-quadratic-Gaussian benchmark.

Dynamics x' = x + u + v, observation y = x + w, with isotropic Gaussian noise
(sigma = 0.1 for the initial state and both noises) and initial mean
[-10, 10]. Rewards are negated quadratic costs x'x + u'u per stage plus a
terminal x_N'x_N folded into the last transition, so all solvers maximize.
States carry the time index as a third component.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..problems import ActionSpace, GenerativeProblem

# Steady-state gain of the scalar algebraic Riccati equation with
# A = B = Q = R = 1: P solves P^2 - P - 1 = 0 (the golden ratio).
RICCATI_P = (1.0 + math.sqrt(5.0)) / 2.0
RICCATI_GAIN = RICCATI_P / (1.0 + RICCATI_P)


@dataclass(frozen=True, eq=False)
class LqgParams:
    horizon: int = 2
    sigma: float = 0.1
    x0_mean: tuple = (-10.0, 10.0)
    action_bound: float = 15.0  # A = [-bound, bound]^2


def riccati_gains(horizon: int):
    """(K, P) arrays indexed by steps-to-go; K[h] is the gain with h steps left.

    Backward recursion for A = B = Q = R = terminal cost = identity:
    K = P/(1+P), P <- 1 + K^2 + (1-K)^2 P, starting from the terminal P = 1.
    """
    K = np.zeros(horizon + 1)
    P = np.zeros(horizon + 1)
    P[0] = 1.0
    for h in range(1, horizon + 1):
        K[h] = P[h - 1] / (1.0 + P[h - 1])
        P[h] = 1.0 + K[h] ** 2 + (1.0 - K[h]) ** 2 * P[h - 1]
    return K, P


def lqg_exact_policy(horizon_remaining: int, state_estimate) -> np.ndarray:
    """Finite-horizon LQR action -K_t x_hat for the given steps-to-go."""
    if horizon_remaining < 1:
        raise ValueError("horizon_remaining must be >= 1")
    K, _ = riccati_gains(horizon_remaining)
    return -K[horizon_remaining] * np.asarray(state_estimate, dtype=float)


def lqg_riccati_policy(state_estimate) -> np.ndarray:
    """Stationary Riccati action -K_inf x_hat (K_inf about 0.618)."""
    return -RICCATI_GAIN * np.asarray(state_estimate, dtype=float)


def lqg_optimal_cost(x0_mean, sigma: float, horizon: int) -> float:
    """Expected optimal cost under exact state feedback, noise traces included.

    m'P_N m + tr(P_N Sigma_0) + sum over transitions of tr(P_h Sigma_v) for
    the cost-to-go matrices P (isotropic, so traces are 2 sigma^2 P).
    """
    m = np.asarray(x0_mean, dtype=float)
    _, P = riccati_gains(horizon)
    cost = float(m @ m) * P[horizon] + 2.0 * sigma**2 * P[horizon]
    for h in range(horizon):
        cost += 2.0 * sigma**2 * P[h]
    return cost


class ExactLqrPolicy:
    """Rollout policy using the finite-horizon gain for the state's time index."""

    def __init__(self, params: LqgParams):
        self.horizon = params.horizon
        self.gains, _ = riccati_gains(params.horizon)

    def __call__(self, obs, state):
        t = int(round(float(state[2])))
        remaining = self.horizon - t
        if remaining < 1:
            return np.zeros(2)
        x_hat = np.asarray(obs, dtype=float) if obs is not None else np.asarray(state[:2], dtype=float)
        return -self.gains[remaining] * x_hat


class RiccatiPolicy:
    """Rollout policy using the stationary gain."""

    def __call__(self, obs, state):
        x_hat = np.asarray(obs, dtype=float) if obs is not None else np.asarray(state[:2], dtype=float)
        return -RICCATI_GAIN * x_hat


def make_problem(params: LqgParams = LqgParams()) -> GenerativeProblem:
    n = params.horizon
    sig = params.sigma
    m0 = np.asarray(params.x0_mean, dtype=float)
    b = params.action_bound
    space = ActionSpace(lower=[-b, -b], upper=[b, b])
    log_norm = -math.log(2.0 * math.pi * sig**2) if sig > 0 else 0.0

    def generate(state, action, rng):
        x = state[:2]
        t = state[2]
        u = np.asarray(action, dtype=float)
        xn = x + u + rng.normal(0.0, sig, 2)
        r = -(float(x @ x) + float(u @ u))
        if t + 1 >= n:
            r -= float(xn @ xn)
        obs = xn + rng.normal(0.0, sig, 2)
        return np.array([xn[0], xn[1], t + 1.0]), obs, r

    def generate_batch(states, action, rng):
        x = states[:, :2]
        u = np.asarray(action, dtype=float)
        noise = rng.normal(size=(len(states), 4))
        noise *= sig
        xn = x + u + noise[:, :2]
        r = -(np.einsum("ij,ij->i", x, x) + float(u @ u))
        t_next = states[:, 2] + 1.0
        if t_next[0] >= n:  # beliefs are depth-synchronized
            r -= np.einsum("ij,ij->i", xn, xn)
        obs = xn + noise[:, 2:]
        nxt = np.empty((len(states), 3))
        nxt[:, :2] = xn
        nxt[:, 2] = t_next
        return nxt, obs, r

    def obs_density(obs, action, next_state):
        d = np.asarray(obs, dtype=float) - next_state[:2]
        if sig == 0:  # noiseless variant: point-mass convention
            return 1.0 if float(d @ d) == 0.0 else 0.0
        return math.exp(log_norm - float(d @ d) / (2.0 * sig**2))

    def obs_density_batch(obs, action, next_states):
        d = np.asarray(obs, dtype=float) - np.asarray(next_states)[:, :2]
        if sig == 0:
            return (np.sum(d * d, axis=1) == 0.0).astype(float)
        return np.exp(log_norm - np.sum(d * d, axis=1) / (2.0 * sig**2))

    def reward_fn(state, action, next_state):
        x = state[:2]
        u = np.asarray(action, dtype=float)
        r = -(float(x @ x) + float(u @ u))
        if state[2] + 1 >= n:
            xn = next_state[:2]
            r -= float(xn @ xn)
        return r

    def initial_sampler(rng):
        x0 = m0 + rng.normal(0.0, sig, 2)
        return np.array([x0[0], x0[1], 0.0])

    return GenerativeProblem(
        generate=generate,
        obs_density=obs_density,
        initial_belief_sampler=initial_sampler,
        discount=1.0,
        action_space=space,
        horizon=n,
        is_terminal=lambda s: s[2] >= n,
        reward_fn=reward_fn,
        generate_batch=generate_batch,
        obs_density_batch=obs_density_batch,
    )
