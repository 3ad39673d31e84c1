"""Planar lunar lander with noisy partial observations.

State (x, y, theta, vx, vy, omega); actions (T, F_x, delta): main thrust along
the body axis, horizontal corrective thrust, and the thrust offset whose
torque is delta * T. Observations are noisy (angular rate, horizontal speed,
above-ground level). Touchdown inside the target zone under velocity and
attitude limits earns the landing bonus; any other touchdown or leaving the
flight envelope costs the crash penalty of -1000. The dynamics step is fixed
at dt = 0.4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..problems import ActionSpace, GenerativeProblem


@dataclass(frozen=True, eq=False)
class LanderParams:
    dt: float = 0.4
    gravity: float = 1.62
    mass: float = 1.0
    inertia: float = 1.0
    thrust_max: float = 10.0
    fx_max: float = 10.0
    offset_max: float = 3.0
    crash_penalty: float = -1000.0
    land_bonus: float = 100.0
    step_cost: float = 1.0
    accel_noise: float = 0.05
    turn_noise: float = 0.01
    obs_sigma: tuple = (0.05, 0.1, 0.2)  # (omega, vx, agl)
    zone_halfwidth: float = 1.0
    vx_limit: float = 1.0
    vy_limit: float = 2.0
    theta_limit: float = 0.2
    omega_limit: float = 0.5
    x_bound: float = 20.0
    y_max: float = 40.0
    y0: float = 10.0
    discount: float = 0.99


def _safe_landing(p: LanderParams, s2) -> bool:
    return (
        abs(s2[0]) <= p.zone_halfwidth
        and abs(s2[3]) <= p.vx_limit
        and abs(s2[4]) <= p.vy_limit
        and abs(s2[2]) <= p.theta_limit
        and abs(s2[5]) <= p.omega_limit
    )


def make_problem(params: LanderParams = LanderParams()) -> GenerativeProblem:
    p = params
    space = ActionSpace(
        lower=[0.0, -p.fx_max, -p.offset_max],
        upper=[p.thrust_max, p.fx_max, p.offset_max],
    )
    sig = np.asarray(p.obs_sigma, dtype=float)
    log_norm = -np.sum(np.log(sig * math.sqrt(2.0 * math.pi)))

    def _step_core(states, action, noise_acc, noise_turn):
        x, y, th, vx, vy, om = (states[..., i] for i in range(6))
        thrust, fx, delta = (float(action[i]) for i in range(3))
        ax = (-thrust * np.sin(th) + fx) / p.mass + noise_acc[..., 0]
        ay = thrust * np.cos(th) / p.mass - p.gravity + noise_acc[..., 1]
        aom = delta * thrust / p.inertia + noise_turn
        vx2 = vx + ax * p.dt
        vy2 = vy + ay * p.dt
        om2 = om + aom * p.dt
        return np.stack(
            [x + vx2 * p.dt, y + vy2 * p.dt, th + om2 * p.dt, vx2, vy2, om2], axis=-1
        )

    def _terminal(s) -> bool:
        return s[1] <= 0.0 or abs(s[0]) > p.x_bound or s[1] > p.y_max

    def _reward(s2) -> float:
        r = -p.step_cost
        if s2[1] <= 0.0:
            r += p.land_bonus if _safe_landing(p, s2) else p.crash_penalty
        elif abs(s2[0]) > p.x_bound or s2[1] > p.y_max:
            r += p.crash_penalty
        return r

    def generate(state, action, rng):
        s2 = _step_core(
            np.asarray(state, dtype=float), action,
            rng.normal(0.0, p.accel_noise, 2), rng.normal(0.0, p.turn_noise),
        )
        obs = np.array([s2[5], s2[3], s2[1]]) + rng.normal(size=3) * sig
        return s2, obs, _reward(s2)

    def generate_batch(states, action, rng):
        states = np.asarray(states, dtype=float)
        n = len(states)
        s2 = _step_core(
            states, action,
            rng.normal(size=(n, 2)) * p.accel_noise, rng.normal(size=n) * p.turn_noise,
        )
        obs = np.stack([s2[:, 5], s2[:, 3], s2[:, 1]], axis=-1) + rng.normal(size=(n, 3)) * sig
        down = s2[:, 1] <= 0.0
        out = (np.abs(s2[:, 0]) > p.x_bound) | (s2[:, 1] > p.y_max)
        safe = (
            (np.abs(s2[:, 0]) <= p.zone_halfwidth)
            & (np.abs(s2[:, 3]) <= p.vx_limit)
            & (np.abs(s2[:, 4]) <= p.vy_limit)
            & (np.abs(s2[:, 2]) <= p.theta_limit)
            & (np.abs(s2[:, 5]) <= p.omega_limit)
        )
        r = np.full(n, -p.step_cost)
        r += np.where(down, np.where(safe, p.land_bonus, p.crash_penalty), 0.0)
        r += np.where(~down & out, p.crash_penalty, 0.0)
        return s2, obs, r

    def obs_density(obs, action, next_state):
        mean = np.array([next_state[5], next_state[3], next_state[1]])
        d = (np.asarray(obs, dtype=float) - mean) / sig
        return math.exp(log_norm - 0.5 * float(d @ d))

    def obs_density_batch(obs, action, next_states):
        next_states = np.asarray(next_states, dtype=float)
        mean = np.stack(
            [next_states[:, 5], next_states[:, 3], next_states[:, 1]], axis=-1
        )
        d = (np.asarray(obs, dtype=float) - mean) / sig
        return np.exp(log_norm - 0.5 * np.sum(d * d, axis=-1))

    def reward_fn(state, action, next_state):
        return _reward(next_state)

    def initial_sampler(rng):
        return np.array(
            [
                rng.normal(0.0, 1.0),
                p.y0,
                rng.normal(0.0, 0.05),
                rng.normal(0.0, 0.1),
                -0.5,
                rng.normal(0.0, 0.01),
            ]
        )

    return GenerativeProblem(
        generate=generate,
        obs_density=obs_density,
        initial_belief_sampler=initial_sampler,
        discount=p.discount,
        action_space=space,
        horizon=None,
        is_terminal=_terminal,
        reward_fn=reward_fn,
        generate_batch=generate_batch,
        obs_density_batch=obs_density_batch,
    )


class ProportionalLanderPolicy:
    """Damp rotation and drift from the observation; thrust tracks a gentle
    descent profile that firms up near the ground."""

    def __init__(self, params: LanderParams = LanderParams()):
        self.p = params

    def __call__(self, obs, state):
        p = self.p
        if obs is not None:
            om, vx, agl = float(obs[0]), float(obs[1]), float(obs[2])
        else:
            om, vx, agl = float(state[5]), float(state[3]), float(state[1])
        agl = max(agl, 0.0)
        thrust = p.mass * p.gravity * (0.85 + 0.35 * math.exp(-agl / 1.5))
        return np.array(
            [
                min(max(thrust, 0.0), p.thrust_max),
                min(max(-1.0 * vx * p.mass, -p.fx_max), p.fx_max),
                min(max(-2.0 * om, -p.offset_max), p.offset_max),
            ]
        )
