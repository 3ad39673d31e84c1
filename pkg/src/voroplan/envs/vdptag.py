"""Van der Pol tag: chase a drifting target through a barrier field.

The agent moves one speed unit per step in a chosen heading and may pay for an
accurate bearing observation (hybrid action: heading angle x look bit). The
target follows the Lienard-plane Van der Pol flow xdot = mu(x - x^3/3 - y),
ydot = x/mu with mu = 2, integrated by fixed-step RK4 plus Gaussian process
noise, clamped to the box. Observations are wrapped-Gaussian bearings from
agent to target. Four radial barriers block agent motion; the target ignores
them. All constants are config-exposed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..problems import ActionSpace, GenerativeProblem

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, eq=False)
class VdpTagParams:
    mu: float = 2.0
    dt: float = 0.5
    substeps: int = 10
    agent_speed: float = 1.0
    tag_radius: float = 0.1
    tag_bonus: float = 100.0
    step_cost: float = 1.0
    look_cost: float = 5.0
    obs_sigma: float = 2.0  # default bearing noise (radians)
    look_sigma: float = 0.1  # accurate bearing noise
    target_noise: float = 0.05
    box: float = 4.0  # square [-box, box]^2
    barrier_inner: float = 0.2
    barrier_outer: float = 3.0
    barrier_angles: tuple = (math.pi / 4, 3 * math.pi / 4, 5 * math.pi / 4, 7 * math.pi / 4)
    target_init_halfwidth: float = 2.0
    discount: float = 0.95


def vdp_flow(xy, mu: float = 2.0) -> np.ndarray:
    """Lienard-plane Van der Pol vector field on (..., 2) arrays."""
    xy = np.asarray(xy, dtype=float)
    x = xy[..., 0]
    y = xy[..., 1]
    return np.stack([mu * (x - x**3 / 3.0 - y), x / mu], axis=-1)


def vdp_target_step(target, dt: float, substeps: int, mu: float = 2.0,
                    box: float = 4.0) -> np.ndarray:
    """RK4 integration of the flow over dt, then clamp to the box."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    z = np.asarray(target, dtype=float)
    h = dt / substeps
    for _ in range(substeps):
        k1 = vdp_flow(z, mu)
        k2 = vdp_flow(z + 0.5 * h * k1, mu)
        k3 = vdp_flow(z + 0.5 * h * k2, mu)
        k4 = vdp_flow(z + h * k3, mu)
        z = z + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return np.clip(z, -box, box)


def _barrier_segments(p: VdpTagParams) -> np.ndarray:
    """(n, 2, 2) array of barrier endpoint pairs."""
    segs = []
    for ang in p.barrier_angles:
        d = np.array([math.cos(ang), math.sin(ang)])
        segs.append([p.barrier_inner * d, p.barrier_outer * d])
    return np.asarray(segs)


def _first_hit(start, end, segments):
    """Smallest parameter t in (0, 1] where start->end crosses a segment."""
    d = end - start
    t_best = None
    for a, b in segments:
        e = b - a
        denom = d[0] * e[1] - d[1] * e[0]
        if abs(denom) < 1e-14:
            continue  # parallel; grazing overlaps are ignored
        diff = a - start
        t = (diff[0] * e[1] - diff[1] * e[0]) / denom
        u = (diff[0] * d[1] - diff[1] * d[0]) / denom
        if 0.0 < t <= 1.0 and 0.0 <= u <= 1.0:
            if t_best is None or t < t_best:
                t_best = t
    return t_best


def vdp_agent_step(pos, heading: float, p: VdpTagParams, segments=None) -> np.ndarray:
    """One speed unit along the heading, stopping just short of any barrier,
    clamped to the box."""
    if segments is None:
        segments = _barrier_segments(p)
    pos = np.asarray(pos, dtype=float)
    step = p.agent_speed * np.array([math.cos(heading), math.sin(heading)])
    end = pos + step
    t = _first_hit(pos, end, segments)
    if t is not None:
        end = pos + (t - 1e-9) * step
    return np.clip(end, -p.box, p.box)


def _bearing(frm, to) -> float:
    d = np.asarray(to, dtype=float) - np.asarray(frm, dtype=float)
    return math.atan2(d[1], d[0]) % TWO_PI


def _wrapped_normal_logkern(delta, sigma):
    """Wrapped N(0, sigma^2) density of angle differences (array-safe)."""
    ks = np.arange(-4, 5) * TWO_PI
    delta = np.asarray(delta, dtype=float)[..., None] + ks
    dens = np.exp(-0.5 * (delta / sigma) ** 2).sum(axis=-1)
    return dens / (sigma * math.sqrt(TWO_PI))


def make_problem(params: VdpTagParams = VdpTagParams()) -> GenerativeProblem:
    p = params
    segments = _barrier_segments(p)
    space = ActionSpace(
        lower=[0.0], upper=[TWO_PI], periodic=[True], discrete_labels=((0.0, 1.0),)
    )

    def _tagged(agent, target) -> bool:
        d = np.asarray(agent) - np.asarray(target)
        return float(d @ d) <= p.tag_radius**2

    def _reward(look: float, agent2, target2) -> float:
        r = -(p.look_cost if look else p.step_cost)
        if _tagged(agent2, target2):
            r += p.tag_bonus
        return r

    def generate(state, action, rng):
        agent, target = state[:2], state[2:]
        heading, look = float(action[0]), float(action[1])
        agent2 = vdp_agent_step(agent, heading, p, segments)
        target2 = vdp_target_step(target, p.dt, p.substeps, p.mu, p.box)
        target2 = np.clip(target2 + rng.normal(0.0, p.target_noise, 2), -p.box, p.box)
        sigma = p.look_sigma if look else p.obs_sigma
        obs = np.array([(_bearing(agent2, target2) + rng.normal(0.0, sigma)) % TWO_PI])
        nxt = np.concatenate([agent2, target2])
        return nxt, obs, _reward(look, agent2, target2)

    def generate_batch(states, action, rng):
        states = np.asarray(states, dtype=float)
        n = len(states)
        heading, look = float(action[0]), float(action[1])
        agents2 = np.empty((n, 2))
        for i in range(n):  # barrier clipping is per-segment sequential
            agents2[i] = vdp_agent_step(states[i, :2], heading, p, segments)
        targets2 = vdp_target_step(states[:, 2:], p.dt, p.substeps, p.mu, p.box)
        targets2 = np.clip(targets2 + rng.normal(size=(n, 2)) * p.target_noise, -p.box, p.box)
        d = targets2 - agents2
        bearings = np.mod(np.arctan2(d[:, 1], d[:, 0]), TWO_PI)
        sigma = p.look_sigma if look else p.obs_sigma
        obs = np.mod(bearings + rng.normal(size=n) * sigma, TWO_PI)[:, None]
        tagged = np.sum(d * d, axis=1) <= p.tag_radius**2
        r = tagged * p.tag_bonus - (p.look_cost if look else p.step_cost)
        return np.column_stack([agents2, targets2]), obs, r

    def obs_density(obs, action, next_state):
        sigma = p.look_sigma if action[1] else p.obs_sigma
        delta = float(obs[0]) - _bearing(next_state[:2], next_state[2:])
        return float(_wrapped_normal_logkern(delta, sigma))

    def obs_density_batch(obs, action, next_states):
        next_states = np.asarray(next_states, dtype=float)
        sigma = p.look_sigma if action[1] else p.obs_sigma
        d = next_states[:, 2:] - next_states[:, :2]
        bearings = np.arctan2(d[:, 1], d[:, 0])
        return _wrapped_normal_logkern(float(obs[0]) - bearings, sigma)

    def reward_fn(state, action, next_state):
        return _reward(float(action[1]), next_state[:2], next_state[2:])

    def initial_sampler(rng):
        hw = p.target_init_halfwidth
        return np.concatenate([np.zeros(2), rng.uniform(-hw, hw, 2)])

    return GenerativeProblem(
        generate=generate,
        obs_density=obs_density,
        initial_belief_sampler=initial_sampler,
        discount=p.discount,
        action_space=space,
        horizon=None,
        is_terminal=lambda s: _tagged(s[:2], s[2:]),
        reward_fn=reward_fn,
        generate_batch=generate_batch,
        obs_density_batch=obs_density_batch,
    )


class HeadTowardTargetPolicy:
    """Heading along the observed bearing (or toward the mean target), no look."""

    def __call__(self, obs, state):
        if obs is not None:
            heading = float(obs[0])
        else:
            heading = _bearing(state[:2], state[2:])
        return np.array([heading % TWO_PI, 0.0])
