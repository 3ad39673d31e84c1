"""Planar lander: termination, rewards, observations, proportional policy."""

import numpy as np
import pytest

from voroplan.envs import lander
from voroplan.problems import batch_generate, batch_obs_density
from voroplan.rng import stream


def hover_state(y=10.0):
    return np.array([0.0, y, 0.0, 0.0, 0.0, 0.0])


def test_fast_touchdown_pays_crash_penalty():
    params = lander.LanderParams()
    problem = lander.make_problem(params)
    # plunging straight down well beyond the velocity limit
    state = np.array([0.0, 0.5, 0.0, 0.0, -8.0, 0.0])
    nxt, _, reward = problem.generate(state, np.array([0.0, 0.0, 0.0]), stream(0))
    assert nxt[1] <= 0.0
    assert problem.is_terminal(nxt)
    assert reward == pytest.approx(params.crash_penalty - params.step_cost)


def test_gentle_centered_touchdown_pays_bonus():
    params = lander.LanderParams()
    problem = lander.make_problem(params)
    state = np.array([0.0, 0.05, 0.0, 0.0, -0.4, 0.0])
    hover = params.mass * params.gravity  # cancel gravity during the step
    nxt, _, reward = problem.generate(state, np.array([hover, 0.0, 0.0]), stream(3))
    assert nxt[1] <= 0.0
    assert reward == pytest.approx(params.land_bonus - params.step_cost, abs=1e-9)


def test_out_of_bounds_is_terminal_crash():
    params = lander.LanderParams()
    problem = lander.make_problem(params)
    state = np.array([19.99, 10.0, 0.0, 30.0, 0.0, 0.0])
    nxt, _, reward = problem.generate(state, np.zeros(3), stream(1))
    assert problem.is_terminal(nxt)
    assert reward == pytest.approx(params.crash_penalty - params.step_cost)


def test_reward_magnitude_bounded():
    problem = lander.make_problem()
    r = stream(5)
    for _ in range(300):
        state = np.array([
            r.uniform(-19, 19), r.uniform(0.01, 30), r.normal(0, 0.3),
            r.normal(0, 2), r.normal(0, 2), r.normal(0, 0.3),
        ])
        action = np.array([r.uniform(0, 10), r.uniform(-10, 10), r.uniform(-3, 3)])
        _, _, reward = problem.generate(state, action, r)
        assert abs(reward) <= 1000.0 + lander.LanderParams().step_cost


def test_timestep_is_fixed():
    assert lander.LanderParams().dt == 0.4
    params = lander.LanderParams()
    problem = lander.make_problem(params)
    # pure ballistic step: position advances by velocity * dt
    state = np.array([1.0, 20.0, 0.0, 2.0, 0.0, 0.0])
    nxt, _, _ = problem.generate(state, np.zeros(3), stream(2))
    assert nxt[0] == pytest.approx(1.0 + nxt[3] * 0.4)


def test_proportional_policy_hover_commands_no_correction():
    policy = lander.ProportionalLanderPolicy()
    action = policy(np.array([0.0, 0.0, 10.0]), None)
    assert action[1] == pytest.approx(0.0)
    assert action[2] == pytest.approx(0.0)
    assert action[0] > 0.0


def test_proportional_policy_damps_rotation_and_drift():
    policy = lander.ProportionalLanderPolicy()
    action = policy(np.array([0.3, 1.5, 10.0]), None)
    assert action[2] < 0.0  # counter-torque against positive spin
    assert action[1] < 0.0  # oppose positive horizontal speed


def test_policy_rollout_episode_terminates_within_bound():
    params = lander.LanderParams()
    problem = lander.make_problem(params)
    policy = lander.ProportionalLanderPolicy(params)
    r = stream(23)
    for episode in range(20):
        state = problem.initial_belief_sampler(r)
        obs = None
        for step in range(250):
            if problem.is_terminal(state):
                break
            state, obs, _ = problem.generate(state, policy(obs, state), r)
        assert problem.is_terminal(state), "episode exceeded the 250-step bound"


def test_obs_density_integrates_to_one():
    # Z factorizes over the three observed coordinates; per-coordinate
    # quadratures multiply to the full 3-D integral (Fubini).
    params = lander.LanderParams()
    problem = lander.make_problem(params)
    r = stream(31)
    for _ in range(20):
        nxt = np.array([
            r.uniform(-5, 5), r.uniform(0.1, 20), r.normal(0, 0.2),
            r.normal(0, 1), r.normal(0, 1), r.normal(0, 0.2),
        ])
        action = np.array([r.uniform(0, 10), 0.0, 0.0])
        mean = np.array([nxt[5], nxt[3], nxt[1]])
        total = 1.0
        for dim, sig in enumerate(params.obs_sigma):
            grid = mean[dim] + np.linspace(-8 * sig, 8 * sig, 2001)
            dens = []
            for g in grid:
                obs = mean.copy()
                obs[dim] = g
                dens.append(problem.obs_density(obs, action, nxt))
            marginal = np.trapezoid(dens, grid)
            # dividing out the other two coordinates' mode densities leaves
            # the dim-th marginal integral
            others = [s for i, s in enumerate(params.obs_sigma) if i != dim]
            mode = np.prod([1 / (s * np.sqrt(2 * np.pi)) for s in others])
            total *= marginal / mode
        assert total == pytest.approx(1.0, rel=0.01)


def test_batch_hooks_match_scalar():
    problem = lander.make_problem()
    r = stream(41)
    states = np.column_stack([
        r.uniform(-5, 5, 6), r.uniform(1, 20, 6), r.normal(0, 0.2, 6),
        r.normal(0, 1, 6), r.normal(0, 1, 6), r.normal(0, 0.1, 6),
    ])
    action = np.array([5.0, 1.0, -0.5])
    nxt, obs, rew = batch_generate(problem, states, action, r)
    assert nxt.shape == (6, 6) and obs.shape == (6, 3) and rew.shape == (6,)
    dens_b = batch_obs_density(problem, obs[0], action, nxt)
    dens_s = [problem.obs_density(obs[0], action, s) for s in nxt]
    assert np.allclose(dens_b, dens_s)
