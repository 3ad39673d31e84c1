"""VOWSS and VOSS estimator tests against analytic and brute-force oracles."""

import dataclasses

import numpy as np
import pytest

import voroplan.sparse as sparse
from voroplan.envs import oracle
from voroplan.problems import (
    ActionSpace,
    DegenerateBeliefError,
    GenerativeProblem,
    WeightedParticleBelief,
    init_root_belief,
    mdp_as_pomdp,
)
from voroplan.rng import stream
from voroplan.sparse import (
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

from conftest import make_constant_z_problem


def vowss_cfg(c_s, c_a, depth, omega=0.5, sigma=0.3, decay=1.0):
    return VowssConfig(state_width=c_s, action_width=c_a, depth=depth,
                       vpw=default_sparse_vpw(omega, sigma), action_width_decay=decay)


def voss_cfg(c_s, c_a, depth, omega=0.5, sigma=0.3, decay=1.0):
    return VossConfig(state_width=c_s, action_width=c_a, depth=depth,
                      vpw=default_sparse_vpw(omega, sigma), action_width_decay=decay)


def quad_action_pomdp():
    """Horizon-1 problem with reward -(|a|^2) on [-1,1]^2, state irrelevant."""
    space = ActionSpace(lower=[-1.0, -1.0], upper=[1.0, 1.0])

    def generate(state, action, rng):
        a = np.asarray(action, dtype=float)
        return state, np.zeros(1), -float(a @ a)

    return GenerativeProblem(
        generate=generate,
        obs_density=lambda o, a, s2: 1.0,
        initial_belief_sampler=lambda rng: np.zeros(1),
        discount=1.0,
        action_space=space,
        horizon=1,
    )


def two_branch_problem():
    """States (flag, t); depth-1 reward is 4 for flag=0 and 0 for flag=1, and
    the observation reveals the flag exactly."""
    space = ActionSpace(lower=[-1.0], upper=[1.0])

    def generate(state, action, rng):
        flag, t = float(state[0]), float(state[1])
        r = 0.0 if t == 0 else (4.0 if flag == 0.0 else 0.0)
        return np.array([flag, t + 1.0]), np.array([flag]), r

    return GenerativeProblem(
        generate=generate,
        obs_density=lambda o, a, s2: 1.0 if o[0] == s2[0] else 0.0,
        initial_belief_sampler=lambda rng: np.array([0.0, 0.0]),
        discount=0.9,
        action_space=space,
        horizon=2,
    )


# ---------------------------------------------------------------------------
# EstimateV basics


def test_estimate_v_at_horizon_is_zero():
    problem = quad_action_pomdp()
    belief = WeightedParticleBelief(np.zeros((2, 1)), np.array([0.5, 0.5]))
    value, action = vowss_estimate_v(belief, 1, problem, vowss_cfg(2, 10, 1), stream(0))
    assert value == 0.0 and action is None
    value, action = vowss_estimate_v(belief, 5, problem, vowss_cfg(2, 10, 1), stream(0))
    assert value == 0.0 and action is None


def test_estimate_v_optimizes_quadratic_action_cost():
    # Horizon 1, reward -|a|^2, C_a = 50: the VOO maximum should sit near the
    # origin on average (per-seed tails are expected at this width).
    problem = quad_action_pomdp()
    cfg = vowss_cfg(1, 50, 1)
    dists, values = [], []
    for seed in range(100):
        belief = WeightedParticleBelief(np.zeros((1, 1)), np.array([1.0]))
        value, action = vowss_estimate_v(belief, 0, problem, cfg, stream(seed, 7))
        dists.append(float(np.linalg.norm(action)))
        values.append(value)
    assert np.mean(dists) < 0.3
    assert abs(np.mean(values)) < 0.1


def test_action_width_decay_schedule():
    assert effective_action_width(200, 0.4, 0) == 200
    assert effective_action_width(200, 0.4, 1) == 80
    assert effective_action_width(200, 0.4, 5) == max(1, round(200 * 0.4**5))
    assert effective_action_width(3, 0.1, 4) == 1


# ---------------------------------------------------------------------------
# EstimateQ


def test_estimate_q_single_particle_last_depth_returns_reward():
    problem = quad_action_pomdp()
    belief = WeightedParticleBelief(np.zeros((1, 1)), np.array([1.0]))
    action = np.array([0.6, -0.2])
    q = vowss_estimate_q(belief, action, 0, problem, vowss_cfg(1, 5, 1), stream(1))
    assert q == pytest.approx(-float(action @ action), abs=0.0)


def test_estimate_q_weighted_child_composition():
    # Weights [1,3], child values [4,0], rewards 0, gamma 0.9 -> 0.9 exactly.
    problem = two_branch_problem()
    belief = WeightedParticleBelief(
        np.array([[0.0, 0.0], [1.0, 0.0]]), np.array([1.0, 3.0])
    )
    q = vowss_estimate_q(belief, np.array([0.0]), 0, problem, vowss_cfg(2, 3, 2), stream(2))
    assert q == pytest.approx(0.9)


def test_estimate_q_oracle_error_shrinks_with_state_width():
    # One-step Gaussian POMDP: |Q_hat - Q_oracle| ~ 1/sqrt(C_s).
    problem = oracle.make_one_step_gaussian()
    action = np.array([0.7])
    q_true = oracle.one_step_q_oracle(0.7)
    assert q_true == pytest.approx(-(1.0 + 0.49), abs=1e-6)  # analytic cross-check
    errs = {}
    for c_s in (4, 16, 64):
        cfg = vowss_cfg(c_s, 5, 1)
        es = []
        for seed in range(100):
            belief = init_root_belief(problem, c_s, stream(seed, 1))
            q = vowss_estimate_q(belief, action, 0, problem, cfg, stream(seed, 2))
            es.append(abs(q - q_true))
        errs[c_s] = np.mean(es)
    assert errs[4] > errs[16] > errs[64]
    # CLT rate: quadrupling C_s should roughly halve the error
    assert errs[16] / errs[4] == pytest.approx(0.5, abs=0.25)
    assert errs[64] / errs[16] == pytest.approx(0.5, abs=0.25)


# ---------------------------------------------------------------------------
# vowss_plan


def test_vowss_plan_zero_horizon_raises():
    problem = quad_action_pomdp()
    belief = WeightedParticleBelief(np.zeros((1, 1)), np.array([1.0]))
    with pytest.raises(EmptyPlanError):
        vowss_plan(belief, problem, vowss_cfg(1, 5, 0), stream(0))


def test_vowss_plan_deterministic_across_runs():
    problem = oracle.make_one_step_gaussian()
    cfg = vowss_cfg(4, 12, 1)
    actions = []
    for _ in range(2):
        belief = init_root_belief(problem, 4, stream(5, 0))
        actions.append(vowss_plan(belief, problem, cfg, stream(5, 1)))
    assert np.array_equal(actions[0], actions[1])


def test_vowss_propagates_degenerate_belief():
    problem = make_constant_z_problem(0.0)
    belief = WeightedParticleBelief(np.zeros((2, 1)), np.array([0.5, 0.5]))
    with pytest.raises(DegenerateBeliefError):
        vowss_plan(belief, problem, vowss_cfg(2, 4, 2), stream(0))


# ---------------------------------------------------------------------------
# VOSS


def test_voss_last_depth_returns_reward():
    problem = oracle.make_quadratic_mdp()
    q = voss_estimate_q(np.array([0.0]), np.array([0.5]), 1, problem,
                        voss_cfg(3, 5, 2), stream(0))
    assert q == pytest.approx(-((0.5 - 0.3) ** 2))


def test_voss_single_sample_recursion_matches_manual_replay():
    # With C_s = 1 and a deterministic generator, EstimateQ is the exact
    # one-sample recursion: r(a0) + max over the depth-1 sweep of r(a1).
    problem = oracle.make_quadratic_mdp()
    cfg = voss_cfg(1, 8, 2)
    action = np.array([0.1])
    r1, r2 = stream(9), stream(9)
    q = voss_estimate_q(np.array([0.0]), action, 0, problem, cfg, r1)

    # manual replay with a cloned stream
    from voroplan.voo import VoronoiCenterSet, voo_sample
    _ = problem.generate_batch(np.array([[0.0]]), action, r2)
    centers = VoronoiCenterSet()
    best = -np.inf
    for _ in range(8):
        a1 = voo_sample(centers, problem.action_space, cfg.vpw.voo, r2)
        q1 = -((float(a1[0]) - 0.3) ** 2)
        centers.add(a1, q1)
        best = max(best, q1)
    assert q == pytest.approx(-((0.1 - 0.3) ** 2) + best, abs=1e-12)


def test_voss_recovers_grid_optimum():
    problem = oracle.make_quadratic_mdp()
    v_star, a_star = oracle.quadratic_mdp_grid_optimum()
    assert a_star == pytest.approx(0.3, abs=2e-3)
    cfg = voss_cfg(1, 100, 2, omega=0.5, sigma=0.2)
    hits = 0
    value_hits = 0
    for seed in range(100):
        value, action = voss_estimate_v(np.array([0.0]), 0, problem, cfg, stream(seed, 3))
        hits += abs(float(action[0]) - 0.3) <= 0.1
        value_hits += abs(value - v_star) <= 0.05
    assert hits >= 95
    assert value_hits >= 95


def test_voss_value_variance_shrinks_with_state_width():
    # State-coupled stochastic variant (reward -(a-0.3)^2 + s, transitions
    # N(s+a, 0.01)): the value averages C_s independent child contributions,
    # so quadrupling C_s halves the estimator's noise level. A wide,
    # exploration-heavy root sweep keeps optimization scatter negligible;
    # measured std ratios sit at ~0.53 across independent stream keys.
    params = oracle.QuadraticMdpParams(noise_sigma=0.1, state_bonus=1.0)
    problem = oracle.make_quadratic_mdp(params)
    variances = {}
    for c_s in (2, 8):
        cfg = voss_cfg(c_s, 48, 2, omega=0.8, sigma=0.2, decay=0.25)
        vals = [
            voss_estimate_v(np.array([0.0]), 0, problem, cfg, stream(seed, 0, c_s))[0]
            for seed in range(200)
        ]
        variances[c_s] = np.var(vals, ddof=1)
    assert variances[8] < variances[2]
    std_ratio = np.sqrt(variances[8] / variances[2])
    assert 0.25 <= std_ratio <= 0.75  # noise halves, +/- 50%


def test_bounded_widening_reselects_and_averages(monkeypatch):
    # With widening bounded and saturated, selections fall to the UCB branch:
    # the same action is re-evaluated and its Q becomes the running mean.
    problem = quad_action_pomdp()
    vpw = sparse.default_sparse_vpw(omega=0.5, sigma=0.3)
    vpw = dataclasses.replace(vpw, widen_unbounded=False, k_a=1.0, alpha_a=0.0, c=0.0)
    cfg = dataclasses.replace(vowss_cfg(1, 12, 1), vpw=vpw)

    evals = []
    original = sparse.vowss_estimate_q

    def spy(belief, action, depth, prob, c, rng):
        q = original(belief, action, depth, prob, c, rng)
        evals.append((tuple(np.asarray(action)), q))
        return q

    monkeypatch.setattr(sparse, "vowss_estimate_q", spy)
    belief = WeightedParticleBelief(np.zeros((1, 1)), np.array([1.0]))
    value, action = sparse.vowss_estimate_v(belief, 0, problem, cfg, stream(4))
    # k_a = 1, alpha = 0: at most 1 widening beyond the first selection, so
    # some of the 12 selections must have re-evaluated an existing action
    distinct = {a for a, _ in evals}
    assert len(evals) == 12
    assert len(distinct) <= 2
    for a in distinct:
        qs = [q for key, q in evals if key == a]
        # deterministic problem: repeated evaluations agree, so the running
        # average equals each evaluation
        assert np.allclose(qs, qs[0])
    assert value == pytest.approx(max(q for _, q in evals))


def test_voss_requires_mdp():
    problem = oracle.make_one_step_gaussian()
    with pytest.raises(ValueError):
        voss_estimate_q(np.zeros(1), np.zeros(1), 0, problem, voss_cfg(1, 2, 1), stream(0))


def test_voss_plan_zero_horizon_raises():
    problem = oracle.make_quadratic_mdp()
    with pytest.raises(EmptyPlanError):
        voss_plan(np.array([0.0]), problem, voss_cfg(1, 5, 0), stream(0))


# ---------------------------------------------------------------------------
# Cross-solver invariants


def test_vowss_with_unit_density_equals_voss_single_particle():
    # An MDP viewed as a POMDP with Z == 1 and C_s = 1 must reproduce VOSS
    # bit-for-bit under a shared stream.
    params = oracle.QuadraticMdpParams(noise_sigma=0.1, state_bonus=1.0)
    mdp = oracle.make_quadratic_mdp(params)
    pomdp = mdp_as_pomdp(mdp)
    for seed in range(10):
        v1, a1 = voss_estimate_v(np.array([0.0]), 0, mdp, voss_cfg(1, 10, 2), stream(seed))
        belief = WeightedParticleBelief(np.array([[0.0]]), np.array([1.0]))
        v2, a2 = vowss_estimate_v(belief, 0, pomdp, vowss_cfg(1, 10, 2), stream(seed))
        assert v1 == v2
        assert np.array_equal(a1, a2)


def test_estimate_v_returns_max_of_its_estimate_q_calls(monkeypatch):
    problem = oracle.make_one_step_gaussian()
    calls = []
    original = sparse.vowss_estimate_q

    def spy(belief, action, depth, prob, cfg, rng):
        q = original(belief, action, depth, prob, cfg, rng)
        calls.append((depth, q))
        return q

    monkeypatch.setattr(sparse, "vowss_estimate_q", spy)
    belief = init_root_belief(problem, 4, stream(3, 0))
    value, _ = sparse.vowss_estimate_v(belief, 0, problem, vowss_cfg(4, 15, 1), stream(3, 1))
    top = [q for d, q in calls if d == 0]
    assert value == pytest.approx(max(top))
    assert all(value >= q - 1e-12 for q in top)


def test_value_bound_does_not_exceed_rmax_horizon():
    # |R| <= 1.69 on the quadratic MDP (gamma = 1), so |V| <= Rmax * D.
    problem = oracle.make_quadratic_mdp()
    rmax = (1.0 + 0.3) ** 2
    cfg = voss_cfg(2, 10, 2)
    for seed in range(20):
        value, _ = voss_estimate_v(np.array([0.0]), 0, problem, cfg, stream(seed, 4))
        assert abs(value) <= rmax * 2 + 1e-9


def test_child_beliefs_have_state_width_particles(monkeypatch):
    problem = two_branch_problem()
    seen = []
    original = sparse.vowss_estimate_v

    def spy(belief, depth, prob, cfg, rng):
        if depth > 0:
            seen.append(len(belief))
        return original(belief, depth, prob, cfg, rng)

    monkeypatch.setattr(sparse, "vowss_estimate_v", spy)
    belief = WeightedParticleBelief(
        np.array([[0.0, 0.0], [1.0, 0.0]]), np.array([1.0, 3.0])
    )
    sparse.vowss_estimate_q(belief, np.array([0.0]), 0, problem, vowss_cfg(2, 3, 2), stream(0))
    assert seen and all(n == 2 for n in seen)


def test_generate_call_count_matches_tree_size():
    problem = oracle.make_one_step_gaussian()
    counter = {"n": 0}
    inner = problem.generate_batch

    def counting(states, action, rng):
        counter["n"] += len(states)
        return inner(states, action, rng)

    counted = dataclasses.replace(problem, generate_batch=counting, horizon=2)
    c_s, c_a, decay, depth = 3, 6, 0.5, 2
    cfg = vowss_cfg(c_s, c_a, depth, decay=decay)
    belief = init_root_belief(counted, c_s, stream(8, 0))
    vowss_plan(belief, counted, cfg, stream(8, 1))

    expected = 0
    n_estv = 1
    for d in range(depth):
        width = effective_action_width(c_a, decay, d)
        n_estq = width * n_estv
        expected += n_estq * c_s
        n_estv = n_estq * c_s
    assert counter["n"] == expected
