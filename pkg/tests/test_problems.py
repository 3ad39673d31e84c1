"""Belief, action-space, and metric operations."""

import numpy as np
import pytest

from voroplan.envs import lqg
from voroplan.problems import (
    ActionSpace,
    DegenerateBeliefError,
    WeightedParticleBelief,
    init_root_belief,
    reweight_next_belief,
    uniform_action,
    weighted_mean_value,
)
from voroplan.rng import stream

from conftest import make_constant_z_problem


# ---------------------------------------------------------------------------
# init_root_belief


def test_init_root_belief_normalizes_weights():
    problem = make_constant_z_problem(1.0)
    belief = init_root_belief(problem, 4, stream(0))
    assert np.allclose(belief.weights, 0.25)
    assert len(belief) == 4


def test_init_root_belief_single_particle():
    problem = make_constant_z_problem(1.0)
    belief = init_root_belief(problem, 1, stream(0))
    assert belief.weights.tolist() == [1.0]


def test_init_root_belief_rejects_zero_count():
    with pytest.raises(ValueError):
        init_root_belief(make_constant_z_problem(1.0), 0, stream(0))


def test_init_root_belief_lqg_tail_bound():
    # 1000 seeded draws of 10 particles: every coordinate stays within 6 sigma
    # of the prior mean (per-draw miss probability ~2e-9, union ~4e-5).
    problem = lqg.make_problem()
    mean = np.array([-10.0, 10.0])
    for seed in range(1000):
        belief = init_root_belief(problem, 10, stream(seed))
        coords = belief.particles[:, :2]
        assert np.all(np.abs(coords - mean) <= 6 * 0.1)
        assert np.all(belief.particles[:, 2] == 0.0)


# ---------------------------------------------------------------------------
# reweight_next_belief


def test_reweight_multiplies_by_density():
    problem = make_constant_z_problem(0.2)
    belief = WeightedParticleBelief(np.array([[0.0]]), np.array([0.5]))
    out = reweight_next_belief(belief, np.array([[0.3]]), np.array([0.3]), np.array([0.1]), problem)
    assert out.weights == pytest.approx([0.1])
    assert out.particles.tolist() == [[0.3]]


def test_reweight_identity_when_density_one():
    problem = make_constant_z_problem(1.0)
    w = np.array([0.2, 0.5, 0.3])
    belief = WeightedParticleBelief(np.zeros((3, 1)), w)
    out = reweight_next_belief(belief, np.ones((3, 1)), np.array([1.0]), np.array([0.0]), problem)
    assert np.array_equal(out.weights, w)


def test_reweight_lqg_underflow_ratio():
    # Particles at [0,0] and [1,1] against observation [0,0] with sigma 0.1:
    # the density ratio is exp(|1,1|^2 / (2 sigma^2)) = exp(100), so the far
    # particle's weight collapses to ~0 relative to the near one.
    problem = lqg.make_problem()
    belief = WeightedParticleBelief(np.zeros((2, 3)), np.array([0.5, 0.5]))
    nxt = np.array([[0.0, 0.0, 1.0], [1.0, 1.0, 1.0]])
    obs = np.array([0.0, 0.0])
    out = reweight_next_belief(belief, nxt, obs, np.zeros(2), problem)
    assert out.weights[0] > 0
    assert out.weights[1] < 1e-40 * out.weights[0]
    # cross-check the analytic ratio while both densities are representable
    dens = [problem.obs_density(obs, np.zeros(2), s) for s in nxt]
    assert np.log(dens[0]) - np.log(dens[1]) == pytest.approx(100.0, rel=1e-9)


def test_reweight_degenerate_raises():
    problem = make_constant_z_problem(0.0)
    belief = WeightedParticleBelief(np.zeros((2, 1)), np.array([0.5, 0.5]))
    with pytest.raises(DegenerateBeliefError):
        reweight_next_belief(belief, np.zeros((2, 1)), np.array([0.0]), np.array([0.0]), problem)


def test_reweight_preserves_order_and_scales_linearly():
    problem = lqg.make_problem()
    r = stream(3)
    for _ in range(25):
        n = int(r.integers(1, 8))
        particles = np.column_stack([r.normal(size=(n, 2)), np.ones(n)])
        w = r.random(n) + 0.05
        nxt = np.column_stack([r.normal(size=(n, 2)), np.full(n, 2.0)])
        obs = nxt[int(r.integers(n)), :2] + r.normal(0, 0.1, 2)
        a = r.normal(size=2)
        base = reweight_next_belief(WeightedParticleBelief(particles, w), nxt, obs, a, problem)
        scaled = reweight_next_belief(WeightedParticleBelief(particles, 3.7 * w), nxt, obs, a, problem)
        assert np.allclose(scaled.weights, 3.7 * base.weights)
        assert len(base) == n
        # weighted mean of any values is invariant to the weight scale
        vals = r.normal(size=n)
        assert weighted_mean_value(vals, base.weights) == pytest.approx(
            weighted_mean_value(vals, scaled.weights)
        )


# ---------------------------------------------------------------------------
# weighted_mean_value


def test_weighted_mean_value_examples():
    assert weighted_mean_value([4.0, 0.0], [1.0, 3.0]) == pytest.approx(1.0)
    assert weighted_mean_value([7.5], [0.3]) == pytest.approx(7.5)
    vals = [1.0, 2.0, 3.0, 10.0]
    assert weighted_mean_value(vals, [2.0] * 4) == pytest.approx(np.mean(vals))


def test_weighted_mean_value_zero_weight_raises():
    with pytest.raises(DegenerateBeliefError):
        weighted_mean_value([1.0, 2.0], [0.0, 0.0])


def test_weighted_mean_value_bounds_property():
    r = stream(11)
    for _ in range(200):
        n = int(r.integers(1, 12))
        vals = r.normal(size=n) * 10
        w = r.random(n)
        w[int(r.integers(n))] += 0.1  # keep total weight positive
        m = weighted_mean_value(vals, w)
        assert vals.min() - 1e-12 <= m <= vals.max() + 1e-12


# ---------------------------------------------------------------------------
# uniform_action


def test_uniform_action_hybrid_label_frequency(hybrid_circle):
    r = stream(21)
    draws = np.array([uniform_action(hybrid_circle, r) for _ in range(10_000)])
    freq = np.mean(draws[:, 1] == 1.0)
    assert abs(freq - 0.5) <= 0.02  # ~4 binomial sigma
    assert np.all((draws[:, 0] >= 0.0) & (draws[:, 0] < 2 * np.pi + 1e-12))


def test_uniform_action_degenerate_bound():
    space = ActionSpace(lower=[0.5, -1.0], upper=[0.5, 1.0])
    r = stream(5)
    for _ in range(50):
        a = uniform_action(space, r)
        assert a[0] == 0.5


def test_uniform_action_box_mean(box2):
    r = stream(8)
    draws = np.array([uniform_action(box2, r) for _ in range(10_000)])
    assert np.all(np.abs(draws.mean(axis=0) - 0.5) <= 0.02)  # CLT: sigma/sqrt(n) ~ 0.003


# ---------------------------------------------------------------------------
# metric properties


@pytest.mark.parametrize("make_space", [
    lambda: lqg.make_problem().action_space,
    lambda: ActionSpace(lower=[0.0], upper=[2 * np.pi], periodic=[True],
                        discrete_labels=((0.0, 1.0),)),
    lambda: ActionSpace(lower=[0.0, -10.0, -3.0], upper=[10.0, 10.0, 3.0]),
])
def test_metric_semimetric_properties(make_space):
    space = make_space()
    metric = space.metric
    r = stream(33)
    nc = space.n_continuous
    for _ in range(1000):
        a = uniform_action(space, r)
        b = uniform_action(space, r)
        dab = metric.distance(a, b)
        assert dab >= 0
        assert metric.distance(a, b) == pytest.approx(metric.distance(b, a))
        assert metric.distance(a, a) == 0.0
        # translation invariance on the continuous block
        shift = r.normal(size=nc) * space.spans
        a2, b2 = a.copy(), b.copy()
        a2[:nc] += shift
        b2[:nc] += shift
        assert metric.distance(a2, b2) == pytest.approx(dab, abs=1e-9)


def test_metric_discrete_penalty_dominates(hybrid_circle):
    # Same-label actions are always closer than different-label ones.
    metric = hybrid_circle.metric
    far_same = metric.distance(np.array([0.0, 1.0]), np.array([np.pi, 1.0]))
    near_diff = metric.distance(np.array([0.0, 1.0]), np.array([0.0, 0.0]))
    assert far_same <= near_diff


def test_metric_pairwise_matches_scalar(hybrid_circle):
    metric = hybrid_circle.metric
    r = stream(4)
    xs = np.array([uniform_action(hybrid_circle, r) for _ in range(6)])
    ys = np.array([uniform_action(hybrid_circle, r) for _ in range(4)])
    mat = metric.pairwise(xs, ys)
    for i in range(6):
        for j in range(4):
            assert mat[i, j] == pytest.approx(metric.distance(xs[i], ys[j]))


# ---------------------------------------------------------------------------
# determinism


def test_seeded_determinism_end_to_end():
    problem = lqg.make_problem()
    outs = []
    for _ in range(2):
        r = stream(123, 0)
        belief = init_root_belief(problem, 5, r)
        a = uniform_action(problem.action_space, r)
        nxt, obs, rew = problem.generate(belief.particles[0], a, r)
        child = reweight_next_belief(
            belief, np.array([nxt] * 5), obs, a, problem
        )
        outs.append((belief.particles.copy(), a, nxt, obs, rew, child.weights.copy()))
    for x, y in zip(outs[0], outs[1]):
        assert np.array_equal(np.asarray(x), np.asarray(y))


def test_belief_validation():
    with pytest.raises(ValueError):
        WeightedParticleBelief(np.zeros((2, 1)), np.array([1.0]))
    with pytest.raises(ValueError):
        WeightedParticleBelief(np.zeros((2, 1)), np.array([1.0, -0.5]))
