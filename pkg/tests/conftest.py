import numpy as np
import pytest

from voroplan.problems import ActionSpace, GenerativeProblem


@pytest.fixture
def box2() -> ActionSpace:
    return ActionSpace(lower=[0.0, 0.0], upper=[1.0, 1.0])


@pytest.fixture
def hybrid_circle() -> ActionSpace:
    """[0, 2pi) wrapped heading crossed with a binary label."""
    return ActionSpace(
        lower=[0.0], upper=[2.0 * np.pi], periodic=[True], discrete_labels=((0.0, 1.0),)
    )


def make_constant_z_problem(z_value: float, space=None) -> GenerativeProblem:
    """1-D problem whose observation density is a constant, for reweighting math."""
    space = space or ActionSpace(lower=[-1.0], upper=[1.0])

    def generate(state, action, rng):
        nxt = np.asarray(state, dtype=float) + np.asarray(action, dtype=float)
        return nxt, nxt.copy(), 0.0

    return GenerativeProblem(
        generate=generate,
        obs_density=lambda o, a, s2: z_value,
        initial_belief_sampler=lambda rng: np.array([0.0]),
        discount=1.0,
        action_space=space,
        horizon=3,
    )
