"""Generative POMDP/MDP interface, hybrid action spaces, and particle beliefs.

Actions are flat float vectors: continuous coordinates first, then one entry
per discrete dimension holding the chosen label. States are whatever the
problem's generator produces; the shipped environments all use flat float
vectors so beliefs can hold a (n, state_dim) particle matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np


class DegenerateBeliefError(RuntimeError):
    """All particle weights underflowed to zero; the belief carries no mass."""


# ---------------------------------------------------------------------------
# Action spaces and metrics


@dataclass(frozen=True, eq=False)
class DistanceMetric:
    """Translation-invariant semi-metric over hybrid action vectors.

    Continuous coordinates contribute a Euclidean distance with wrapped
    differences on periodic dimensions; each mismatched discrete label adds a
    fixed penalty, sized so same-label actions are always closer than
    different-label ones.
    """

    spans: np.ndarray  # per continuous dim, upper - lower
    periodic: np.ndarray  # bool per continuous dim
    n_discrete: int
    discrete_penalty: float

    def _cont_delta(self, da):
        if self.periodic.any():
            half = self.spans / 2.0
            wrapped = np.mod(da + half, self.spans) - half
            da = np.where(self.periodic, wrapped, da)
        return da

    def distance(self, a, b) -> float:
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        nc = len(self.spans)
        d = self._cont_delta(a[:nc] - b[:nc])
        out = math.sqrt(float(np.dot(d, d)))
        if self.n_discrete:
            out += self.discrete_penalty * int(np.sum(a[nc:] != b[nc:]))
        return out

    def pairwise(self, xs, ys) -> np.ndarray:
        """Distance matrix of shape (len(xs), len(ys))."""
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        nc = len(self.spans)
        d = self._cont_delta(xs[:, None, :nc] - ys[None, :, :nc])
        out = np.sqrt(np.sum(d * d, axis=-1))
        if self.n_discrete:
            mism = np.sum(xs[:, None, nc:] != ys[None, :, nc:], axis=-1)
            out = out + self.discrete_penalty * mism
        return out


@dataclass(frozen=True, eq=False)
class ActionSpace:
    """Box of continuous dims crossed with finite label sets, plus a metric."""

    lower: np.ndarray
    upper: np.ndarray
    periodic: np.ndarray = None  # bool per continuous dim; default all False
    discrete_labels: tuple = ()  # one tuple of labels per discrete dim
    metric: DistanceMetric = None

    def __post_init__(self):
        object.__setattr__(self, "lower", np.asarray(self.lower, dtype=float))
        object.__setattr__(self, "upper", np.asarray(self.upper, dtype=float))
        if self.periodic is None:
            per = np.zeros(len(self.lower), dtype=bool)
        else:
            per = np.asarray(self.periodic, dtype=bool)
        object.__setattr__(self, "periodic", per)
        if np.any(self.upper < self.lower):
            raise ValueError("upper bound below lower bound")
        object.__setattr__(self, "_spans", self.upper - self.lower)
        if self.metric is None:
            object.__setattr__(self, "metric", self.default_metric())

    @property
    def n_continuous(self) -> int:
        return len(self.lower)

    @property
    def n_discrete(self) -> int:
        return len(self.discrete_labels)

    @property
    def dim(self) -> int:
        return self.n_continuous + self.n_discrete

    @property
    def spans(self) -> np.ndarray:
        return self._spans

    def default_metric(self) -> DistanceMetric:
        spans = self.upper - self.lower
        # Max separation: span/2 on a wrapped dim, full span otherwise.
        max_sep = np.where(self.periodic, spans / 2.0, spans)
        diameter = float(np.sqrt(np.sum(max_sep**2)))
        return DistanceMetric(
            spans=spans,
            periodic=self.periodic.copy(),
            n_discrete=self.n_discrete,
            discrete_penalty=diameter if diameter > 0 else 1.0,
        )

    def clamp(self, action) -> np.ndarray:
        """Project an action into the box: wrap periodic dims, clip the rest."""
        a = np.array(action, dtype=float)
        nc = self.n_continuous
        spans = self.upper - self.lower
        safe = np.where(spans > 0, spans, 1.0)
        wrapped = self.lower + np.mod(a[:nc] - self.lower, safe)
        clipped = np.clip(a[:nc], self.lower, self.upper)
        a[:nc] = np.where(self.periodic & (spans > 0), wrapped, clipped)
        return a

    def contains(self, action) -> bool:
        a = np.asarray(action, dtype=float)
        nc = self.n_continuous
        if np.any(a[:nc] < self.lower) or np.any(a[:nc] > self.upper):
            return False
        return all(a[nc + i] in labels for i, labels in enumerate(self.discrete_labels))


def uniform_action(space: ActionSpace, rng) -> np.ndarray:
    """Uniform draw over the product space, all dims independent."""
    nc = space.n_continuous
    out = np.empty(nc + space.n_discrete)
    out[:nc] = space.lower + rng.random(nc) * space._spans
    for i, labels in enumerate(space.discrete_labels):
        out[nc + i] = labels[int(rng.integers(len(labels)))]
    return out


# ---------------------------------------------------------------------------
# Particle beliefs


@dataclass(frozen=True, eq=False)
class WeightedParticleBelief:
    """Ordered particles with non-negative weights (not necessarily normalized)."""

    particles: np.ndarray  # (n, ...) state stack
    weights: np.ndarray  # (n,)

    def __post_init__(self):
        object.__setattr__(self, "particles", np.asarray(self.particles))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        if len(self.particles) != len(self.weights):
            raise ValueError("particles and weights must have equal length")
        if np.any(self.weights < 0) or not np.all(np.isfinite(self.weights)):
            raise ValueError("weights must be finite and non-negative")

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def total_weight(self) -> float:
        return float(np.sum(self.weights))

    def mean_state(self) -> np.ndarray:
        total = self.total_weight
        if total <= 0:
            raise DegenerateBeliefError("belief has zero total weight")
        return np.asarray(
            np.tensordot(self.weights, self.particles, axes=1) / total
        )

    def sample_state(self, rng) -> np.ndarray:
        """Draw one particle with probability proportional to its weight."""
        total = self.total_weight
        if total <= 0:
            raise DegenerateBeliefError("belief has zero total weight")
        cum = np.cumsum(self.weights)
        i = int(np.searchsorted(cum, rng.random() * total, side="right"))
        return self.particles[min(i, len(self) - 1)]


# ---------------------------------------------------------------------------
# Generative problems


def _never_terminal(state) -> bool:
    return False


@dataclass(frozen=True, eq=False)
class GenerativeProblem:
    """A POMDP/MDP exposed purely through sampling plus an observation density.

    ``generate(state, action, rng) -> (next_state, observation, reward)`` is the
    only required dynamics entry point. ``obs_density(obs, action, next_state)``
    evaluates Z(o | a, s'); for MDPs (``is_mdp``) the observation equals the
    next state and the density is never consulted. Optional batch hooks
    vectorize over a stack of states and are used by the solvers when present.
    """

    generate: Callable
    obs_density: Callable
    initial_belief_sampler: Callable
    discount: float
    action_space: ActionSpace
    horizon: int = None  # None: unbounded (depth-capped solvers only)
    is_mdp: bool = False
    is_terminal: Callable = _never_terminal
    reward_fn: Callable = None  # optional R(s, a, s') for tree revisits
    generate_batch: Callable = None
    obs_density_batch: Callable = None

    def __post_init__(self):
        if not (0.0 <= self.discount <= 1.0):
            raise ValueError("discount must lie in [0, 1]")


def batch_generate(problem: GenerativeProblem, states, action, rng):
    """(next_states, observations, rewards) for a stack of states."""
    if problem.generate_batch is not None:
        return problem.generate_batch(states, action, rng)
    nxt, obs, rew = [], [], []
    for s in states:
        s2, o, r = problem.generate(s, action, rng)
        nxt.append(s2)
        obs.append(o)
        rew.append(r)
    return np.asarray(nxt), np.asarray(obs), np.asarray(rew, dtype=float)


def batch_obs_density(problem: GenerativeProblem, obs, action, next_states):
    """Z(obs | action, s') evaluated for every state in the stack."""
    if problem.obs_density_batch is not None:
        return problem.obs_density_batch(obs, action, next_states)
    return np.asarray(
        [problem.obs_density(obs, action, s2) for s2 in next_states], dtype=float
    )


def mdp_as_pomdp(problem: GenerativeProblem) -> GenerativeProblem:
    """View a generative MDP as a POMDP with o = s' and unit density."""
    if not problem.is_mdp:
        raise ValueError("mdp_as_pomdp expects an MDP")
    return replace(
        problem,
        is_mdp=False,
        obs_density=lambda o, a, s2: 1.0,
        obs_density_batch=lambda o, a, nxt: np.ones(len(nxt)),
    )


# ---------------------------------------------------------------------------
# Belief operations


def init_root_belief(problem: GenerativeProblem, count: int, rng) -> WeightedParticleBelief:
    """Draw ``count`` i.i.d. particles from the initial belief, weights 1/count."""
    if count < 1:
        raise ValueError("count must be >= 1")
    particles = np.asarray([problem.initial_belief_sampler(rng) for _ in range(count)])
    return WeightedParticleBelief(particles, np.full(count, 1.0 / count))


def reweight_next_belief(
    belief: WeightedParticleBelief, next_states, obs, action, problem: GenerativeProblem
) -> WeightedParticleBelief:
    """Child belief over all next states with weights w_i * Z(obs | a, s'_i).

    Order is preserved and no normalization is performed. Raises
    DegenerateBeliefError when every reweighted particle underflows to zero.
    """
    next_states = np.asarray(next_states)
    if len(next_states) != len(belief):
        raise ValueError("next_states must match the belief length")
    z = batch_obs_density(problem, obs, action, next_states)
    new_w = belief.weights * z
    if not np.any(new_w > 0):
        raise DegenerateBeliefError("observation density underflowed for all particles")
    return WeightedParticleBelief(next_states, new_w)


def weighted_mean_value(values, weights) -> float:
    """Weight-normalized average sum(w*v)/sum(w)."""
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if values.shape != weights.shape:
        raise ValueError("values and weights must have equal length")
    total = weights.sum()
    if total <= 0:
        raise DegenerateBeliefError("zero total weight")
    return float(weights @ values / total)
