"""Anytime tree search: POMCPOW and VOMCPOW.

Both solvers share one tree implementation. Actions are chosen by VPW
(POMCPOW is the omega=1 special case, made bit-exact by construction), new
observation branches open while the branch count stays below k_o * N(h,a)^
alpha_o, and simulated states are inserted into branch particle collections
with weight Z(o | a, s'). Revisited branches re-draw a stored observation in
proportion to insertion counts, resample a stored state by weight, and
continue the descent; freshly created branches are evaluated by a rollout
policy.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np

from .problems import GenerativeProblem, WeightedParticleBelief
from .voo import VoronoiCenterSet, VpwConfig, _vpw_decision


class EmptyTreeError(RuntimeError):
    """The budget allowed zero simulations; no action was expanded."""


@dataclass(frozen=True, eq=False)
class MctsConfig:
    """Search knobs; exactly one of num_queries / time_budget must be set."""

    vpw: VpwConfig
    k_o: float
    alpha_o: float
    max_depth: int
    num_queries: int = None
    time_budget: float = None  # seconds per plan call
    rollout_policy: object = None  # callable (obs | None, state) -> action
    first_action_from_rollout: bool = True

    def __post_init__(self):
        if (self.num_queries is None) == (self.time_budget is None):
            raise ValueError("set exactly one of num_queries or time_budget")
        if self.k_o <= 0 or not (0.0 <= self.alpha_o <= 1.0):
            raise ValueError("bad observation-widening parameters")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")


class BeliefNode:
    """History node: widened child actions plus an accumulated particle set."""

    __slots__ = ("center_set", "counts", "action_nodes", "visits",
                 "particles", "weights", "created_obs")

    def __init__(self, created_obs=None, particles=None, weights=None):
        self.center_set = VoronoiCenterSet()
        self.counts = []  # N(h, a), parallel to center_set
        self.action_nodes = []
        self.visits = 0  # N(h)
        self.particles = list(particles) if particles is not None else []
        self.weights = list(weights) if weights is not None else []
        self.created_obs = created_obs

    def mean_state(self):
        w = np.asarray(self.weights, dtype=float)
        total = w.sum()
        stack = np.asarray(self.particles, dtype=float)
        if total <= 0:
            return stack.mean(axis=0)
        return w @ stack / total


class ActionNode:
    """Action child: running-mean Q plus widened observation branches."""

    __slots__ = ("action", "q", "n", "children", "branch_counts")

    def __init__(self, action):
        self.action = action
        self.q = 0.0
        self.n = 0
        self.children = []  # BeliefNode per observation branch
        self.branch_counts = []  # insertion counts M(h, a, o)


def first_action_hook(new_node: BeliefNode, context, policy):
    """Rollout-policy action used as the first child of a fresh belief node.

    context is (creating observation | None, representative state); the root
    passes None and its belief's weighted mean state.
    """
    obs, state = context
    return np.asarray(policy(obs, state), dtype=float)


def rollout(start, depth: int, problem: GenerativeProblem, policy, max_depth: int,
            rng, last_obs=None) -> float:
    """Discounted return of the fixed policy from ``start`` until max_depth or
    a terminal state. ``start`` may be a state or a particle belief (a start
    state is then drawn by weight and the mean state seeds the policy)."""
    if isinstance(start, WeightedParticleBelief):
        state = start.sample_state(rng)
        ctx_state = start.mean_state()
    else:
        state = start
        ctx_state = start
    if policy is None:
        return 0.0
    total = 0.0
    disc = 1.0
    obs = last_obs
    for _ in range(depth, max_depth):
        if problem.is_terminal(state):
            break
        action = problem.action_space.clamp(np.asarray(policy(obs, ctx_state), dtype=float))
        state, obs, reward = problem.generate(state, action, rng)
        ctx_state = state
        total += disc * reward
        disc *= problem.discount
    return total


def _select_action(node: BeliefNode, state, problem, cfg, rng):
    """(ActionNode, index); applies the first-action hook on fresh nodes."""
    if (
        len(node.center_set) == 0
        and cfg.first_action_from_rollout
        and cfg.rollout_policy is not None
    ):
        ctx_state = node.mean_state() if node.created_obs is None else state
        action = first_action_hook(node, (node.created_obs, ctx_state), cfg.rollout_policy)
        action = problem.action_space.clamp(action)
        is_new, idx = True, None
    else:
        action, is_new, idx = _vpw_decision(
            node.center_set, node.counts, node.visits, problem.action_space, cfg.vpw, rng
        )
    if is_new:
        node.center_set.add(action, 0.0)
        node.counts.append(0)
        node.action_nodes.append(ActionNode(np.asarray(action, dtype=float)))
        idx = len(node.action_nodes) - 1
    return node.action_nodes[idx], idx


def _pick_branch(anode: ActionNode, rng) -> int:
    """Existing observation branch drawn proportionally to insertion counts.

    A branch whose stored weights have all underflowed is degenerate; the
    draw is retried over the remaining branches (recoverable), falling back
    to the original pick when every branch is degenerate.
    """
    m = np.asarray(anode.branch_counts, dtype=float)
    cum = np.cumsum(m)
    j = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
    j = min(j, len(m) - 1)
    if sum(anode.children[j].weights) > 0:
        return j
    live = [i for i in range(len(m)) if sum(anode.children[i].weights) > 0]
    if not live:
        return j
    live_m = m[live]
    cum = np.cumsum(live_m)
    k = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
    return live[min(k, len(live) - 1)]


def _resample_particle(child: BeliefNode, rng):
    """Stored state drawn by weight; falls back to uniform when the branch's
    weights have all underflowed (recoverable degenerate case)."""
    w = np.asarray(child.weights, dtype=float)
    total = w.sum()
    if total <= 0:
        return child.particles[int(rng.integers(len(child.particles)))]
    cum = np.cumsum(w)
    i = int(np.searchsorted(cum, rng.random() * total, side="right"))
    return child.particles[min(i, len(w) - 1)]


def simulate(node: BeliefNode, state, depth: int, problem: GenerativeProblem,
             cfg: MctsConfig, rng, trace=None) -> float:
    """One tree descent from ``state``; returns its discounted return and
    updates visit counts, Q running means, and particle collections."""
    if depth >= cfg.max_depth or problem.is_terminal(state):
        return 0.0

    anode, idx = _select_action(node, state, problem, cfg, rng)
    next_state, obs, reward = problem.generate(state, anode.action, rng)

    if len(anode.children) <= cfg.k_o * anode.n**cfg.alpha_o:
        child = BeliefNode(created_obs=obs)
        anode.children.append(child)
        anode.branch_counts.append(1)
        new_branch = True
        if trace is not None:
            trace.append(("new_belief_node", id(child), depth + 1))
    else:
        j = _pick_branch(anode, rng)
        child = anode.children[j]
        obs = child.created_obs
        new_branch = False

    weight = 1.0 if problem.is_mdp else problem.obs_density(obs, anode.action, next_state)
    child.particles.append(next_state)
    child.weights.append(weight)

    if new_branch:
        total = reward + problem.discount * rollout(
            next_state, depth + 1, problem, cfg.rollout_policy, cfg.max_depth, rng,
            last_obs=obs,
        )
    else:
        resampled = _resample_particle(child, rng)
        if problem.reward_fn is not None:
            reward = float(problem.reward_fn(state, anode.action, resampled))
        total = reward + problem.discount * simulate(
            child, resampled, depth + 1, problem, cfg, rng, trace=trace
        )

    node.visits += 1
    node.counts[idx] += 1
    anode.n += 1
    anode.q += (total - anode.q) / anode.n
    node.center_set.values[idx] = anode.q
    if trace is not None:
        trace.append(("backup", id(node), idx, total))
    return total


def mcts_plan(root_belief: WeightedParticleBelief, problem: GenerativeProblem,
              cfg: MctsConfig, rng, return_tree: bool = False):
    """Run simulations until the budget is spent; return argmax-Q root action.

    Each simulation starts from a root particle drawn by weight. Only actions
    with at least one completed visit are eligible. Wall-clock budgets are
    checked between simulations; a started descent is never aborted.
    """
    total_w = root_belief.total_weight
    if total_w <= 0:
        raise ValueError("root belief is degenerate")
    cum = np.cumsum(root_belief.weights)
    root = BeliefNode(created_obs=None, particles=root_belief.particles,
                      weights=root_belief.weights)
    sims = 0
    t0 = time.perf_counter()
    while True:
        if cfg.num_queries is not None and sims >= cfg.num_queries:
            break
        if cfg.time_budget is not None and time.perf_counter() - t0 >= cfg.time_budget:
            break
        i = int(np.searchsorted(cum, rng.random() * total_w, side="right"))
        state = root_belief.particles[min(i, len(root_belief) - 1)]
        simulate(root, state, 0, problem, cfg, rng)
        sims += 1

    best_q, best_action = -np.inf, None
    for anode in root.action_nodes:
        if anode.n >= 1 and anode.q > best_q:
            best_q, best_action = anode.q, anode.action
    if best_action is None:
        raise EmptyTreeError("budget allowed zero simulations")
    return (best_action, root) if return_tree else best_action


def pomcpow_plan(root_belief, problem, cfg: MctsConfig, rng, return_tree=False):
    """POMCPOW: the shared tree search with the action layer forced to plain
    progressive widening (omega = 1)."""
    forced = replace(cfg, vpw=replace(cfg.vpw, voo=replace(cfg.vpw.voo, omega=1.0)))
    return mcts_plan(root_belief, problem, forced, rng, return_tree=return_tree)


def vomcpow_plan(root_belief, problem, cfg: MctsConfig, rng, return_tree=False):
    """VOMCPOW: the shared tree search with VOO-driven widening as configured."""
    return mcts_plan(root_belief, problem, cfg, rng, return_tree=return_tree)
