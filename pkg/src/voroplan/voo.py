"""Voronoi optimistic optimization and Voronoi progressive widening.

VOO samples the action space uniformly with probability omega, otherwise from
the Voronoi cell of the best-valued sampled action via Gaussian rejection
sampling. VPW plugs VOO proposals into the progressive-widening criterion
|C| <= k_a * N^alpha_a; classic action PW is exactly VPW with omega = 1, and
pure VOO is VPW with the widening criterion treated as +infinity.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .problems import ActionSpace, uniform_action


@dataclass(frozen=True, eq=False)
class VooConfig:
    """Knobs for VOO sampling.

    sigma is the per-continuous-dimension standard deviation of the Gaussian
    proposals. accept_radius defaults to mean(sigma)/10: proposals at least
    that close to the best center are accepted without the membership test.
    uniform_proposal swaps the Gaussian proposals for uniform ones over the
    whole box; it exists for tests that exercise the analysis regime and is
    not a tuned production path.
    """

    omega: float
    sigma: np.ndarray
    max_rejections: int = 20
    accept_radius: float = None
    uniform_proposal: bool = False

    def __post_init__(self):
        object.__setattr__(self, "sigma", np.atleast_1d(np.asarray(self.sigma, dtype=float)))
        if not (0.0 <= self.omega <= 1.0):
            raise ValueError("omega must lie in [0, 1]")
        if np.any(self.sigma <= 0):
            raise ValueError("sigma entries must be positive")
        if self.max_rejections < 1:
            raise ValueError("max_rejections must be >= 1")
        if self.accept_radius is None:
            object.__setattr__(self, "accept_radius", float(np.mean(self.sigma)) / 10.0)


@dataclass(frozen=True, eq=False)
class VpwConfig:
    k_a: float
    alpha_a: float
    c: float
    voo: VooConfig
    widen_unbounded: bool = False  # True: criterion treated as +inf (pure VOO)

    def __post_init__(self):
        if self.k_a <= 0:
            raise ValueError("k_a must be positive")
        if not (0.0 <= self.alpha_a <= 1.0):
            raise ValueError("alpha_a must lie in [0, 1]")
        if self.c < 0:
            raise ValueError("c must be non-negative")


class VoronoiCenterSet:
    """Sampled actions paired with their running value estimates."""

    __slots__ = ("centers", "values", "_matrix")

    def __init__(self, centers=None, values=None):
        self.centers = list(centers) if centers is not None else []
        self.values = [float(v) for v in values] if values is not None else []
        if len(self.centers) != len(self.values):
            raise ValueError("centers and values must have equal length")
        self._matrix = None

    def __len__(self):
        return len(self.centers)

    def add(self, center, value):
        self.centers.append(np.asarray(center, dtype=float))
        self.values.append(float(value))
        self._matrix = None

    def matrix(self) -> np.ndarray:
        """Centers stacked as an (n, dim) array (cached between adds)."""
        if self._matrix is None or len(self._matrix) != len(self.centers):
            self._matrix = np.asarray(self.centers, dtype=float)
        return self._matrix

    def argmax(self) -> int:
        # Ties break toward the lowest index for reproducibility.
        return int(np.argmax(self.values))


def best_voronoi_cell(
    center_set: VoronoiCenterSet, space: ActionSpace, cfg: VooConfig, rng, trace=None
) -> np.ndarray:
    """Sample from the Voronoi cell of the argmax-value center.

    Proposals are Gaussian around the best center (discrete labels copied from
    it), wrapped/clipped into the box, and accepted when they are at least as
    close to the best center as to every other center or within the
    auto-accept radius. After max_rejections failed proposals the proposal
    closest to the best center is returned.
    """
    if len(center_set) == 0:
        raise ValueError("best_voronoi_cell needs at least one center")
    best = center_set.argmax()
    a_star = np.asarray(center_set.centers[best], dtype=float)
    nc = space.n_continuous
    n_prop = cfg.max_rejections

    proposals = np.tile(a_star, (n_prop, 1))
    if nc:
        if cfg.uniform_proposal:
            cont = space.lower + rng.random((n_prop, nc)) * space.spans
        else:
            cont = a_star[:nc] + rng.normal(size=(n_prop, nc)) * cfg.sigma
        spans = space.spans
        if space.periodic.any():
            safe = np.where(spans > 0, spans, 1.0)
            wrapped = space.lower + np.mod(cont - space.lower, safe)
            clipped = np.clip(cont, space.lower, space.upper)
            proposals[:, :nc] = np.where(space.periodic & (spans > 0), wrapped, clipped)
        else:
            proposals[:, :nc] = np.clip(cont, space.lower, space.upper)

    dists = space.metric.pairwise(proposals, center_set.matrix())
    d_star = dists[:, best].copy()
    if len(center_set) > 1:
        dists[:, best] = np.inf
        d_other = dists.min(axis=1)
    else:
        d_other = np.full(n_prop, np.inf)
    ok = (d_star <= d_other) | (d_star <= cfg.accept_radius)

    hits = np.flatnonzero(ok)
    if hits.size:
        idx, accepted = int(hits[0]), True
    else:
        idx, accepted = int(np.argmin(d_star)), False
    if trace is not None:
        trace.update(
            proposals=proposals, best_index=best, chosen=idx, accepted=accepted
        )
    return proposals[idx]


def voo_sample(
    center_set: VoronoiCenterSet, space: ActionSpace, cfg: VooConfig, rng, trace=None
) -> np.ndarray:
    """One VOO draw: uniform with probability omega (or when the set is empty),
    otherwise a best-Voronoi-cell sample."""
    u = rng.random()  # always consumed, so omega=1 replays identically to PW
    if u <= cfg.omega or len(center_set) == 0:
        if trace is not None:
            trace["branch"] = "uniform"
        return uniform_action(space, rng)
    if trace is not None:
        trace["branch"] = "voronoi"
    return best_voronoi_cell(center_set, space, cfg, rng, trace=trace)


def ucb_select(center_set: VoronoiCenterSet, visit_counts, total_visits: int, c: float) -> int:
    """Index maximizing Q + c*sqrt(log(N)/n); unvisited children come first."""
    if len(center_set) == 0:
        raise ValueError("ucb_select needs at least one child")
    counts = np.asarray(visit_counts, dtype=float)
    if len(counts) != len(center_set):
        raise ValueError("visit_counts must match the center set")
    scores = np.full(len(counts), np.inf)
    seen = counts > 0
    if seen.any():
        q = np.asarray(center_set.values, dtype=float)
        scores[seen] = q[seen] + c * np.sqrt(np.log(total_visits) / counts[seen])
    return int(np.argmax(scores))


def _vpw_decision(
    center_set: VoronoiCenterSet,
    visit_counts,
    total_visits: int,
    space: ActionSpace,
    cfg: VpwConfig,
    rng,
):
    """(action, is_new, child_index); child_index is None for new actions."""
    n = len(center_set)
    widen = (
        n == 0
        or cfg.widen_unbounded
        or n <= cfg.k_a * total_visits**cfg.alpha_a
    )
    if widen:
        return voo_sample(center_set, space, cfg.voo, rng), True, None
    i = ucb_select(center_set, visit_counts, total_visits, cfg.c)
    return center_set.centers[i], False, i


def vpw_select(center_set, visit_counts, total_visits, space, cfg: VpwConfig, rng):
    """Voronoi progressive widening: (action, is_new).

    When the widening criterion holds a fresh VOO sample is returned with
    is_new=True (the caller appends it to the children); otherwise the UCB
    argmax among existing children is returned with is_new=False.
    """
    action, is_new, _ = _vpw_decision(center_set, visit_counts, total_visits, space, cfg, rng)
    return action, is_new


def pw_select(center_set, visit_counts, total_visits, space, cfg: VpwConfig, rng):
    """Plain action progressive widening: VPW with omega forced to 1.

    The Unif[0,1] branch draw still occurs, so PW and VPW(omega=1) consume the
    rng identically and agree bit-for-bit under a shared stream.
    """
    forced = replace(cfg, voo=replace(cfg.voo, omega=1.0))
    return vpw_select(center_set, visit_counts, total_visits, space, forced, rng)
