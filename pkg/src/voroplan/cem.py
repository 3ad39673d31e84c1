"""Cross-entropy hyperparameter search over box-bounded parameters.

Each iteration samples a population from a diagonal Gaussian clamped to the
bounds, scores it, and refits mean/std to the elite fraction with smoothing.
Elites are carried into the next population (and re-scored), which makes the
elite-mean objective non-decreasing for deterministic objectives. Failing
evaluations score -inf and never enter the refit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CemParam:
    name: str
    low: float
    high: float
    log_scale: bool = False

    def __post_init__(self):
        if not (self.high > self.low):
            raise ValueError(f"{self.name}: high must exceed low")
        if self.log_scale and self.low <= 0:
            raise ValueError(f"{self.name}: log scale needs positive bounds")


@dataclass(frozen=True, eq=False)
class CemSpec:
    params: list
    objective: object  # callable (dict of name -> value, rng) -> float
    population: int = 24
    elite_frac: float = 0.25
    iterations: int = 10
    init_mean: np.ndarray = None  # in internal (possibly log10) coordinates
    init_std: np.ndarray = None
    smoothing: float = 0.7  # weight on the new elite fit
    std_floor_frac: float = 0.01  # floor as a fraction of the bound width

    @property
    def elite_count(self) -> int:
        return max(1, round(self.elite_frac * self.population))

    def __post_init__(self):
        # Healthy CEM wants population >= 2 * elites, but the degenerate
        # elite_frac = 1 configuration (refit to the whole population) is a
        # legitimate special case, so only impossible configurations reject.
        if self.population < max(2, self.elite_count):
            raise ValueError("population must cover the elite count (and be >= 2)")


def _internal_bounds(spec):
    lo = np.array([math.log10(p.low) if p.log_scale else p.low for p in spec.params])
    hi = np.array([math.log10(p.high) if p.log_scale else p.high for p in spec.params])
    return lo, hi


def _to_external(spec, x) -> dict:
    out = {}
    for i, p in enumerate(spec.params):
        out[p.name] = float(10.0 ** x[i]) if p.log_scale else float(x[i])
    return out


def cem_optimize(spec: CemSpec, rng):
    """(best_params, history); history rows carry per-iteration elite stats."""
    lo, hi = _internal_bounds(spec)
    mean = np.array(spec.init_mean, dtype=float) if spec.init_mean is not None else (lo + hi) / 2.0
    std = np.array(spec.init_std, dtype=float) if spec.init_std is not None else (hi - lo) / 3.0
    floor = spec.std_floor_frac * (hi - lo)
    std = np.maximum(std, floor)

    best_x = mean.copy()
    best_score = -np.inf
    history = []
    carried = np.empty((0, len(lo)))

    for it in range(spec.iterations):
        n_fresh = spec.population - len(carried)
        fresh = np.clip(mean + rng.normal(size=(n_fresh, len(lo))) * std, lo, hi)
        pop = np.vstack([carried, fresh])

        scores = np.full(spec.population, -np.inf)
        streams = rng.spawn(spec.population)
        for i in range(spec.population):
            try:
                scores[i] = float(spec.objective(_to_external(spec, pop[i]), streams[i]))
            except Exception:
                scores[i] = -np.inf  # crashed episodes are excluded from refits
        if not np.isfinite(scores).any():
            history.append({"iteration": it, "elite_mean": float("nan"),
                            "best": best_score, "mean": mean.copy(), "std": std.copy()})
            carried = np.empty((0, len(lo)))
            continue

        order = np.argsort(-scores)
        elite_idx = order[: spec.elite_count]
        elite_idx = elite_idx[np.isfinite(scores[elite_idx])]
        elites = pop[elite_idx]
        if scores[order[0]] > best_score:
            best_score = float(scores[order[0]])
            best_x = pop[order[0]].copy()

        new_mean = elites.mean(axis=0)
        new_std = elites.std(axis=0)
        mean = spec.smoothing * new_mean + (1.0 - spec.smoothing) * mean
        std = np.maximum(spec.smoothing * new_std + (1.0 - spec.smoothing) * std, floor)
        carried = elites.copy()

        history.append({
            "iteration": it,
            "elite_mean": float(scores[elite_idx].mean()),
            "best": best_score,
            "mean": mean.copy(),
            "std": std.copy(),
        })

    return _to_external(spec, best_x), history
