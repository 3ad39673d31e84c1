"""Experiment harness: seeded episode batches, CSV results, and summaries.

Episodes are rng-isolated: each (seed, role) pair owns an independent stream,
so paired solver comparisons share environment randomness and parallel
execution produces the same rows as serial. Between environment steps the
root belief is refreshed by a bootstrap particle filter and downsampled to
the solver's particle count.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import rng as streams
from .cem import CemParam, CemSpec, cem_optimize
from .mcts import mcts_plan, pomcpow_plan
from .presets import mcts_preset, vowss_preset
from .problems import (
    WeightedParticleBelief,
    batch_generate,
    batch_obs_density,
    init_root_belief,
)
from .sparse import VossConfig, default_sparse_vpw, voss_plan, vowss_plan
from .envs import lander, lqg, oracle, vdptag

CSV_COLUMNS = (
    "episode,seed,env,solver,budget_kind,budget,total_reward,plan_seconds_mean,"
    "first_action,distance_to_opt,steps,termination"
)

LQG_OPTIMUM = np.array([6.0, -6.0])

SOLVERS = ("vowss", "voss", "pomcpow", "vomcpow", "rollout-only")
ENVS = ("lqg", "vdp", "lander", "quadratic-mdp")


@dataclass(frozen=True)
class ExperimentSpec:
    """Declarative description of one solver x environment x budget batch."""

    env: str = "lqg"
    solver: str = "vomcpow"
    preset: str = None
    env_overrides: dict = field(default_factory=dict)
    solver_overrides: dict = field(default_factory=dict)
    budgets: tuple = (("queries", 1000),)
    episodes: int = 100
    base_seed: int = 0
    rollout_policy: str = None  # env default when None
    out_dir: str = "results"
    threads: int = 1
    filter_particles: int = 10_000
    solver_particles: int = None
    max_steps: int = None
    record_timing: bool = True  # False zeroes the wall-clock column (byte-stable CSVs)

    def validate(self):
        if self.env not in ENVS:
            raise ValueError(f"unknown env {self.env!r}; choose from {ENVS}")
        if self.solver not in SOLVERS:
            raise ValueError(f"unknown solver {self.solver!r}; choose from {SOLVERS}")
        if self.episodes < 0 or self.filter_particles < 1:
            raise ValueError("episodes must be >= 0 and filter_particles >= 1")
        for kind, value in self.budgets:
            if kind not in ("queries", "seconds") or value <= 0:
                raise ValueError(f"bad budget {(kind, value)!r}")
        _build_env(self.env, self.env_overrides, self.rollout_policy)
        return self


@dataclass
class EpisodeResult:
    episode: int
    seed: int
    env: str
    solver: str
    budget_kind: str
    budget: float
    total_reward: float = math.nan
    plan_seconds_mean: float = math.nan
    first_action: np.ndarray = None
    distance_to_opt: float = None
    steps: int = 0
    termination: str = "horizon"

    def csv_row(self) -> list:
        act = ""
        if self.first_action is not None:
            act = "|".join(f"{x:.17g}" for x in np.atleast_1d(self.first_action))
        dist = "" if self.distance_to_opt is None else f"{self.distance_to_opt:.17g}"
        reward = "" if math.isnan(self.total_reward) else f"{self.total_reward:.17g}"
        secs = "" if math.isnan(self.plan_seconds_mean) else f"{self.plan_seconds_mean:.6f}"
        return [
            self.episode, self.seed, self.env, self.solver, self.budget_kind,
            f"{self.budget:.17g}", reward, secs, act, dist, self.steps, self.termination,
        ]


# ---------------------------------------------------------------------------
# Environment and solver registries


def _build_env(name: str, overrides: dict, policy_name: str = None):
    """(problem, params, rollout policy, termination classifier, opt reference)."""
    overrides = dict(overrides or {})
    if name == "lqg":
        params = lqg.LqgParams(**overrides)
        problem = lqg.make_problem(params)
        policies = {
            "riccati": lqg.RiccatiPolicy(),
            "exact": lqg.ExactLqrPolicy(params),
        }
        policy = policies[policy_name or "riccati"]
        classify = lambda s, r: "terminal"
        return problem, params, policy, classify, LQG_OPTIMUM, params.horizon
    if name == "vdp":
        params = vdptag.VdpTagParams(**overrides)
        problem = vdptag.make_problem(params)
        if policy_name not in (None, "toward-target"):
            raise KeyError(f"unknown vdp policy {policy_name!r}")
        classify = lambda s, r: "tagged"
        return problem, params, vdptag.HeadTowardTargetPolicy(), classify, None, 50
    if name == "lander":
        params = lander.LanderParams(**overrides)
        problem = lander.make_problem(params)
        if policy_name not in (None, "proportional"):
            raise KeyError(f"unknown lander policy {policy_name!r}")
        classify = lambda s, r: "crashed" if r <= params.crash_penalty / 2 else "landed"
        return problem, params, lander.ProportionalLanderPolicy(params), classify, None, 250
    if name == "quadratic-mdp":
        params = oracle.QuadraticMdpParams(**overrides)
        problem = oracle.make_quadratic_mdp(params)
        classify = lambda s, r: "terminal"
        return problem, params, None, classify, None, params.horizon
    raise ValueError(f"unknown env {name!r}")


def _default_preset(env: str, solver: str) -> str:
    if solver in ("pomcpow", "vomcpow"):
        return f"{env}-{solver}"
    if solver == "vowss" and env == "lqg":
        return "lqg-vowss"
    return None


def _build_planner(spec: ExperimentSpec, budget_kind: str, budget, problem, policy):
    """plan(belief, last_obs, rng) -> action, plus the solver's particle count."""
    solver = spec.solver
    overrides = dict(spec.solver_overrides or {})
    if solver in ("pomcpow", "vomcpow"):
        preset = spec.preset or _default_preset(spec.env, solver)
        queries = int(budget) if budget_kind == "queries" else None
        seconds = float(budget) if budget_kind == "seconds" else None
        cfg = mcts_preset(preset, budget_queries=queries, budget_seconds=seconds,
                          rollout_policy=policy, overrides=overrides)
        plan = pomcpow_plan if solver == "pomcpow" else mcts_plan
        n_particles = spec.solver_particles or 1000

        def plan_fn(belief, last_obs, rng):
            return plan(belief, problem, cfg, rng)

        return plan_fn, n_particles
    if solver == "vowss":
        preset = spec.preset or _default_preset(spec.env, solver)
        if preset is None:
            raise ValueError("vowss outside LQG needs an explicit preset")
        cfg = vowss_preset(preset, overrides=overrides)
        def plan_fn(belief, last_obs, rng):
            return vowss_plan(belief, problem, cfg, rng)

        return plan_fn, cfg.state_width
    if solver == "voss":
        if not problem.is_mdp:
            raise ValueError("voss requires an MDP environment")
        knobs = {"state_width": 1, "action_width": 100, "depth": problem.horizon,
                 "action_width_decay": 1.0, "omega": 0.8, "sigma": 0.1}
        knobs.update(overrides)
        cfg = VossConfig(
            state_width=int(knobs["state_width"]),
            action_width=int(knobs["action_width"]),
            depth=int(knobs["depth"]),
            vpw=default_sparse_vpw(omega=knobs["omega"], sigma=knobs["sigma"]),
            action_width_decay=float(knobs["action_width_decay"]),
        )

        def plan_fn(belief, last_obs, rng):
            return voss_plan(belief.mean_state(), problem, cfg, rng)

        return plan_fn, 1
    if solver == "rollout-only":
        if policy is None:
            raise ValueError("rollout-only needs an environment rollout policy")

        def plan_fn(belief, last_obs, rng):
            action = np.asarray(policy(last_obs, belief.mean_state()), dtype=float)
            return problem.action_space.clamp(action)

        return plan_fn, spec.solver_particles or 100
    raise ValueError(f"unknown solver {solver!r}")


# ---------------------------------------------------------------------------
# Particle filtering between environment steps


def _systematic_resample(weights, n, rng) -> np.ndarray:
    positions = (rng.random() + np.arange(n)) / n
    return np.searchsorted(np.cumsum(weights), positions, side="right").clip(0, len(weights) - 1)


def _downsample(particles, weights, n, rng) -> WeightedParticleBelief:
    idx = _systematic_resample(weights, n, rng)
    return WeightedParticleBelief(particles[idx], np.full(n, 1.0 / n))


def _filter_step(problem, particles, weights, action, obs, rng):
    """Bootstrap update: propagate, reweight by Z, resample when ESS < n/2."""
    nxt, _, _ = batch_generate(problem, particles, action, rng)
    z = batch_obs_density(problem, obs, action, nxt)
    w = weights * z
    total = w.sum()
    if not np.isfinite(total) or total <= 0:
        # Degenerate reweighting: recover with uniform weights over propagated
        # particles rather than aborting the episode.
        return nxt, np.full(len(nxt), 1.0 / len(nxt))
    w = w / total
    ess = 1.0 / float(w @ w)
    if ess < len(w) / 2:
        idx = _systematic_resample(w, len(w), rng)
        return nxt[idx], np.full(len(w), 1.0 / len(w))
    return nxt, w


# ---------------------------------------------------------------------------
# Episodes


def run_episode(spec: ExperimentSpec, budget_kind: str, budget, episode: int) -> EpisodeResult:
    seed = spec.base_seed + episode
    result = EpisodeResult(
        episode=episode, seed=seed, env=spec.env, solver=spec.solver,
        budget_kind=budget_kind, budget=float(budget),
    )
    problem, params, policy, classify, opt_ref, default_steps = _build_env(
        spec.env, spec.env_overrides, spec.rollout_policy
    )
    plan_fn, n_solver = _build_planner(spec, budget_kind, budget, problem, policy)
    max_steps = spec.max_steps or default_steps

    rng_env = streams.stream(seed, streams.ENV)
    rng_solver = streams.stream(seed, streams.SOLVER)
    rng_filter = streams.stream(seed, streams.FILTER)

    state = problem.initial_belief_sampler(rng_env)
    flt = init_root_belief(problem, spec.filter_particles, rng_filter)
    particles, weights = flt.particles, flt.weights

    total = 0.0
    disc = 1.0
    plan_secs = []
    last_obs = None
    try:
        if problem.is_terminal(state):
            result.termination = "terminal-at-start"
        for step in range(max_steps):
            if problem.is_terminal(state):
                break
            belief = _downsample(particles, weights, n_solver, rng_filter)
            t0 = time.perf_counter()
            action = plan_fn(belief, last_obs, rng_solver)
            plan_secs.append(time.perf_counter() - t0)
            if step == 0:
                result.first_action = np.asarray(action, dtype=float)
                if opt_ref is not None:
                    d = result.first_action[: len(opt_ref)] - opt_ref
                    result.distance_to_opt = float(np.sqrt(d @ d))
            state, obs, reward = problem.generate(state, action, rng_env)
            total += disc * reward
            disc *= problem.discount
            result.steps += 1
            last_obs = obs
            if problem.is_terminal(state):
                result.termination = classify(state, reward)
                break
            particles, weights = _filter_step(problem, particles, weights, action, obs, rng_filter)
        result.total_reward = total
        if plan_secs:
            result.plan_seconds_mean = float(np.mean(plan_secs)) if spec.record_timing else 0.0
    except Exception as exc:  # recorded, not fatal to the batch
        result.termination = f"error:{type(exc).__name__}"
    return result


def _episode_job(args):
    spec_dict, budget_kind, budget, episode = args
    spec = ExperimentSpec(**spec_dict)
    return run_episode(spec, budget_kind, budget, episode)


def _run_jobs(jobs, threads: int):
    if threads <= 1 or len(jobs) <= 1:
        return [_episode_job(j) for j in jobs]
    import concurrent.futures

    with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(_episode_job, jobs, chunksize=max(1, len(jobs) // (threads * 8))))


def run_experiment(spec: ExperimentSpec):
    """Run the full grid, write episodes.csv plus the resolved config, print a
    per-budget summary, and return (csv path, results)."""
    spec.validate()
    out = Path(spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    spec_dict = dataclasses.asdict(spec)
    jobs = [
        (spec_dict, kind, value, ep)
        for kind, value in spec.budgets
        for ep in range(spec.episodes)
    ]
    results = _run_jobs(jobs, spec.threads)
    results.sort(key=lambda r: (r.budget_kind, r.budget, r.episode))

    csv_path = out / "episodes.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS.split(","))
        for r in results:
            writer.writerow(r.csv_row())

    config_path = out / "config.json"
    echo = dict(spec_dict)
    _, params, _, _, _, _ = _build_env(spec.env, spec.env_overrides, spec.rollout_policy)
    echo["resolved_env_params"] = {
        k: (list(v) if isinstance(v, (tuple, np.ndarray)) else v)
        for k, v in dataclasses.asdict(params).items()
    }
    config_path.write_text(json.dumps(echo, indent=2, default=str) + "\n")

    for kind, value in spec.budgets:
        rows = [r for r in results if r.budget_kind == kind and r.budget == value]
        rewards = np.array([r.total_reward for r in rows if not math.isnan(r.total_reward)])
        if len(rewards):
            se = rewards.std(ddof=1) / math.sqrt(len(rewards)) if len(rewards) > 1 else 0.0
            print(f"[{spec.solver} @ {kind}={value}] reward {rewards.mean():.3f} +/- {se:.3f} (n={len(rewards)})")
        else:
            print(f"[{spec.solver} @ {kind}={value}] no completed episodes")
    return csv_path, results


# ---------------------------------------------------------------------------
# VOWSS width sweep (first-action quality on LQG)


def _sweep_job(args):
    c_s, c_a, decay, episode, base_seed, env_overrides = args
    problem = lqg.make_problem(lqg.LqgParams(**env_overrides))
    seed = base_seed + episode
    cfg = vowss_preset("lqg-vowss", overrides={
        "state_width": c_s, "action_width": c_a, "action_width_decay": decay,
    })
    rng_solver = streams.stream(seed, streams.SOLVER)
    rng_filter = streams.stream(seed, streams.FILTER)
    belief = init_root_belief(problem, c_s, rng_filter)
    action = vowss_plan(belief, problem, cfg, rng_solver)
    d = action[:2] - LQG_OPTIMUM
    return c_s, c_a, float(np.sqrt(d @ d))


def vowss_width_sweep(state_widths, action_widths, episodes: int, base_seed: int,
                      out_dir: str = "results", action_width_decay: float = 0.4,
                      threads: int = 1, env_overrides: dict = None):
    """Cartesian (C_s, C_a) sweep of VOWSS first-action distance to the LQG
    optimum. Returns summary rows and writes them as CSV."""
    env_overrides = dict(env_overrides or {})
    jobs = [
        (c_s, c_a, action_width_decay, ep, base_seed, env_overrides)
        for c_s in state_widths
        for c_a in action_widths
        for ep in range(episodes)
    ]
    if threads <= 1 or len(jobs) <= 1:
        outcomes = [_sweep_job(j) for j in jobs]
    else:
        import concurrent.futures

        with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as ex:
            outcomes = list(ex.map(_sweep_job, jobs, chunksize=1))

    rows = []
    for c_s in state_widths:
        for c_a in action_widths:
            dists = np.array([d for s, a, d in outcomes if s == c_s and a == c_a])
            se = dists.std(ddof=1) / math.sqrt(len(dists)) if len(dists) > 1 else 0.0
            rows.append({
                "state_width": c_s, "action_width": c_a, "episodes": len(dists),
                "mean_distance": float(dists.mean()), "stderr_distance": float(se),
            })

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "vowss_sweep.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    for row in rows:
        print(
            f"C_s={row['state_width']:>3} C_a={row['action_width']:>4} "
            f"distance {row['mean_distance']:.3f} +/- {row['stderr_distance']:.3f}"
        )
    return path, rows


# ---------------------------------------------------------------------------
# Summaries


def summarize(csv_path, group_by=("solver", "budget"), value: str = "total_reward"):
    """Per-group mean, standard error, and count of a numeric column.

    Returns the summary rows and writes them next to the input as
    ``<stem>_summary.csv`` plus an aligned text table. The n=1 standard error
    is reported as an empty field, by convention.
    """
    csv_path = Path(csv_path)
    with open(csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or value not in reader.fieldnames:
            raise ValueError(f"column {value!r} not in {csv_path.name}")
        missing = [g for g in group_by if g not in reader.fieldnames]
        if missing:
            raise ValueError(f"group-by columns {missing} not in {csv_path.name}")
        data = list(reader)

    groups = {}
    for row in data:
        if row[value] == "":
            continue
        key = tuple(row[g] for g in group_by)
        groups.setdefault(key, []).append(float(row[value]))

    rows = []
    for key in sorted(groups):
        vals = np.asarray(groups[key])
        se = vals.std(ddof=1) / math.sqrt(len(vals)) if len(vals) > 1 else None
        row = dict(zip(group_by, key))
        row.update(mean=float(vals.mean()), stderr=se, count=len(vals))
        rows.append(row)

    out_path = csv_path.with_name(csv_path.stem + "_summary.csv")
    fields = list(group_by) + ["mean", "stderr", "count"]
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(fields)
        for row in rows:
            writer.writerow(
                [row[g] for g in group_by]
                + [f"{row['mean']:.17g}",
                   "" if row["stderr"] is None else f"{row['stderr']:.17g}",
                   row["count"]]
            )

    widths = [max(len(str(f)), 12) for f in fields]
    lines = ["  ".join(str(f).ljust(w) for f, w in zip(fields, widths))]
    for row in rows:
        cells = [str(row[g]) for g in group_by]
        cells.append(f"{row['mean']:.4f}")
        cells.append("" if row["stderr"] is None else f"{row['stderr']:.4f}")
        cells.append(str(row["count"]))
        lines.append("  ".join(c.ljust(w) for c, w in zip(cells, widths)))
    print("\n".join(lines))
    return rows, out_path


# ---------------------------------------------------------------------------
# CEM tuning recipes


def run_tuning(recipe: dict, out_dir: str = "results"):
    """CEM search over solver hyperparameters per a JSON-style recipe.

    Recipe keys: env, solver, optional preset/env_overrides, budget via
    "queries" or "seconds", episodes_per_eval, iterations, population,
    elite_frac, seed, params (list of {name, low, high, log_scale}), and
    optional init_from_preset for the tune-the-baseline-first protocol. The
    VOO proposal scale (sigma) is not searched; presets fix it.
    """
    env = recipe["env"]
    solver = recipe["solver"]
    seed = int(recipe.get("seed", 0))
    episodes_per_eval = int(recipe.get("episodes_per_eval", 8))
    if "seconds" in recipe:
        budgets = (("seconds", float(recipe["seconds"])),)
    else:
        budgets = (("queries", int(recipe.get("queries", 300))),)

    params = [
        CemParam(p["name"], float(p["low"]), float(p["high"]), bool(p.get("log_scale", False)))
        for p in recipe["params"]
    ]
    for p in params:
        if p.name == "sigma":
            raise ValueError("the VOO proposal scale is fixed manually, not tuned")

    init_mean = None
    source = recipe.get("init_from_preset")
    if source:
        base = mcts_preset(source, budget_queries=1)
        values = {
            "c": base.vpw.c, "k_a": base.vpw.k_a, "alpha_a": base.vpw.alpha_a,
            "k_o": base.k_o, "alpha_o": base.alpha_o, "omega": base.vpw.voo.omega,
        }
        init_mean = np.array([
            math.log10(values[p.name]) if p.log_scale else values[p.name]
            for p in params
        ])

    def objective(assignment, _rng):
        spec = ExperimentSpec(
            env=env, solver=solver, preset=recipe.get("preset"),
            env_overrides=recipe.get("env_overrides", {}),
            solver_overrides=assignment, budgets=budgets,
            episodes=episodes_per_eval, base_seed=seed, threads=1,
            out_dir=out_dir, max_steps=recipe.get("max_steps"),
            filter_particles=int(recipe.get("filter_particles", 2000)),
        )
        rewards = [
            run_episode(spec, budgets[0][0], budgets[0][1], ep).total_reward
            for ep in range(episodes_per_eval)
        ]
        rewards = [r for r in rewards if not math.isnan(r)]
        if not rewards:
            raise RuntimeError("all evaluation episodes failed")
        return float(np.mean(rewards))

    cem = CemSpec(
        params=params, objective=objective,
        population=int(recipe.get("population", 24)),
        elite_frac=float(recipe.get("elite_frac", 0.25)),
        iterations=int(recipe.get("iterations", 10)),
        init_mean=init_mean,
    )
    best, history = cem_optimize(cem, streams.stream(seed, streams.TUNER))

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    hist_path = out / "tuning_history.csv"
    with open(hist_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "elite_mean", "best"]
                        + [f"mean_{p.name}" for p in params]
                        + [f"std_{p.name}" for p in params])
        for row in history:
            writer.writerow([row["iteration"], f"{row['elite_mean']:.17g}", f"{row['best']:.17g}"]
                            + [f"{m:.17g}" for m in row["mean"]]
                            + [f"{s:.17g}" for s in row["std"]])
    best_path = out / "tuning_best.json"
    best_path.write_text(json.dumps(best, indent=2) + "\n")
    print(f"best assignment -> {best_path}")
    return best, history, hist_path
