"""Command-line experiment runner.

Subcommands: ``run`` (solver x environment episode batches), ``sweep-vowss``
(the LQG width grid), ``tune`` (CEM hyperparameter search), and ``summarize``
(grouped means of a results CSV). A JSON config file may preload any flag;
explicit flags win. The resolved configuration is echoed into the output
directory for provenance.
"""

from __future__ import annotations

import argparse
import json
import sys

from .harness import ExperimentSpec, run_experiment, run_tuning, summarize, vowss_width_sweep


def _load_config(path):
    if not path:
        return {}
    with open(path) as fh:
        return json.load(fh)


def _budgets(args, config):
    budgets = []
    queries = args.queries if args.queries is not None else config.get("queries")
    seconds = args.time if args.time is not None else config.get("time")
    if queries:
        for q in str(queries).split(","):
            budgets.append(("queries", int(q)))
    if seconds:
        for s in str(seconds).split(","):
            budgets.append(("seconds", float(s)))
    return tuple(budgets) or (("queries", 1000),)


def _cmd_run(args) -> int:
    config = _load_config(args.config)

    def pick(flag, key, default):
        return flag if flag is not None else config.get(key, default)

    spec = ExperimentSpec(
        env=pick(args.env, "env", "lqg"),
        solver=pick(args.solver, "solver", "vomcpow"),
        preset=pick(args.preset, "preset", None),
        env_overrides=config.get("env_overrides", {}),
        solver_overrides=config.get("solver_overrides", {}),
        budgets=_budgets(args, config),
        episodes=int(pick(args.episodes, "episodes", 100)),
        base_seed=int(pick(args.seed, "seed", 0)),
        rollout_policy=pick(args.rollout, "rollout_policy", None),
        out_dir=pick(args.out, "out", "results"),
        threads=int(pick(args.threads, "threads", 1)),
        filter_particles=int(config.get("filter_particles", 10_000)),
        solver_particles=config.get("solver_particles"),
        max_steps=config.get("max_steps"),
        record_timing=bool(config.get("record_timing", True)),
    )
    spec.validate()
    csv_path, _ = run_experiment(spec)
    print(f"episodes -> {csv_path}")
    return 0


def _cmd_sweep(args) -> int:
    config = _load_config(args.config)
    state_widths = [int(x) for x in (args.state_widths or config.get("state_widths", "2,5,10")).split(",")]
    action_widths = [int(x) for x in (args.action_widths or config.get("action_widths", "20,60,200")).split(",")]
    path, _ = vowss_width_sweep(
        state_widths,
        action_widths,
        episodes=int(args.episodes if args.episodes is not None else config.get("episodes", 200)),
        base_seed=int(args.seed if args.seed is not None else config.get("seed", 0)),
        out_dir=args.out or config.get("out", "results"),
        action_width_decay=float(config.get("action_width_decay", 0.4)),
        threads=int(args.threads if args.threads is not None else config.get("threads", 1)),
        env_overrides=config.get("env_overrides", {}),
    )
    print(f"sweep -> {path}")
    return 0


def _cmd_tune(args) -> int:
    recipe = _load_config(args.config)
    if not recipe:
        print("tune requires --config with a tuning recipe", file=sys.stderr)
        return 2
    run_tuning(recipe, out_dir=args.out or recipe.get("out", "results"))
    return 0


def _cmd_summarize(args) -> int:
    summarize(args.csv, group_by=tuple(args.group_by.split(",")), value=args.value)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="voroplan", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an episode batch")
    run_p.add_argument("--env", choices=["lqg", "vdp", "lander", "quadratic-mdp"])
    run_p.add_argument("--solver", choices=["vowss", "voss", "pomcpow", "vomcpow", "rollout-only"])
    run_p.add_argument("--preset")
    run_p.add_argument("--queries", help="query budget(s), comma separated")
    run_p.add_argument("--time", help="per-step planning seconds, comma separated")
    run_p.add_argument("--episodes", type=int)
    run_p.add_argument("--seed", type=int)
    run_p.add_argument("--rollout", help="rollout policy id (env default otherwise)")
    run_p.add_argument("--out")
    run_p.add_argument("--threads", type=int)
    run_p.add_argument("--config", help="JSON config; flags override")
    run_p.set_defaults(func=_cmd_run)

    sweep_p = sub.add_parser("sweep-vowss", help="VOWSS (C_s, C_a) grid on LQG")
    sweep_p.add_argument("--state-widths")
    sweep_p.add_argument("--action-widths")
    sweep_p.add_argument("--episodes", type=int)
    sweep_p.add_argument("--seed", type=int)
    sweep_p.add_argument("--out")
    sweep_p.add_argument("--threads", type=int)
    sweep_p.add_argument("--config")
    sweep_p.set_defaults(func=_cmd_sweep)

    tune_p = sub.add_parser("tune", help="CEM hyperparameter search")
    tune_p.add_argument("--config", required=True)
    tune_p.add_argument("--out")
    tune_p.set_defaults(func=_cmd_tune)

    sum_p = sub.add_parser("summarize", help="grouped means of a results CSV")
    sum_p.add_argument("csv")
    sum_p.add_argument("--group-by", default="solver,budget")
    sum_p.add_argument("--value", default="total_reward")
    sum_p.set_defaults(func=_cmd_summarize)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
