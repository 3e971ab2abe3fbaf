"""Command-line entry point: train, sweep, aggregate, validate-dafs.

Presets encode the Goal2D experiment grids as deltas over a base config.
A sweep is a deterministic job set: (preset, seed count) fully determines
the (config_hash, seed) pairs, so re-running a sweep overwrites the same
files. Workers are separate processes; each writes its own CSV atomically.
"""

from __future__ import annotations

import argparse
import sys
import traceback
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import ConfigError, parse_config
from .daf import KINDS, DafSpec, closure_report
from .env import Goal2dEnv
from .stats import (
    CurveAlignmentError,
    SchemaError,
    aggregate,
    summary_table,
    write_run_csv,
    write_summary_csv,
)
from .trainer import TrainConfig, benchmark_variant, run_training

PRESET_NAMES = ("benchmark", "coverage", "reward_density", "replay_ratio", "single")


def _with_daf(cfg: TrainConfig, kind: str, p: float = 0.0, **kw) -> TrainConfig:
    return replace(cfg, daf_kind=kind, daf_p=p, **kw)


def preset_grid(name: str, base: TrainConfig) -> list[tuple[str, TrainConfig]]:
    """Labeled config grid for one experiment preset.

    Labels are human hints only; grouping always keys on config hash.
    """
    if name == "single":
        return [("single", base)]
    if name == "benchmark":
        variants = ["x1", "x2", "x4", "x8", "x2-rotate", "x2-translate"]
        return [(v, benchmark_variant(base, v)) for v in variants]
    if name == "coverage":
        # Mixes hold the sampling pressure per transition roughly equal
        # across arms: every observed or augmented transition is drawn into
        # gradient batches the same expected number of times. Batch sizes
        # are snapped so that alpha * batch is integral, keeping the
        # counter-recomputed alpha exact.
        def snap(x: float, k: int) -> int:
            return k * round(x / k)

        b0 = base.batch_size
        grid = [
            ("no-da", base),
            ("translate-1to1", _with_daf(base, "translate", aug_m=1, aug_alpha=1.0)),
            (
                "tp0-1to5",
                _with_daf(
                    base, "translate_proximal",
                    aug_m=1, aug_every_n_observed=5, aug_alpha=0.2,
                    update_every=5, updates_per_cycle=3,
                    batch_size=snap(b0 * 5 / 3, 5),
                ),
            ),
            (
                "tp0-1to2",
                _with_daf(
                    base, "translate_proximal",
                    aug_m=1, aug_every_n_observed=2, aug_alpha=0.5,
                    update_every=4, updates_per_cycle=3,
                    batch_size=snap(b0 * 4 / 3, 2),
                ),
            ),
            ("tp0-1to1", _with_daf(base, "translate_proximal", aug_m=1, aug_alpha=1.0)),
        ]
        return grid
    if name == "reward_density":
        grid = []
        for p in (0.0, 0.01, 0.05, 0.1, 0.5, 1.0):
            grid.append(
                (
                    f"p{p}",
                    _with_daf(
                        base, "translate_proximal", p=p, aug_m=1, aug_alpha=1.0
                    ),
                )
            )
        return grid
    if name == "replay_ratio":
        return [
            (f"m{m}", _with_daf(base, "translate", aug_m=m, aug_alpha=1.0))
            for m in (1, 2, 4, 8)
        ]
    raise ConfigError(f"unknown preset {name!r}")


def _run_one(cfg: TrainConfig, out_dir: str) -> str:
    record = run_training(cfg)
    return str(write_run_csv(record, out_dir))


def cmd_train(args: argparse.Namespace) -> int:
    cfg = parse_config(args.config, args.set or [])
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    path = _run_one(cfg, args.out)
    print(path)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    base = parse_config(args.config, args.set or [])
    grid = preset_grid(args.preset, base)
    jobs = []
    for label, cfg in grid:
        for seed in range(args.seeds):
            jobs.append((label, replace(cfg, seed=seed)))
    print(f"preset {args.preset}: {len(grid)} configs x {args.seeds} seeds = {len(jobs)} runs")
    failures = 0
    if args.parallelism <= 1:
        for label, cfg in jobs:
            try:
                path = _run_one(cfg, args.out)
                print(f"done {label} seed={cfg.seed} -> {path}", flush=True)
            except Exception:
                failures += 1
                traceback.print_exc()
    else:
        with ProcessPoolExecutor(max_workers=args.parallelism) as pool:
            futs = {
                pool.submit(_run_one, cfg, args.out): (label, cfg.seed)
                for label, cfg in jobs
            }
            for fut in as_completed(futs):
                label, seed = futs[fut]
                try:
                    print(f"done {label} seed={seed} -> {fut.result()}", flush=True)
                except Exception:
                    failures += 1
                    traceback.print_exc()
    if failures:
        print(f"{failures} runs failed", file=sys.stderr)
        return 1
    return 0


def cmd_aggregate(args: argparse.Namespace) -> int:
    in_dir = Path(args.in_dir)
    paths = sorted(p for p in in_dir.glob("*.csv") if not p.name.endswith("_summary.csv"))
    if not paths:
        print(f"no run CSVs found in {in_dir}", file=sys.stderr)
        return 1
    groups = aggregate(paths)
    for h in sorted(groups):
        out = write_summary_csv(groups[h], args.out, axis=args.x)
        print(out)
    print(summary_table(groups))
    return 0


def cmd_validate_dafs(args: argparse.Namespace) -> int:
    env = Goal2dEnv()
    status = 0
    for kind in (k for k in KINDS if k != "none"):
        spec = DafSpec(kind=kind, p=0.5) if kind == "translate_proximal" else DafSpec(kind=kind)
        rng = np.random.default_rng(args.seed)
        checked, failed = closure_report(spec, args.samples, rng, env)
        print(f"{kind}: {checked} sampled, {failed} invalid")
        if failed:
            status = 1
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="augrl",
        description="Data-augmented TD3 on Goal2D: training, sweeps, aggregation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_set(p):
        p.add_argument(
            "--set", action="append", metavar="KEY=VALUE",
            help="config override, repeatable",
        )

    p = sub.add_parser("train", help="run one seeded training run")
    p.add_argument("--config", help="key=value config file (defaults when omitted)")
    p.add_argument("--seed", type=int, help="overrides the config's seed")
    p.add_argument("--out", required=True, help="directory for the run CSV")
    add_set(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("sweep", help="run a preset experiment grid over seeds")
    p.add_argument("--preset", required=True, choices=PRESET_NAMES)
    p.add_argument("--seeds", type=int, required=True, help="seed count, runs 0..N-1")
    p.add_argument("--out", required=True)
    p.add_argument("--parallelism", type=int, default=1, help="worker processes")
    p.add_argument("--config", help="base config file for the grid")
    add_set(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("aggregate", help="group run CSVs and write summaries")
    p.add_argument("--in", dest="in_dir", required=True, help="directory of run CSVs")
    p.add_argument("--out", required=True, help="directory for summary CSVs")
    p.add_argument(
        "--x", choices=("env_steps", "update_count"), default="env_steps",
        help="checkpoint axis for summaries",
    )
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("validate-dafs", help="run the closure suite on every DAF")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_validate_dafs)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, SchemaError, CurveAlignmentError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
