"""Outer training loop: collect, augment, store, update, evaluate, log.

One run is parameterized by a TrainConfig covering the environment, the
TD3 learner, the augmentation (kind, m, alpha, thinning), and the
update/data schedule:

- `update_every * policy_data_multiplier` env steps form one cycle; at
  each cycle boundary the learner takes `updates_per_cycle` gradient
  steps. The policy-data multiplier N models "collect N times as much
  policy data per update": presets scale batch and buffers alongside.
- every `aug.every_n_observed`-th observed transition produces m
  augmented transitions, so fractional augmented-to-observed mixes are
  exact integer schedules.

Buffer capacities scale with the per-update data rates so the age (in
gradient updates) of the oldest observed and oldest augmented element
stay matched across all schedules; at the default rates this reduces to
the plain rule augmented_capacity = capacity * m.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .daf import DafSpec, augment
from .env import Goal2dEnv, Goal2dState, Transition
from .replay import ReplayPair, combined_sample, replay_age_report
from .td3 import Td3Agent, agent_init, greedy_actions_batch, select_action, td3_update


@dataclass(frozen=True)
class TrainConfig:
    seed: int = 0
    total_env_steps: int = 200_000
    update_every: int = 1
    updates_per_cycle: int = 1
    policy_data_multiplier: int = 1
    batch_size: int = 256
    buffer_capacity: int = 1_000_000
    daf_kind: str = "none"
    daf_p: float = 0.0
    aug_m: int = 1
    aug_alpha: float = 0.0
    aug_every_n_observed: int = 1
    eval_every_steps: int = 2500
    eval_episodes: int = 100
    td3_hidden_sizes: tuple[int, ...] = (256, 256)
    td3_gamma: float = 0.99
    td3_learning_rate: float = 1e-3
    td3_tau: float = 0.95
    td3_policy_noise_std: float = 0.2
    td3_noise_clip: float = 0.5
    td3_policy_delay: int = 2
    td3_gaussian_sigma: float = 0.2
    td3_random_action_prob: float = 0.3
    td3_warmup_steps: int = 1000
    env_horizon: int = 100
    env_terminate_on_success: bool = True
    env_clip_positions: bool = True

    def __post_init__(self):
        for name in (
            "update_every",
            "updates_per_cycle",
            "policy_data_multiplier",
            "batch_size",
            "buffer_capacity",
            "aug_m",
            "aug_every_n_observed",
            "eval_every_steps",
            "eval_episodes",
            "env_horizon",
        ):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.total_env_steps < 0:
            raise ValueError("total_env_steps must be >= 0")
        if self.aug_alpha < 0:
            raise ValueError("aug.alpha must be >= 0")
        DafSpec(self.daf_kind, self.daf_p)  # validates kind/p pairing
        if not self.td3_hidden_sizes:
            raise ValueError("td3.hidden_sizes must not be empty")

    # -- derived schedule quantities ------------------------------------

    @property
    def steps_per_cycle(self) -> int:
        return self.update_every * self.policy_data_multiplier

    @property
    def observed_replay_ratio(self) -> float:
        """Gradient updates per observed transition (= per env step)."""
        return self.updates_per_cycle / self.steps_per_cycle

    @property
    def augmentation_enabled(self) -> bool:
        return self.daf_kind != "none"

    @property
    def m_effective(self) -> float:
        """Augmented transitions generated per env step."""
        if not self.augmentation_enabled:
            return 0.0
        return self.aug_m / self.aug_every_n_observed

    @property
    def augmented_replay_ratio(self) -> float | None:
        """Beta: gradient updates per augmented transition generated."""
        if not self.augmentation_enabled:
            return None
        return self.observed_replay_ratio / self.m_effective

    @property
    def observed_capacity(self) -> int:
        rate = self.steps_per_cycle / self.updates_per_cycle
        return max(1, round(self.buffer_capacity * rate))

    @property
    def augmented_capacity(self) -> int:
        return max(1, round(self.observed_capacity * self.m_effective))

    @property
    def augmented_batch_size(self) -> int:
        return int(round(self.batch_size * self.aug_alpha))


@dataclass
class RunRecord:
    """Per-seed learning curve plus the accounting the analysis needs.

    rows are (env_steps, update_count, success_rate) checkpoints; the
    config echo and seed ride along so a CSV can be regrouped without any
    out-of-band bookkeeping. Wallclock stays in memory only: serialized
    records must be bit-identical across reruns.
    """

    config: TrainConfig
    seed: int
    rows: list[tuple[int, int, float]] = field(default_factory=list)
    wallclock: list[float] = field(default_factory=list)
    counters: dict[str, int] = field(default_factory=dict)


def evaluate(
    agent: Td3Agent, env: Goal2dEnv, episodes: int, rng: np.random.Generator
) -> float:
    """Greedy success rate over `episodes` lockstep episodes.

    No exploration noise, no learning side effects; success means reaching
    the goal before the horizon runs out.
    """
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    states = env.reset_batch(episodes, rng)
    active = np.ones(episodes, dtype=bool)
    succeeded = np.zeros(episodes, dtype=bool)
    for t in range(env.horizon):
        actions = greedy_actions_batch(agent, states)
        next_states, _, success = env.step_batch(states, actions, t)
        succeeded |= active & success
        if env.terminate_on_success:
            active &= ~success
        states = np.where(active[:, None], next_states, states)
        if not active.any():
            break
    return float(succeeded.mean())


def run_training(cfg: TrainConfig) -> RunRecord:
    """Execute one seeded training run and return its full curve.

    Randomness fans out from the seed into seven independent streams
    (net init, env resets, exploration, augmentation, batch sampling,
    evaluation, target smoothing) so ablations perturb exactly one stream.
    """
    seq = np.random.SeedSequence(cfg.seed)
    (net_ss, env_ss, explore_ss, daf_ss, batch_ss, eval_ss, noise_ss) = seq.spawn(7)
    env_rng = np.random.default_rng(env_ss)
    explore_rng = np.random.default_rng(explore_ss)
    daf_rng = np.random.default_rng(daf_ss)
    batch_rng = np.random.default_rng(batch_ss)
    eval_rng = np.random.default_rng(eval_ss)
    noise_rng = np.random.default_rng(noise_ss)

    env = Goal2dEnv(
        horizon=cfg.env_horizon,
        terminate_on_success=cfg.env_terminate_on_success,
        clip_positions=cfg.env_clip_positions,
    )
    agent = agent_init(
        net_ss,
        hidden_sizes=cfg.td3_hidden_sizes,
        gamma=cfg.td3_gamma,
        learning_rate=cfg.td3_learning_rate,
        tau=cfg.td3_tau,
        policy_noise_std=cfg.td3_policy_noise_std,
        noise_clip=cfg.td3_noise_clip,
        policy_delay=cfg.td3_policy_delay,
        gaussian_sigma=cfg.td3_gaussian_sigma,
        random_action_prob=cfg.td3_random_action_prob,
        warmup_steps=cfg.td3_warmup_steps,
        bootstrap_terminal_on_success=cfg.env_terminate_on_success,
    )
    spec = DafSpec(cfg.daf_kind, cfg.daf_p) if cfg.augmentation_enabled else None
    pair = ReplayPair(
        observed_capacity=cfg.observed_capacity,
        m=cfg.aug_m,
        alpha=cfg.aug_alpha,
        augmented_capacity=cfg.augmented_capacity,
    )

    record = RunRecord(config=cfg, seed=cfg.seed)
    counters = {
        "observed_inserted": 0,
        "augmented_inserted": 0,
        "observed_sampled": 0,
        "augmented_sampled": 0,
        "updates": 0,
    }
    start = time.perf_counter()

    def checkpoint(env_steps: int) -> None:
        rate = evaluate(agent, env, cfg.eval_episodes, eval_rng)
        record.rows.append((env_steps, agent.update_count, rate))
        record.wallclock.append(time.perf_counter() - start)

    checkpoint(0)
    state = env.reset(env_rng)
    episode_step = 0
    observed_since_aug = 0
    for step in range(cfg.total_env_steps):
        action = select_action(agent, state, step, explore_rng)
        next_state, reward, done = env.step(state, action, episode_step)
        transition = Transition(state, action, reward, next_state, done, episode_step)
        pair.observed.push(transition, agent.update_count)
        counters["observed_inserted"] += 1
        if spec is not None:
            observed_since_aug += 1
            if observed_since_aug == cfg.aug_every_n_observed:
                observed_since_aug = 0
                for out in augment(spec, transition, cfg.aug_m, daf_rng, env):
                    pair.augmented.push(out, agent.update_count)
                    counters["augmented_inserted"] += 1
        episode_step += 1
        if done:
            state = env.reset(env_rng)
            episode_step = 0
        else:
            state = next_state
        steps_done = step + 1
        if steps_done >= cfg.td3_warmup_steps and steps_done % cfg.steps_per_cycle == 0:
            for _ in range(cfg.updates_per_cycle):
                batch = combined_sample(pair, cfg.batch_size, batch_rng)
                td3_update(agent, batch, noise_rng)
                counters["updates"] += 1
                counters["observed_sampled"] += batch.n_observed
                counters["augmented_sampled"] += batch.n_augmented
        if steps_done % cfg.eval_every_steps == 0:
            checkpoint(steps_done)

    ages = replay_age_report(pair, agent.update_count)
    counters["oldest_observed_age"] = ages[0]
    counters["oldest_augmented_age"] = ages[1]
    record.counters = counters
    return record


def benchmark_variant(base_cfg: TrainConfig, variant: str) -> TrainConfig:
    """Equal-updates benchmark arms: 'xN' policy-data scaling or
    'x2-rotate' / 'x2-translate' doubling via augmentation.

    xN arms collect N transitions per update with batch and buffers scaled
    by N and the env-step budget stretched by N, so every arm performs the
    same number of gradient updates and sees checkpoints on the same
    update-count grid. The x2 DAF arms double each batch with augmented
    samples (m = 1, alpha = 1) at unchanged step budget.
    """
    if variant.startswith("x") and variant[1:].isdigit():
        n = int(variant[1:])
        if n < 1:
            raise ValueError(f"policy-data multiplier must be >= 1, got {n}")
        return replace(
            base_cfg,
            policy_data_multiplier=n,
            batch_size=base_cfg.batch_size * n,
            total_env_steps=base_cfg.total_env_steps * n,
            eval_every_steps=base_cfg.eval_every_steps * n,
            # warmup is counted in env steps; scaling it keeps every arm's
            # update count and checkpoint grid identical in update space
            td3_warmup_steps=base_cfg.td3_warmup_steps * n,
            daf_kind="none",
            daf_p=0.0,
            aug_alpha=0.0,
        )
    if variant in ("x2-rotate", "x2-translate"):
        return replace(
            base_cfg,
            policy_data_multiplier=1,
            daf_kind=variant.split("-")[1],
            daf_p=0.0,
            aug_m=1,
            aug_alpha=1.0,
        )
    raise ValueError(f"unknown benchmark variant {variant!r}")


def run_benchmark_protocol(base_cfg: TrainConfig, variant: str) -> RunRecord:
    return run_training(benchmark_variant(base_cfg, variant))
