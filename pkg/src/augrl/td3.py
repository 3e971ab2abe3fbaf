"""TD3 learner: twin critics, target policy smoothing, delayed actor.

The actor emits two pre-squash values; tanh maps them onto the normalized
action square [-1, 1]^2, which scales to (r, theta) = (a0, pi * a1).
Critics consume state plus the normalized action. Mixed observed+augmented
batches arrive via replay.TransitionBatch and are treated uniformly.

Bootstrapping is time-limit aware: reaching the goal is terminal (the
target cuts to zero there), while running out the episode clock is not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import nets
from .env import REWARD_SUCCESS, Goal2dAction, Goal2dState
from .replay import TransitionBatch

STATE_DIM = 4
ACTION_DIM = 2


@dataclass
class Td3Agent:
    actor: nets.Mlp
    actor_target: nets.Mlp
    critic1: nets.Mlp
    critic2: nets.Mlp
    critic1_target: nets.Mlp
    critic2_target: nets.Mlp
    adam_actor: nets.AdamState
    adam_critic1: nets.AdamState
    adam_critic2: nets.AdamState
    gamma: float
    tau: float
    policy_noise_std: float
    noise_clip: float
    policy_delay: int
    gaussian_sigma: float
    random_action_prob: float
    warmup_steps: int
    bootstrap_terminal_on_success: bool = True
    update_count: int = 0


def agent_init(
    seed: np.random.SeedSequence | int,
    hidden_sizes: tuple[int, ...] = (256, 256),
    gamma: float = 0.99,
    learning_rate: float = 1e-3,
    tau: float = 0.95,
    policy_noise_std: float = 0.2,
    noise_clip: float = 0.5,
    policy_delay: int = 2,
    gaussian_sigma: float = 0.2,
    random_action_prob: float = 0.3,
    warmup_steps: int = 1000,
    bootstrap_terminal_on_success: bool = True,
) -> Td3Agent:
    """Build a fresh agent; actor and both critics get distinct sub-seeds."""
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma}")
    if policy_delay < 1:
        raise ValueError("policy_delay must be >= 1")
    if not 0.0 <= random_action_prob <= 1.0:
        raise ValueError("random_action_prob must lie in [0, 1]")
    seq = np.random.SeedSequence(seed) if isinstance(seed, int) else seed
    actor_seed, c1_seed, c2_seed = seq.spawn(3)
    actor = nets.mlp_init(
        (STATE_DIM, *hidden_sizes, ACTION_DIM),
        np.random.default_rng(actor_seed),
        output_activation="tanh",
    )
    critic_sizes = (STATE_DIM + ACTION_DIM, *hidden_sizes, 1)
    critic1 = nets.mlp_init(critic_sizes, np.random.default_rng(c1_seed))
    critic2 = nets.mlp_init(critic_sizes, np.random.default_rng(c2_seed))
    return Td3Agent(
        actor=actor,
        actor_target=nets.clone_as_target(actor),
        critic1=critic1,
        critic2=critic2,
        critic1_target=nets.clone_as_target(critic1),
        critic2_target=nets.clone_as_target(critic2),
        adam_actor=nets.adam_init(actor, learning_rate),
        adam_critic1=nets.adam_init(critic1, learning_rate),
        adam_critic2=nets.adam_init(critic2, learning_rate),
        gamma=gamma,
        tau=tau,
        policy_noise_std=policy_noise_std,
        noise_clip=noise_clip,
        policy_delay=policy_delay,
        gaussian_sigma=gaussian_sigma,
        random_action_prob=random_action_prob,
        warmup_steps=warmup_steps,
        bootstrap_terminal_on_success=bootstrap_terminal_on_success,
    )


def normalize_actions(actions: np.ndarray) -> np.ndarray:
    """Map env-unit actions (r, theta) onto the [-1, 1]^2 critic input."""
    out = actions.copy()
    out[..., 1] *= 1.0 / math.pi
    return out


def to_env_action(a_norm: np.ndarray) -> Goal2dAction:
    return Goal2dAction(float(a_norm[0]), float(a_norm[1]) * math.pi)


def select_action(
    agent: Td3Agent, state: Goal2dState, env_step: int, rng: np.random.Generator
) -> Goal2dAction:
    """Exploration policy: uniform during warmup, then epsilon-uniform over
    the noisy actor."""
    if env_step < agent.warmup_steps:
        return Goal2dAction(rng.uniform(-1.0, 1.0), rng.uniform(-math.pi, math.pi))
    if rng.random() < agent.random_action_prob:
        return Goal2dAction(rng.uniform(-1.0, 1.0), rng.uniform(-math.pi, math.pi))
    a = nets.mlp_forward(agent.actor, state.as_vector())
    a = a + rng.normal(0.0, agent.gaussian_sigma, size=ACTION_DIM)
    a = np.clip(a, -1.0, 1.0)
    return to_env_action(a)


def greedy_actions_batch(agent: Td3Agent, state_vectors: np.ndarray) -> np.ndarray:
    """Noise-free env-unit actions for a batch of state vectors; eval path."""
    a = nets.mlp_forward(agent.actor, state_vectors)
    out = a.copy()
    out[:, 1] *= math.pi
    return out


def compute_targets(
    agent: Td3Agent, batch: TransitionBatch, rng: np.random.Generator
) -> np.ndarray:
    """TD targets y = r + gamma * continue * min(Q1', Q2') at the smoothed
    target action.

    `continue` is 0 exactly on success transitions (the only absorbing
    outcome); timeouts bootstrap as usual.
    """
    n = len(batch)
    if n == 0:
        raise ValueError("cannot compute targets for an empty batch")
    next_states = batch.next_states
    a_next = nets.mlp_forward(agent.actor_target, next_states)
    noise = rng.normal(0.0, agent.policy_noise_std, size=(n, ACTION_DIM))
    np.clip(noise, -agent.noise_clip, agent.noise_clip, out=noise)
    a_smoothed = np.clip(a_next + noise, -1.0, 1.0)
    sa = np.concatenate([next_states, a_smoothed], axis=1)
    q1 = nets.mlp_forward(agent.critic1_target, sa)[:, 0]
    q2 = nets.mlp_forward(agent.critic2_target, sa)[:, 0]
    q_min = np.minimum(q1, q2)
    rewards = batch.rewards
    if agent.bootstrap_terminal_on_success:
        cont = (rewards != REWARD_SUCCESS).astype(np.float64)
    else:
        cont = np.ones(n)
    y = rewards + agent.gamma * cont * q_min
    if not np.all(np.isfinite(y)):
        raise FloatingPointError("non-finite TD target")
    return y


def td3_update(
    agent: Td3Agent, batch: TransitionBatch, rng: np.random.Generator
) -> dict:
    """One gradient step: both critics regress to the TD targets; every
    policy_delay-th call the actor ascends critic1 and all targets polyak.

    Increments agent.update_count by exactly 1; that counter is the unit of
    replay age and of every replay-ratio computation.
    """
    n = len(batch)
    y = compute_targets(agent, batch, rng)
    sa = np.concatenate([batch.states, normalize_actions(batch.actions)], axis=1)
    critic_loss = 0.0
    q_mean = 0.0
    for i, (critic, adam) in enumerate(
        ((agent.critic1, agent.adam_critic1), (agent.critic2, agent.adam_critic2))
    ):
        pred, cache = nets.forward_cached(critic, sa)
        err = pred[:, 0] - y
        critic_loss += float(np.mean(err * err))
        if i == 0:
            q_mean = float(np.mean(pred))
        upstream = (2.0 / n) * err[:, None]
        grads, _ = nets.backward_from_cache(critic, cache, upstream)
        nets.adam_step(adam, critic, grads)
    agent.update_count += 1
    metrics = {"critic_loss": critic_loss, "actor_loss": None, "q_mean": q_mean}
    if agent.update_count % agent.policy_delay == 0:
        a_pred, a_cache = nets.forward_cached(agent.actor, batch.states)
        sa_pi = np.concatenate([batch.states, a_pred], axis=1)
        q_pred, q_cache = nets.forward_cached(agent.critic1, sa_pi)
        metrics["actor_loss"] = -float(np.mean(q_pred))
        # d(-mean q)/d input; only the action slice feeds the actor
        upstream_q = np.full((n, 1), -1.0 / n)
        _, input_grad = nets.backward_from_cache(agent.critic1, q_cache, upstream_q)
        actor_grads, _ = nets.backward_from_cache(
            agent.actor, a_cache, input_grad[:, STATE_DIM:]
        )
        nets.adam_step(agent.adam_actor, agent.actor, actor_grads)
        nets.polyak_update(agent.actor_target, agent.actor, agent.tau)
        nets.polyak_update(agent.critic1_target, agent.critic1, agent.tau)
        nets.polyak_update(agent.critic2_target, agent.critic2, agent.tau)
    return metrics
