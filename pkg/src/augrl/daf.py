"""Dynamics-invariant augmentation functions for Goal2D transitions.

Each function maps one valid transition to a new transition that the
dynamics could itself have produced (checked by `Goal2dEnv.is_valid`):

- rotate: quarter-turn the whole scene about the origin. Exact, since the
  arena is symmetric under multiples of pi/2.
- translate: relocate the agent's (position, next position) pair rigidly to
  a uniformly random spot; reward and done are recomputed.
- translate_proximal: like translate, but the new next position lands
  within the success radius of the goal with probability exactly p.

All randomness flows through the caller's Generator, so augmentation has
its own replayable stream inside a training run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .env import (
    ARENA_HIGH,
    ARENA_LOW,
    Goal2dAction,
    Goal2dEnv,
    Goal2dState,
    REWARD_SUCCESS,
    STEP_SCALE,
    SUCCESS_RADIUS,
    Transition,
)

KINDS = ("rotate", "translate", "translate_proximal", "none")

MAX_REJECTION_DRAWS = 1000

HALF_PI = math.pi / 2.0


class DafSamplingError(RuntimeError):
    """Rejection sampling failed to find an in-bounds placement."""


@dataclass(frozen=True)
class DafSpec:
    """Which augmentation to run; p is the reward-signal probability and is
    meaningful only for translate_proximal."""

    kind: str
    p: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"daf.kind must be one of {KINDS}, got {self.kind!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"daf.p must lie in [0, 1], got {self.p}")
        if self.kind != "translate_proximal" and self.p != 0.0:
            raise ValueError(f"daf.p is only meaningful for translate_proximal")


def wrap_angle(a: float) -> float:
    """Map an angle into [-pi, pi)."""
    return (a + math.pi) % (2.0 * math.pi) - math.pi


def _rotate_quarter(xy: np.ndarray, k: int) -> np.ndarray:
    """Rotate (x, y) about the origin by k quarter turns, exactly."""
    x, y = xy[0], xy[1]
    if k == 1:
        return np.array([-y, x])
    if k == 2:
        return np.array([-x, -y])
    return np.array([y, -x])  # k == 3


def rotate(t: Transition, rng: np.random.Generator, env: Goal2dEnv) -> Transition:
    """Quarter-turn the scene by theta drawn from {pi/2, pi, 3pi/2}.

    Positions rotate exactly (coordinate swaps and sign flips), the action
    angle picks up the same rotation, and reward/done carry over unchanged
    because the geometry is preserved.
    """
    return rotate_by_quarter(t, int(rng.integers(1, 4)))


def rotate_by_quarter(t: Transition, k: int) -> Transition:
    """Rotate by exactly k quarter turns, k in {1, 2, 3}."""
    if k not in (1, 2, 3):
        raise ValueError(f"k must be 1, 2 or 3, got {k}")
    new_theta = wrap_angle(t.action.theta + k * HALF_PI)
    return Transition(
        state=Goal2dState(
            _rotate_quarter(t.state.agent_pos, k), _rotate_quarter(t.state.goal_pos, k)
        ),
        action=Goal2dAction(t.action.r, new_theta),
        reward=t.reward,
        next_state=Goal2dState(
            _rotate_quarter(t.next_state.agent_pos, k),
            _rotate_quarter(t.next_state.goal_pos, k),
        ),
        done=t.done,
        timestep=t.timestep,
    )


def _intended_displacement(action: Goal2dAction) -> np.ndarray:
    """Displacement the action commands, before any arena clipping.

    Using the commanded displacement (rather than next minus current
    position) keeps the relocated pair replayable even when the source
    transition was clipped at the arena boundary.
    """
    r = min(1.0, max(-1.0, action.r))
    theta = min(math.pi, max(-math.pi, action.theta))
    return np.array(
        [STEP_SCALE * r * math.cos(theta), STEP_SCALE * r * math.sin(theta)]
    )


def _in_arena(xy: np.ndarray) -> bool:
    return (
        ARENA_LOW <= xy[0] <= ARENA_HIGH and ARENA_LOW <= xy[1] <= ARENA_HIGH
    )


def _relocated(t: Transition, new_next: np.ndarray, delta: np.ndarray,
               env: Goal2dEnv) -> Transition:
    """Assemble the rigidly shifted transition at next-position new_next."""
    next_state = Goal2dState(new_next, t.state.goal_pos.copy())
    state = Goal2dState(new_next - delta, t.state.goal_pos.copy())
    reward = env.reward_of(next_state)
    success = reward == REWARD_SUCCESS
    timeout = t.timestep + 1 >= env.horizon
    done = (success and env.terminate_on_success) or timeout
    return Transition(state, t.action, reward, next_state, done, t.timestep)


def translate(t: Transition, rng: np.random.Generator, env: Goal2dEnv) -> Transition:
    """Relocate the transition so the next position is uniform on the arena.

    The new current position is back-derived as next minus the commanded
    displacement and must itself be in bounds, enforced by rejection
    (acceptance >= 0.9 since the displacement norm is at most 0.05).
    """
    delta = _intended_displacement(t.action)
    for _ in range(MAX_REJECTION_DRAWS):
        new_next = rng.uniform(ARENA_LOW, ARENA_HIGH, size=2)
        if _in_arena(new_next - delta):
            return _relocated(t, new_next, delta, env)
    raise DafSamplingError("translate: no in-bounds placement found")


def _dist_to_goal(xy: np.ndarray, goal: np.ndarray) -> float:
    return math.hypot(xy[0] - goal[0], xy[1] - goal[1])


def translate_proximal(
    spec: DafSpec, t: Transition, rng: np.random.Generator, env: Goal2dEnv
) -> Transition:
    """Translate, but force the reward sign: with probability p the new next
    position lands in the success disc about the goal, otherwise uniformly
    outside it.

    The branch is drawn once so the signal rate is exactly p; rejection
    within a branch never crosses over.
    """
    if spec.kind != "translate_proximal":
        raise ValueError(f"expected translate_proximal spec, got {spec.kind!r}")
    delta = _intended_displacement(t.action)
    goal = t.state.goal_pos
    signal = rng.random() < spec.p
    for _ in range(MAX_REJECTION_DRAWS):
        if signal:
            # uniform on the closed success disc: sqrt-radius polar sampling
            radius = SUCCESS_RADIUS * math.sqrt(rng.random())
            angle = rng.uniform(-math.pi, math.pi)
            new_next = np.array(
                [goal[0] + radius * math.cos(angle), goal[1] + radius * math.sin(angle)]
            )
            ok = _in_arena(new_next) and _dist_to_goal(new_next, goal) <= SUCCESS_RADIUS
        else:
            new_next = rng.uniform(ARENA_LOW, ARENA_HIGH, size=2)
            ok = _dist_to_goal(new_next, goal) > SUCCESS_RADIUS
        if ok and _in_arena(new_next - delta):
            return _relocated(t, new_next, delta, env)
    raise DafSamplingError("translate_proximal: no in-bounds placement found")


def apply_daf(
    spec: DafSpec, t: Transition, rng: np.random.Generator, env: Goal2dEnv
) -> Transition:
    if spec.kind == "rotate":
        return rotate(t, rng, env)
    if spec.kind == "translate":
        return translate(t, rng, env)
    if spec.kind == "translate_proximal":
        return translate_proximal(spec, t, rng, env)
    raise ValueError(f"cannot apply daf of kind {spec.kind!r}")


def augment(
    spec: DafSpec,
    t: Transition,
    m: int,
    rng: np.random.Generator,
    env: Goal2dEnv,
) -> list[Transition]:
    """m independent draws of the augmentation; duplicates are permitted."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return [apply_daf(spec, t, rng, env) for _ in range(m)]


def random_valid_transition(
    rng: np.random.Generator, env: Goal2dEnv
) -> Transition:
    """A transition the dynamics actually produced, from random state/action."""
    state = env.reset(rng)
    action = Goal2dAction(rng.uniform(-1.0, 1.0), rng.uniform(-math.pi, math.pi))
    step_index = int(rng.integers(0, env.horizon))
    next_state, reward, done = env.step(state, action, step_index)
    return Transition(state, action, reward, next_state, done, step_index)


def closure_report(
    spec: DafSpec,
    n: int,
    rng: np.random.Generator,
    env: Goal2dEnv,
    tol: float = 1e-9,
) -> tuple[int, int]:
    """(checked, failed) counts of is_valid over n random augmented draws."""
    failed = 0
    for _ in range(n):
        t = random_valid_transition(rng, env)
        out = apply_daf(spec, t, rng, env)
        if not env.is_valid(out, tol=tol):
            failed += 1
    return n, failed
