"""Goal2D: a bounded 2-D arena where an agent steers toward a random goal.

State is (agent x, agent y, goal x, goal y) in [-1, 1]^4. An action
(r, theta) moves the agent at most 0.05 units in direction theta. Reward is
+1 when the position after the move lies within 0.05 of the goal and -0.1
otherwise; reward is always evaluated on the next state. Episodes run at
most `horizon` steps and, by default, end immediately on success.

Dynamics are deterministic, so a transition can be validated by replaying
it; the augmentation code leans on that through `is_valid`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ARENA_LOW = -1.0
ARENA_HIGH = 1.0
STEP_SCALE = 0.05
SUCCESS_RADIUS = 0.05
REWARD_SUCCESS = 1.0
REWARD_MISS = -0.1
DEFAULT_HORIZON = 100

# flattened transition layout used by the replay buffers and batches
ROW_WIDTH = 13
COL_STATE = slice(0, 4)
COL_ACTION = slice(4, 6)
COL_REWARD = 6
COL_NEXT_STATE = slice(7, 11)
COL_DONE = 11
COL_TIMESTEP = 12


@dataclass
class Goal2dState:
    agent_pos: np.ndarray  # shape (2,)
    goal_pos: np.ndarray  # shape (2,)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.agent_pos, self.goal_pos])


@dataclass
class Goal2dAction:
    r: float
    theta: float


@dataclass
class Transition:
    state: Goal2dState
    action: Goal2dAction
    reward: float
    next_state: Goal2dState
    done: bool
    timestep: int

    def to_row(self) -> np.ndarray:
        row = np.empty(ROW_WIDTH)
        row[COL_STATE] = self.state.as_vector()
        row[4] = self.action.r
        row[5] = self.action.theta
        row[COL_REWARD] = self.reward
        row[COL_NEXT_STATE] = self.next_state.as_vector()
        row[COL_DONE] = 1.0 if self.done else 0.0
        row[COL_TIMESTEP] = float(self.timestep)
        return row

    @staticmethod
    def from_row(row: np.ndarray) -> "Transition":
        return Transition(
            state=Goal2dState(row[0:2].copy(), row[2:4].copy()),
            action=Goal2dAction(float(row[4]), float(row[5])),
            reward=float(row[COL_REWARD]),
            next_state=Goal2dState(row[7:9].copy(), row[9:11].copy()),
            done=bool(row[COL_DONE] != 0.0),
            timestep=int(row[COL_TIMESTEP]),
        )


class Goal2dEnv:
    """Stateless dynamics bundle; episode state lives with the caller."""

    def __init__(
        self,
        horizon: int = DEFAULT_HORIZON,
        terminate_on_success: bool = True,
        clip_positions: bool = True,
    ):
        if horizon < 1:
            raise ValueError("horizon must be >= 1")
        self.horizon = horizon
        self.terminate_on_success = terminate_on_success
        self.clip_positions = clip_positions

    def reset(self, rng: np.random.Generator) -> Goal2dState:
        """Agent and goal drawn i.i.d. uniform on the arena."""
        agent = rng.uniform(ARENA_LOW, ARENA_HIGH, size=2)
        goal = rng.uniform(ARENA_LOW, ARENA_HIGH, size=2)
        return Goal2dState(agent, goal)

    def reset_batch(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """n state vectors at once, for lockstep evaluation rollouts."""
        return rng.uniform(ARENA_LOW, ARENA_HIGH, size=(n, 4))

    def step(
        self, state: Goal2dState, action: Goal2dAction, step_index: int
    ) -> tuple[Goal2dState, float, bool]:
        r = min(1.0, max(-1.0, action.r))
        theta = min(math.pi, max(-math.pi, action.theta))
        nx = state.agent_pos[0] + STEP_SCALE * r * math.cos(theta)
        ny = state.agent_pos[1] + STEP_SCALE * r * math.sin(theta)
        if self.clip_positions:
            nx = min(ARENA_HIGH, max(ARENA_LOW, nx))
            ny = min(ARENA_HIGH, max(ARENA_LOW, ny))
        next_state = Goal2dState(np.array([nx, ny]), state.goal_pos.copy())
        reward = self.reward_of(next_state)
        success = reward == REWARD_SUCCESS
        timeout = step_index + 1 >= self.horizon
        done = (success and self.terminate_on_success) or timeout
        return next_state, reward, done

    def step_batch(
        self, states: np.ndarray, actions: np.ndarray, step_index: int
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Vectorized step on (n,4) state vectors and (n,2) env-unit actions.

        Returns (next_states, rewards, success). Timeout handling stays with
        the caller, which tracks the episode clock.
        """
        r = np.clip(actions[:, 0], -1.0, 1.0)
        theta = np.clip(actions[:, 1], -math.pi, math.pi)
        next_states = states.copy()
        next_states[:, 0] = states[:, 0] + STEP_SCALE * r * np.cos(theta)
        next_states[:, 1] = states[:, 1] + STEP_SCALE * r * np.sin(theta)
        if self.clip_positions:
            np.clip(next_states[:, 0:2], ARENA_LOW, ARENA_HIGH, out=next_states[:, 0:2])
        d = next_states[:, 0:2] - next_states[:, 2:4]
        dist = np.sqrt(d[:, 0] ** 2 + d[:, 1] ** 2)
        success = dist <= SUCCESS_RADIUS
        rewards = np.where(success, REWARD_SUCCESS, REWARD_MISS)
        return next_states, rewards, success

    @staticmethod
    def reward_of(next_state: Goal2dState) -> float:
        dx = next_state.agent_pos[0] - next_state.goal_pos[0]
        dy = next_state.agent_pos[1] - next_state.goal_pos[1]
        if math.hypot(dx, dy) <= SUCCESS_RADIUS:
            return REWARD_SUCCESS
        return REWARD_MISS

    def is_valid(self, t: Transition, tol: float = 1e-9) -> bool:
        """A transition is valid when the dynamics can reproduce it.

        Replaying (state, action) must land on next_state within tol (L-inf),
        the stored reward must match the reward of the stored next state, and
        the goal must not move within the transition.
        """
        replayed, _, _ = self.step(t.state, t.action, t.timestep)
        if np.max(np.abs(replayed.agent_pos - t.next_state.agent_pos)) > tol:
            return False
        if t.reward != self.reward_of(t.next_state):
            return False
        if np.max(np.abs(t.state.goal_pos - t.next_state.goal_pos)) > tol:
            return False
        return True
