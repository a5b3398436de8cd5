"""Ladder adaptation: single-state policy gradient and the Vousden scheme.

The policy is Gaussian over log-beta gaps, ``N(theta, eps_t * sigma * I)``,
with ``sigma`` a per-coordinate variance. ``eps_t`` decays exponentially so
that adaptation vanishes over time.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .tempering import D_MAX, D_MIN, LogDiffAction, TemperatureLadder

__all__ = [
    "PolicyState",
    "VousdenState",
    "epsilon_schedule",
    "sample_action",
    "policy_log_grad",
    "policy_step",
    "update_policy",
    "vousden_kappa",
    "vousden_update",
]


def epsilon_schedule(t: int, tau: float, floor: float = 0.0) -> float:
    """``max(exp(-t / tau), floor)``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if not tau > 0:
        raise ValueError("tau must be positive")
    return max(math.exp(-t / tau), floor)


@dataclass
class PolicyState:
    theta: np.ndarray
    sigma: float = 0.2
    alpha: float = 0.01
    tau: float = 1000.0
    eps_floor: float = 1e-6
    grad_clip: float = 1.0
    d_min: float = D_MIN
    d_max: float = D_MAX
    buffer_len: int = 500
    t: int = 0
    rewards: deque = field(default=None, repr=False)

    def __post_init__(self):
        self.theta = np.clip(np.array(self.theta, dtype=float).reshape(-1), self.d_min, self.d_max)
        if not self.sigma > 0 or not self.alpha > 0:
            raise ValueError("sigma and alpha must be positive")
        if not 0 < self.d_min < self.d_max:
            raise ValueError("need 0 < d_min < d_max")
        if self.rewards is None:
            self.rewards = deque(maxlen=self.buffer_len)

    @property
    def epsilon(self) -> float:
        return epsilon_schedule(self.t, self.tau, self.eps_floor)


def sample_action(policy: PolicyState, rng: np.random.Generator) -> LogDiffAction:
    """Draw ``theta + sqrt(eps_t * sigma) * z`` and clip it into the box."""
    z = rng.standard_normal(policy.theta.size)
    a = policy.theta + math.sqrt(policy.epsilon * policy.sigma) * z
    return LogDiffAction(np.clip(a, policy.d_min, policy.d_max), policy.d_min, policy.d_max)


def policy_log_grad(policy: PolicyState, action) -> np.ndarray:
    """Score of ``N(theta, sigma I)`` w.r.t. its mean: ``(a - theta) / sigma``.

    Deliberately not divided by ``eps_t``.
    """
    a = action.D if isinstance(action, LogDiffAction) else np.asarray(action, dtype=float)
    if a.shape != policy.theta.shape:
        raise ValueError("action and theta dimensions differ")
    return (a - policy.theta) / policy.sigma


def policy_step(theta, advantage, grad, alpha, grad_clip=1.0, d_min=D_MIN, d_max=D_MAX):
    """``clip(theta + alpha * advantage * clip(grad), d_min, d_max)``."""
    g = np.clip(grad, -grad_clip, grad_clip)
    return np.clip(theta + alpha * advantage * g, d_min, d_max)


def update_policy(policy: PolicyState, action, reward: float) -> float:
    """One gradient-ascent step on ``theta``. Mutates ``policy``.

    The reward joins the trailing buffer first, then is standardized
    against the buffer's mean and standard deviation. Returns that
    normalized advantage.
    """
    if not math.isfinite(reward):
        raise ValueError(f"reward must be finite, got {reward}")
    grad = policy_log_grad(policy, action)
    policy.rewards.append(float(reward))
    buf = np.fromiter(policy.rewards, dtype=float)
    spread = max(float(np.std(buf)), 1e-8)
    advantage = (reward - float(np.mean(buf))) / spread
    policy.theta = policy_step(
        policy.theta, advantage, grad, policy.alpha, policy.grad_clip, policy.d_min, policy.d_max
    )
    policy.t += 1
    return advantage


@dataclass
class VousdenState:
    """Log temperature gaps ``S_i = log(T_{i+1} - T_i)`` with ``T_1 = 1``."""

    S: np.ndarray
    kappa0: float = 1.0
    t0: float = 1000.0
    t: int = 0

    def __post_init__(self):
        self.S = np.array(self.S, dtype=float).reshape(-1)

    @classmethod
    def from_ladder(cls, ladder: TemperatureLadder, **kw) -> "VousdenState":
        if ladder.betas[-1] <= 0:
            raise ValueError("Vousden adapter needs a finite top temperature")
        return cls(np.log(np.diff(1.0 / ladder.betas)), **kw)

    def ladder(self) -> TemperatureLadder:
        temps = np.concatenate([[1.0], 1.0 + np.cumsum(np.exp(self.S))])
        betas = 1.0 / temps
        betas[0] = 1.0
        return TemperatureLadder(betas)


def vousden_kappa(t: float, kappa0: float, t0: float) -> float:
    return kappa0 * t0 / (t + t0)


def vousden_update(state: VousdenState, rates) -> VousdenState:
    """``S_i += kappa(t) * (A_i - A_{i+1})`` over adjacent-pair rates.

    The last gap has no right-hand neighbour; it is paired with itself,
    so only the interior gaps move. Mutates and returns ``state``.
    """
    rates = np.asarray(rates, dtype=float)
    if rates.shape != state.S.shape:
        raise ValueError(f"expected {state.S.size} pair rates, got {rates.size}")
    kappa = vousden_kappa(state.t, state.kappa0, state.t0)
    padded = np.append(rates, rates[-1:])
    state.S = state.S + kappa * (padded[:-1] - padded[1:])
    state.t += 1
    return state
