"""Reward functions over one observation window.

Three rewards are available:

* ``swap_mean_distance``: mean Euclidean distance between each state offered
  to the coldest chain and that cold walker's last ``m`` states. Every
  attempt counts toward the mean; by default a rejected attempt adds zero
  distance, since it leaves the cold walker where it was.
* ``esjd``: expected squared jump in beta, ``(beta_i - beta_{i+1})^2 * rate_i``,
  averaged over pairs.
* ``neg_acc_std``: minus the population standard deviation of the pair
  acceptance rates.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .tempering import PairSwaps, TemperatureLadder

__all__ = [
    "REWARD_KINDS",
    "OMEGA_REJECTED",
    "HistoryRing",
    "ColdHistory",
    "WindowStats",
    "swap_mean_distance",
    "reward_swap_mean_distance",
    "reward_esjd",
    "reward_neg_acc_std",
    "compute_reward",
]

REWARD_KINDS = ("swap_mean_distance", "esjd", "neg_acc_std")
OMEGA_REJECTED = ("zero", "proposed")


class HistoryRing:
    """The last ``m`` positions of one walker, most recent first."""

    def __init__(self, m: int = 50):
        if m < 1:
            raise ValueError("ring capacity must be positive")
        self.m = m
        self._buf: deque = deque(maxlen=m)

    def push(self, x) -> None:
        self._buf.appendleft(np.array(x, dtype=float))

    def __len__(self):
        return len(self._buf)

    def __iter__(self):
        return iter(self._buf)


def swap_mean_distance(ring: HistoryRing, y) -> float:
    """Mean distance from ``y`` to the stored history (partial rings average
    over what they hold)."""
    if len(ring) == 0:
        raise ValueError("history ring is empty")
    hist = np.stack(list(ring))
    y = np.asarray(y, dtype=float)
    if y.shape != hist.shape[1:]:
        raise ValueError("dimension of y does not match history")
    return float(np.mean(np.linalg.norm(hist - y, axis=1)))


class ColdHistory:
    """Vectorized history rings for every walker of the coldest ensemble."""

    def __init__(self, walkers: int, dim: int, m: int = 50):
        if m < 1:
            raise ValueError("ring capacity must be positive")
        self.m = m
        self.buf = np.zeros((walkers, m, dim))
        self.head = np.zeros(walkers, dtype=np.int64)
        self.count = np.zeros(walkers, dtype=np.int64)

    def push(self, walkers: np.ndarray, states: np.ndarray) -> None:
        """Append ``states[k]`` as the newest entry of ring ``walkers[k]``."""
        if len(walkers) == 0:
            return
        self.buf[walkers, self.head[walkers]] = states
        self.head[walkers] = (self.head[walkers] + 1) % self.m
        self.count[walkers] = np.minimum(self.count[walkers] + 1, self.m)

    def push_all(self, states: np.ndarray) -> None:
        self.push(np.arange(self.buf.shape[0]), states)

    def omega(self, walkers: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Swap mean-distance of ``ys[k]`` against ring ``walkers[k]``."""
        cnt = self.count[walkers]
        if np.any(cnt == 0):
            raise ValueError("history ring is empty")
        dist = np.linalg.norm(self.buf[walkers] - ys[:, None, :], axis=2)
        filled = np.arange(self.m)[None, :] < cnt[:, None]
        # rings fill slots 0..count-1 before wrapping, so the mask is exact
        return np.where(filled, dist, 0.0).sum(axis=1) / cnt


@dataclass
class WindowStats:
    """Everything a reward needs from one window of ``N`` steps."""

    ladder: TemperatureLadder
    rates: np.ndarray = None
    rejected: str = "zero"
    omegas: list = field(default_factory=list)
    cold_attempts: list = field(default_factory=list)

    def __post_init__(self):
        if self.rejected not in OMEGA_REJECTED:
            raise ValueError(f"rejected must be one of {OMEGA_REJECTED}")

    def record_cold_swaps(self, history: ColdHistory, swaps: PairSwaps) -> np.ndarray:
        """Score a pair-0 swap round against the rings, then write the states
        that were accepted into them. Returns the raw per-attempt distances."""
        if swaps.pair_index != 0:
            raise ValueError("only swaps with the coldest chain feed the rings")
        walkers = np.arange(len(swaps.hot_walkers))
        om = history.omega(walkers, swaps.proposed_states)
        self.omegas.append(om)
        self.cold_attempts.append(swaps)
        history.push(walkers[swaps.accepted], swaps.proposed_states[swaps.accepted])
        return om

    @property
    def omega_values(self) -> np.ndarray:
        """Per-attempt contributions to the reward, in attempt order."""
        if not self.omegas:
            return np.zeros(0)
        raw = np.concatenate(self.omegas)
        if self.rejected == "proposed":
            return raw
        accepted = np.concatenate([s.accepted for s in self.cold_attempts])
        return np.where(accepted, raw, 0.0)


def reward_swap_mean_distance(stats: WindowStats) -> float:
    vals = stats.omega_values
    if vals.size == 0:
        raise ValueError("no cold-chain swap attempts in this window")
    return float(np.mean(vals))


def reward_esjd(ladder: TemperatureLadder, rates) -> float:
    rates = np.asarray(rates, dtype=float)
    gaps = -np.diff(ladder.betas)
    if rates.shape != gaps.shape:
        raise ValueError(f"expected {gaps.size} pair rates, got {rates.size}")
    if gaps.size == 0:
        return 0.0
    return float(np.mean(gaps**2 * rates))


def reward_neg_acc_std(rates) -> float:
    rates = np.asarray(rates, dtype=float)
    if rates.size < 1:
        raise ValueError("need at least one acceptance rate")
    # shifting by rates[0] keeps equal rates exactly at zero spread
    return -float(np.std(rates - rates[0]))


def compute_reward(kind: str, stats: WindowStats) -> float:
    if kind == "swap_mean_distance":
        return reward_swap_mean_distance(stats)
    if kind == "esjd":
        return reward_esjd(stats.ladder, stats.rates)
    if kind == "neg_acc_std":
        return reward_neg_acc_std(stats.rates)
    raise ValueError(f"unknown reward kind {kind!r}")
