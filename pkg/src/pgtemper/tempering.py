"""Parallel tempering over stacked stretch-move ensembles.

Chain 0 is the coldest (beta = 1). Adjacent pairs are indexed from 0, so
pair ``p`` joins chains ``p`` and ``p + 1``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .ensemble import Ensemble, StretchConfig, SweepDraws, sweep_core
from .targets import TargetDistribution, uniform_init

__all__ = [
    "D_MIN",
    "D_MAX",
    "TemperatureLadder",
    "LogDiffAction",
    "PtState",
    "PairSwaps",
    "SwapRecord",
    "ladder_from_log_diffs",
    "log_diffs_of",
    "geometric_ladder",
    "swap_log_accept",
    "swap_round",
    "pt_step",
    "acceptance_rates",
    "make_pt_state",
]

D_MIN = 0.01
D_MAX = 10.0


@dataclass(frozen=True)
class TemperatureLadder:
    """Inverse temperatures ``1 = betas[0] > betas[1] > ... >= 0``."""

    betas: np.ndarray

    def __post_init__(self):
        b = np.array(self.betas, dtype=float).reshape(-1)
        if b.size == 0 or b[0] != 1.0:
            raise ValueError("ladder must start at beta = 1")
        if np.any(np.diff(b) >= 0):
            raise ValueError("ladder betas must be strictly decreasing")
        if b[-1] < 0:
            raise ValueError("ladder betas must be nonnegative")
        b.setflags(write=False)
        object.__setattr__(self, "betas", b)

    def __len__(self):
        return self.betas.size


@dataclass(frozen=True)
class LogDiffAction:
    """Log-beta gaps ``D_i = log beta_i - log beta_{i+1}`` inside ``[d_min, d_max]``."""

    D: np.ndarray
    d_min: float = D_MIN
    d_max: float = D_MAX

    def __post_init__(self):
        D = np.array(self.D, dtype=float).reshape(-1)
        if not 0 < self.d_min < self.d_max:
            raise ValueError("need 0 < d_min < d_max")
        if np.any((D < self.d_min) | (D > self.d_max)) or not np.all(np.isfinite(D)):
            raise ValueError(f"log-diffs must lie in [{self.d_min}, {self.d_max}]")
        D.setflags(write=False)
        object.__setattr__(self, "D", D)


def ladder_from_log_diffs(action, top_mode: str = "finite") -> TemperatureLadder:
    """Build betas by chaining ``beta_{i+1} = beta_i * exp(-D_i)`` from 1.

    ``top_mode="infinite"`` appends a final beta of 0.
    """
    D = action.D if isinstance(action, LogDiffAction) else np.asarray(action, dtype=float)
    betas = np.concatenate([[1.0], np.exp(-np.cumsum(D))])
    if top_mode == "infinite":
        betas = np.append(betas, 0.0)
    elif top_mode != "finite":
        raise ValueError(f"unknown top_mode {top_mode!r}")
    return TemperatureLadder(betas)


def log_diffs_of(ladder: TemperatureLadder) -> np.ndarray:
    """Inverse of :func:`ladder_from_log_diffs` over the positive betas."""
    b = ladder.betas[ladder.betas > 0]
    return -np.diff(np.log(b))


def geometric_ladder(M: int, beta_min: float) -> TemperatureLadder:
    """Constant-ratio ladder from 1 down to ``beta_min``."""
    if M < 2:
        raise ValueError("geometric ladder needs M >= 2")
    if not 0 < beta_min < 1:
        raise ValueError(f"beta_min must lie in (0, 1), got {beta_min}")
    frac = np.arange(M) / (M - 1)
    betas = np.exp(frac * np.log(beta_min))
    betas[0] = 1.0
    return TemperatureLadder(betas)


def swap_log_accept(logpi_x, logpi_y, beta_i, beta_j):
    """Log acceptance of exchanging ``x`` (colder chain, ``beta_i``) with ``y``
    (hotter chain, ``beta_j``): ``min(0, (beta_i - beta_j) (logpi_y - logpi_x))``.

    Any out-of-domain (``-inf``) state rejects the swap. Vectorizes over
    array inputs.
    """
    gap = beta_i - beta_j
    with np.errstate(invalid="ignore"):
        diff = np.subtract(logpi_y, logpi_x, dtype=float)
        val = np.minimum(0.0, gap * diff) if gap != 0 else np.zeros_like(diff)
    bad = ~(np.isfinite(logpi_x) & np.isfinite(logpi_y))
    if np.ndim(val) == 0:
        return -math.inf if bad else float(val)
    if bad.any():
        val[bad] = -np.inf
    return val


@dataclass(frozen=True)
class SwapRecord:
    pair_index: int
    cold_walker: int
    hot_walker: int
    accepted: bool
    proposed_state: np.ndarray


@dataclass
class PairSwaps:
    """All attempts for one adjacent pair in one swap round.

    Cold walker ``k`` was offered hot walker ``hot_walkers[k]``, whose state
    before the exchange is ``proposed_states[k]``.
    """

    pair_index: int
    hot_walkers: np.ndarray
    accepted: np.ndarray
    proposed_states: np.ndarray

    def records(self) -> Iterator[SwapRecord]:
        for k, (h, acc) in enumerate(zip(self.hot_walkers, self.accepted)):
            yield SwapRecord(self.pair_index, k, int(h), bool(acc), self.proposed_states[k])


@dataclass
class PtState:
    """Joint state of all tempered ensembles.

    ``positions`` is ``(M, walkers, dim)``; ``logpi`` caches the untempered
    log-density at every walker. ``rngs`` holds one generator per
    temperature slot so sweeps are reproducible under any scheduling.
    """

    ladder: TemperatureLadder
    positions: np.ndarray
    logpi: np.ndarray
    rngs: list
    swap_attempts: np.ndarray = None
    swap_accepts: np.ndarray = None
    step_count: int = 0

    def __post_init__(self):
        M = len(self.ladder)
        if self.positions.ndim != 3 or self.positions.shape[0] != M:
            raise ValueError("positions must be (M, walkers, dim) matching the ladder")
        if self.logpi.shape != self.positions.shape[:2]:
            raise ValueError("logpi must be (M, walkers)")
        if len(self.rngs) != M:
            raise ValueError("need one generator per temperature")
        if self.swap_attempts is None:
            self.reset_swap_stats()

    @property
    def M(self) -> int:
        return self.positions.shape[0]

    @property
    def walkers(self) -> int:
        return self.positions.shape[1]

    @property
    def dim(self) -> int:
        return self.positions.shape[2]

    @property
    def ensembles(self) -> list[Ensemble]:
        """Views onto each temperature's walkers; edits write through."""
        return [Ensemble(self.positions[i], self.logpi[i]) for i in range(self.M)]

    def set_ladder(self, ladder: TemperatureLadder) -> None:
        if len(ladder) != self.M:
            raise ValueError("new ladder must keep the number of temperatures")
        self.ladder = ladder

    def reset_swap_stats(self) -> None:
        self.swap_attempts = np.zeros(max(self.M - 1, 0), dtype=np.int64)
        self.swap_accepts = np.zeros(max(self.M - 1, 0), dtype=np.int64)


def make_pt_state(
    target: TargetDistribution,
    ladder: TemperatureLadder,
    walkers: int,
    init_rng: np.random.Generator,
    ensemble_rngs: Sequence[np.random.Generator],
) -> PtState:
    """Fresh state with walkers drawn uniformly over the target's domain."""
    if walkers < 2:
        raise ValueError("each ensemble needs at least 2 walkers")
    M = len(ladder)
    pos = uniform_init(target.domain, (M, walkers), init_rng)
    return PtState(ladder, pos, target.log_density_batch(pos), list(ensemble_rngs))


def swap_round(state: PtState, rng: np.random.Generator) -> list[PairSwaps]:
    """One swap attempt per walker for every adjacent pair, hottest pair first.

    Each pair gets a uniform random perfect matching between its two
    ensembles (argsort of uniform keys). Mutates ``state`` and returns the
    attempts in processing order.
    """
    M, W = state.M, state.walkers
    if M < 2:
        return []
    betas = state.ladder.betas
    u = rng.random((2, M - 1, W))
    perms = np.argsort(u[0], axis=1, kind="stable")
    with np.errstate(divide="ignore"):
        log_u = np.log(u[1])
    out = []
    for p in range(M - 2, -1, -1):
        hot = perms[p]
        lp_cold = state.logpi[p]
        lp_hot = state.logpi[p + 1, hot]
        accept = log_u[p] < swap_log_accept(lp_cold, lp_hot, betas[p], betas[p + 1])
        proposed = state.positions[p + 1, hot]
        if accept.any():
            cold_idx = np.flatnonzero(accept)
            hot_idx = hot[accept]
            x_cold = state.positions[p, cold_idx]
            l_cold = lp_cold[cold_idx]
            state.positions[p, cold_idx] = proposed[accept]
            state.logpi[p, cold_idx] = lp_hot[accept]
            state.positions[p + 1, hot_idx] = x_cold
            state.logpi[p + 1, hot_idx] = l_cold
        state.swap_attempts[p] += W
        state.swap_accepts[p] += int(accept.sum())
        out.append(PairSwaps(p, hot, accept, proposed))
    return out


_EXECUTORS: dict[int, ThreadPoolExecutor] = {}


def _executor(threads: int) -> ThreadPoolExecutor:
    if threads not in _EXECUTORS:
        _EXECUTORS[threads] = ThreadPoolExecutor(max_workers=threads)
    return _EXECUTORS[threads]


def sweep_all(
    state: PtState, target: TargetDistribution, cfg: StretchConfig, threads: int = 1
) -> np.ndarray:
    """One stretch sweep per ensemble at its own beta. Returns accept counts."""
    W = state.walkers
    if W < 2:
        raise ValueError("stretch move needs at least 2 walkers")
    u = np.empty((state.M, 3, W))
    for e, rng in enumerate(state.rngs):
        rng.random(out=u[e])
    draws = SweepDraws.from_uniforms(u, cfg.a)
    betas = state.ladder.betas
    if threads <= 1 or state.M == 1:
        return sweep_core(state.positions, state.logpi, betas, draws, target)
    chunks = np.array_split(np.arange(state.M), min(threads, state.M))

    def run(idx):
        lo, hi = idx[0], idx[-1] + 1
        sub = SweepDraws(draws.partners[lo:hi], draws.z[lo:hi], draws.log_u[lo:hi])
        return sweep_core(state.positions[lo:hi], state.logpi[lo:hi], betas[lo:hi], sub, target)

    return np.concatenate(list(_executor(threads).map(run, chunks)))


def pt_step(
    state: PtState,
    target: TargetDistribution,
    cfg: StretchConfig,
    rng: np.random.Generator,
    threads: int = 1,
) -> list[PairSwaps]:
    """Sweep every ensemble, then run one swap round. Mutates ``state``."""
    sweep_all(state, target, cfg, threads)
    swaps = swap_round(state, rng)
    state.step_count += 1
    return swaps


def acceptance_rates(state: PtState) -> np.ndarray:
    """Swap acceptance fraction for each adjacent pair since the last reset."""
    if state.M < 2:
        return np.zeros(0)
    if np.any(state.swap_attempts == 0):
        raise ValueError("no swap attempts recorded for some pair; observation window too short")
    return state.swap_accepts / state.swap_attempts
