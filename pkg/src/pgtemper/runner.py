"""Adaptive tempering runs: window loop, adapters, final sampling, records."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .adaptation import (
    PolicyState,
    VousdenState,
    sample_action,
    update_policy,
    vousden_update,
)
from .config import ExperimentConfig, config_hash
from .diagnostics import ShortChainError, integrated_act
from .ensemble import StretchConfig
from .rewards import ColdHistory, WindowStats, compute_reward
from .targets import EggBox, Rosenbrock, StandardNormal, TargetDistribution, make_gaussian_mixture
from .tempering import (
    PtState,
    TemperatureLadder,
    acceptance_rates,
    geometric_ladder,
    ladder_from_log_diffs,
    log_diffs_of,
    make_pt_state,
    swap_round,
    sweep_all,
)

__all__ = [
    "Streams",
    "IterationRow",
    "RunRecord",
    "Sampler",
    "build_target",
    "run_adaptive",
    "sample_frozen",
    "run_trial",
    "act_stats",
]


def build_target(cfg: ExperimentConfig) -> TargetDistribution:
    t = cfg.target
    if t.kind == "gaussian_mixture":
        return make_gaussian_mixture(t.seed, t.n, t.dim or 8, t.scales_are_std)
    if t.kind == "eggbox":
        return EggBox(t.dim or 5, t.beta_power or 1000.0)
    if t.kind == "rosenbrock":
        return Rosenbrock(t.a, t.b, t.c, t.beta_power or 1000.0, t.classic_first_term)
    if t.kind == "normal":
        return StandardNormal(t.dim or 1)
    raise ValueError(f"unknown target kind {t.kind!r}")


@dataclass
class Streams:
    """Independent generators derived from one seed."""

    init: np.random.Generator
    swap: np.random.Generator
    policy: np.random.Generator
    ensembles: list

    @classmethod
    def from_seed(cls, seed, M: int) -> "Streams":
        ss = np.random.SeedSequence(seed)
        init, swap, policy, ens = ss.spawn(4)
        gens = [np.random.default_rng(s) for s in ens.spawn(M)]
        return cls(
            np.random.default_rng(init),
            np.random.default_rng(swap),
            np.random.default_rng(policy),
            gens,
        )


class Sampler:
    """Tempered sampler plus the cold-walker history rings it feeds."""

    def __init__(
        self, target, ladder, walkers, m, streams: Streams, stretch_a=2.0, threads=1,
        omega_rejected="zero",
    ):
        self.target = target
        self.omega_rejected = omega_rejected
        self.streams = streams
        self.stretch = StretchConfig(stretch_a)
        self.threads = threads
        self.state: PtState = make_pt_state(target, ladder, walkers, streams.init, streams.ensembles)
        self.history = ColdHistory(walkers, target.dim, m)

    def step(self, stats: WindowStats | None = None):
        st = self.state
        sweep_all(st, self.target, self.stretch, self.threads)
        self.history.push_all(st.positions[0])
        swaps = swap_round(st, self.streams.swap)
        st.step_count += 1
        if swaps:
            cold = swaps[-1]
            if stats is not None:
                stats.record_cold_swaps(self.history, cold)
            else:
                self.history.push(np.flatnonzero(cold.accepted), cold.proposed_states[cold.accepted])
        return swaps

    def begin_window(self, ladder: TemperatureLadder) -> WindowStats:
        self.state.set_ladder(ladder)
        self.state.reset_swap_stats()
        return WindowStats(ladder, rejected=self.omega_rejected)

    def end_window(self, stats: WindowStats) -> WindowStats:
        stats.rates = acceptance_rates(self.state)
        return stats

    def window(self, ladder: TemperatureLadder, steps: int) -> WindowStats:
        stats = self.begin_window(ladder)
        for _ in range(steps):
            self.step(stats)
        return self.end_window(stats)


@dataclass
class IterationRow:
    t: int
    epsilon: float
    reward: float
    advantage: float
    D: np.ndarray
    betas: np.ndarray
    rates: np.ndarray


@dataclass
class RunRecord:
    """Output of one trial.

    ``rows`` keep every ``thinning``-th iteration plus the last one. ``D`` in
    a row is the adapted parameter after that iteration's update; ``betas``
    and ``rates`` describe the ladder that was actually run.
    """

    initial_D: np.ndarray
    initial_betas: np.ndarray
    rows: list = field(default_factory=list)
    final_ladder: TemperatureLadder = None
    final_D: np.ndarray = None
    cold_positions: np.ndarray = None
    cold_logpi: np.ndarray = None
    summary: dict = field(default_factory=dict)
    sampler: Sampler = field(default=None, repr=False)


class _PolicyGradient:
    def __init__(self, cfg: ExperimentConfig, streams: Streams):
        p = cfg.pg
        self.cfg = cfg
        self.rng = streams.policy
        self.policy = PolicyState(
            theta=np.full(cfg.n_log_diffs, p.theta0),
            sigma=p.sigma,
            alpha=p.alpha,
            tau=cfg.epsilon_tau,
            eps_floor=p.epsilon_floor,
            grad_clip=p.grad_clip,
            d_min=p.d_min,
            d_max=p.d_max,
            buffer_len=p.buffer_len,
        )

    def current(self):
        return ladder_from_log_diffs(self.policy.theta, self.cfg.top_mode)

    def propose(self):
        self.epsilon = self.policy.epsilon
        self.action = sample_action(self.policy, self.rng)
        return ladder_from_log_diffs(self.action, self.cfg.top_mode)

    def observe(self, stats, reward):
        adv = update_policy(self.policy, self.action, reward)
        return self.epsilon, adv, self.policy.theta.copy()


class _Vousden:
    def __init__(self, cfg: ExperimentConfig, streams: Streams):
        start = geometric_ladder(cfg.M, cfg.geometric_beta_min)
        self.vs = VousdenState.from_ladder(start, kappa0=cfg.vousden.kappa0, t0=cfg.vousden.t0)

    def current(self):
        return self.vs.ladder()

    propose = current

    def observe(self, stats, reward):
        vousden_update(self.vs, stats.rates)
        return math.nan, math.nan, log_diffs_of(self.vs.ladder())


class _Geometric:
    def __init__(self, cfg: ExperimentConfig, streams: Streams):
        self.ladder = geometric_ladder(cfg.M, cfg.geometric_beta_min)

    def current(self):
        return self.ladder

    propose = current

    def observe(self, stats, reward):
        return math.nan, math.nan, log_diffs_of(self.ladder)


_ADAPTERS = {"policy_gradient": _PolicyGradient, "vousden": _Vousden, "geometric": _Geometric}


def run_adaptive(
    cfg: ExperimentConfig,
    seed: int | None = None,
    target: TargetDistribution | None = None,
    reward_fn=None,
) -> RunRecord:
    """Adapt the ladder for ``schedule.L`` windows of ``schedule.N`` steps.

    The chains are never reset between windows. ``reward_fn(stats)``
    overrides the configured reward kind.
    """
    seed = cfg.seed if seed is None else seed
    target = target or build_target(cfg)
    streams = Streams.from_seed(seed, cfg.M)
    adapter = _ADAPTERS[cfg.adapter](cfg, streams)
    start = adapter.current()
    sampler = Sampler(
        target, start, cfg.walkers, cfg.m, streams, cfg.stretch_a, cfg.threads, cfg.omega_rejected
    )
    record = RunRecord(initial_D=log_diffs_of(start), initial_betas=start.betas.copy())
    L, N = cfg.schedule.L, cfg.schedule.N
    for t in range(1, L + 1):
        ladder = adapter.propose()
        stats = sampler.window(ladder, N)
        reward = reward_fn(stats) if reward_fn else compute_reward(cfg.reward, stats)
        eps, adv, D = adapter.observe(stats, reward)
        if t % cfg.thinning == 0 or t == L:
            record.rows.append(
                IterationRow(t, eps, reward, adv, np.asarray(D), ladder.betas.copy(), stats.rates)
            )
    record.final_ladder = adapter.current()
    record.final_D = log_diffs_of(record.final_ladder)
    record.sampler = sampler
    return record


def sample_frozen(sampler: Sampler, ladder: TemperatureLadder, steps: int):
    """Run ``steps`` steps at a fixed ladder; return cold positions, cold
    log-densities and the pair acceptance rates over those steps."""
    st = sampler.state
    st.set_ladder(ladder)
    st.reset_swap_stats()
    pos = np.empty((steps, st.walkers, st.dim))
    lp = np.empty((steps, st.walkers))
    for k in range(steps):
        sampler.step()
        pos[k] = st.positions[0]
        lp[k] = st.logpi[0]
    rates = acceptance_rates(st) if steps else np.full(st.M - 1, np.nan)
    return pos, lp, rates


def act_stats(trace: np.ndarray, window_c: float = 5.0):
    """Mean ACT over (walker, coordinate) series and how many series had no
    self-consistent window (those contribute their truncated estimate)."""
    taus, truncated = [], 0
    for w in range(trace.shape[1]):
        for k in range(trace.shape[2]):
            series = trace[:, w, k]
            try:
                taus.append(integrated_act(series, window_c, strict=True))
            except ShortChainError:
                truncated += 1
                taus.append(integrated_act(series, window_c, strict=False))
            except ValueError:
                # constant series: the walker never moved
                truncated += 1
                taus.append(math.inf)
    return float(np.mean(taus)), truncated


def run_trial(cfg: ExperimentConfig, seed: int, trial: int = 0) -> RunRecord:
    """Adapt, then sample ``final_samples`` steps at the final ladder."""
    target = build_target(cfg)
    rec = run_adaptive(cfg, seed, target)
    pos, lp, rates = sample_frozen(rec.sampler, rec.final_ladder, cfg.schedule.final_samples)
    rec.cold_positions, rec.cold_logpi = pos, lp
    if cfg.schedule.final_samples >= 50:
        mact, trunc = act_stats(pos, cfg.act_window_c)
    else:
        mact, trunc = math.nan, 0
    rec.summary = {
        "config_hash": config_hash(cfg),
        "trial": trial,
        "seed": seed,
        "adapter": cfg.adapter,
        "reward": cfg.reward,
        "target": cfg.target.kind,
        "mean_act": mact,
        "act_truncated_series": trunc,
        "final_betas": rec.final_ladder.betas.tolist(),
        "final_log_diffs": rec.final_D.tolist(),
        "final_rates": np.asarray(rates).tolist(),
        "iterations": cfg.schedule.L,
        "steps_per_iteration": cfg.schedule.N,
        "final_samples": cfg.schedule.final_samples,
    }
    return rec
