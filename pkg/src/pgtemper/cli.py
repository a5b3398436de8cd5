"""Command-line experiment runner.

    pgtemper run CONFIG.json [--out DIR] [--seed N] [--trials N] [--threads N]
    pgtemper baseline CONFIG.json ...
    pgtemper correlate CONFIG.json ...
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import outputs
from .config import ConfigError, ExperimentConfig, config_hash, load_config, validate
from .diagnostics import nll_trace, spearman
from .rewards import reward_swap_mean_distance
from .runner import Sampler, Streams, act_stats, build_target, run_trial
from .tempering import ladder_from_log_diffs

log = logging.getLogger("pgtemper")


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    changes = {}
    if args.out is not None:
        changes["output_dir"] = args.out
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.trials is not None:
        changes["trials"] = args.trials
    if args.threads is not None:
        changes["threads"] = args.threads
    return validate(dataclasses.replace(cfg, **changes))


def _out_dir(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def run_trials(cfg: ExperimentConfig) -> None:
    out = _out_dir(cfg)
    for k in range(cfg.trials):
        seed = cfg.seed + k
        start = time.perf_counter()
        rec = run_trial(cfg, seed, k)
        tdir = out / f"trial_{k}"
        tdir.mkdir(exist_ok=True)
        outputs.write_trace(tdir / "trace.csv", rec.rows, cfg.n_log_diffs, cfg.M)
        outputs.write_json(tdir / "summary.json", rec.summary)
        if rec.cold_logpi is not None and len(rec.cold_logpi):
            outputs.write_nll(tdir / "nll.csv", nll_trace(rec))
        log.info(
            "trial %d seed %d: mean ACT %.4g (%.1fs)",
            k, seed, rec.summary["mean_act"], time.perf_counter() - start,
        )


def random_log_diffs(rng: np.random.Generator, n: int, d_min: float, d_max: float) -> np.ndarray:
    """Each gap log-uniform on ``[d_min, d_max]``."""
    return np.exp(rng.uniform(np.log(d_min), np.log(d_max), size=n))


def correlate(cfg: ExperimentConfig) -> dict:
    """Swap mean-distance vs ACT over random fixed ladders; writes
    ``scatter.csv`` and ``correlate.json``."""
    out = _out_dir(cfg)
    target = build_target(cfg)
    cc = cfg.correlate
    ladder_rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 0]))
    rows, truncated = [], 0
    for lid in range(cc.ladder_count):
        D = random_log_diffs(ladder_rng, cfg.n_log_diffs, cfg.pg.d_min, cfg.pg.d_max)
        ladder = ladder_from_log_diffs(D, cfg.top_mode)
        streams = Streams.from_seed([cfg.seed, 1, lid], cfg.M)
        sampler = Sampler(
            target, ladder, cfg.walkers, cfg.m, streams, cfg.stretch_a, cfg.threads,
            cfg.omega_rejected,
        )
        for _ in range(cc.burn_in):
            sampler.step()
        stats = sampler.begin_window(ladder)
        trace = np.empty((cc.steps, cfg.walkers, target.dim))
        for k in range(cc.steps):
            sampler.step(stats)
            trace[k] = sampler.state.positions[0]
        omega = reward_swap_mean_distance(stats)
        if cc.steps >= 50:
            act, trunc = act_stats(trace, cfg.act_window_c)
        else:
            act, trunc = float("nan"), 0
        truncated += trunc > 0
        rows.append((lid, omega, act, D))
    outputs.write_scatter(out / "scatter.csv", rows)
    oms = np.array([r[1] for r in rows])
    acts = np.array([r[2] for r in rows])
    rho = spearman(oms, acts) if len(rows) >= 3 and not np.isnan(acts).any() else float("nan")
    result = {
        "config_hash": config_hash(cfg),
        "seed": cfg.seed,
        "m": cfg.m,
        "omega_rejected": cfg.omega_rejected,
        "n": len(rows),
        "spearman_rho": rho,
        "ladders_with_truncated_act": int(truncated),
        "steps": cc.steps,
        "burn_in": cc.burn_in,
    }
    outputs.write_json(out / "correlate.json", result)
    return result


def _cmd_run(cfg):
    if cfg.adapter != "policy_gradient":
        raise ConfigError("adapter", "`run` needs adapter policy_gradient; use `baseline`")
    run_trials(cfg)


def _cmd_baseline(cfg):
    if cfg.adapter not in ("geometric", "vousden"):
        raise ConfigError("adapter", "`baseline` needs adapter geometric or vousden")
    run_trials(cfg)


def _cmd_correlate(cfg):
    res = correlate(cfg)
    log.info("spearman rho %.4f over %d ladders", res["spearman_rho"], res["n"])


COMMANDS = {"run": _cmd_run, "baseline": _cmd_baseline, "correlate": _cmd_correlate}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pgtemper", description="Adaptive parallel tempering experiments"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("run", "policy-gradient ladder adaptation, then final sampling"),
        ("baseline", "geometric or Vousden ladder with the same outputs as run"),
        ("correlate", "swap mean-distance vs ACT over random ladders"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("config", help="experiment config (JSON)")
        p.add_argument("--out", help="output directory (overrides output_dir)")
        p.add_argument("--seed", type=int, help="base seed (overrides seed)")
        p.add_argument("--trials", type=int, help="number of trials (overrides trials)")
        p.add_argument("--threads", type=int, help="threads for ensemble sweeps")
        p.add_argument("-q", "--quiet", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(name)s: %(message)s",
    )
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: cannot write outputs: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
