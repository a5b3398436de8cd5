"""Experiment configuration: a single JSON document mapped onto dataclasses."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import typing
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .rewards import OMEGA_REJECTED, REWARD_KINDS

__all__ = [
    "ConfigError",
    "TargetConfig",
    "PGConfig",
    "VousdenConfig",
    "GeometricConfig",
    "ScheduleConfig",
    "CorrelateConfig",
    "ExperimentConfig",
    "load_config",
    "config_from_dict",
    "config_hash",
]

TARGET_KINDS = ("gaussian_mixture", "eggbox", "rosenbrock", "normal")
ADAPTERS = ("policy_gradient", "vousden", "geometric")


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"config key `{key}`: {message}")
        self.key = key


@dataclass
class TargetConfig:
    kind: str = "eggbox"
    dim: Optional[int] = None
    beta_power: Optional[float] = None
    seed: int = 0
    n: int = 10
    scales_are_std: bool = False
    a: float = 4.0
    b: float = 1.0
    c: float = 0.1
    classic_first_term: bool = False


@dataclass
class PGConfig:
    sigma: float = 0.2
    alpha: float = 0.01
    # None means schedule.L / 16
    epsilon_tau: Optional[float] = None
    epsilon_floor: float = 1e-6
    grad_clip: float = 1.0
    buffer_len: int = 500
    d_min: float = 0.01
    d_max: float = 10.0
    theta0: float = 1.0


@dataclass
class VousdenConfig:
    kappa0: float = 1.0
    t0: float = 1000.0


@dataclass
class GeometricConfig:
    # None means exp(-pg.theta0 * (M - 1)), the policy's starting ladder
    beta_min: Optional[float] = None


@dataclass
class ScheduleConfig:
    L: int = 4000
    N: int = 500
    final_samples: int = 10000


@dataclass
class CorrelateConfig:
    ladder_count: int = 1000
    steps: int = 1000
    burn_in: int = 0


@dataclass
class ExperimentConfig:
    target: TargetConfig = field(default_factory=TargetConfig)
    adapter: str = "policy_gradient"
    reward: str = "swap_mean_distance"
    M: int = 15
    walkers: int = 16
    top_mode: str = "finite"
    m: int = 50
    omega_rejected: str = "zero"
    stretch_a: float = 2.0
    act_window_c: float = 5.0
    schedule: ScheduleConfig = field(default_factory=ScheduleConfig)
    pg: PGConfig = field(default_factory=PGConfig)
    vousden: VousdenConfig = field(default_factory=VousdenConfig)
    geometric: GeometricConfig = field(default_factory=GeometricConfig)
    correlate: CorrelateConfig = field(default_factory=CorrelateConfig)
    trials: int = 10
    seed: int = 0
    output_dir: str = "out"
    thinning: int = 100
    threads: int = 1

    @property
    def n_log_diffs(self) -> int:
        return self.M - 1 if self.top_mode == "finite" else self.M - 2

    @property
    def epsilon_tau(self) -> float:
        if self.pg.epsilon_tau is not None:
            return self.pg.epsilon_tau
        return max(self.schedule.L / 16.0, 1.0)

    @property
    def geometric_beta_min(self) -> float:
        if self.geometric.beta_min is not None:
            return self.geometric.beta_min
        return math.exp(-self.pg.theta0 * (self.M - 1))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _coerce(value, tp, key):
    origin = typing.get_origin(tp)
    if origin is typing.Union:
        args = [a for a in typing.get_args(tp) if a is not type(None)]
        if value is None:
            return None
        return _coerce(value, args[0], key)
    if tp is bool:
        if not isinstance(value, bool):
            raise ConfigError(key, f"expected true/false, got {value!r}")
        return value
    if tp is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(key, f"expected an integer, got {value!r}")
        return value
    if tp is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(key, f"expected a number, got {value!r}")
        return float(value)
    if tp is str:
        if not isinstance(value, str):
            raise ConfigError(key, f"expected a string, got {value!r}")
        return value
    if dataclasses.is_dataclass(tp):
        return _build(tp, value, key)
    raise TypeError(f"unsupported config type {tp}")


def _build(cls, data, prefix=""):
    if not isinstance(data, dict):
        raise ConfigError(prefix or "<root>", "expected a JSON object")
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    for k in data:
        if k not in names:
            raise ConfigError(f"{prefix}.{k}" if prefix else k, "unknown key")
    kwargs = {}
    for name in names:
        if name in data:
            key = f"{prefix}.{name}" if prefix else name
            kwargs[name] = _coerce(data[name], hints[name], key)
    return cls(**kwargs)


def _check(cond, key, message):
    if not cond:
        raise ConfigError(key, message)


def validate(cfg: ExperimentConfig) -> ExperimentConfig:
    t = cfg.target
    _check(t.kind in TARGET_KINDS, "target.kind", f"must be one of {TARGET_KINDS}")
    _check(t.dim is None or t.dim >= 1, "target.dim", "must be positive")
    _check(t.beta_power is None or t.beta_power > 0, "target.beta_power", "must be positive")
    _check(t.n >= 1, "target.n", "must be positive")
    _check(t.c > 0, "target.c", "must be positive")
    if t.kind == "rosenbrock":
        _check(t.dim in (None, 2), "target.dim", "Rosenbrock is two-dimensional")
    _check(cfg.adapter in ADAPTERS, "adapter", f"must be one of {ADAPTERS}")
    _check(cfg.reward in REWARD_KINDS, "reward", f"must be one of {REWARD_KINDS}")
    _check(cfg.top_mode in ("finite", "infinite"), "top_mode", "must be finite or infinite")
    _check(cfg.M >= 2, "M", "need at least 2 temperatures")
    _check(cfg.top_mode == "finite" or cfg.M >= 3, "M", "infinite top mode needs M >= 3")
    _check(cfg.walkers >= 2, "walkers", "need at least 2 walkers per ensemble")
    _check(cfg.m >= 1, "m", "must be positive")
    _check(cfg.omega_rejected in OMEGA_REJECTED, "omega_rejected", f"must be one of {OMEGA_REJECTED}")
    _check(cfg.stretch_a > 1, "stretch_a", "must exceed 1")
    _check(cfg.act_window_c > 0, "act_window_c", "must be positive")
    s = cfg.schedule
    _check(s.L >= 0, "schedule.L", "must be nonnegative")
    _check(s.N >= 1, "schedule.N", "must be at least 1")
    _check(s.final_samples >= 0, "schedule.final_samples", "must be nonnegative")
    p = cfg.pg
    _check(p.sigma > 0, "pg.sigma", "must be positive")
    _check(p.alpha > 0, "pg.alpha", "must be positive")
    _check(p.epsilon_tau is None or p.epsilon_tau > 0, "pg.epsilon_tau", "must be positive")
    _check(0 <= p.epsilon_floor <= 1, "pg.epsilon_floor", "must lie in [0, 1]")
    _check(p.grad_clip > 0, "pg.grad_clip", "must be positive")
    _check(p.buffer_len >= 1, "pg.buffer_len", "must be positive")
    _check(0 < p.d_min < p.d_max, "pg.d_min", "need 0 < d_min < d_max")
    _check(p.d_min <= p.theta0 <= p.d_max, "pg.theta0", "must lie in [d_min, d_max]")
    _check(cfg.vousden.kappa0 > 0, "vousden.kappa0", "must be positive")
    _check(cfg.vousden.t0 > 0, "vousden.t0", "must be positive")
    bm = cfg.geometric.beta_min
    _check(bm is None or 0 < bm < 1, "geometric.beta_min", "must lie in (0, 1)")
    c = cfg.correlate
    _check(c.ladder_count >= 1, "correlate.ladder_count", "must be at least 1")
    _check(c.steps >= 1, "correlate.steps", "must be at least 1")
    _check(c.burn_in >= 0, "correlate.burn_in", "must be nonnegative")
    _check(cfg.trials >= 1, "trials", "must be at least 1")
    _check(cfg.seed >= 0, "seed", "must be nonnegative")
    _check(cfg.thinning >= 1, "thinning", "must be at least 1")
    _check(cfg.threads >= 1, "threads", "must be at least 1")
    return cfg


def config_from_dict(data: dict) -> ExperimentConfig:
    return validate(_build(ExperimentConfig, data))


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON: {exc}") from exc
    return config_from_dict(data)


def config_hash(cfg: ExperimentConfig) -> str:
    """Hash of everything that defines an experiment except seed, trial count,
    output location and thread count."""
    d = cfg.to_dict()
    for k in ("seed", "trials", "output_dir", "threads"):
        d.pop(k)
    blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]
