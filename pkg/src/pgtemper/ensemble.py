"""Affine-invariant ensemble sampler (stretch move) on a tempered density.

The tempered density at inverse temperature ``beta`` is ``pi(x) ** beta``.
Walkers inside one ensemble are updated in sequence, so a walker may pair
with a partner that has already moved during the same sweep.

All random numbers for one sweep are drawn up front from the ensemble's
own generator (:func:`draw_sweep_randomness`). The update itself
(:func:`sweep_core`) is deterministic and vectorized across ensembles,
which keeps results independent of how ensembles are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .targets import TargetDistribution

__all__ = [
    "Ensemble",
    "StretchConfig",
    "SweepDraws",
    "draw_stretch_z",
    "draw_sweep_randomness",
    "stretch_sweep",
    "sweep_core",
    "tempered_log_ratio",
]


@dataclass(frozen=True)
class StretchConfig:
    a: float = 2.0

    def __post_init__(self):
        if not self.a > 1:
            raise ValueError(f"stretch parameter a must exceed 1, got {self.a}")


@dataclass
class Ensemble:
    """Walker positions ``(walkers, dim)`` and their untempered log-densities."""

    positions: np.ndarray
    cached_logpi: np.ndarray

    def __post_init__(self):
        if self.positions.ndim != 2 or self.cached_logpi.shape != self.positions.shape[:1]:
            raise ValueError("positions must be (walkers, dim) with one cached value per walker")

    @classmethod
    def from_positions(cls, positions, target: TargetDistribution) -> "Ensemble":
        positions = np.array(positions, dtype=float)
        return cls(positions, target.log_density_batch(positions))

    @property
    def walkers(self) -> int:
        return self.positions.shape[0]

    @property
    def dim(self) -> int:
        return self.positions.shape[1]


def draw_stretch_z(a: float, u):
    """Inverse-CDF sample of ``g(z) ~ 1/sqrt(z)`` on ``[1/a, a]`` from uniform ``u``."""
    if not a > 1:
        raise ValueError(f"stretch parameter a must exceed 1, got {a}")
    lo = 1.0 / math.sqrt(a)
    return (lo + np.asarray(u) * (math.sqrt(a) - lo)) ** 2


@dataclass
class SweepDraws:
    """Pre-drawn randomness for one sweep: partner index, stretch factor and
    log-uniform threshold per walker. Arrays share a leading shape."""

    partners: np.ndarray
    z: np.ndarray
    log_u: np.ndarray

    @classmethod
    def from_uniforms(cls, u: np.ndarray, a: float) -> "SweepDraws":
        """Map uniforms of shape ``(..., 3, walkers)`` to sweep draws.

        Row 0 picks a partner uniformly among the other walkers, row 1 is
        the stretch factor's inverse-CDF variate, row 2 the accept threshold.
        """
        walkers = u.shape[-1]
        partners = (u[..., 0, :] * (walkers - 1)).astype(np.int64)
        partners += partners >= np.arange(walkers)
        with np.errstate(divide="ignore"):
            log_u = np.log(u[..., 2, :])
        return cls(partners, draw_stretch_z(a, u[..., 1, :]), log_u)


def draw_sweep_randomness(rng: np.random.Generator, walkers: int, a: float) -> SweepDraws:
    if walkers < 2:
        raise ValueError("stretch move needs at least 2 walkers")
    return SweepDraws.from_uniforms(rng.random((3, walkers)), a)


def tempered_log_ratio(beta, logpi_new, logpi_old):
    """``beta * (logpi_new - logpi_old)`` with out-of-domain proposals rejected.

    A ``-inf`` proposal gives ``-inf`` at every beta, including 0. At
    ``beta == 0`` any finite proposal gives 0.
    """
    beta = np.asarray(beta, dtype=float)
    with np.errstate(invalid="ignore"):
        diff = np.asarray(logpi_new) - np.asarray(logpi_old)
        out = np.where(beta == 0, 0.0, beta * diff)
    return np.where(np.isneginf(logpi_new), -np.inf, out)


def sweep_core(positions, logpi, betas, draws: SweepDraws, target: TargetDistribution):
    """Run one sequential sweep on a stack of ensembles, in place.

    positions : (E, W, d), logpi : (E, W), betas : (E,), draws arrays : (E, W).
    Returns per-ensemble accept counts.
    """
    n_ens, walkers, dim = positions.shape
    rows = np.arange(n_ens)
    accepted = np.zeros((walkers, n_ens), dtype=bool)
    betas = np.asarray(betas, dtype=float)
    hot_zero = bool(np.any(betas == 0))
    # walker-major copies so each iteration reads contiguous rows
    partners = np.ascontiguousarray(draws.partners.T)
    z = np.ascontiguousarray(draws.z.T)[..., None]
    # accept iff beta * delta_logpi > log u - (d - 1) log z
    threshold = draws.log_u.T - np.log(draws.z.T) * (dim - 1)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for i in range(walkers):
            x_i = positions[:, i, :]
            x_j = positions[rows, partners[i], :]
            proposal = x_j + z[i] * (x_i - x_j)
            lp_new = target.log_density_unchecked(proposal)
            if hot_zero:
                delta = tempered_log_ratio(betas, lp_new, logpi[:, i])
            else:
                # nan (both -inf) compares False, so it rejects
                delta = betas * (lp_new - logpi[:, i])
            accept = np.greater(delta, threshold[i], out=accepted[i])
            np.copyto(x_i, proposal, where=accept[:, None])
            np.copyto(logpi[:, i], lp_new, where=accept)
    return accepted.sum(axis=0)


def stretch_sweep(
    ensemble: Ensemble,
    target: TargetDistribution,
    beta: float,
    cfg: StretchConfig,
    rng: np.random.Generator,
) -> int:
    """Update every walker once with a stretch move; mutates ``ensemble``.

    Returns the number of accepted proposals.
    """
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    draws = draw_sweep_randomness(rng, ensemble.walkers, cfg.a)
    stacked = SweepDraws(draws.partners[None], draws.z[None], draws.log_u[None])
    pos = ensemble.positions[None]
    lp = ensemble.cached_logpi[None]
    accepts = sweep_core(pos, lp, np.array([beta]), stacked, target)
    return int(accepts[0])
