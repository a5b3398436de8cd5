"""Benchmark target distributions, evaluated in log-density space.

Every target exposes ``log_density(x)`` for a single point and
``log_density_batch(xs)`` for an array of points with the coordinate axis
last. Points outside the bounded domain get ``-inf``.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "BoundedDomain",
    "TargetDistribution",
    "GaussianMixture",
    "EggBox",
    "Rosenbrock",
    "StandardNormal",
    "make_gaussian_mixture",
    "uniform_init",
]


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class BoundedDomain:
    """Axis-aligned box ``lower <= x <= upper``."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = _frozen(np.atleast_1d(self.lower))
        upper = _frozen(np.atleast_1d(self.upper))
        if lower.ndim != 1 or lower.shape != upper.shape or lower.size == 0:
            raise ValueError("lower and upper must be non-empty vectors of equal length")
        if not np.all(lower < upper):
            raise ValueError("domain requires lower[k] < upper[k] for every k")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def cube(cls, dim: int, lo: float, hi: float) -> "BoundedDomain":
        return cls(np.full(dim, lo), np.full(dim, hi))

    @property
    def dim(self) -> int:
        return self.lower.size

    def contains(self, xs: np.ndarray) -> np.ndarray:
        return np.all((xs >= self.lower) & (xs <= self.upper), axis=-1)


class TargetDistribution(ABC):
    """Unnormalized density on a bounded box.

    Subclasses implement ``_log_density_inside`` for arrays of shape
    ``(..., dim)``; domain masking and dimension checks live here.
    Instances are immutable and safe to share between threads.
    """

    domain: BoundedDomain

    @property
    def dim(self) -> int:
        return self.domain.dim

    @abstractmethod
    def _log_density_inside(self, xs: np.ndarray) -> np.ndarray:
        ...

    def log_density_batch(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if xs.shape[-1:] != (self.dim,):
            raise ValueError(
                f"expected points with {self.dim} coordinates, got shape {xs.shape}"
            )
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.log_density_unchecked(xs)

    def log_density_unchecked(self, xs: np.ndarray) -> np.ndarray:
        """Masked log-density without shape checks or error-state handling;
        for inner loops that already validated their inputs."""
        inside = ((xs >= self.domain.lower) & (xs <= self.domain.upper)).all(axis=-1)
        return np.where(inside, self._log_density_inside(xs), -np.inf)

    def log_density(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.ndim != 1:
            raise ValueError("log_density takes a single point; use log_density_batch")
        return float(self.log_density_batch(x))


@dataclass(frozen=True, eq=False)
class GaussianMixture(TargetDistribution):
    """Isotropic Gaussian mixture ``sum_i w_i N(x | mu_i, s_i I)``.

    By default ``scales`` are per-component variances; with
    ``scales_are_std=True`` they are standard deviations.
    """

    weights: np.ndarray
    means: np.ndarray
    scales: np.ndarray
    domain: BoundedDomain
    scales_are_std: bool = False
    _log_w: np.ndarray = field(init=False, repr=False)
    _var: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        w = _frozen(self.weights)
        mu = _frozen(np.atleast_2d(self.means))
        s = _frozen(self.scales)
        if w.ndim != 1 or w.size < 1:
            raise ValueError("need at least one mixture component")
        if mu.shape != (w.size, self.domain.dim) or s.shape != (w.size,):
            raise ValueError("weights, means and scales disagree on component count or dim")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be nonnegative and sum to 1")
        if np.any(s <= 0):
            raise ValueError("component scales must be positive")
        var = s**2 if self.scales_are_std else s
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", mu)
        object.__setattr__(self, "scales", s)
        with np.errstate(divide="ignore"):
            object.__setattr__(self, "_log_w", _frozen(np.log(w)))
        object.__setattr__(self, "_var", _frozen(var))

    def _log_density_inside(self, xs):
        d = self.domain.dim
        diff = xs[..., None, :] - self.means
        sq = np.sum(diff * diff, axis=-1)
        comp = self._log_w - 0.5 * d * np.log(2.0 * np.pi * self._var) - 0.5 * sq / self._var
        top = np.max(comp, axis=-1)
        safe = np.where(np.isfinite(top), top, 0.0)
        return safe + np.log(np.sum(np.exp(comp - safe[..., None]), axis=-1))


@dataclass(frozen=True, eq=False)
class EggBox(TargetDistribution):
    """``(0.5 * prod(cos x_k) + 0.5) ** beta_power`` on ``[-3pi/2, 3pi/2]^dim``."""

    dim_: int = 5
    beta_power: float = 1000.0
    domain: BoundedDomain = None

    def __post_init__(self):
        if self.dim_ < 1:
            raise ValueError("egg-box dimension must be positive")
        if not self.beta_power > 0:
            raise ValueError("beta_power must be positive")
        if self.domain is None:
            half = 1.5 * math.pi
            object.__setattr__(self, "domain", BoundedDomain.cube(self.dim_, -half, half))
        elif self.domain.dim != self.dim_:
            raise ValueError("domain dimension does not match egg-box dimension")

    def _log_density_inside(self, xs):
        return self.beta_power * np.log(0.5 * np.prod(np.cos(xs), axis=-1) + 0.5)


@dataclass(frozen=True, eq=False)
class Rosenbrock(TargetDistribution):
    """Two-mode Rosenbrock density
    ``(1/(c + f(x, y)) + 1/(c + f(-x, y))) ** beta_power``.

    ``f(x, y) = (a - x^2)^2 + b (y - x^2)^2`` as printed; with
    ``classic_first_term=True`` the first term is ``(a - x)^2``.
    """

    a: float = 4.0
    b: float = 1.0
    c: float = 0.1
    beta_power: float = 1000.0
    classic_first_term: bool = False
    domain: BoundedDomain = None

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and self.c > 0 and self.beta_power > 0):
            raise ValueError("Rosenbrock a, b, c and beta_power must be positive")
        if self.domain is None:
            object.__setattr__(self, "domain", BoundedDomain.cube(2, -6.0, 6.0))
        elif self.domain.dim != 2:
            raise ValueError("Rosenbrock target is two-dimensional")

    def _f(self, x, y):
        first = (self.a - x) ** 2 if self.classic_first_term else (self.a - x * x) ** 2
        return first + self.b * (y - x * x) ** 2

    def _log_density_inside(self, xs):
        x, y = xs[..., 0], xs[..., 1]
        inner = 1.0 / (self.c + self._f(x, y)) + 1.0 / (self.c + self._f(-x, y))
        return self.beta_power * np.log(inner)


@dataclass(frozen=True, eq=False)
class StandardNormal(TargetDistribution):
    """Standard normal on a wide box; used to check the base sampler."""

    dim_: int = 1
    half_width: float = 50.0
    domain: BoundedDomain = None

    def __post_init__(self):
        if self.domain is None:
            object.__setattr__(
                self, "domain", BoundedDomain.cube(self.dim_, -self.half_width, self.half_width)
            )

    def _log_density_inside(self, xs):
        return -0.5 * (xs * xs).sum(axis=-1) - 0.5 * self.dim_ * math.log(2 * math.pi)


def make_gaussian_mixture(
    seed: int, n: int = 10, dim: int = 8, scales_are_std: bool = False
) -> GaussianMixture:
    """Random mixture: means ~ U[-1, 1]^dim, scales ~ U[0.01, 0.3], equal weights,
    domain ``[-2, 2]^dim``. Deterministic in ``seed``."""
    if n < 1 or dim < 1:
        raise ValueError("n and dim must be at least 1")
    rng = np.random.default_rng(seed)
    means = rng.uniform(-1.0, 1.0, size=(n, dim))
    scales = rng.uniform(0.01, 0.3, size=n)
    return GaussianMixture(
        weights=np.full(n, 1.0 / n),
        means=means,
        scales=scales,
        domain=BoundedDomain.cube(dim, -2.0, 2.0),
        scales_are_std=scales_are_std,
    )


def uniform_init(domain: BoundedDomain, count, rng: np.random.Generator) -> np.ndarray:
    """Draw i.i.d. uniform points in the box.

    ``count`` may be an int or a shape tuple; the result has shape
    ``(*count, dim)``.
    """
    shape = (count,) if np.isscalar(count) else tuple(count)
    if any(s < 1 for s in shape):
        raise ValueError("count must be at least 1")
    return rng.uniform(domain.lower, domain.upper, size=shape + (domain.dim,))
