"""Autocorrelation time, rank correlation and log-likelihood traces."""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "ShortChainError",
    "autocorr",
    "autocorr_function",
    "integrated_act",
    "mean_act",
    "spearman",
    "rank_average",
    "nll_trace",
]


class ShortChainError(ValueError):
    """No self-consistent window exists within half the chain length."""


def _centered(series) -> np.ndarray:
    x = np.asarray(series, dtype=float).reshape(-1)
    if x.size < 2:
        raise ValueError("series needs at least 2 values")
    x = x - x.mean()
    if not np.any(x):
        raise ValueError("series has zero variance")
    return x


def autocorr_function(series, max_lag: int | None = None) -> np.ndarray:
    """Biased-normalization autocorrelation ``rho(0..max_lag)`` via FFT."""
    x = _centered(series)
    n = x.size
    if max_lag is None:
        max_lag = n - 1
    nfft = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(x, nfft)
    acov = np.fft.irfft(f * np.conj(f), nfft)[: max_lag + 1]
    return acov / acov[0]


def autocorr(series, lag: int) -> float:
    """``c(lag) / c(0)`` with ``c(k) = (1/n) sum (x_t - mean)(x_{t+k} - mean)``."""
    x = _centered(series)
    if not 0 <= lag < x.size:
        raise ValueError(f"lag must lie in [0, {x.size})")
    return float(np.dot(x[: x.size - lag], x[lag:]) / np.dot(x, x))


def integrated_act(series, window_c: float = 5.0, strict: bool = True) -> float:
    """Integrated autocorrelation time with a self-consistent window.

    ``tau(W) = 1 + 2 * sum_{k=1..W} rho(k)``, using the smallest ``W`` with
    ``W >= window_c * tau(W)``; the result is floored at 1.

    Parameters
    ----------
    series : array_like
        Scalar chain of length at least 50.
    window_c : float
        Window multiplier.
    strict : bool
        If no window is found before half the chain length, raise
        :class:`ShortChainError`. Otherwise return the estimate at that
        largest window (a lower bound) and treat a constant series as
        ``inf``.
    """
    x = np.asarray(series, dtype=float).reshape(-1)
    if x.size < 50:
        raise ValueError("integrated_act needs at least 50 samples")
    if not strict and np.all(x == x[0]):
        return math.inf
    max_w = x.size // 2
    rho = autocorr_function(x, max_w)
    taus = 1.0 + 2.0 * np.cumsum(rho[1:])
    lags = np.arange(1, max_w + 1)
    ok = np.flatnonzero(lags >= window_c * taus)
    if ok.size:
        tau = taus[ok[0]]
    elif strict:
        raise ShortChainError(
            f"no self-consistent window below lag {max_w}; chain too short"
        )
    else:
        tau = taus[-1]
    return max(float(tau), 1.0)


def mean_act(positions_trace, window_c: float = 5.0, strict: bool = True) -> float:
    """Average ACT over every (walker, coordinate) series.

    ``positions_trace`` has shape ``(steps, walkers, dim)``.
    """
    trace = np.asarray(positions_trace, dtype=float)
    if trace.ndim != 3:
        raise ValueError("positions_trace must be (steps, walkers, dim)")
    taus = []
    for w in range(trace.shape[1]):
        for k in range(trace.shape[2]):
            try:
                taus.append(integrated_act(trace[:, w, k], window_c, strict))
            except ValueError as exc:
                raise type(exc)(f"walker {w}, coordinate {k}: {exc}") from exc
    return float(np.mean(taus))


def rank_average(values) -> np.ndarray:
    """1-based ranks with ties replaced by their mean rank."""
    v = np.asarray(values, dtype=float)
    order = np.argsort(v, kind="mergesort")
    sorted_v = v[order]
    ranks = np.empty(v.size)
    start = 0
    while start < v.size:
        stop = start + 1
        while stop < v.size and sorted_v[stop] == sorted_v[start]:
            stop += 1
        ranks[order[start:stop]] = 0.5 * (start + stop - 1) + 1.0
        start = stop
    return ranks


def spearman(xs, ys) -> float:
    """Pearson correlation of mid-ranks."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1 or xs.size < 3:
        raise ValueError("spearman needs two equal-length vectors of length >= 3")
    rx = rank_average(xs) - (xs.size + 1) / 2
    ry = rank_average(ys) - (ys.size + 1) / 2
    denom = math.sqrt(float(np.dot(rx, rx)) * float(np.dot(ry, ry)))
    if denom == 0:
        raise ValueError("zero rank variance")
    return float(np.dot(rx, ry) / denom)


def nll_trace(run) -> np.ndarray:
    """Per-step mean of ``-log pi`` over the cold walkers of a run's sampling phase."""
    return -np.mean(run.cold_logpi, axis=1)
