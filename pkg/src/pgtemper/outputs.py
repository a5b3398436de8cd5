"""CSV and JSON writers/readers for run outputs."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .runner import IterationRow

__all__ = [
    "trace_columns",
    "write_trace",
    "read_trace",
    "write_json",
    "write_nll",
    "write_scatter",
    "read_scatter",
]


def _fmt(v) -> str:
    return repr(float(v))


def trace_columns(n_D: int, M: int) -> list[str]:
    return (
        ["t", "epsilon", "reward", "advantage"]
        + [f"D_{i}" for i in range(1, n_D + 1)]
        + [f"beta_{i}" for i in range(1, M + 1)]
        + [f"rate_{i}" for i in range(1, M)]
    )


def write_trace(path, rows: list[IterationRow], n_D: int, M: int) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(trace_columns(n_D, M))
        for r in rows:
            w.writerow(
                [str(r.t), _fmt(r.epsilon), _fmt(r.reward), _fmt(r.advantage)]
                + [_fmt(v) for v in r.D]
                + [_fmt(v) for v in r.betas]
                + [_fmt(v) for v in r.rates]
            )


def read_trace(path) -> list[IterationRow]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        n_D = sum(c.startswith("D_") for c in header)
        M = sum(c.startswith("beta_") for c in header)
        rows = []
        for rec in reader:
            vals = [float(v) for v in rec[1:]]
            i = 3
            D = np.array(vals[i : i + n_D])
            betas = np.array(vals[i + n_D : i + n_D + M])
            rates = np.array(vals[i + n_D + M :])
            rows.append(IterationRow(int(rec[0]), vals[0], vals[1], vals[2], D, betas, rates))
    return rows


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def write_json(path, data: dict) -> None:
    """Sorted-key JSON; non-finite floats become null."""
    Path(path).write_text(json.dumps(_clean(data), indent=2, sort_keys=True) + "\n")


def write_nll(path, nll: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "nll"])
        for k, v in enumerate(nll, start=1):
            w.writerow([str(k), _fmt(v)])


def write_scatter(path, rows: list[tuple]) -> None:
    """``rows`` are ``(ladder_id, omega_mean, act_mean, D)``."""
    n_D = len(rows[0][3]) if rows else 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["ladder_id", "omega_mean", "act_mean"] + [f"D_{i}" for i in range(1, n_D + 1)])
        for lid, om, act, D in rows:
            w.writerow([str(lid), _fmt(om), _fmt(act)] + [_fmt(v) for v in D])


def read_scatter(path) -> list[tuple]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        return [
            (int(r[0]), float(r[1]), float(r[2]), np.array([float(v) for v in r[3:]]))
            for r in reader
        ]
